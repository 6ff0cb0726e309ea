use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use stackres::job::JobSpec;
use stackres::pipeline::run_job;
use stackres::report::{emit_report_json, emit_report_latex, ResolutionReport};

/// Resolve a rational map A^2 -> P(w1, w2) by blow-ups and root stacks.
#[derive(Parser)]
#[command(name = "resolve", version)]
struct Cli {
    /// Job file (TOML).
    job: PathBuf,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write LaTeX tables here.
    #[arg(long)]
    latex: Option<PathBuf>,
    /// Override the job's blow-up budget.
    #[arg(long)]
    max_steps: Option<usize>,
    /// Progress and a summary on stderr.
    #[arg(long)]
    verbose: bool,
}

fn write(report: &ResolutionReport, cli: &Cli, formats: &[String]) -> Result<(), String> {
    let json = emit_report_json(report);
    if let Some(p) = &cli.out {
        std::fs::write(p, &json).map_err(|e| format!("{}: {e}", p.display()))?;
    }
    if let Some(p) = &cli.latex {
        std::fs::write(p, emit_report_latex(report)).map_err(|e| format!("{}: {e}", p.display()))?;
    }
    if cli.out.is_none() && cli.latex.is_none() {
        if formats.iter().any(|f| f == "json") {
            print!("{}", String::from_utf8_lossy(&json));
        }
        if formats.iter().any(|f| f == "latex") {
            print!("{}", emit_report_latex(report));
        }
    }
    Ok(())
}

fn summary(r: &ResolutionReport) {
    eprintln!("blow-ups: {}", r.blowup_count);
    for c in &r.centers {
        eprintln!("  {} at {} in {} ({})", c.exceptional, c.point, c.chart, c.stage);
    }
    for e in &r.root_indices {
        eprintln!("  {}: orders {:?} -> r = {}, m = {}", e.result.divisor, e.result.orders, e.result.r, e.result.m);
    }
    for c in r.crossings.iter().filter(|c| c.stabilizer.is_some()) {
        eprintln!(
            "  {} x {} at {} in {}: representable = {}",
            c.divisors[0], c.divisors[1], c.point, c.chart, c.representable
        );
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut job = match JobSpec::load(&cli.job) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.max_steps {
        job.max_steps = n;
    }
    let formats = job.formats.clone();
    let (report, code) = match run_job(&job) {
        Ok(r) => (r, 0),
        Err(e) => {
            eprintln!("error: {e}");
            let code = if e.is_internal() { 1 } else { 2 };
            (*e.partial, code)
        }
    };
    if cli.verbose {
        summary(&report);
        eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    }
    if let Err(e) = write(&report, &cli, &formats) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
