//! The resolution report: schema, JSON and LaTeX output, and re-verification
//! of a reloaded report from its recorded strings alone.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::algebra::{squarefree_part, vanishing_order, MultiPoly};
use crate::job::JobSpec;
use crate::parser::parse_polynomial;
use crate::root_index::{minimal_root_index, RootIndexResult};
use crate::snc::SncReport;
use crate::stack::{generated_subgroup, kernel_brute_force, CyclicHom};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Resolved,
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// Bad input, non-rational centers, exhausted budget.
    Explicit,
    /// A violated internal invariant.
    Internal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub stage: String,
    pub kind: ErrorKind,
    pub code: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetInfo {
    pub weights: Vec<u32>,
    pub generic_stabilizer: u32,
    pub coordinate_stabilizers: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoarseInfo {
    /// `(c0, c1) = change * (s1^(L/w1), s2^(L/w2))`
    pub change: [[i64; 2]; 2],
    pub lcm: u32,
    pub pair: [String; 2],
    pub labels: [String; 2],
    pub fixed_divisor: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartInfo {
    pub name: String,
    pub vars: [String; 2],
    pub parent: Option<String>,
    pub blowup: Option<usize>,
    /// Parent coordinates in this chart's coordinates.
    pub substitution: Option<[String; 2]>,
    pub to_root: [String; 2],
    pub leaf: bool,
    pub punctures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenterInfo {
    pub step: usize,
    pub stage: String,
    pub chart: String,
    pub point: String,
    pub root_point: String,
    pub exceptional: String,
    pub children: [String; 2],
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub chart: String,
    /// `None` where the divisor misses the chart.
    pub cells: Vec<Option<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepTable {
    pub step: usize,
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
}

impl StepTable {
    pub fn cell(&self, chart: &str, column: &str) -> Option<&str> {
        let c = self.columns.iter().position(|x| x == column)?;
        self.rows
            .iter()
            .find(|r| r.chart == chart)?
            .cells
            .get(c)?
            .as_deref()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityInfo {
    pub step: usize,
    pub divisor: String,
    pub multiplicity: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MobileRow {
    pub chart: String,
    pub pair: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PullbackRow {
    pub chart: String,
    pub sections: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartOrders {
    pub chart: String,
    pub orders: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootIndexEntry {
    #[serde(flatten)]
    pub result: RootIndexResult,
    pub per_chart: Vec<ChartOrders>,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RescaledInfo {
    pub divisor: String,
    pub chart: String,
    pub root_var: String,
    pub index: u32,
    pub relation: String,
    pub sections: Vec<String>,
    pub display: Vec<String>,
    pub presentation_form: bool,
    pub unit_sections: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationInfo {
    pub root_vars: Vec<String>,
    pub base_equations: Vec<String>,
    pub group: Vec<u32>,
    pub relations: Vec<String>,
    pub regular: bool,
    pub cotangent_basis: Vec<String>,
    pub tame: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerInfo {
    pub source: Vec<u32>,
    pub target: u32,
    pub exponents: Vec<u32>,
    pub tau: String,
    pub rescaled: Vec<String>,
    pub unit_sections: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelInfo {
    pub generators: Vec<Vec<u32>>,
    pub invariant_factors: Vec<u32>,
    pub order: u64,
    pub image_order: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorInfo {
    pub name: String,
    pub monomial: String,
    pub degree: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoarseSpaceInfo {
    pub generators: Vec<GeneratorInfo>,
    pub relations: Vec<String>,
    pub identifications: Vec<String>,
    pub degree_bound: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingInfo {
    pub chart: String,
    pub point: String,
    pub divisors: [String; 2],
    pub indices: [u32; 2],
    pub presentation: Option<PresentationInfo>,
    pub stabilizer: Option<StabilizerInfo>,
    pub kernel: Option<KernelInfo>,
    pub representable: bool,
    pub relative_coarse: Option<CoarseSpaceInfo>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitCertificate {
    pub crossing_points: usize,
    pub random_points: usize,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionReport {
    pub schema_version: u32,
    pub status: Status,
    pub error: Option<ErrorInfo>,
    pub job: Option<JobSpec>,
    pub target: Option<TargetInfo>,
    pub coarse: Option<CoarseInfo>,
    pub atlas: Vec<ChartInfo>,
    pub centers: Vec<CenterInfo>,
    pub blowup_count: usize,
    pub tables: Vec<StepTable>,
    pub multiplicities: Vec<MultiplicityInfo>,
    pub transform_checks: usize,
    pub transition_checks: usize,
    pub mobile_pairs: Vec<MobileRow>,
    pub snc: Option<SncReport>,
    pub pullbacks: Vec<PullbackRow>,
    pub root_indices: Vec<RootIndexEntry>,
    pub rescaled: Vec<RescaledInfo>,
    pub crossings: Vec<CrossingInfo>,
    pub unit_certificate: Option<UnitCertificate>,
    pub representable: Option<bool>,
}

impl ResolutionReport {
    pub fn empty() -> Self {
        ResolutionReport {
            schema_version: SCHEMA_VERSION,
            status: Status::Error,
            error: None,
            job: None,
            target: None,
            coarse: None,
            atlas: Vec::new(),
            centers: Vec::new(),
            blowup_count: 0,
            tables: Vec::new(),
            multiplicities: Vec::new(),
            transform_checks: 0,
            transition_checks: 0,
            mobile_pairs: Vec::new(),
            snc: None,
            pullbacks: Vec::new(),
            root_indices: Vec::new(),
            rescaled: Vec::new(),
            crossings: Vec::new(),
            unit_certificate: None,
            representable: None,
        }
    }

    pub fn final_table(&self) -> Option<&StepTable> {
        self.tables.last()
    }

    pub fn root_index(&self, divisor: &str) -> Option<&RootIndexResult> {
        self.root_indices
            .iter()
            .map(|e| &e.result)
            .find(|r| r.divisor == divisor)
    }

    pub fn crossing(&self, a: &str, b: &str) -> Option<&CrossingInfo> {
        self.crossings.iter().find(|c| {
            (c.divisors[0] == a && c.divisors[1] == b) || (c.divisors[0] == b && c.divisors[1] == a)
        })
    }

    pub fn rescaled_in(&self, divisor: &str, chart: &str) -> Option<&RescaledInfo> {
        self.rescaled
            .iter()
            .find(|r| r.divisor == divisor && r.chart == chart)
    }
}

/// Deterministic JSON: keys sorted, two-space indentation, trailing newline.
pub fn emit_report_json(report: &ResolutionReport) -> Vec<u8> {
    // going through Value sorts every map by key
    let value = serde_json::to_value(report).expect("report serializes");
    let mut out = serde_json::to_vec_pretty(&value).expect("value serializes");
    out.push(b'\n');
    out
}

pub fn load_report_json(bytes: &[u8]) -> Result<ResolutionReport, serde_json::Error> {
    serde_json::from_slice(bytes)
}

/// `C0'''` as `C_0'''`, `E12'` as `E_{12}'`.
fn latex_label(label: &str) -> String {
    let primes = label.chars().rev().take_while(|&c| c == '\'').count();
    let base = &label[..label.len() - primes];
    let split = base
        .char_indices()
        .find(|(_, c)| c.is_ascii_digit())
        .map_or(base.len(), |(i, _)| i);
    let (name, sub) = base.split_at(split);
    let sub = match sub.len() {
        0 => String::new(),
        1 => format!("_{sub}"),
        _ => format!("_{{{sub}}}"),
    };
    format!("{name}{sub}{}", "'".repeat(primes))
}

/// Math-mode form of a printed polynomial.
fn latex_poly(text: &str) -> String {
    let mut out = String::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '*' => out.push_str(r"\cdot "),
            '^' => {
                let mut exp = String::new();
                if chars.peek() == Some(&'(') {
                    chars.next();
                    for d in chars.by_ref() {
                        if d == ')' {
                            break;
                        }
                        exp.push(d);
                    }
                } else {
                    while let Some(&d) = chars.peek() {
                        if !d.is_ascii_digit() {
                            break;
                        }
                        exp.push(d);
                        chars.next();
                    }
                }
                out.push_str(&format!("^{{{exp}}}"));
            }
            _ => out.push(c),
        }
    }
    out
}

fn latex_table(header: &[String], rows: &[(String, Vec<Option<String>>)]) -> String {
    let mut s = String::new();
    s.push_str("\\begin{center}\n");
    s.push_str(&format!("\\begin{{tabular}}{{ |{}| }}\n\\hline\n", vec!["c"; header.len() + 1].join("|")));
    let head: Vec<String> = header.iter().map(|h| format!("${h}$")).collect();
    s.push_str(&format!(" & {}\\\\\n\\hline\n", head.join(" & ")));
    for (name, cells) in rows {
        let cells: Vec<String> = cells
            .iter()
            .map(|c| c.as_ref().map_or(String::new(), |t| format!("${}$", latex_poly(t))))
            .collect();
        s.push_str(&format!("${name}$ & {}\\\\\n\\hline\n", cells.join(" & ")));
    }
    s.push_str("\\end{tabular}\n\\end{center}\n");
    s
}

/// Chart tables in the layout of hand-written tabulars, blank cells for
/// divisors missing a chart.
pub fn emit_report_latex(report: &ResolutionReport) -> String {
    let mut s = String::new();
    s.push_str("% generated by resolve\n");
    match (&report.status, &report.error) {
        (Status::Resolved, _) => s.push_str("% status: resolved\n"),
        (_, Some(e)) => s.push_str(&format!("% status: error in {}: {}\n", e.stage, e.message)),
        _ => s.push_str("% status: error\n"),
    }
    for c in &report.centers {
        s.push_str(&format!(
            "% step {}: blow up {} at {} in ${}$ ({})\n",
            c.step, c.exceptional, c.point, c.chart, c.stage
        ));
    }
    for t in &report.tables {
        s.push_str(&format!("\n% after step {}\n", t.step));
        let header: Vec<String> = t.columns.iter().map(|c| latex_label(c)).collect();
        let rows: Vec<(String, Vec<Option<String>>)> =
            t.rows.iter().map(|r| (r.chart.clone(), r.cells.clone())).collect();
        s.push_str(&latex_table(&header, &rows));
    }
    if !report.pullbacks.is_empty() {
        s.push_str("\n% pullbacks of the sections\n");
        let header: Vec<String> = report
            .job
            .as_ref()
            .map(|j| j.sections.iter().map(|x| format!("\\pi^*({})", latex_poly(x))).collect())
            .unwrap_or_default();
        let rows: Vec<(String, Vec<Option<String>>)> = report
            .pullbacks
            .iter()
            .map(|r| (r.chart.clone(), r.sections.iter().cloned().map(Some).collect()))
            .collect();
        s.push_str(&latex_table(&header, &rows));
    }
    if !report.root_indices.is_empty() {
        s.push_str("\n% root indices\n");
        let header: Vec<String> = vec!["\\alpha".into(), "r".into(), "m".into()];
        let rows: Vec<(String, Vec<Option<String>>)> = report
            .root_indices
            .iter()
            .map(|e| {
                let orders: Vec<String> = e.result.orders.iter().map(u32::to_string).collect();
                (
                    latex_label(&e.result.divisor),
                    vec![
                        Some(format!("({})", orders.join(","))),
                        Some(e.result.r.to_string()),
                        Some(e.result.m.to_string()),
                    ],
                )
            })
            .collect();
        s.push_str(&latex_table(&header, &rows));
    }
    for c in report.crossings.iter().filter(|c| c.stabilizer.is_some()) {
        let st = c.stabilizer.as_ref().expect("filtered");
        let src: Vec<String> = st.source.iter().map(|d| format!("\\mu_{{{d}}}")).collect();
        s.push_str(&format!(
            "\n% {} meets {} at {} in {}\n\\[ {} \\to \\mu_{{{}}},\\quad \\text{{exponents }} ({}) \\]\n",
            c.divisors[0],
            c.divisors[1],
            c.point,
            c.chart,
            src.join(" \\times "),
            st.target,
            st.exponents.iter().map(u32::to_string).collect::<Vec<_>>().join(", ")
        ));
        if let Some(rc) = &c.relative_coarse {
            let gens: Vec<String> = rc
                .generators
                .iter()
                .map(|g| format!("{} = {}", g.name, latex_poly(&g.monomial)))
                .collect();
            s.push_str(&format!(
                "\\[ {};\\quad {} \\]\n",
                gens.join(",\\ "),
                rc.relations
                    .iter()
                    .chain(&rc.identifications)
                    .map(|r| latex_poly(r))
                    .collect::<Vec<_>>()
                    .join(",\\ ")
            ));
        }
    }
    s
}

fn parse(text: &str, vars: &[String]) -> Result<MultiPoly, String> {
    parse_polynomial(text, vars).map_err(|e| format!("cannot parse `{text}`: {e}"))
}

/// Re-check a (reloaded) report using only its recorded strings: transform
/// identities from the atlas substitutions and step tables, section orders
/// from the pullback table, root indices from the orders, kernels by
/// enumeration and invariant relations by substitution.
pub fn verify_report(report: &ResolutionReport) -> Result<usize, String> {
    let mut checks = 0;
    let chart = |name: &str| {
        report
            .atlas
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| format!("unknown chart {name}"))
    };
    // total = strict * E^mult at every step
    for (k, center) in report.centers.iter().enumerate() {
        let before = report
            .tables
            .get(k)
            .ok_or_else(|| format!("missing table before step {}", k + 1))?;
        let after = report
            .tables
            .get(k + 1)
            .ok_or_else(|| format!("missing table after step {}", k + 1))?;
        let parent = chart(&center.chart)?;
        for (col, label) in before.columns.iter().enumerate() {
            let Some(eq) = before
                .rows
                .iter()
                .find(|r| r.chart == center.chart)
                .and_then(|r| r.cells[col].clone())
            else {
                continue;
            };
            let f = parse(&eq, &parent.vars)?;
            let mult = report
                .multiplicities
                .iter()
                .find(|m| m.step == k + 1 && m.divisor == *label)
                .ok_or_else(|| format!("no multiplicity for {label} at step {}", k + 1))?
                .multiplicity;
            let new_label = format!("{label}'");
            for child in &center.children {
                let ch = chart(child)?;
                let sub = ch
                    .substitution
                    .as_ref()
                    .ok_or_else(|| format!("{child} has no substitution"))?;
                let images = [parse(&sub[0], &ch.vars)?, parse(&sub[1], &ch.vars)?];
                let total = f.compose(&images);
                let e = MultiPoly::var(&ch.vars, 0).pow(mult);
                let ok = match after.cell(child, &new_label) {
                    Some(strict) => &parse(strict, &ch.vars)? * &e == total,
                    None => total.exact_div(&e).is_some_and(|q| q.is_constant() && !q.is_zero()),
                };
                if !ok {
                    return Err(format!("transform of {label} fails in {child} at step {}", k + 1));
                }
                checks += 1;
            }
        }
    }
    // orders from the pullback table, indices from the orders
    let weights = report.job.as_ref().map(|j| j.weights.clone()).unwrap_or_default();
    if let Some(last) = report.final_table() {
        for entry in &report.root_indices {
            let r = &entry.result;
            let again = minimal_root_index(&r.divisor, &r.orders, &weights);
            if again != *r {
                return Err(format!("root index of {} does not re-derive", r.divisor));
            }
            checks += 1;
            for row in &report.pullbacks {
                let Some(eq) = last.cell(&row.chart, &r.divisor) else {
                    continue;
                };
                let ch = chart(&row.chart)?;
                let g = squarefree_part(&parse(eq, &ch.vars)?).map_err(|e| e.to_string())?;
                for (i, s) in row.sections.iter().enumerate() {
                    let o = vanishing_order(&parse(s, &ch.vars)?, &g).map_err(|e| e.to_string())?;
                    if o != r.orders[i] {
                        return Err(format!("order of section {i} along {} in {}", r.divisor, row.chart));
                    }
                    checks += 1;
                }
            }
        }
    }
    // kernels and invariant relations
    for c in &report.crossings {
        if let (Some(st), Some(k)) = (&c.stabilizer, &c.kernel) {
            let h = CyclicHom {
                source: st.source.clone(),
                target: st.target,
                exponents: st.exponents.clone(),
            };
            let brute: BTreeSet<Vec<u32>> = kernel_brute_force(&h).into_iter().collect();
            if generated_subgroup(&k.generators, &h.source) != brute || brute.len() as u64 != k.order {
                return Err(format!("kernel at {} in {} does not re-derive", c.point, c.chart));
            }
            if c.representable != (k.order == 1) {
                return Err(format!("representability verdict at {} in {}", c.point, c.chart));
            }
            checks += 1;
        }
        if let (Some(p), Some(rc)) = (&c.presentation, &c.relative_coarse) {
            let names: Vec<String> = rc.generators.iter().map(|g| g.name.clone()).collect();
            let images: Vec<MultiPoly> = rc
                .generators
                .iter()
                .map(|g| parse(&g.monomial, &p.root_vars))
                .collect::<Result<_, _>>()?;
            for rel in &rc.relations {
                if !parse(rel, &names)?.compose(&images).is_zero() {
                    return Err(format!("relation {rel} does not vanish"));
                }
                checks += 1;
            }
        }
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn latex_helpers() {
        assert_eq!(latex_label("C0'''"), "C_0'''");
        assert_eq!(latex_label("E12'"), "E_{12}'");
        assert_eq!(latex_poly("4bp^3 + 27"), "4bp^{3} + 27");
        assert_eq!(latex_poly("b^(1/3)*p"), "b^{1/3}\\cdot p");
    }

    #[test]
    fn empty_report_is_valid_json() {
        let r = ResolutionReport::empty();
        let bytes = emit_report_json(&r);
        let back = load_report_json(&bytes).unwrap();
        assert_eq!(back, r);
        assert_eq!(verify_report(&back).unwrap(), 0);
    }
}
