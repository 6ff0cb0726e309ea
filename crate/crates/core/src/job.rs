//! Job files.
//!
//! A job is a TOML document:
//!
//! ```toml
//! [job]
//! variables = ["a", "b"]
//! sections = ["a", "b"]
//! weights = [4, 6]
//!
//! [coarse]                   # optional
//! change = [[4, 0], [4, 27]] # invertible, applied to (s1^(L/w1), s2^(L/w2))
//! labels = ["C0", "C1"]
//!
//! [options]                  # optional
//! max_steps = 32
//! formats = ["json"]         # what the CLI prints when no output file is given
//! exclude = []               # polynomials whose zero loci are removed
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::MultiPoly;
use crate::parser::{parse_polynomial, ParseError};
use crate::snc::DEFAULT_MAX_STEPS;

#[derive(Debug, Error)]
pub enum JobError {
    #[error("cannot read job file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed job file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid job: {0}")]
    Invalid(String),
    #[error("in {field}: {source}")]
    Parse {
        field: String,
        #[source]
        source: ParseError,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JobFile {
    job: JobSection,
    #[serde(default)]
    coarse: CoarseSection,
    #[serde(default)]
    options: OptionsSection,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JobSection {
    variables: Vec<String>,
    sections: Vec<String>,
    weights: Vec<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CoarseSection {
    #[serde(default = "identity")]
    change: [[i64; 2]; 2],
    #[serde(default = "default_labels")]
    labels: [String; 2],
}

impl Default for CoarseSection {
    fn default() -> Self {
        CoarseSection {
            change: identity(),
            labels: default_labels(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OptionsSection {
    #[serde(default = "default_steps")]
    max_steps: usize,
    #[serde(default = "default_formats")]
    formats: Vec<String>,
    #[serde(default)]
    exclude: Vec<String>,
}

impl Default for OptionsSection {
    fn default() -> Self {
        OptionsSection {
            max_steps: default_steps(),
            formats: default_formats(),
            exclude: Vec::new(),
        }
    }
}

fn identity() -> [[i64; 2]; 2] {
    [[1, 0], [0, 1]]
}

fn default_labels() -> [String; 2] {
    ["C0".into(), "C1".into()]
}

fn default_steps() -> usize {
    DEFAULT_MAX_STEPS
}

fn default_formats() -> Vec<String> {
    vec!["json".into()]
}

/// A validated job.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobSpec {
    pub variables: Vec<String>,
    pub sections: Vec<String>,
    pub weights: Vec<u32>,
    pub coarse_change: [[i64; 2]; 2],
    pub coarse_labels: [String; 2],
    pub max_steps: usize,
    pub formats: Vec<String>,
    pub exclude: Vec<String>,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic()) && chars.all(|c| c.is_alphanumeric() || c == '_')
}

fn reserved_label(s: &str) -> bool {
    s == "F" || (s.starts_with('E') && s.len() > 1 && s[1..].chars().all(|c| c.is_ascii_digit()))
}

impl JobSpec {
    pub fn from_toml(text: &str) -> Result<Self, JobError> {
        let f: JobFile = toml::from_str(text)?;
        let spec = JobSpec {
            variables: f.job.variables,
            sections: f.job.sections,
            weights: f.job.weights,
            coarse_change: f.coarse.change,
            coarse_labels: f.coarse.labels,
            max_steps: f.options.max_steps,
            formats: f.options.formats,
            exclude: f.options.exclude,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, JobError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// The job with the minimal set of fields, everything else defaulted.
    pub fn new(variables: [&str; 2], sections: [&str; 2], weights: [u32; 2]) -> Result<Self, JobError> {
        let spec = JobSpec {
            variables: variables.iter().map(|s| s.to_string()).collect(),
            sections: sections.iter().map(|s| s.to_string()).collect(),
            weights: weights.to_vec(),
            coarse_change: identity(),
            coarse_labels: default_labels(),
            max_steps: default_steps(),
            formats: default_formats(),
            exclude: Vec::new(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), JobError> {
        let bad = |m: &str| Err(JobError::Invalid(m.to_string()));
        if self.variables.len() != 2 {
            return bad("exactly two variables are required");
        }
        if self.variables[0] == self.variables[1] {
            return bad("variables must be distinct");
        }
        if let Some(v) = self.variables.iter().find(|v| !is_identifier(v)) {
            return Err(JobError::Invalid(format!("`{v}` is not a valid variable name")));
        }
        if self.sections.len() != 2 || self.weights.len() != 2 {
            return bad("exactly two sections and two weights are required");
        }
        if self.weights.contains(&0) {
            return bad("weights must be positive");
        }
        let [[a, b], [c, d]] = self.coarse_change;
        if (a as i128) * (d as i128) - (b as i128) * (c as i128) == 0 {
            return bad("coarse change matrix must be invertible");
        }
        if self.coarse_labels[0] == self.coarse_labels[1] {
            return bad("coarse labels must be distinct");
        }
        for l in &self.coarse_labels {
            if !is_identifier(l) || reserved_label(l) {
                return Err(JobError::Invalid(format!("`{l}` cannot be used as a divisor label")));
            }
        }
        if self.max_steps == 0 {
            return bad("max_steps must be at least 1");
        }
        if let Some(f) = self.formats.iter().find(|f| *f != "json" && *f != "latex") {
            return Err(JobError::Invalid(format!("unknown output format `{f}`")));
        }
        for s in self.parsed_sections()? {
            if s.is_zero() {
                return bad("sections must be nonzero");
            }
        }
        for e in self.parsed_exclude()? {
            if e.is_constant() {
                return bad("excluded loci must be nonconstant");
            }
        }
        Ok(())
    }

    fn parse_list(&self, items: &[String], what: &str) -> Result<Vec<MultiPoly>, JobError> {
        items
            .iter()
            .enumerate()
            .map(|(i, s)| {
                parse_polynomial(s, &self.variables).map_err(|e| JobError::Parse {
                    field: format!("{what}[{i}]"),
                    source: e,
                })
            })
            .collect()
    }

    pub fn parsed_sections(&self) -> Result<Vec<MultiPoly>, JobError> {
        self.parse_list(&self.sections, "sections")
    }

    pub fn parsed_exclude(&self) -> Result<Vec<MultiPoly>, JobError> {
        self.parse_list(&self.exclude, "exclude")
    }

    pub fn to_toml(&self) -> String {
        let list = |v: &[String]| {
            v.iter()
                .map(|s| format!("{s:?}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let [[a, b], [c, d]] = self.coarse_change;
        format!(
            "[job]\nvariables = [{}]\nsections = [{}]\nweights = [{}, {}]\n\n[coarse]\nchange = [[{a}, {b}], [{c}, {d}]]\nlabels = [{}]\n\n[options]\nmax_steps = {}\nformats = [{}]\nexclude = [{}]\n",
            list(&self.variables),
            list(&self.sections),
            self.weights[0],
            self.weights[1],
            list(&self.coarse_labels),
            self.max_steps,
            list(&self.formats),
            list(&self.exclude),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_job_uses_defaults() {
        let j = JobSpec::from_toml("[job]\nvariables=['a','b']\nsections=['a','b']\nweights=[4,6]\n").unwrap();
        assert_eq!(j.max_steps, DEFAULT_MAX_STEPS);
        assert_eq!(j.coarse_change, [[1, 0], [0, 1]]);
    }

    #[test]
    fn rejects_bad_jobs() {
        let base = |extra: &str| format!("[job]\nvariables=['a','b']\nsections=['a','b']\nweights=[4,6]\n{extra}");
        assert!(JobSpec::from_toml(&base("[options]\nmax_steps=0\n")).is_err());
        assert!(JobSpec::from_toml(&base("[coarse]\nchange=[[1,2],[2,4]]\n")).is_err());
        assert!(JobSpec::from_toml(&base("[coarse]\nlabels=['E1','C']\n")).is_err());
        assert!(JobSpec::from_toml(&base("[options]\nunknown=1\n")).is_err());
        assert!(JobSpec::from_toml("[job]\nvariables=['a','b']\nsections=['a','0']\nweights=[4,6]\n").is_err());
        assert!(matches!(
            JobSpec::from_toml("[job]\nvariables=['a','b']\nsections=['a','c']\nweights=[4,6]\n"),
            Err(JobError::Parse { .. })
        ));
    }

    #[test]
    fn toml_round_trip() {
        let mut j = JobSpec::new(["a", "b"], ["a", "b"], [4, 6]).unwrap();
        j.coarse_change = [[4, 0], [4, 27]];
        j.exclude = vec!["a - 1".into()];
        assert_eq!(JobSpec::from_toml(&j.to_toml()).unwrap(), j);
    }
}
