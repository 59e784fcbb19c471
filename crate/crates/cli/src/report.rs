//! Check rows and the structured experiment report.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::CliError;

/// Tolerance window a measured value is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Bound {
    AtMost { value: f64 },
    AtLeast { value: f64 },
    Within { lo: f64, hi: f64 },
}

impl Bound {
    fn admits(&self, x: f64) -> bool {
        match *self {
            Bound::AtMost { value } => x <= value,
            Bound::AtLeast { value } => x >= value,
            Bound::Within { lo, hi } => lo <= x && x <= hi,
        }
    }

    fn describe(&self) -> String {
        match *self {
            Bound::AtMost { value } => format!("≤ {value:.6e}"),
            Bound::AtLeast { value } => format!("≥ {value:.6e}"),
            Bound::Within { lo, hi } => format!("∈ [{lo:.6e}, {hi:.6e}]"),
        }
    }
}

/// One pass/fail row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub measured: f64,
    /// Observed [min, max] when the row summarizes several values; the bound
    /// applies to both ends.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observed: Option<[f64; 2]>,
    pub bound: Bound,
    /// measured / bound for one-sided bounds.
    pub ratio: Option<f64>,
    pub pass: bool,
    /// Where the bound comes from ("empirical" for calibrated constants).
    pub provenance: String,
}

impl Check {
    pub fn new(suite: &str, name: impl Into<String>, measured: f64, bound: Bound, provenance: &str) -> Self {
        let ratio = match bound {
            Bound::AtMost { value } | Bound::AtLeast { value } if value != 0.0 => Some(measured / value),
            _ => None,
        };
        Self {
            suite: suite.to_string(),
            name: name.into(),
            measured,
            observed: None,
            bound,
            ratio,
            pass: measured.is_finite() && bound.admits(measured),
            provenance: provenance.to_string(),
        }
    }

    pub fn at_most(suite: &str, name: impl Into<String>, measured: f64, value: f64, provenance: &str) -> Self {
        Self::new(suite, name, measured, Bound::AtMost { value }, provenance)
    }

    pub fn at_least(suite: &str, name: impl Into<String>, measured: f64, value: f64, provenance: &str) -> Self {
        Self::new(suite, name, measured, Bound::AtLeast { value }, provenance)
    }

    pub fn within(suite: &str, name: impl Into<String>, measured: f64, lo: f64, hi: f64, provenance: &str) -> Self {
        Self::new(suite, name, measured, Bound::Within { lo, hi }, provenance)
    }

    /// Row over a set of values; `measured` is the maximum.
    pub fn range(suite: &str, name: impl Into<String>, min: f64, max: f64, lo: f64, hi: f64, provenance: &str) -> Self {
        let mut c = Self::within(suite, name, max, lo, hi, provenance);
        c.observed = Some([min, max]);
        c.pass = min.is_finite() && max.is_finite() && lo <= min && max <= hi;
        c
    }

    /// A boolean property, measured as 1 (holds) or 0.
    pub fn holds(suite: &str, name: impl Into<String>, ok: bool, provenance: &str) -> Self {
        Self::at_least(suite, name, if ok { 1.0 } else { 0.0 }, 1.0, provenance)
    }
}

/// Constants measured rather than taken from the analysis.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalConstants {
    pub c_emb: Option<f64>,
    pub c_j1: Option<f64>,
    pub c_j2: Option<f64>,
    pub c_j3: Option<f64>,
    pub eps_emp: Option<f64>,
    /// True when no failing amplitude was found: `eps_emp` is then only a
    /// lower bound.
    pub eps_open: Option<bool>,
}

impl EmpiricalConstants {
    pub fn merge(&mut self, other: &EmpiricalConstants) {
        macro_rules! keep {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        keep!(c_emb, c_j1, c_j2, c_j3, eps_emp, eps_open);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub toolkit: String,
    pub command: String,
    pub config: ExperimentConfig,
    pub checks: Vec<Check>,
    pub constants: EmpiricalConstants,
    pub notes: Vec<String>,
    /// CSV files written next to the report, relative to the output directory.
    pub series_files: Vec<String>,
    /// Set when a simulation stopped early.
    pub blowup: Option<String>,
    /// Wall-clock timings live in this sidecar so the report itself is
    /// reproducible byte for byte.
    pub timing_file: String,
    pub all_pass: bool,
}

pub const REPORT_FILE: &str = "report.json";
pub const TIMING_FILE: &str = "timing.json";

pub fn toolkit_version() -> String {
    format!("lpvort {}", env!("CARGO_PKG_VERSION"))
}

impl ExperimentReport {
    pub fn new(command: &str, config: ExperimentConfig) -> Self {
        Self {
            toolkit: toolkit_version(),
            command: command.to_string(),
            config,
            checks: Vec::new(),
            constants: EmpiricalConstants::default(),
            notes: Vec::new(),
            series_files: Vec::new(),
            blowup: None,
            timing_file: TIMING_FILE.to_string(),
            all_pass: true,
        }
    }

    pub fn finalize(&mut self) {
        self.all_pass = self.blowup.is_none() && self.checks.iter().all(|c| c.pass);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(REPORT_FILE), self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read report {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("not a report: {e}")))
    }

    /// Human-readable rendering.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} — {} (suite {}, n={}, seed={})", self.toolkit, self.command,
            self.config.suite.name(), self.config.n, self.config.seed);
        let mut suite = "";
        for c in &self.checks {
            if c.suite != suite {
                suite = &c.suite;
                let _ = writeln!(out, "\n[{suite}]");
            }
            let observed = c
                .observed
                .map(|[lo, hi]| format!(" (range {lo:.6e} .. {hi:.6e})"))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "  {} {:<44} {:>14.6e} {}{}  [{}]",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.bound.describe(),
                observed,
                c.provenance
            );
        }
        let k = &self.constants;
        let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.6e}"));
        let _ = writeln!(out, "\nempirical constants:");
        let _ = writeln!(out, "  C_emb {}  C_J1 {}  C_J2 {}  C_J3 {}", fmt(k.c_emb), fmt(k.c_j1), fmt(k.c_j2), fmt(k.c_j3));
        if k.eps_emp.is_some() {
            let open = if k.eps_open == Some(true) { " (lower bound only: no failing amplitude in range)" } else { "" };
            let _ = writeln!(out, "  eps_emp {}{}", fmt(k.eps_emp), open);
        }
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        if let Some(b) = &self.blowup {
            let _ = writeln!(out, "BLOW-UP: {b}");
        }
        let failed = self.failures().count();
        let _ = writeln!(out, "\n{} checks, {} failed — {}", self.checks.len(), failed,
            if self.all_pass { "ALL PASS" } else { "NOT PASSING" });
        out
    }
}
