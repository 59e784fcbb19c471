//! Experiment configuration.
//!
//! Values are layered: built-in defaults, then a flat `key = value` file,
//! then `LPVORT_*` environment variables, then command-line flags.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Environment variable prefix for every flag (`LPVORT_N`, `LPVORT_DT`, ...).
pub const ENV_PREFIX: &str = "LPVORT_";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Partition,
    Bernstein,
    Lorentz,
    Embedding,
    Paraproduct,
    Solver,
    Apriori,
    HardyYoung,
    All,
}

impl Suite {
    /// Suites run by `all`, in report order.
    pub const EVERY: [Suite; 8] = [
        Suite::Partition,
        Suite::Bernstein,
        Suite::Lorentz,
        Suite::Embedding,
        Suite::Paraproduct,
        Suite::HardyYoung,
        Suite::Solver,
        Suite::Apriori,
    ];

    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Self::EVERY.to_vec(),
            s => vec![s],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Partition => "partition",
            Suite::Bernstein => "bernstein",
            Suite::Lorentz => "lorentz",
            Suite::Embedding => "embedding",
            Suite::Paraproduct => "paraproduct",
            Suite::Solver => "solver",
            Suite::Apriori => "apriori",
            Suite::HardyYoung => "hardy-young",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum InitFamily {
    /// Arnold-Beltrami-Childress flow with A = B = C = 1 (then scaled).
    Abc,
    /// Leray-projected Gaussian velocity on 2 ≤ |k| ≤ n/4.
    RandomBand,
    /// One solenoidal Fourier mode with wavevector `mode`.
    SingleMode,
}

/// A fully resolved configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    #[serde(rename = "T")]
    pub t_final: f64,
    /// Time step; `None` lets each suite use its own default.
    pub dt: Option<f64>,
    pub record_stride: usize,
    /// J-term ledger stride for the energy runs (0 disables the ledger).
    pub ledger_stride: usize,
    pub seed: u64,
    pub suite: Suite,
    pub init: InitFamily,
    /// sup|u₀| of the initial velocity.
    pub amplitude: f64,
    /// Wavevector of the single-mode family.
    pub mode: [i64; 3],
    /// Number of independent seeds in the a priori runs.
    pub seeds: usize,
    /// Override for the per-suite trial counts.
    pub trials: Option<usize>,
    pub amp_min: f64,
    pub amp_max: f64,
    pub sweep_points: usize,
    pub calib_seeds: usize,
    pub bisect_steps: usize,
    pub out_dir: PathBuf,
    pub parallel_seeds: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 32,
            t_final: 1.0,
            dt: None,
            record_stride: 1,
            ledger_stride: 1,
            seed: 0,
            suite: Suite::All,
            init: InitFamily::Abc,
            amplitude: 0.5,
            mode: [0, 3, 0],
            seeds: 20,
            trials: None,
            amp_min: 0.25,
            amp_max: 4.0,
            sweep_points: 5,
            calib_seeds: 2,
            bisect_steps: 3,
            out_dir: PathBuf::from("lpvort-out"),
            parallel_seeds: false,
        }
    }
}

/// One configuration layer; unset keys fall through to the layer below.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConfigLayer {
    pub n: Option<usize>,
    #[serde(rename = "T")]
    pub t_final: Option<f64>,
    pub dt: Option<f64>,
    pub record_stride: Option<usize>,
    pub ledger_stride: Option<usize>,
    pub seed: Option<u64>,
    pub suite: Option<Suite>,
    pub init: Option<InitFamily>,
    pub amplitude: Option<f64>,
    pub mode: Option<[i64; 3]>,
    pub seeds: Option<usize>,
    pub trials: Option<usize>,
    pub amp_min: Option<f64>,
    pub amp_max: Option<f64>,
    pub sweep_points: Option<usize>,
    pub calib_seeds: Option<usize>,
    pub bisect_steps: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub parallel_seeds: Option<bool>,
}

impl ConfigLayer {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config file: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

impl ExperimentConfig {
    /// Apply the set keys of `layer` on top of `self`.
    pub fn apply(mut self, layer: &ConfigLayer) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = layer.$f.clone() { self.$f = v; } )* };
        }
        take!(
            n, t_final, record_stride, ledger_stride, seed, suite, init, amplitude, mode, seeds,
            amp_min, amp_max, sweep_points, calib_seeds, bisect_steps, out_dir, parallel_seeds
        );
        if layer.dt.is_some() {
            self.dt = layer.dt;
        }
        if layer.trials.is_some() {
            self.trials = layer.trials;
        }
        self
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        if self.n < 8 || !self.n.is_power_of_two() {
            return usage(format!("n must be a power of two ≥ 8, got {}", self.n));
        }
        let positive = [
            ("T", self.t_final),
            ("amplitude", self.amplitude),
            ("amp-min", self.amp_min),
            ("amp-max", self.amp_max),
        ];
        for (name, x) in positive {
            if !(x > 0.0) || !x.is_finite() {
                return usage(format!("{name} must be positive, got {x}"));
            }
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) || !dt.is_finite() {
                return usage(format!("dt must be positive, got {dt}"));
            }
            steps_for(self.t_final, dt)?;
        }
        let counts = [
            ("record-stride", self.record_stride),
            ("seeds", self.seeds),
            ("sweep-points", self.sweep_points),
            ("calib-seeds", self.calib_seeds),
        ];
        for (name, x) in counts {
            if x == 0 {
                return usage(format!("{name} must be positive"));
            }
        }
        if self.trials == Some(0) {
            return usage("trials must be positive".into());
        }
        if self.amp_min > self.amp_max {
            return usage("amp-min exceeds amp-max".into());
        }
        if self.mode.iter().all(|&k| k == 0) || self.mode.iter().any(|k| k.unsigned_abs() as usize >= self.n / 2) {
            return usage(format!("mode {:?} must be nonzero and resolved on the grid", self.mode));
        }
        Ok(())
    }

    /// Trial count for a suite whose default is `default`.
    pub fn trials_or(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }
}

/// Number of steps of size `dt` covering [0, T]; T must be a whole number of
/// steps.
pub fn steps_for(t_final: f64, dt: f64) -> Result<usize, CliError> {
    let steps = (t_final / dt).round();
    if steps < 1.0 || ((steps * dt - t_final).abs() > 1e-9 * t_final) {
        return Err(CliError::Usage(format!(
            "T = {t_final} is not a whole number of steps of dt = {dt}"
        )));
    }
    Ok(steps as usize)
}
