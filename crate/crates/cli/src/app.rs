//! Command-line front end.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::config::{ConfigLayer, ExperimentConfig, InitFamily, Suite};
use crate::error::CliError;
use crate::report::{ExperimentReport, REPORT_FILE, TIMING_FILE};
use crate::suites::{self, SuiteOutput};
use crate::{EXIT_BLOWUP, EXIT_FAILURE, EXIT_OK, EXIT_USAGE};

#[derive(Debug, Parser)]
#[command(name = "lpvort", version, about = "Dyadic energy-method verification toolkit")]
pub struct Cli {
    /// Flat `key = value` configuration file (flags and LPVORT_* variables
    /// take precedence).
    #[arg(long, global = true, env = "LPVORT_CONFIG")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run verification suites and write report.json plus CSV series.
    Run(Flags),
    /// Sweep the initial amplitude to calibrate the smallness threshold.
    CalibrateEpsilon(Flags),
    /// Print a stored report; exits with its pass/fail status.
    Report {
        /// report.json or the directory holding it.
        path: PathBuf,
        /// Print the raw JSON instead of the summary.
        #[arg(long)]
        json: bool,
    },
}

/// Experiment flags; every one also reads `LPVORT_<NAME>`.
#[derive(Debug, Default, Args)]
pub struct Flags {
    #[arg(long, env = "LPVORT_N")]
    pub n: Option<usize>,
    /// Final time.
    #[arg(long = "T", env = "LPVORT_T")]
    pub t_final: Option<f64>,
    #[arg(long, env = "LPVORT_DT")]
    pub dt: Option<f64>,
    #[arg(long, env = "LPVORT_SEED")]
    pub seed: Option<u64>,
    #[arg(long, value_enum, env = "LPVORT_SUITE")]
    pub suite: Option<Suite>,
    #[arg(long, value_enum, env = "LPVORT_INIT")]
    pub init: Option<InitFamily>,
    /// sup|u0| of the initial velocity.
    #[arg(long, env = "LPVORT_AMPLITUDE")]
    pub amplitude: Option<f64>,
    #[arg(long, env = "LPVORT_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
    /// Spread seeded runs over worker threads (results are identical).
    #[arg(long, env = "LPVORT_PARALLEL_SEEDS", num_args = 0..=1, default_missing_value = "true")]
    pub parallel_seeds: Option<bool>,
    /// Wavevector of the single-mode family, e.g. 0,3,0.
    #[arg(long, env = "LPVORT_MODE", value_parser = parse_mode)]
    pub mode: Option<[i64; 3]>,
    #[arg(long, env = "LPVORT_SEEDS")]
    pub seeds: Option<usize>,
    #[arg(long, env = "LPVORT_TRIALS")]
    pub trials: Option<usize>,
    #[arg(long, env = "LPVORT_RECORD_STRIDE")]
    pub record_stride: Option<usize>,
    #[arg(long, env = "LPVORT_LEDGER_STRIDE")]
    pub ledger_stride: Option<usize>,
    #[arg(long, env = "LPVORT_AMP_MIN")]
    pub amp_min: Option<f64>,
    #[arg(long, env = "LPVORT_AMP_MAX")]
    pub amp_max: Option<f64>,
    #[arg(long, env = "LPVORT_SWEEP_POINTS")]
    pub sweep_points: Option<usize>,
    #[arg(long, env = "LPVORT_CALIB_SEEDS")]
    pub calib_seeds: Option<usize>,
    #[arg(long, env = "LPVORT_BISECT_STEPS")]
    pub bisect_steps: Option<usize>,
}

impl Flags {
    fn layer(&self) -> ConfigLayer {
        ConfigLayer {
            n: self.n,
            t_final: self.t_final,
            dt: self.dt,
            record_stride: self.record_stride,
            ledger_stride: self.ledger_stride,
            seed: self.seed,
            suite: self.suite,
            init: self.init,
            amplitude: self.amplitude,
            mode: self.mode,
            seeds: self.seeds,
            trials: self.trials,
            amp_min: self.amp_min,
            amp_max: self.amp_max,
            sweep_points: self.sweep_points,
            calib_seeds: self.calib_seeds,
            bisect_steps: self.bisect_steps,
            out_dir: self.out_dir.clone(),
            parallel_seeds: self.parallel_seeds,
        }
    }
}

fn parse_mode(s: &str) -> Result<[i64; 3], String> {
    let parts: Vec<i64> = s
        .split(',')
        .map(|p| p.trim().parse::<i64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    <[i64; 3]>::try_from(parts).map_err(|p| format!("expected three components, got {}", p.len()))
}

/// Defaults, then the config file, then environment and flags.
pub fn resolve(config: Option<&Path>, flags: &Flags) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = config {
        cfg = cfg.apply(&ConfigLayer::load(path)?);
    }
    let cfg = cfg.apply(&flags.layer());
    cfg.validate()?;
    Ok(cfg)
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("lpvort: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Run(flags) => {
            let cfg = resolve(cli.config.as_deref(), flags)?;
            let report = run_suites(&cfg)?;
            Ok(finish(&report))
        }
        Command::CalibrateEpsilon(flags) => {
            let cfg = resolve(cli.config.as_deref(), flags)?;
            let report = run_calibration(&cfg)?;
            Ok(finish(&report))
        }
        Command::Report { path, json } => {
            let file = if path.is_dir() { path.join(REPORT_FILE) } else { path.clone() };
            let report = ExperimentReport::read(&file)?;
            if *json {
                print!("{}", report.to_json()?);
            } else {
                print!("{}", report.pretty());
            }
            Ok(exit_status(&report))
        }
    }
}

fn finish(report: &ExperimentReport) -> i32 {
    print!("{}", report.pretty());
    exit_status(report)
}

pub fn exit_status(report: &ExperimentReport) -> i32 {
    if report.blowup.is_some() {
        EXIT_BLOWUP
    } else if report.all_pass {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

/// Run every suite selected by the configuration and write the report,
/// series and timing files to `out-dir`.
pub fn run_suites(cfg: &ExperimentConfig) -> Result<ExperimentReport, CliError> {
    let mut report = ExperimentReport::new("run", cfg.clone());
    let mut timing = BTreeMap::new();
    for suite in cfg.suite.expand() {
        eprintln!("lpvort: suite {} ...", suite.name());
        let start = Instant::now();
        let out = suites::run_suite(suite, cfg)?;
        timing.insert(suite.name().to_string(), start.elapsed().as_secs_f64());
        let stop = out.blowup.is_some();
        absorb(&mut report, suite.name(), out, &cfg.out_dir)?;
        if stop {
            break;
        }
    }
    persist(&mut report, &timing, &cfg.out_dir)?;
    Ok(report)
}

pub fn run_calibration(cfg: &ExperimentConfig) -> Result<ExperimentReport, CliError> {
    let mut report = ExperimentReport::new("calibrate-epsilon", cfg.clone());
    let start = Instant::now();
    let out = suites::calibrate(cfg)?.output();
    let timing = BTreeMap::from([("calibration".to_string(), start.elapsed().as_secs_f64())]);
    absorb(&mut report, "calibration", out, &cfg.out_dir)?;
    persist(&mut report, &timing, &cfg.out_dir)?;
    Ok(report)
}

fn absorb(report: &mut ExperimentReport, suite: &str, out: SuiteOutput, dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    for (name, table) in &out.series {
        table.write(&dir.join(name))?;
        report.series_files.push(name.clone());
    }
    report.checks.extend(out.checks);
    report.constants.merge(&out.constants);
    report.notes.extend(out.notes.into_iter().map(|n| format!("{suite}: {n}")));
    if out.blowup.is_some() {
        report.blowup = out.blowup;
    }
    Ok(())
}

fn persist(report: &mut ExperimentReport, timing: &BTreeMap<String, f64>, dir: &Path) -> Result<(), CliError> {
    report.finalize();
    report.write(dir)?;
    std::fs::write(dir.join(TIMING_FILE), serde_json::to_string_pretty(timing)? + "\n")?;
    Ok(())
}
