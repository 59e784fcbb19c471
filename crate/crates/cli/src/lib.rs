//! Experiment driver for `lpvort`: verification suites, amplitude
//! calibration, and JSON/CSV reporting behind the `lpvort` binary.

// The solver and the energy ledger allocate and drop many large padded
// buffers per step; a caching allocator keeps those pages mapped.
#[global_allocator]
static ALLOC: mimalloc::MiMalloc = mimalloc::MiMalloc;

pub mod app;
pub mod config;
pub mod error;
pub mod output;
pub mod report;
pub mod suites;

pub use config::{ExperimentConfig, InitFamily, Suite};
pub use error::CliError;
pub use report::{Check, ExperimentReport};
pub use suites::SuiteOutput;

/// Every check passed.
pub const EXIT_OK: i32 = 0;
/// Some check failed, or an internal error occurred.
pub const EXIT_FAILURE: i32 = 1;
/// Bad flags, environment or configuration file.
pub const EXIT_USAGE: i32 = 2;
/// A simulation produced non-finite values or violated the CFL bound.
pub const EXIT_BLOWUP: i32 = 3;
