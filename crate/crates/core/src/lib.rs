//! Littlewood-Paley analysis on the periodic box, Bony paraproducts, weak
//! (Lorentz) time norms, and a pseudo-spectral solver for the vorticity
//! equation, with the estimates of the energy method exposed as checkable
//! quantities.
//!
//! Everything is generic over the scalar type through [`Real`]; the
//! `*64` / `*32` aliases below pick a concrete precision.

pub mod calculus;
pub mod dealias;
pub mod error;
pub mod field;
pub mod grid;
pub mod init;
pub mod littlewood_paley;
pub mod norms;
pub mod paraproduct;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use field::SpectralField;
pub use grid::Grid;
pub use littlewood_paley::{CutoffSystem, Dyadic, DyadicBlocks};
pub use norms::{BlockSeries, LevelSetPartition, TimeSeries};
pub use paraproduct::ParaproductSplit;
pub use scalar::Real;
pub use solver::{AprioriSummary, EnergyLedger, RunRecord, Solver, SolverConfig, SolverState};

pub type Grid64 = Grid<f64>;
pub type Grid32 = Grid<f32>;
pub type SpectralField64 = SpectralField<f64>;
pub type SpectralField32 = SpectralField<f32>;
pub type Dyadic64 = Dyadic<f64>;
pub type TimeSeries64 = TimeSeries<f64>;
