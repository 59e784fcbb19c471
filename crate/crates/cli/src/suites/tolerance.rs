//! Tolerances and bound sources shared by the suites and the acceptance
//! harness.

/// Identities that hold exactly up to floating-point round-off.
pub const EXACT: f64 = 1e-10;

/// Bernstein annulus constants.
pub const BERNSTEIN_LO: f64 = 0.75;
pub const BERNSTEIN_HI: f64 = 8.0 / 3.0;

/// Smallest admissible value of χ² + Σφ².
pub const SQUARE_SUM_FLOOR: f64 = 1.0 / 3.0;

/// Relative tolerance for the t^{−1/2} oracles.
pub const ORACLE_REL: f64 = 0.02;

/// Beltrami decay of ‖v‖₂ (relative to ‖v₀‖₂) and of ‖u‖_∞ (relative to
/// max|u₀|).
pub const BELTRAMI_L2: f64 = 1e-6;
pub const BELTRAMI_LINF: f64 = 1e-5;

/// Window for the error ratio under dt halving of a second-order scheme.
pub const ORDER_LO: f64 = 3.5;
pub const ORDER_HI: f64 = 4.5;

/// Per-block energy-inequality residual, relative to ‖v₀‖²₂.
pub const ENERGY_RESIDUAL: f64 = 1e-6;

/// The a priori bound ‖v‖²_Q ≤ 2‖v₀‖²₂.
pub const Q_RATIO_BOUND: f64 = 2.0;

/// Stability of the empirical embedding constant: after the burn-in no
/// trial may exceed the running maximum by more than this factor.
pub const EMBEDDING_GROWTH: f64 = 1.05;
pub const EMBEDDING_BURN_IN: usize = 50;

/// ℓ¹ norm of the kernel 2^{−m/2}, m ≥ 0.
pub fn hardy_young_bound() -> f64 {
    1.0 / (1.0 - 0.5f64.sqrt())
}

/// CFL constant used when a suite picks its own time step (below the
/// solver's guard of 0.5 to leave room for growth of max|u|).
pub const CFL_PICK: f64 = 0.4;

pub mod source {
    pub const PARTITION: &str = "partition of unity: chi + sum phi = 1";
    pub const SQUARE_SUM: &str = "square sum of the dyadic partition";
    pub const RECONSTRUCTION: &str = "block reconstruction sum_q Delta_q v = v";
    pub const BERNSTEIN: &str = "Bernstein annulus bounds 3/4 and 8/3";
    pub const ORACLE: &str = "analytic oracle f(t) = t^(-1/2)";
    pub const REARRANGEMENT: &str = "weak <= dual <= 2 weak (rearrangement)";
    pub const LEVEL_SETS: &str = "dyadic level-set chain";
    pub const EMBEDDING: &str = "empirical";
    pub const BONY: &str = "Bony identity uv = T_u v + T_v u + R(u,v)";
    pub const SUPPORT: &str = "annulus support of paraproduct terms";
    pub const YOUNG: &str = "Young's inequality, l1 norm of 2^(-m/2)";
    pub const GEOMETRIC: &str = "geometric series";
    pub const MACHINE: &str = "machine precision";
    pub const BELTRAMI: &str = "Beltrami exact solution";
    pub const HEAT_MODE: &str = "exact decay of a single Fourier mode";
    pub const ORDER: &str = "second-order time stepping";
    pub const ENERGY: &str = "dyadic energy inequality";
    pub const SPLIT: &str = "Bony identity inside the energy estimate";
    pub const APRIORI: &str = "a priori bound ||v||_Q^2 <= 2 ||v0||^2";
    pub const CALIBRATED: &str = "empirical";
}
