//! Pseudo-spectral integration of the vorticity equation
//! ∂_t v − Δv + div(Bv) = 0, Bv = v⊗u − u⊗v, v = curl u, on [0, 2π)³ with
//! unit viscosity.
//!
//! Time stepping is the integrating-factor Heun scheme: the Laplacian is
//! integrated exactly by e^{−|k|²dt}, the nonlinearity explicitly with a
//! second-order predictor-corrector.

mod energy;

pub use energy::{hardy_young_check, j_terms, AprioriSummary, EnergyLedger, HardyYoung, JTerms};

use num_complex::Complex;

use crate::calculus::{biot_savart, leray_project};
use crate::dealias::{padded_to_spectra, spectra_to_padded};
use crate::error::{Error, Result};
use crate::field::{czero, derivative_k, derivative_k2, pointwise_max_magnitude, SpectralField, C};
use crate::grid::Grid;
use crate::littlewood_paley::Dyadic;
use crate::norms::{BlockSeries, TimeSeries};
use crate::scalar::Real;

/// Index pairs (i, l), i < l, of the independent entries of an
/// antisymmetric 3×3 tensor.
pub(crate) const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig<T> {
    pub dt: T,
    /// Final time (1 by default).
    pub t_final: T,
    /// Record block norms every `record_stride` steps.
    pub record_stride: usize,
    /// Record J-term ledger rows every `ledger_stride` steps; 0 disables.
    pub ledger_stride: usize,
    /// CFL constant c in dt ≤ c / (n · max|u|).
    pub cfl: T,
    /// Include div(Bv); `false` gives pure heat flow.
    pub nonlinear: bool,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            dt: T::lit(1e-3),
            t_final: T::one(),
            record_stride: 1,
            ledger_stride: 0,
            cfl: T::lit(0.5),
            nonlinear: true,
        }
    }
}

impl<T: Real> SolverConfig<T> {
    /// Number of steps to reach `t_final`.
    pub fn total_steps(&self) -> usize {
        (self.t_final / self.dt).round().to_usize().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return bad("dt must be positive");
        }
        if !(self.t_final > T::zero()) {
            return bad("final time must be positive");
        }
        if !(self.cfl > T::zero()) {
            return bad("CFL constant must be positive");
        }
        let steps = self.total_steps();
        let drift = (T::from_usize_lossy(steps) * self.dt - self.t_final).abs();
        if steps == 0 || drift > T::lit(1e-9) * self.t_final {
            return bad("final time must be an integer number of steps");
        }
        if self.record_stride == 0 || steps % self.record_stride != 0 {
            return bad("record stride must divide the number of steps");
        }
        if self.ledger_stride != 0 && steps % self.ledger_stride != 0 {
            return bad("ledger stride must divide the number of steps");
        }
        Ok(())
    }
}

/// Vorticity at time `t` after `step` accepted steps.
#[derive(Clone, Debug)]
pub struct SolverState<T: Real> {
    pub t: T,
    pub step: usize,
    pub v: SpectralField<T>,
}

/// Why a step was not accepted. The last valid state travels with it.
#[derive(Clone, Debug)]
pub enum StepFailure<T: Real> {
    Cfl { dt: T, bound: T, last_valid: SolverState<T> },
    BlowUp { last_valid: SolverState<T> },
}

impl<T: Real> StepFailure<T> {
    pub fn last_valid(&self) -> &SolverState<T> {
        match self {
            StepFailure::Cfl { last_valid, .. } | StepFailure::BlowUp { last_valid } => last_valid,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            StepFailure::Cfl { dt, bound, last_valid } => format!(
                "CFL violated at t={}: dt={} > bound={}",
                last_valid.t, dt, bound
            ),
            StepFailure::BlowUp { last_valid } => {
                format!("non-finite vorticity after t={}", last_valid.t)
            }
        }
    }
}

/// div(Bv) at one state, with the velocity sup norm on the padded grid.
struct Nonlinear<T: Real> {
    div_b: Vec<Vec<C<T>>>,
    u_max: T,
}

/// (div Bv)_i = Σ_l ∂_l(v_i u_l − u_i v_l), with u the Biot-Savart velocity
/// of v. Products are dealiased.
pub fn nonlinear_term<T: Real>(v: &SpectralField<T>) -> Result<SpectralField<T>> {
    let nl = evaluate_nonlinear(v)?;
    SpectralField::from_coefficients(v.grid(), nl.div_b)
}

fn evaluate_nonlinear<T: Real>(v: &SpectralField<T>) -> Result<Nonlinear<T>> {
    v.require_vector()?;
    let grid = v.grid();
    let u = biot_savart(v)?;
    let spectra: Vec<&[C<T>]> = (0..3)
        .map(|c| u.component(c))
        .chain((0..3).map(|c| v.component(c)))
        .collect();
    let phys = spectra_to_padded(grid, &spectra);
    let (up, vp) = phys.split_at(3);
    let u_max = pointwise_max_magnitude(up);
    let tensor: Vec<Vec<T>> = PAIRS
        .iter()
        .map(|&(i, l)| {
            vp[i].iter()
                .zip(&up[l])
                .zip(up[i].iter().zip(&vp[l]))
                .map(|((vi, ul), (ui, vl))| *vi * *ul - *ui * *vl)
                .collect()
        })
        .collect();
    let refs: Vec<&[T]> = tensor.iter().map(|t| t.as_slice()).collect();
    let b = padded_to_spectra(grid, &refs);
    Ok(Nonlinear {
        div_b: tensor_divergence(grid, &b),
        u_max,
    })
}

/// Divergence over the second index of an antisymmetric tensor given by its
/// entries (0,1), (0,2), (1,2).
pub(crate) fn tensor_divergence<T: Real>(grid: &Grid<T>, b: &[Vec<C<T>>]) -> Vec<Vec<C<T>>> {
    let n = grid.n();
    let mut out = vec![vec![czero(); grid.len()]; 3];
    for flat in 0..grid.len() {
        let k = derivative_k(grid, flat, n);
        let (b01, b02, b12) = (b[0][flat], b[1][flat], b[2][flat]);
        let d0 = b01 * k[1] + b02 * k[2];
        let d1 = -b01 * k[0] + b12 * k[2];
        let d2 = -b02 * k[0] - b12 * k[1];
        out[0][flat] = Complex::new(-d0.im, d0.re);
        out[1][flat] = Complex::new(-d1.im, d1.re);
        out[2][flat] = Complex::new(-d2.im, d2.re);
    }
    out
}

/// Everything recorded over one integration.
#[derive(Clone, Debug)]
pub struct RunRecord<T: Real> {
    /// ‖Δ_q v(t_i)‖₂ and ‖∇Δ_q v(t_i)‖₂ at the recorded times.
    pub blocks: BlockSeries<T>,
    /// ‖∇v(t_i)‖₂.
    pub grad_l2: TimeSeries<T>,
    /// ‖u(t_i)‖_∞ on the base grid.
    pub u_inf: TimeSeries<T>,
    /// ‖v(t_i)‖₂.
    pub v_l2: TimeSeries<T>,
    /// Largest max_k |k·v̂(k)| and Hermitian defect over the recorded states.
    pub max_divergence: T,
    pub max_hermitian_defect: T,
    pub ledger: EnergyLedger<T>,
    /// State reached (T on success, last valid state otherwise).
    pub final_state: SolverState<T>,
    /// Set when the run stopped early; the series cover the valid prefix.
    pub failure: Option<String>,
    /// Set when stopping early was caused by a CFL violation.
    pub cfl_violation: bool,
}

impl<T: Real> RunRecord<T> {
    pub fn is_truncated(&self) -> bool {
        self.failure.is_some()
    }
}

/// Integrator for one grid and configuration.
#[derive(Clone, Debug)]
pub struct Solver<T: Real> {
    lp: Dyadic<T>,
    config: SolverConfig<T>,
    decay: Vec<T>,
    // (1 − e^{−2|k|²dt}) / 2, the exact per-step integral of |k|² e^{−2|k|²s}
    dissipation_weight: Vec<T>,
}

impl<T: Real> Solver<T> {
    pub fn new(lp: Dyadic<T>, config: SolverConfig<T>) -> Result<Self> {
        config.validate()?;
        let grid = lp.grid().clone();
        let n = grid.n();
        let k2: Vec<T> = (0..grid.len()).map(|f| derivative_k2(&grid, f, n)).collect();
        let decay = k2.iter().map(|&k| (-k * config.dt).exp()).collect();
        let dissipation_weight = k2
            .iter()
            .map(|&k| (T::one() - (-T::lit(2.0) * k * config.dt).exp()) * T::lit(0.5))
            .collect();
        Ok(Self {
            lp,
            config,
            decay,
            dissipation_weight,
        })
    }

    pub fn grid(&self) -> &Grid<T> {
        self.lp.grid()
    }

    pub fn dyadic(&self) -> &Dyadic<T> {
        &self.lp
    }

    pub fn config(&self) -> &SolverConfig<T> {
        &self.config
    }

    /// Check and normalize initial vorticity into a solver state.
    pub fn initial_state(&self, v0: &SpectralField<T>) -> Result<SolverState<T>> {
        v0.require_vector()?;
        if v0.grid() != self.grid() {
            return Err(Error::GridMismatch(v0.grid().n(), self.grid().n()));
        }
        // rejects nonzero mean vorticity
        biot_savart(v0)?;
        let mut v = leray_project(v0)?;
        v.strip_nyquist();
        Ok(SolverState {
            t: T::zero(),
            step: 0,
            v: v.with_divergence_free(true),
        })
    }

    /// One integrating-factor Heun step.
    pub fn step(&self, state: &SolverState<T>) -> std::result::Result<SolverState<T>, StepFailure<T>> {
        let dt = self.config.dt;
        let grid = self.grid();
        let fail = || StepFailure::BlowUp {
            last_valid: state.clone(),
        };
        let mut next: Vec<Vec<C<T>>> = state.v.components().to_vec();
        if self.config.nonlinear {
            let n0 = evaluate_nonlinear(&state.v).map_err(|_| fail())?;
            if !n0.u_max.is_finite() {
                return Err(fail());
            }
            let bound = self.cfl_bound(n0.u_max);
            if dt > bound {
                return Err(StepFailure::Cfl {
                    dt,
                    bound,
                    last_valid: state.clone(),
                });
            }
            let mut predictor = state.v.components().to_vec();
            for (p, nl) in predictor.iter_mut().zip(&n0.div_b) {
                for ((x, f), e) in p.iter_mut().zip(nl).zip(&self.decay) {
                    *x = (*x - *f * dt) * *e;
                }
            }
            let predictor = SpectralField::from_coefficients(grid, predictor)
                .map_err(|_| fail())?
                .with_divergence_free(true);
            let n1 = evaluate_nonlinear(&predictor).map_err(|_| fail())?;
            let half_dt = dt * T::lit(0.5);
            for c in 0..3 {
                for flat in 0..grid.len() {
                    let e = self.decay[flat];
                    next[c][flat] = next[c][flat] * e
                        - (n0.div_b[c][flat] * e + n1.div_b[c][flat]) * half_dt;
                }
            }
        } else {
            for comp in next.iter_mut() {
                for (x, e) in comp.iter_mut().zip(&self.decay) {
                    *x = *x * *e;
                }
            }
        }
        let v = SpectralField::from_coefficients(grid, next).map_err(|_| fail())?;
        if !v.is_finite() {
            return Err(fail());
        }
        let v = if self.config.nonlinear {
            let mut p = leray_project(&v).map_err(|_| fail())?;
            // drop any round-off mean
            for c in 0..3 {
                p.component_mut(c)[0] = czero();
            }
            p
        } else {
            v
        };
        Ok(SolverState {
            t: T::from_usize_lossy(state.step + 1) * dt,
            step: state.step + 1,
            v: v.with_divergence_free(true),
        })
    }

    /// c / (n · max|u|).
    pub fn cfl_bound(&self, u_max: T) -> T {
        if u_max > T::zero() {
            self.config.cfl / (T::from_usize_lossy(self.grid().n()) * u_max)
        } else {
            T::infinity()
        }
    }

    /// Integrate from `v0` to the final time, recording block norms, the
    /// velocity sup norm and (optionally) the J-term ledger.
    pub fn run(&self, v0: &SpectralField<T>) -> Result<RunRecord<T>> {
        let mut state = self.initial_state(v0)?;
        let cfg = &self.config;
        let steps = cfg.total_steps();
        let record_dt = cfg.dt * T::from_usize_lossy(cfg.record_stride);
        let ledger_dt = cfg.dt * T::from_usize_lossy(cfg.ledger_stride.max(1));
        let mut blocks = BlockSeries::empty(record_dt, self.lp.block_count());
        let (mut grad, mut u_inf, mut v_l2) = (Vec::new(), Vec::new(), Vec::new());
        let mut ledger = EnergyLedger::new(&self.lp, &state.v, ledger_dt);
        let mut failure = None;
        let mut cfl_violation = false;
        let (mut max_div, mut max_herm) = (T::zero(), T::zero());

        for step in 0..steps {
            if step % cfg.record_stride == 0 {
                let u = biot_savart(&state.v)?;
                blocks.push(&self.lp.block_norms(&state.v));
                grad.push(state.v.grad_l2_norm());
                u_inf.push(u.linf_norm());
                v_l2.push(state.v.l2_norm());
                max_div = max_div.max(state.v.max_abs_divergence()?);
                max_herm = max_herm.max(state.v.hermitian_defect());
            }
            if cfg.ledger_stride != 0 && step % cfg.ledger_stride == 0 {
                ledger.push_row(&self.lp, state.t, &state.v, cfg.nonlinear)?;
            }
            ledger.accumulate(&self.lp, &state.v, &self.dissipation_weight);
            match self.step(&state) {
                Ok(next) => state = next,
                Err(f) => {
                    failure = Some(f.describe());
                    cfl_violation = matches!(f, StepFailure::Cfl { .. });
                    break;
                }
            }
        }
        if failure.is_none() && cfg.ledger_stride != 0 {
            ledger.push_row(&self.lp, state.t, &state.v, cfg.nonlinear)?;
            ledger.close();
        }
        ledger.finish(&self.lp, &state.v);
        let series = |values: Vec<T>| TimeSeries::new(record_dt, values);
        let record = RunRecord {
            blocks,
            grad_l2: series(grad)?,
            u_inf: series(u_inf)?,
            v_l2: series(v_l2)?,
            max_divergence: max_div,
            max_hermitian_defect: max_herm,
            ledger,
            final_state: state,
            failure,
            cfl_violation,
        };
        Ok(record)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{curl, divergence};
    use crate::init;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn solver(n: usize, cfg: SolverConfig<f64>) -> Solver<f64> {
        let lp = Dyadic::with_default_cutoffs(&Grid::new(n).unwrap());
        Solver::new(lp, cfg).unwrap()
    }

    #[test]
    fn beltrami_nonlinearity_vanishes() {
        let g = Grid::<f64>::new(16).unwrap();
        let v = init::abc(&g, 1.0, 0.8, 0.6);
        let nl = nonlinear_term(&v).unwrap();
        assert!(nl.coefficient_energy().sqrt() < 1e-13 * v.coefficient_energy().sqrt());
        let z = SpectralField::zeros(&g, 3);
        assert_eq!(nonlinear_term(&z).unwrap().coefficient_energy(), 0.0);
    }

    #[test]
    fn nonlinearity_is_divergence_free_and_matches_advection_form() {
        let g = Grid::<f64>::new(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (v, u) = init::random_vorticity(&g, 1.0, &mut rng);
        let nl = nonlinear_term(&v).unwrap();
        let div = divergence(&nl).unwrap();
        assert!(div.coefficient_energy().sqrt() < 1e-12 * nl.coefficient_energy().sqrt());

        // (u·∇)v − (v·∇)u, assembled from dealiased scalar products
        let mut expect = SpectralField::zeros(&g, 3);
        for i in 0..3 {
            let mut acc = SpectralField::zeros(&g, 1);
            for l in 0..3 {
                let ul = scalar(&u, l);
                let vl = scalar(&v, l);
                let dvi = crate::calculus::partial(&scalar(&v, i), l);
                let dui = crate::calculus::partial(&scalar(&u, i), l);
                acc = &acc + &crate::dealias::product(&ul, &dvi);
                acc = &acc - &crate::dealias::product(&vl, &dui);
            }
            expect.component_mut(i).copy_from_slice(acc.component(0));
        }
        assert!(nl.relative_l2_error(&expect) < 1e-11);
        let _ = curl(&u);
    }

    fn scalar(f: &SpectralField<f64>, c: usize) -> SpectralField<f64> {
        SpectralField::from_coefficients(f.grid(), vec![f.component(c).to_vec()]).unwrap()
    }

    #[test]
    fn linear_mode_decays_exactly() {
        let cfg = SolverConfig {
            dt: 0.01,
            t_final: 0.1,
            nonlinear: false,
            ..Default::default()
        };
        let s = solver(16, cfg);
        let u = init::solenoidal_mode(s.grid(), [2, 1, 0], 1.0);
        let v0 = curl(&u).unwrap();
        let mut st = s.initial_state(&v0).unwrap();
        for _ in 0..10 {
            st = s.step(&st).unwrap();
        }
        let expect = v0.scaled((-5.0f64 * 0.1).exp());
        assert!(st.v.relative_l2_error(&expect) < 1e-14);
        assert!((st.t - 0.1).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        let mut cfg = SolverConfig::<f64> {
            dt: 0.01,
            t_final: 0.1,
            record_stride: 3,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        cfg.record_stride = 5;
        assert!(cfg.validate().is_ok());
        cfg.t_final = 0.105;
        assert!(cfg.validate().is_err());
        cfg.t_final = 0.1;
        cfg.dt = -1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn cfl_violation_is_reported_with_state() {
        let cfg = SolverConfig {
            dt: 0.05,
            t_final: 0.1,
            ..Default::default()
        };
        let s = solver(16, cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (v0, _) = init::random_vorticity(s.grid(), 10.0, &mut rng);
        let st = s.initial_state(&v0).unwrap();
        match s.step(&st) {
            Err(StepFailure::Cfl { dt, bound, last_valid }) => {
                assert!(dt > bound);
                assert_eq!(last_valid.step, 0);
            }
            other => panic!("expected CFL failure, got {other:?}"),
        }
        let rec = s.run(&v0).unwrap();
        assert!(rec.is_truncated() && rec.cfl_violation);
        assert_eq!(rec.u_inf.len(), 1);
    }

    #[test]
    fn zero_initial_data_stays_zero() {
        let cfg = SolverConfig {
            dt: 0.01,
            t_final: 0.1,
            ledger_stride: 5,
            ..Default::default()
        };
        let s = solver(8, cfg);
        let rec = s.run(&SpectralField::zeros(s.grid(), 3)).unwrap();
        assert!(rec.u_inf.values().iter().all(|&x| x == 0.0));
        assert!(rec.grad_l2.values().iter().all(|&x| x == 0.0));
        assert_eq!(rec.blocks.len(), 10);
        assert!(!rec.is_truncated());
    }
}
