//! Dyadic energy bookkeeping: the couplings J₁, J₂, J₃ obtained by splitting
//! each entry of Bv into remainder and the two paraproducts, the per-block
//! energy inequality, and the a priori summary of a run.

use num_complex::Complex;

use super::{RunRecord, PAIRS};
use crate::calculus::biot_savart;
use crate::dealias::{padded_to_spectra, spectra_to_padded};
use crate::error::{Error, Result};
use crate::field::{derivative_k, SpectralField, C};
use crate::grid::Direction;
use crate::littlewood_paley::Dyadic;
use crate::norms::{lorentz_dual_norm, q_norm_sq, weak_lp_time_norm};
use crate::scalar::Real;

/// Coupling integrands of one block at one time:
/// `j[m] = 2∫Δ_q P_m : ∇Δ_q v dx` with P₀ the remainder part of Bv, P₁ the
/// part T_v u (low v, high u) and P₂ the part T_u v (low u, high v).
/// `direct` is the same integral with the unsplit Bv.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JTerms<T> {
    pub q: i32,
    pub j: [T; 3],
    pub direct: T,
}

impl<T: Real> JTerms<T> {
    pub fn split_sum(&self) -> T {
        self.j[0] + self.j[1] + self.j[2]
    }

    fn zero(q: i32) -> Self {
        Self {
            q,
            j: [T::zero(); 3],
            direct: T::zero(),
        }
    }
}

/// J-term integrands for every block q of the state `v` (velocity `u`).
pub fn j_terms<T: Real>(lp: &Dyadic<T>, v: &SpectralField<T>, u: &SpectralField<T>) -> Result<Vec<JTerms<T>>> {
    v.require_vector()?;
    u.require_vector()?;
    v.require_same_grid(u)?;
    if v.grid() != lp.grid() {
        return Err(Error::GridMismatch(v.grid().n(), lp.grid().n()));
    }
    let grid = lp.grid();
    let nb = lp.block_count();
    assert!(nb <= MAX_BLOCKS, "{nb} blocks exceed the fused kernel");
    let fields: Vec<&[C<T>]> = (0..3)
        .map(|c| u.component(c))
        .chain((0..3).map(|c| v.component(c)))
        .collect();
    let blocks = padded_blocks(lp, &fields);

    // parts[m * 3 + p]: part m of tensor entry PAIRS[p], assembled point by
    // point from the block samples of the six fields
    let len = blocks[0].len() / nb;
    let mut parts: Vec<Vec<T>> = vec![vec![T::zero(); len]; 9];
    let mut near = [[T::zero(); MAX_BLOCKS]; 6];
    let mut low = [[T::zero(); MAX_BLOCKS]; 6];
    for x in 0..len {
        let field = |f: usize| &blocks[f][x * nb..(x + 1) * nb];
        for f in 0..6 {
            block_sums(field(f), &mut near[f][..nb], &mut low[f][..nb]);
        }
        let dot = |w: &[T; MAX_BLOCKS], f: usize| field(f).iter().zip(w).fold(T::zero(), |s, (b, w)| s + *w * *b);
        for (p, &(i, l)) in PAIRS.iter().enumerate() {
            let (ui, ul, vi, vl) = (i, l, 3 + i, 3 + l);
            parts[p][x] = dot(&near[vi], ul) - dot(&near[ui], vl);
            parts[3 + p][x] = dot(&low[vi], ul) - dot(&low[vl], ui);
            parts[6 + p][x] = dot(&low[ul], vi) - dot(&low[ui], vl);
        }
    }

    // unsplit entries from the plain dealiased products
    let phys = spectra_to_padded(grid, &fields);
    let (up, vp) = phys.split_at(3);
    for &(i, l) in PAIRS.iter() {
        parts.push(
            vp[i].iter()
                .zip(&up[l])
                .zip(up[i].iter().zip(&vp[l]))
                .map(|((a, b), (c, d))| *a * *b - *c * *d)
                .collect(),
        );
    }
    let refs: Vec<&[T]> = parts.iter().map(|p| p.as_slice()).collect();
    let hats = padded_to_spectra(grid, &refs);

    // Per-mode contraction conj(P̂_il)·i(k_l v̂_i − k_i v̂_l), summed over the
    // three independent entries, for each of the four tensors.
    let n = grid.n();
    let mut contraction = vec![[T::zero(); 4]; grid.len()];
    for (flat, out) in contraction.iter_mut().enumerate() {
        let k = derivative_k(grid, flat, n);
        for (p, &(i, l)) in PAIRS.iter().enumerate() {
            let g = v.component(i)[flat] * k[l] - v.component(l)[flat] * k[i];
            let ig = Complex::new(-g.im, g.re);
            for (m, o) in out.iter_mut().enumerate() {
                *o = *o + (hats[m * 3 + p][flat].conj() * ig).re;
            }
        }
    }
    let factor = T::lit(2.0) * grid.volume();
    lp.blocks()
        .map(|q| {
            let w = lp.table(q)?;
            let mut acc = [T::zero(); 4];
            for (c, wi) in contraction.iter().zip(w) {
                let w2 = *wi * *wi;
                for m in 0..4 {
                    acc[m] = acc[m] + c[m] * w2;
                }
            }
            Ok(JTerms {
                q,
                j: [acc[0] * factor, acc[1] * factor, acc[2] * factor],
                direct: acc[3] * factor,
            })
        })
        .collect()
}

const MAX_BLOCKS: usize = 16;

/// Padded samples of every block of each spectrum, interleaved point-major:
/// `out[s][x * nb + q + 1]`. Keeping one point's blocks together avoids
/// streaming dozens of equally aligned arrays at once.
fn padded_blocks<T: Real>(lp: &Dyadic<T>, spectra: &[&[C<T>]]) -> Vec<Vec<T>> {
    let grid = lp.grid();
    let nb = lp.block_count();
    let m = grid.padded_n();
    let len = m * m * m;
    let tables: Vec<&[T]> = lp.blocks().map(|q| lp.table(q).expect("block in range")).collect();
    // Low blocks live on a few lines per axis; skip the rest in the
    // first two transform passes.
    let reach = |t: &[T]| {
        t.iter()
            .enumerate()
            .filter(|(_, w)| !w.is_zero())
            .map(|(f, _)| grid.wavevector(f).iter().map(|k| k.abs()).max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    };
    let pairs: Vec<(usize, Option<usize>, Vec<bool>)> = (0..nb)
        .step_by(2)
        .map(|j| {
            let second = (j + 1 < nb).then_some(j + 1);
            let r = reach(tables[j]).max(second.map_or(0, |k| reach(tables[k])));
            (j, second, grid.padded_lines(r))
        })
        .collect();
    let zero = C::new(T::zero(), T::zero());
    let mut buf = vec![zero; len];
    let filter = |spectrum: &[C<T>], t: &[T]| -> Vec<C<T>> { spectrum.iter().zip(t).map(|(c, w)| *c * *w).collect() };
    spectra
        .iter()
        .map(|spectrum| {
            let mut out = vec![T::zero(); len * nb];
            for (j, second, lines) in &pairs {
                let a = filter(spectrum, tables[*j]);
                let b = second.map(|k| filter(spectrum, tables[k]));
                buf.fill(zero);
                grid.pad_pair_into(&mut buf, &a, b.as_deref());
                grid.fft_padded_within(&mut buf, Direction::Inverse, lines);
                match second {
                    Some(k) => {
                        for (point, z) in out.chunks_exact_mut(nb).zip(&buf) {
                            point[*j] = z.re;
                            point[*k] = z.im;
                        }
                    }
                    None => {
                        for (point, z) in out.chunks_exact_mut(nb).zip(&buf) {
                            point[*j] = z.re;
                        }
                    }
                }
            }
            out
        })
        .collect()
}

/// For the blocks a_j (j = q + 1) of one field at one point: the sums
/// `near[j] = a_{j−1} + a_j + a_{j+1}` pairing with block j in the remainder,
/// and `low[j] = S_{q−1}a` pairing with block j in the paraproduct (zero for
/// q < 1).
#[inline]
fn block_sums<T: Real>(a: &[T], near: &mut [T], low: &mut [T]) {
    let nb = a.len();
    let mut prefix = [T::zero(); MAX_BLOCKS + 1];
    for j in 0..nb {
        prefix[j + 1] = prefix[j] + a[j];
    }
    for j in 0..nb {
        near[j] = prefix[(j + 2).min(nb)] - prefix[j.saturating_sub(1)];
        low[j] = if j >= 2 { prefix[j - 1] } else { T::zero() };
    }
}

/// Per-block energy record of a run.
///
/// Block energies, their supremum and the dissipation integral are updated at
/// every accepted step; the J-term rows are taken every `dt / solver dt`
/// steps. Dissipation over a step uses the exact heat-flow weight
/// (1 − e^{−2|k|²dt})/2 per mode.
#[derive(Clone, Debug)]
pub struct EnergyLedger<T: Real> {
    dt: T,
    q_max: i32,
    times: Vec<T>,
    rows: Vec<Vec<JTerms<T>>>,
    initial_half: Vec<T>,
    final_half: Vec<T>,
    sup_half: Vec<T>,
    dissipation: Vec<T>,
    steps: usize,
    // a row at the final time exists: integrate by the trapezoid rule
    closed: bool,
}

impl<T: Real> EnergyLedger<T> {
    pub(crate) fn new(lp: &Dyadic<T>, v0: &SpectralField<T>, dt: T) -> Self {
        let half = half_energies(lp, v0);
        Self {
            dt,
            q_max: lp.q_max(),
            times: Vec::new(),
            rows: Vec::new(),
            final_half: half.clone(),
            sup_half: half.clone(),
            initial_half: half,
            dissipation: vec![T::zero(); lp.block_count()],
            steps: 0,
            closed: false,
        }
    }

    pub(crate) fn push_row(&mut self, lp: &Dyadic<T>, t: T, v: &SpectralField<T>, coupled: bool) -> Result<()> {
        let row = if coupled {
            j_terms(lp, v, &biot_savart(v)?)?
        } else {
            lp.blocks().map(JTerms::zero).collect()
        };
        self.times.push(t);
        self.rows.push(row);
        Ok(())
    }

    pub(crate) fn accumulate(&mut self, lp: &Dyadic<T>, v: &SpectralField<T>, weight: &[T]) {
        let vol = lp.grid().volume();
        let energy = mode_energy(v);
        for (idx, q) in lp.blocks().enumerate() {
            let w = lp.table(q).expect("block in range");
            let (mut e, mut d) = (T::zero(), T::zero());
            for ((x, wi), g) in energy.iter().zip(w).zip(weight) {
                let y = *x * *wi * *wi;
                e = e + y;
                d = d + y * *g;
            }
            let half = e * vol * T::lit(0.5);
            self.sup_half[idx] = self.sup_half[idx].max(half);
            self.dissipation[idx] = self.dissipation[idx] + d * vol;
        }
        self.steps += 1;
    }

    pub(crate) fn close(&mut self) {
        self.closed = true;
    }

    pub(crate) fn finish(&mut self, lp: &Dyadic<T>, v: &SpectralField<T>) {
        self.final_half = half_energies(lp, v);
        for (s, f) in self.sup_half.iter_mut().zip(&self.final_half) {
            *s = s.max(*f);
        }
    }

    fn idx(&self, q: i32) -> usize {
        assert!((-1..=self.q_max).contains(&q), "block {q} out of range");
        (q + 1) as usize
    }

    /// Spacing of the J-term rows.
    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn rows(&self) -> &[Vec<JTerms<T>>] {
        &self.rows
    }

    pub fn has_rows(&self) -> bool {
        !self.rows.is_empty()
    }

    /// Number of steps folded into the dissipation integrals.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn initial_half_energy(&self, q: i32) -> T {
        self.initial_half[self.idx(q)]
    }

    pub fn final_half_energy(&self, q: i32) -> T {
        self.final_half[self.idx(q)]
    }

    pub fn sup_half_energy(&self, q: i32) -> T {
        self.sup_half[self.idx(q)]
    }

    /// ∫‖∇Δ_q v‖² over the integrated interval.
    pub fn dissipation(&self, q: i32) -> T {
        self.dissipation[self.idx(q)]
    }

    /// Whether the rows reach the final time. Closed ledgers integrate by
    /// the trapezoid rule, open (truncated) ones by a left Riemann sum.
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    fn integrate(&self, i: usize, f: impl Fn(&JTerms<T>) -> T) -> T {
        let mut sum = self.rows.iter().fold(T::zero(), |acc, r| acc + f(&r[i]));
        if self.closed {
            if let (Some(first), Some(last)) = (self.rows.first(), self.rows.last()) {
                sum = sum - (f(&first[i]) + f(&last[i])) * T::lit(0.5);
            }
        }
        sum * self.dt
    }

    /// ∫|J_m| dt for block q.
    pub fn j_integral(&self, q: i32, m: usize) -> T {
        self.integrate(self.idx(q), |r| r.j[m].abs())
    }

    /// sup_t ½‖Δ_q v‖² − ‖Δ_q v₀‖² + ∫‖∇Δ_q v‖².
    pub fn inequality_lhs(&self, q: i32) -> T {
        self.sup_half_energy(q) - T::lit(2.0) * self.initial_half_energy(q) + self.dissipation(q)
    }

    pub fn inequality_rhs(&self, q: i32) -> T {
        (0..3).fold(T::zero(), |acc, m| acc + self.j_integral(q, m))
    }

    /// Left side minus right side of the block energy inequality; ≤ 0 when it
    /// holds.
    pub fn residual(&self, q: i32) -> T {
        self.inequality_lhs(q) - self.inequality_rhs(q)
    }

    /// ½‖Δ_q v(T)‖² − ½‖Δ_q v₀‖² + ∫‖∇Δ_q v‖² − ½∫ΣJ: the defect of the
    /// block energy identity, limited by the row quadrature.
    pub fn identity_defect(&self, q: i32) -> T {
        let i = self.idx(q);
        let coupling = self.integrate(i, |r| r.split_sum()) * T::lit(0.5);
        self.final_half[i] - self.initial_half[i] + self.dissipation[i] - coupling
    }

    /// Largest |ΣJ_m − J_direct| relative to the largest coupling magnitude
    /// in the ledger. Zero for an empty or uncoupled ledger.
    pub fn split_defect(&self) -> T {
        let (mut worst, mut scale) = (T::zero(), T::zero());
        for r in self.rows.iter().flatten() {
            worst = worst.max((r.split_sum() - r.direct).abs());
            let mag = r.j.iter().fold(r.direct.abs(), |a, x| a + x.abs());
            scale = scale.max(mag);
        }
        if scale == T::zero() {
            T::zero()
        } else {
            worst / scale
        }
    }
}

fn mode_energy<T: Real>(v: &SpectralField<T>) -> Vec<T> {
    let mut energy = vec![T::zero(); v.grid().len()];
    for comp in v.components() {
        for (e, c) in energy.iter_mut().zip(comp) {
            *e = *e + c.norm_sqr();
        }
    }
    energy
}

fn half_energies<T: Real>(lp: &Dyadic<T>, v: &SpectralField<T>) -> Vec<T> {
    lp.block_norms(v)
        .into_iter()
        .map(|(l2, _)| l2 * l2 * T::lit(0.5))
        .collect()
}

/// Summary of the a priori estimate over one run.
#[derive(Clone, Debug, PartialEq)]
pub struct AprioriSummary<T> {
    /// ‖u‖_{L²_w(0,T;L^∞)}.
    pub weak_u: T,
    /// Dual (Lorentz) form of the same quantity.
    pub dual_u: T,
    pub q_norm_sq: T,
    /// ‖v₀‖²₂.
    pub v0_sq: T,
    /// Σ_q ∫|J_m| for m = 1, 2, 3.
    pub j_totals: [T; 3],
    /// j_totals / (weak_u · ‖v‖²_Q); zero when the denominator vanishes.
    pub j_ratios: [T; 3],
    /// Energy-inequality residual per block (index q + 1).
    pub residuals: Vec<T>,
    /// Energy-identity defect per block (index q + 1).
    pub identity_defects: Vec<T>,
    pub split_defect: T,
}

impl<T: Real> AprioriSummary<T> {
    pub fn from_run(record: &RunRecord<T>) -> Result<Self> {
        let ledger = &record.ledger;
        let v0 = record
            .v_l2
            .values()
            .first()
            .copied()
            .ok_or_else(|| Error::InvalidSeries("empty run".into()))?;
        let weak_u = weak_lp_time_norm(&record.u_inf, T::lit(2.0))?;
        let dual_u = lorentz_dual_norm(&record.u_inf);
        let q_norm_sq = q_norm_sq(&record.blocks, &record.grad_l2)?;
        let qs = -1..=ledger.q_max();
        let mut j_totals = [T::zero(); 3];
        for (m, total) in j_totals.iter_mut().enumerate() {
            *total = qs.clone().fold(T::zero(), |a, q| a + ledger.j_integral(q, m));
        }
        let denom = weak_u * q_norm_sq;
        let j_ratios = j_totals.map(|j| if denom > T::zero() { j / denom } else { T::zero() });
        Ok(Self {
            weak_u,
            dual_u,
            q_norm_sq,
            v0_sq: v0 * v0,
            j_totals,
            j_ratios,
            residuals: qs.clone().map(|q| ledger.residual(q)).collect(),
            identity_defects: qs.map(|q| ledger.identity_defect(q)).collect(),
            split_defect: ledger.split_defect(),
        })
    }

    /// ‖v‖²_Q / ‖v₀‖²₂.
    pub fn q_ratio(&self) -> T {
        if self.v0_sq > T::zero() {
            self.q_norm_sq / self.v0_sq
        } else {
            T::zero()
        }
    }

    pub fn max_residual(&self) -> T {
        self.residuals.iter().copied().fold(T::neg_infinity(), T::max)
    }
}

/// Result of the discrete Hardy-Young inequality on one sequence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HardyYoung<T> {
    pub lhs: T,
    /// (Σ a_j²)^{1/2}.
    pub norm: T,
    /// lhs / norm, 0 for the zero sequence.
    pub ratio: T,
    /// ℓ¹ norm of the kernel 2^{−m/2}: 1/(1 − 2^{−1/2}).
    pub bound: T,
}

/// (Σ_{q≥−1} (Σ_{j≥q−2} 2^{(q−2−j)/2} a_j)²)^{1/2} for a_j given from j = −1.
pub fn hardy_young_check<T: Real>(a: &[T]) -> Result<HardyYoung<T>> {
    if a.iter().any(|x| !(*x >= T::zero()) || !x.is_finite()) {
        return Err(Error::InvalidSeries("sequence must be finite and nonnegative".into()));
    }
    let len = a.len() as i64;
    let bound = T::one() / (T::one() - T::lit(0.5).sqrt());
    let norm = a.iter().fold(T::zero(), |s, x| s + *x * *x).sqrt();
    let mut lhs = T::zero();
    // a_j sits at index j + 1; inner sums vanish once q − 2 passes the last j
    for q in -1..=(len - 2 + 2) {
        let mut inner = T::zero();
        for j in (q - 2).max(-1)..=(len - 2) {
            let m = j - (q - 2);
            inner = inner + a[(j + 1) as usize] * T::lit(2.0).powf(-T::lit(m as f64) * T::lit(0.5));
        }
        lhs = lhs + inner * inner;
    }
    let lhs = lhs.sqrt();
    let ratio = if norm > T::zero() { lhs / norm } else { T::zero() };
    Ok(HardyYoung { lhs, norm, ratio, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::init;
    use crate::solver::{Solver, SolverConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn split_matches_direct_coupling() {
        let g = Grid::<f64>::new(16).unwrap();
        let lp = Dyadic::with_default_cutoffs(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (v, u) = init::random_vorticity(&g, 1.0, &mut rng);
        let rows = j_terms(&lp, &v, &u).unwrap();
        let scale = rows.iter().map(|r| r.direct.abs()).fold(0.0, f64::max);
        assert!(scale > 0.0);
        for r in &rows {
            assert!((r.split_sum() - r.direct).abs() <= 1e-10 * scale, "{r:?}");
        }
        // unsplit coupling equals −2∫Δ_q div(Bv)·Δ_q v
        let nl = super::super::nonlinear_term(&v).unwrap();
        for r in &rows {
            let dn = lp.delta(&nl, r.q).unwrap();
            let dv = lp.delta(&v, r.q).unwrap();
            let expect = -2.0 * dn.inner(&dv).unwrap();
            assert!((expect - r.direct).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn pointwise_kernels_match_block_products() {
        use crate::paraproduct::{paraproduct_physical, remainder_physical, PaddedBlocks};
        let g = Grid::<f64>::new(16).unwrap();
        let lp = Dyadic::with_default_cutoffs(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = init::random_band_limited(&g, 3, 0.0, f64::INFINITY, &mut rng);
        let (pa, pb) = (PaddedBlocks::new(&lp, &f, 0).unwrap(), PaddedBlocks::new(&lp, &f, 1).unwrap());
        let rem = remainder_physical(&pa, &pb, lp.blocks());
        let para = paraproduct_physical(&pa, &pb, lp.blocks());
        let blocks = padded_blocks(&lp, &[f.component(0), f.component(1)]);
        let scale = rem.iter().chain(&para).fold(0.0f64, |m, x| m.max(x.abs()));
        let nb = lp.block_count();
        let (mut near, mut low) = (vec![0.0; nb], vec![0.0; nb]);
        for x in (0..rem.len()).step_by(37) {
            let (a, b) = (&blocks[0][x * nb..(x + 1) * nb], &blocks[1][x * nb..(x + 1) * nb]);
            block_sums(a, &mut near, &mut low);
            let dot = |w: &[f64]| w.iter().zip(b).map(|(w, b)| w * b).sum::<f64>();
            assert!((dot(&near) - rem[x]).abs() <= 1e-13 * scale);
            assert!((dot(&low) - para[x]).abs() <= 1e-13 * scale);
        }
    }

    #[test]
    fn zero_velocity_gives_zero_couplings() {
        let g = Grid::<f64>::new(8).unwrap();
        let lp = Dyadic::with_default_cutoffs(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (v, _) = init::random_vorticity(&g, 1.0, &mut rng);
        let u = SpectralField::zeros(&g, 3);
        let scale = v.l2_norm() * v.grad_l2_norm();
        for r in j_terms(&lp, &v, &u).unwrap() {
            assert!(r.j.iter().all(|x| x.abs() < 1e-13 * scale));
            assert!(r.direct.abs() < 1e-13 * scale);
        }
    }

    #[test]
    fn separated_annuli_have_no_remainder() {
        let g = Grid::<f64>::new(32).unwrap();
        let lp = Dyadic::with_default_cutoffs(&g);
        // velocity in block −1, vorticity in block 3
        let u = &init::solenoidal_mode(&g, [1, 0, 0], 1.0) + &init::solenoidal_mode(&g, [0, 1, 0], 0.7);
        let v = &init::solenoidal_mode(&g, [0, 12, 0], 1.0) + &init::solenoidal_mode(&g, [12, 0, 0], 0.5);
        let rows = j_terms(&lp, &v, &u).unwrap();
        let scale = u.l2_norm() * v.grad_l2_norm();
        for r in &rows {
            assert!(r.j[0].abs() <= 1e-12 * scale, "{r:?}");
        }
    }

    #[test]
    fn heat_flow_ledger() {
        let g = Grid::<f64>::new(16).unwrap();
        let lp = Dyadic::with_default_cutoffs(&g);
        let cfg = SolverConfig {
            dt: 1e-2,
            t_final: 1.0,
            ledger_stride: 10,
            nonlinear: false,
            ..Default::default()
        };
        let s = Solver::new(lp, cfg).unwrap();
        let u = init::solenoidal_mode(&g, [0, 3, 0], 1.0);
        let v0 = crate::calculus::curl(&u).unwrap();
        let rec = s.run(&v0).unwrap();
        let sum = AprioriSummary::from_run(&rec).unwrap();
        assert_eq!(sum.j_ratios, [0.0; 3]);
        assert!(sum.q_ratio() <= 1.5);
        let e0 = v0.l2_norm().powi(2);
        for q in -1..=rec.ledger.q_max() {
            // exact exponential quadrature: identity holds to round-off
            assert!(rec.ledger.identity_defect(q).abs() < 1e-12 * e0);
            assert!(rec.ledger.residual(q) <= 0.0);
        }
        // single mode |k| = 3, all mass in block 1: ½e0 + e0(1 − e^{−18})/2
        let d = rec.ledger.dissipation(1);
        assert!((d - e0 * (1.0 - (-18.0f64).exp()) / 2.0).abs() < 1e-12 * e0);
    }

    #[test]
    fn hardy_young_one_hot() {
        for len in [4usize, 16, 64] {
            for hot in 0..len {
                let mut a = vec![0.0f64; len];
                a[hot] = 2.5;
                let hy = hardy_young_check(&a).unwrap();
                // q runs from −1 to j + 2: m = 0..=j+3 with j = hot − 1
                let expect = (0..=hot + 2).map(|m| 0.5f64.powi(m as i32)).sum::<f64>().sqrt();
                assert!((hy.ratio - expect).abs() < 1e-14);
                assert!(hy.ratio <= 2f64.sqrt() + 1e-15);
            }
        }
        let far = {
            let mut a = vec![0.0f64; 64];
            a[63] = 1.0;
            hardy_young_check(&a).unwrap().ratio
        };
        assert!((far - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn hardy_young_zero_and_random() {
        let z = hardy_young_check(&[0.0f64; 10]).unwrap();
        assert_eq!((z.lhs, z.ratio), (0.0, 0.0));
        assert!(hardy_young_check(&[1.0, -1.0]).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let a: Vec<f64> = (0..64).map(|_| rng.gen::<f64>()).collect();
            let hy = hardy_young_check(&a).unwrap();
            assert!(hy.ratio <= hy.bound + 1e-10);
            assert!((hy.bound - 3.414213562373095).abs() < 1e-12);
        }
    }
}
