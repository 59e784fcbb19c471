//! Norms along the time axis: weak-L^p and the dual L^{2,∞} form, the Q-norm
//! built from block series, dyadic level sets, and the two sides of the
//! embedding inequality.
//!
//! Time integrals are left Riemann sums over uniform samples t_i = i·dt and
//! suprema are sample maxima, so a series of N samples represents [0, N·dt).

use crate::calculus::partial;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::littlewood_paley::Dyadic;
use crate::scalar::Real;

/// Uniformly sampled scalar function of time.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries<T: Real> {
    dt: T,
    values: Vec<T>,
}

impl<T: Real> TimeSeries<T> {
    pub fn new(dt: T, values: Vec<T>) -> Result<Self> {
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::InvalidSeries(format!("dt must be positive, got {dt}")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!("non-finite value at sample {i}")));
        }
        Ok(Self { dt, values })
    }

    /// Evenly spaced samples of `f` at t_i = i·dt.
    pub fn sample(dt: T, count: usize, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(
            dt,
            (0..count).map(|i| f(T::from_usize_lossy(i) * dt)).collect(),
        )
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.len()).map(|i| T::from_usize_lossy(i) * self.dt)
    }

    /// Length N·dt of the represented interval.
    pub fn duration(&self) -> T {
        T::from_usize_lossy(self.len()) * self.dt
    }

    pub fn integral(&self) -> T {
        self.values.iter().fold(T::zero(), |a, &v| a + v) * self.dt
    }

    pub fn max(&self) -> T {
        self.values.iter().fold(T::zero(), |a, &v| a.max(v))
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            dt: self.dt,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    fn require_same_axis(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() || self.dt != other.dt {
            return Err(Error::SeriesMismatch(format!(
                "{} samples at dt={} vs {} samples at dt={}",
                self.len(),
                self.dt,
                other.len(),
                other.dt
            )));
        }
        Ok(())
    }

    fn sorted_magnitudes_desc(&self) -> Vec<T> {
        let mut a: Vec<T> = self.values.iter().map(|v| v.abs()).collect();
        a.sort_by(|x, y| y.partial_cmp(x).expect("finite values"));
        a
    }
}

/// Per-block time series of ‖Δ_q v(t)‖₂ and ‖∇Δ_q v(t)‖₂, q = −1..=q_max.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSeries<T: Real> {
    dt: T,
    l2: Vec<Vec<T>>,
    grad: Vec<Vec<T>>,
}

impl<T: Real> BlockSeries<T> {
    pub fn new(dt: T, l2: Vec<Vec<T>>, grad: Vec<Vec<T>>) -> Result<Self> {
        if !(dt > T::zero()) {
            return Err(Error::InvalidSeries("dt must be positive".into()));
        }
        if l2.len() != grad.len() {
            return Err(Error::SeriesMismatch("block counts differ".into()));
        }
        let len = l2.first().map_or(0, |s| s.len());
        if l2.iter().chain(&grad).any(|s| s.len() != len) {
            return Err(Error::SeriesMismatch("blocks have different lengths".into()));
        }
        Ok(Self { dt, l2, grad })
    }

    /// Empty series with one row per block of `lp`.
    pub fn empty(dt: T, block_count: usize) -> Self {
        Self {
            dt,
            l2: vec![Vec::new(); block_count],
            grad: vec![Vec::new(); block_count],
        }
    }

    /// Append the block norms of one snapshot.
    pub fn push(&mut self, norms: &[(T, T)]) {
        assert_eq!(norms.len(), self.l2.len(), "block count mismatch");
        for (q, (m, g)) in norms.iter().enumerate() {
            self.l2[q].push(*m);
            self.grad[q].push(*g);
        }
    }

    /// Block norms of a sequence of snapshots spaced by `dt`.
    pub fn from_fields(lp: &Dyadic<T>, fields: &[SpectralField<T>], dt: T) -> Result<Self> {
        let mut out = Self::empty(dt, lp.block_count());
        for f in fields {
            out.push(&lp.block_norms(f));
        }
        Ok(out)
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.l2.first().map_or(0, |s| s.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn block_count(&self) -> usize {
        self.l2.len()
    }

    /// ‖Δ_q v(t_i)‖₂ series for block q (q ≥ −1).
    pub fn l2(&self, q: i32) -> TimeSeries<T> {
        TimeSeries {
            dt: self.dt,
            values: self.l2[(q + 1) as usize].clone(),
        }
    }

    /// ‖∇Δ_q v(t_i)‖₂ series for block q.
    pub fn grad(&self, q: i32) -> TimeSeries<T> {
        TimeSeries {
            dt: self.dt,
            values: self.grad[(q + 1) as usize].clone(),
        }
    }

    pub fn truncate(&mut self, len: usize) {
        for s in self.l2.iter_mut().chain(self.grad.iter_mut()) {
            s.truncate(len);
        }
    }
}

/// sup_σ σ·|{t : |f(t)| > σ}|^{1/p}, with the measure of a set of samples
/// equal to dt times its count.
///
/// The supremum is approached just below a sample value, so it is the
/// maximum over sorted magnitudes σ_(i) of σ_(i)·((i+1)·dt)^{1/p}.
pub fn weak_lp_time_norm<T: Real>(f: &TimeSeries<T>, p: T) -> Result<T> {
    if !(p > T::one()) {
        return Err(Error::InvalidExponent(p.to_f64_lossy()));
    }
    let inv_p = T::one() / p;
    let sorted = f.sorted_magnitudes_desc();
    Ok(sorted
        .iter()
        .enumerate()
        .map(|(i, &s)| s * (T::from_usize_lossy(i + 1) * f.dt).powf(inv_p))
        .fold(T::zero(), T::max))
}

/// sup over superlevel sets E of |E|^{-1/2} ∫_E |f|.
///
/// Superlevel sets of |f| maximize ∫_E |f| among sets of a given measure,
/// so the supremum over all unions of sample cells is attained here.
pub fn lorentz_dual_norm<T: Real>(f: &TimeSeries<T>) -> T {
    let sorted = f.sorted_magnitudes_desc();
    let mut prefix = T::zero();
    let mut best = T::zero();
    for (i, &s) in sorted.iter().enumerate() {
        prefix = prefix + s;
        let measure = T::from_usize_lossy(i + 1) * f.dt;
        best = best.max(prefix * f.dt / measure.sqrt());
    }
    best
}

/// Σ_q sup_i ½‖Δ_q v(t_i)‖² + Σ_i dt ‖∇v(t_i)‖².
pub fn q_norm_sq<T: Real>(blocks: &BlockSeries<T>, grad_l2: &TimeSeries<T>) -> Result<T> {
    if blocks.len() != grad_l2.len() || blocks.dt != grad_l2.dt {
        return Err(Error::SeriesMismatch(format!(
            "blocks have {} samples at dt={}, gradient series {} at dt={}",
            blocks.len(),
            blocks.dt,
            grad_l2.len(),
            grad_l2.dt
        )));
    }
    let half = T::lit(0.5);
    let sup_part = blocks
        .l2
        .iter()
        .map(|s| s.iter().fold(T::zero(), |a, &x| a.max(half * x * x)))
        .fold(T::zero(), |a, b| a + b);
    let dissipation = grad_l2.map(|g| g * g).integral();
    Ok(sup_part + dissipation)
}

/// One dyadic level set E_k = {t : 2^{-k} < h(t)/M ≤ 2^{-(k-1)}}.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSet<T: Real> {
    pub k: u32,
    pub members: Vec<usize>,
    pub measure: T,
}

/// The sets E_k of a nonnegative series together with the truncated tail.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSetPartition<T: Real> {
    /// M = max h.
    pub m: T,
    /// Nonempty sets in increasing k.
    pub sets: Vec<LevelSet<T>>,
    /// Samples with 0 < h < 1e-14·M, left out of every E_k.
    pub residual: Vec<usize>,
    /// ∫ h over the residual samples.
    pub residual_mass: T,
}

impl<T: Real> LevelSetPartition<T> {
    pub fn sup_on(&self, set: &LevelSet<T>, h: &TimeSeries<T>) -> T {
        set.members
            .iter()
            .fold(T::zero(), |a, &i| a.max(h.values[i]))
    }

    pub fn integral_on(&self, set: &LevelSet<T>, h: &TimeSeries<T>) -> T {
        set.members
            .iter()
            .fold(T::zero(), |a, &i| a + h.values[i])
            * h.dt
    }
}

/// Relative cutoff below which samples are not assigned to any level set.
pub const LEVEL_SET_FLOOR: f64 = 1e-14;

pub fn level_sets<T: Real>(h: &TimeSeries<T>) -> Result<LevelSetPartition<T>> {
    if let Some(i) = h.values.iter().position(|&v| v < T::zero()) {
        return Err(Error::InvalidSeries(format!("negative value at sample {i}")));
    }
    let m = h.max();
    let mut out = LevelSetPartition {
        m,
        sets: Vec::new(),
        residual: Vec::new(),
        residual_mass: T::zero(),
    };
    if m == T::zero() {
        return Ok(out);
    }
    let floor = T::lit(LEVEL_SET_FLOOR) * m;
    let two = T::lit(2.0);
    let mut buckets: std::collections::BTreeMap<u32, Vec<usize>> = Default::default();
    for (i, &v) in h.values.iter().enumerate() {
        if v == T::zero() {
            continue;
        }
        if v < floor {
            out.residual.push(i);
            out.residual_mass = out.residual_mass + v * h.dt;
            continue;
        }
        let r = v / m;
        let guess = (T::one() / r).log2().floor().to_i64().unwrap_or(0).max(0) as i32 + 1;
        let mut k = guess.max(1);
        // pin 2^{-k} < r <= 2^{-(k-1)} exactly
        while r <= two.powi(-k) {
            k += 1;
        }
        while k > 1 && r > two.powi(-(k - 1)) {
            k -= 1;
        }
        buckets.entry(k as u32).or_default().push(i);
    }
    out.sets = buckets
        .into_iter()
        .map(|(k, members)| LevelSet {
            k,
            measure: T::from_usize_lossy(members.len()) * h.dt,
            members,
        })
        .collect();
    Ok(out)
}

/// Spatial integrals ∫ |Δ_j v| |∇Δ_q v| dx for every pair of blocks of one
/// snapshot, by direct quadrature on the physical grid. Indexed `[q+1][j+1]`.
pub fn block_pair_integrals<T: Real>(lp: &Dyadic<T>, v: &SpectralField<T>) -> Result<Vec<Vec<T>>> {
    let grid = lp.grid();
    let mut magnitude = Vec::with_capacity(lp.block_count());
    let mut grad_magnitude = Vec::with_capacity(lp.block_count());
    for q in lp.blocks() {
        let b = lp.delta(v, q)?;
        magnitude.push(pointwise_norm(&b.to_samples()));
        let mut grads = Vec::with_capacity(3 * v.ncomp());
        for axis in 0..3 {
            grads.extend(partial(&b, axis).to_samples());
        }
        grad_magnitude.push(pointwise_norm(&grads));
    }
    let cell = grid.cell_volume();
    Ok(grad_magnitude
        .iter()
        .map(|g| {
            magnitude
                .iter()
                .map(|m| m.iter().zip(g).fold(T::zero(), |a, (x, y)| a + *x * *y) * cell)
                .collect()
        })
        .collect())
}

fn pointwise_norm<T: Real>(comps: &[Vec<T>]) -> Vec<T> {
    let len = comps[0].len();
    (0..len)
        .map(|i| comps.iter().fold(T::zero(), |a, c| a + c[i] * c[i]).sqrt())
        .collect()
}

/// Σ_{q≥−1} Σ_{q−2≤j≤q+4} ∫ |f(t)| ∫ |Δ_j v||∇Δ_q v| dx dt, with the
/// snapshots of v taken at the sample times of f.
pub fn embedding_lhs<T: Real>(
    f: &TimeSeries<T>,
    lp: &Dyadic<T>,
    snapshots: &[SpectralField<T>],
) -> Result<T> {
    if snapshots.len() != f.len() {
        return Err(Error::SeriesMismatch(format!(
            "{} weights vs {} snapshots",
            f.len(),
            snapshots.len()
        )));
    }
    let mut total = T::zero();
    for (&w, v) in f.values.iter().zip(snapshots) {
        if w == T::zero() {
            continue;
        }
        total = total + w.abs() * embedding_window_sum(lp, &block_pair_integrals(lp, v)?);
    }
    Ok(total * f.dt)
}

/// Sum of a `[q+1][j+1]` pair table over the window q−2 ≤ j ≤ q+4.
pub fn embedding_window_sum<T: Real>(lp: &Dyadic<T>, table: &[Vec<T>]) -> T {
    let mut acc = T::zero();
    for q in lp.blocks() {
        for j in (q - 2).max(-1)..=(q + 4).min(lp.q_max()) {
            acc = acc + table[(q + 1) as usize][(j + 1) as usize];
        }
    }
    acc
}

/// Both ends of the level-set chain for one block pair:
/// lhs = (8/3)·2^q ∫|f| h dt and
/// rhs = (8/3)·2^{q+1} ‖f‖ √2 M^{1/2} (∫ h dt)^{1/2}, with ‖f‖ the dual
/// L^{2,∞} norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainBound<T> {
    pub lhs: T,
    pub rhs: T,
}

pub fn chain_bound<T: Real>(f: &TimeSeries<T>, h: &TimeSeries<T>, q: i32) -> Result<ChainBound<T>> {
    f.require_same_axis(h)?;
    let scale = T::lit(8.0 / 3.0) * T::lit(2.0).powi(q);
    let weighted = f
        .values
        .iter()
        .zip(&h.values)
        .fold(T::zero(), |a, (x, y)| a + x.abs() * *y)
        * f.dt;
    let lhs = scale * weighted;
    let rhs = scale
        * T::lit(2.0)
        * lorentz_dual_norm(f)
        * T::lit(2.0).sqrt()
        * h.max().sqrt()
        * h.integral().sqrt();
    Ok(ChainBound { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(dt: f64, v: Vec<f64>) -> TimeSeries<f64> {
        TimeSeries::new(dt, v).unwrap()
    }

    #[test]
    fn constant_weak_norm_is_the_constant() {
        let f = series(1e-3, vec![2.5; 1000]);
        assert!((weak_lp_time_norm(&f, 2.0).unwrap() - 2.5).abs() < 1e-12);
        assert!((lorentz_dual_norm(&f) - 2.5).abs() < 1e-12);
        assert!(matches!(weak_lp_time_norm(&f, 1.0), Err(Error::InvalidExponent(_))));
    }

    #[test]
    fn weak_norm_homogeneity() {
        let f = series(0.01, (0..100).map(|i| ((i * 37 % 17) as f64).sin()).collect());
        let a = weak_lp_time_norm(&f, 3.0).unwrap();
        let b = weak_lp_time_norm(&f.scaled(4.0), 3.0).unwrap();
        assert_eq!(b, 4.0 * a);
    }

    #[test]
    fn series_validation() {
        assert!(TimeSeries::new(0.0, vec![1.0]).is_err());
        assert!(TimeSeries::new(0.1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn level_sets_constant_and_two_valued() {
        let h = series(0.01, vec![3.0; 100]);
        let p = level_sets(&h).unwrap();
        assert_eq!(p.sets.len(), 1);
        assert_eq!(p.sets[0].k, 1);
        assert!((p.sets[0].measure - 1.0).abs() < 1e-12);

        // M/3 lies in (1/4, 1/2] -> E_2
        let v: Vec<f64> = (0..100).map(|i| if i < 30 { 3.0 } else { 1.0 }).collect();
        let p = level_sets(&series(0.01, v)).unwrap();
        assert_eq!(p.sets.iter().map(|s| s.k).collect::<Vec<_>>(), vec![1, 2]);
        assert!((p.sets[0].measure - 0.3).abs() < 1e-12);
        assert!((p.sets[1].measure - 0.7).abs() < 1e-12);

        let p = level_sets(&series(0.1, vec![0.0; 10])).unwrap();
        assert!(p.sets.is_empty());
    }

    #[test]
    fn level_set_edges_are_half_open() {
        // h/M = 1/2 exactly belongs to E_2, 1/4 to E_3
        let p = level_sets(&series(1.0, vec![4.0, 2.0, 1.0, 1e-20])).unwrap();
        let ks: Vec<(u32, Vec<usize>)> = p.sets.iter().map(|s| (s.k, s.members.clone())).collect();
        assert_eq!(ks, vec![(1, vec![0]), (2, vec![1]), (3, vec![2])]);
        assert_eq!(p.residual, vec![3]);
    }

    #[test]
    fn chain_with_constant_inputs() {
        // f ≡ a, h ≡ c on (0,1): lhs = s·a·c, rhs = 2s·a·√2·c  -> ratio 1/(2√2)
        let f = series(1e-2, vec![2.0; 100]);
        let h = series(1e-2, vec![5.0; 100]);
        let b = chain_bound(&f, &h, 1).unwrap();
        assert!((b.lhs / b.rhs - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-12);
        let z = chain_bound(&f, &series(1e-2, vec![0.0; 100]), 0).unwrap();
        assert_eq!((z.lhs, z.rhs), (0.0, 0.0));
    }

    #[test]
    fn q_norm_of_zero() {
        let b = BlockSeries::new(0.1, vec![vec![0.0; 10]; 3], vec![vec![0.0; 10]; 3]).unwrap();
        let g = series(0.1, vec![0.0; 10]);
        assert_eq!(q_norm_sq(&b, &g).unwrap(), 0.0);
        let short = series(0.1, vec![0.0; 9]);
        assert!(q_norm_sq(&b, &short).is_err());
    }
}
