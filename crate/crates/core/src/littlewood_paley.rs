//! Dyadic cutoff system, the block operators Δ_q and the partial sums S_j.
//!
//! The profiles are built from one smooth monotone step θ with θ = 1 on
//! r ≤ 1 and θ = 0 on r ≥ 1 + 1/(3s) (s ≥ 1 is the sharpness). Then
//! χ = θ and φ(r) = θ(r/2) − θ(r), so χ + Σ_q φ(2^{-q} r) telescopes to
//! θ(2^{-Q-1} r), which is exactly 1 once 2^{Q+1} ≥ r.

use crate::error::{Error, Result};
use crate::field::{derivative_k2, SpectralField};
use crate::grid::Grid;
use crate::scalar::Real;

/// Radial profiles χ and φ of a Littlewood-Paley partition of unity.
#[derive(Clone, Debug, PartialEq)]
pub struct CutoffSystem<T: Real> {
    sharpness: T,
    outer: T,
}

impl<T: Real> CutoffSystem<T> {
    /// Build the partition with transition band [1, 1 + 1/(3·sharpness)].
    pub fn new(sharpness: T) -> Result<Self> {
        if !sharpness.is_finite() || sharpness < T::one() {
            return Err(Error::InvalidSharpness(sharpness.to_f64_lossy()));
        }
        let outer = T::one() + T::one() / (T::lit(3.0) * sharpness);
        Ok(Self { sharpness, outer })
    }

    pub fn sharpness(&self) -> T {
        self.sharpness
    }

    /// Radius beyond which χ vanishes (4/3 at sharpness 1).
    pub fn chi_support_radius(&self) -> T {
        self.outer
    }

    /// Smooth step: 1 on r ≤ 1, 0 on r ≥ outer.
    pub fn theta(&self, r: T) -> T {
        if r <= T::one() {
            return T::one();
        }
        if r >= self.outer {
            return T::zero();
        }
        let x = (self.outer - r) / (self.outer - T::one());
        let a = bump(x);
        let b = bump(T::one() - x);
        a / (a + b)
    }

    pub fn chi(&self, r: T) -> T {
        self.theta(r)
    }

    pub fn phi(&self, r: T) -> T {
        self.theta(r / T::lit(2.0)) - self.theta(r)
    }

    /// Multiplier of block q at radius r: χ(r) for q = −1, φ(2^{-q} r) else.
    pub fn weight(&self, q: i32, r: T) -> T {
        if q < 0 {
            self.chi(r)
        } else {
            self.phi(r / T::lit(2.0).powi(q))
        }
    }

    /// χ(r) + Σ_{q=0}^{q_max} φ(2^{-q} r).
    pub fn partition_sum(&self, r: T, q_max: i32) -> T {
        (-1..=q_max).fold(T::zero(), |acc, q| acc + self.weight(q, r))
    }

    /// χ²(r) + Σ_{q=0}^{q_max} φ²(2^{-q} r).
    pub fn square_sum(&self, r: T, q_max: i32) -> T {
        (-1..=q_max).fold(T::zero(), |acc, q| {
            let w = self.weight(q, r);
            acc + w * w
        })
    }

    /// Blocks whose transition band [2^q, 2^q·outer] is narrower than the
    /// unit lattice spacing of integer wavevectors on `grid`.
    pub fn resolution_warnings(&self, grid: &Grid<T>) -> Vec<String> {
        let band = self.outer - T::one();
        (0..=q_max(grid.n()))
            .filter_map(|q| {
                let width = band * T::lit(2.0).powi(q);
                (width < T::one()).then(|| {
                    format!(
                        "block {q}: transition width {:.4} is below the lattice spacing",
                        width.to_f64_lossy()
                    )
                })
            })
            .collect()
    }
}

impl<T: Real> Default for CutoffSystem<T> {
    fn default() -> Self {
        Self::new(T::one()).expect("unit sharpness is valid")
    }
}

fn bump<T: Real>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        (-T::one() / x).exp()
    }
}

/// Largest block index whose annulus is fully represented:
/// the largest q with (3/4)·2^q ≤ n/2.
pub fn q_max(n: usize) -> i32 {
    let mut q = 0;
    while 3 * (1usize << (q + 1)) <= 2 * n {
        q += 1;
    }
    q
}

/// Distinct |k| over the wavevectors −n/2 ≤ k_i < n/2 of an n³ grid, in
/// increasing order.
pub fn distinct_magnitudes<T: Real>(n: usize) -> Vec<T> {
    let h = (n / 2) as i64;
    // |k|² of a, b, c in [0, h] covers every sign pattern
    let mut squares: Vec<i64> = Vec::with_capacity(((h + 1) * (h + 1) * (h + 1)) as usize);
    for a in 0..=h {
        for b in 0..=h {
            for c in 0..=h {
                squares.push(a * a + b * b + c * c);
            }
        }
    }
    squares.sort_unstable();
    squares.dedup();
    squares
        .into_iter()
        .map(|s| T::from_i64(s).unwrap().sqrt())
        .collect()
}

/// Littlewood-Paley decomposition bound to a grid: the cutoff system plus
/// the tabulated multiplier of every block at every wavevector.
#[derive(Clone, Debug)]
pub struct Dyadic<T: Real> {
    grid: Grid<T>,
    cutoffs: CutoffSystem<T>,
    q_max: i32,
    // weights[q + 1][flat]
    weights: Vec<Vec<T>>,
    magnitudes: Vec<T>,
}

impl<T: Real> Dyadic<T> {
    pub fn new(grid: &Grid<T>, cutoffs: CutoffSystem<T>) -> Self {
        let q_max = q_max(grid.n());
        let magnitudes = grid.magnitudes();
        let weights = (-1..=q_max)
            .map(|q| magnitudes.iter().map(|&r| cutoffs.weight(q, r)).collect())
            .collect();
        Self {
            grid: grid.clone(),
            cutoffs,
            q_max,
            weights,
            magnitudes,
        }
    }

    pub fn with_default_cutoffs(grid: &Grid<T>) -> Self {
        Self::new(grid, CutoffSystem::default())
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn cutoffs(&self) -> &CutoffSystem<T> {
        &self.cutoffs
    }

    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    /// Block indices −1..=q_max.
    pub fn blocks(&self) -> std::ops::RangeInclusive<i32> {
        -1..=self.q_max
    }

    pub fn block_count(&self) -> usize {
        (self.q_max + 2) as usize
    }

    fn check(&self, q: i32) -> Result<()> {
        if q < -1 || q > self.q_max {
            Err(Error::BlockOutOfRange { q, q_max: self.q_max })
        } else {
            Ok(())
        }
    }

    /// Multiplier table of block q.
    pub fn table(&self, q: i32) -> Result<&[T]> {
        self.check(q)?;
        Ok(&self.weights[(q + 1) as usize])
    }

    /// Multiplier table of S_j = Σ_{k=-1}^{j-1} Δ_k.
    pub fn partial_sum_table(&self, j: i32) -> Result<Vec<T>> {
        if j < -1 || j > self.q_max + 1 {
            return Err(Error::BlockOutOfRange { q: j, q_max: self.q_max + 1 });
        }
        let mut acc = vec![T::zero(); self.grid.len()];
        for k in -1..j {
            for (a, w) in acc.iter_mut().zip(&self.weights[(k + 1) as usize]) {
                *a = *a + *w;
            }
        }
        Ok(acc)
    }

    /// Δ_q v.
    pub fn delta(&self, v: &SpectralField<T>, q: i32) -> Result<SpectralField<T>> {
        if v.grid() != &self.grid {
            return Err(Error::GridMismatch(v.grid().n(), self.grid.n()));
        }
        let t = self.table(q)?;
        Ok(v.apply_table(t).with_divergence_free(v.is_flagged_divergence_free()))
    }

    /// S_j v = Σ_{k=-1}^{j-1} Δ_k v, with S_{-1} = 0 and S_0 = Δ_{-1}.
    pub fn partial_sum(&self, v: &SpectralField<T>, j: i32) -> Result<SpectralField<T>> {
        if v.grid() != &self.grid {
            return Err(Error::GridMismatch(v.grid().n(), self.grid.n()));
        }
        let t = self.partial_sum_table(j)?;
        Ok(v.apply_table(&t).with_divergence_free(v.is_flagged_divergence_free()))
    }

    /// Every block of `v`, indexed by q + 1.
    pub fn decompose(&self, v: &SpectralField<T>) -> Result<DyadicBlocks<T>> {
        let blocks = self
            .blocks()
            .map(|q| self.delta(v, q))
            .collect::<Result<Vec<_>>>()?;
        Ok(DyadicBlocks { blocks })
    }

    /// ‖∇Δ_q v‖₂ / (2^q ‖Δ_q v‖₂).
    pub fn bernstein_ratio(&self, v: &SpectralField<T>, q: i32) -> Result<T> {
        let t = self.table(q)?;
        let n = self.grid.n();
        let (mut mass, mut grad) = (T::zero(), T::zero());
        for comp in v.components() {
            for (flat, (c, w)) in comp.iter().zip(t).enumerate() {
                let e = c.norm_sqr() * *w * *w;
                mass = mass + e;
                grad = grad + e * derivative_k2(&self.grid, flat, n);
            }
        }
        if mass == T::zero() {
            return Err(Error::ZeroBlock(q));
        }
        Ok((grad / mass).sqrt() / T::lit(2.0).powi(q))
    }

    /// ‖Δ_q v‖₂ and ‖∇Δ_q v‖₂ for every block, indexed by q + 1.
    pub fn block_norms(&self, v: &SpectralField<T>) -> Vec<(T, T)> {
        let n = self.grid.n();
        let vol = self.grid.volume();
        let k2: Vec<T> = (0..self.grid.len())
            .map(|f| derivative_k2(&self.grid, f, n))
            .collect();
        let mut energy = vec![T::zero(); self.grid.len()];
        for comp in v.components() {
            for (e, c) in energy.iter_mut().zip(comp) {
                *e = *e + c.norm_sqr();
            }
        }
        self.weights
            .iter()
            .map(|w| {
                let (mut m, mut g) = (T::zero(), T::zero());
                for ((e, wi), kk) in energy.iter().zip(w).zip(&k2) {
                    let x = *e * *wi * *wi;
                    m = m + x;
                    g = g + x * *kk;
                }
                ((vol * m).sqrt(), (vol * g).sqrt())
            })
            .collect()
    }

    /// |k| at every flat index.
    pub fn magnitudes(&self) -> &[T] {
        &self.magnitudes
    }

    /// Distinct wavevector magnitudes present on the grid.
    pub fn distinct_magnitudes(&self) -> Vec<T> {
        distinct_magnitudes(self.grid.n())
    }
}

/// Δ_q v for q = −1..=q_max.
#[derive(Clone, Debug)]
pub struct DyadicBlocks<T: Real> {
    blocks: Vec<SpectralField<T>>,
}

impl<T: Real> DyadicBlocks<T> {
    pub fn block(&self, q: i32) -> &SpectralField<T> {
        &self.blocks[(q + 1) as usize]
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, &SpectralField<T>)> {
        self.blocks.iter().enumerate().map(|(i, b)| (i as i32 - 1, b))
    }

    /// Σ_q Δ_q v.
    pub fn reconstruct(&self) -> SpectralField<T> {
        let mut acc = self.blocks[0].clone();
        for b in &self.blocks[1..] {
            acc = &acc + b;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::init;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn q_max_matches_definition() {
        // largest q with (3/4) 2^q <= n/2
        for n in [8usize, 16, 32, 64, 128] {
            let q = q_max(n);
            assert!(0.75 * 2f64.powi(q) <= n as f64 / 2.0);
            assert!(0.75 * 2f64.powi(q + 1) > n as f64 / 2.0);
        }
        assert_eq!(q_max(32), 4);
    }

    #[test]
    fn rejects_soft_sharpness() {
        assert!(CutoffSystem::<f64>::new(0.5).is_err());
        assert!(CutoffSystem::<f64>::new(f64::NAN).is_err());
        assert!(CutoffSystem::<f64>::new(2.0).is_ok());
    }

    #[test]
    fn profile_values() {
        let c = CutoffSystem::<f64>::default();
        assert_eq!(c.chi(0.0), 1.0);
        assert_eq!(c.chi(1.0), 1.0);
        assert_eq!(c.chi(4.0 / 3.0), 0.0);
        assert_eq!(c.phi(1.0), 0.0);
        assert_eq!(c.phi(1.5), 1.0);
        assert_eq!(c.phi(2.0), 1.0);
        assert_eq!(c.phi(8.0 / 3.0), 0.0);
        // telescoping at r = 1.5: χ(1.5) = 0, φ(1.5) = 1, φ(0.75) = 0
        assert_eq!(c.chi(1.5) + c.phi(1.5) + c.phi(0.75), 1.0);
        let r = 1.2;
        assert!((c.chi(r) + c.phi(r) + c.phi(r / 2.0) - 1.0).abs() < 1e-15);
        assert!(c.chi(r) > 0.0 && c.chi(r) < 1.0);
    }

    #[test]
    fn supports_are_inside_the_stated_balls() {
        let c = CutoffSystem::<f64>::new(1.0).unwrap();
        for i in 0..=4000 {
            let r = i as f64 * 1e-3;
            if r >= 4.0 / 3.0 {
                assert_eq!(c.chi(r), 0.0);
            }
            if r <= 0.75 || r >= 8.0 / 3.0 {
                assert_eq!(c.phi(r), 0.0);
            }
            assert!((0.0..=1.0).contains(&c.phi(r)));
        }
    }

    #[test]
    fn delta_on_single_modes() {
        let g = Grid::<f64>::new(16).unwrap();
        let lp = Dyadic::with_default_cutoffs(&g);
        // |k| = 3 = 1.5 * 2: interior of block 1 where φ = 1
        let v = init::cosine_mode(&g, 1, 0, [3, 0, 0], 1.0);
        assert!(lp.delta(&v, 1).unwrap().relative_l2_error(&v) < 1e-15);
        assert_eq!(lp.delta(&v, 0).unwrap().coefficient_energy(), 0.0);
        // |k| = 2^q sits where φ(1) = 0; it belongs entirely to block q - 1
        let v = init::cosine_mode(&g, 1, 0, [4, 0, 0], 1.0);
        assert_eq!(lp.delta(&v, 2).unwrap().coefficient_energy(), 0.0);
        assert!(lp.delta(&v, 1).unwrap().relative_l2_error(&v) < 1e-15);
        // χ(1) = 1
        let v = init::cosine_mode(&g, 1, 0, [1, 0, 0], 1.0);
        assert!(lp.delta(&v, -1).unwrap().relative_l2_error(&v) < 1e-15);
        let z = SpectralField::zeros(&g, 3);
        assert_eq!(lp.delta(&z, 2).unwrap().coefficient_energy(), 0.0);
        assert!(matches!(lp.delta(&v, 4), Err(Error::BlockOutOfRange { .. })));
        assert!(matches!(lp.delta(&v, -2), Err(Error::BlockOutOfRange { .. })));
    }

    #[test]
    fn partial_sums() {
        let g = Grid::<f64>::new(16).unwrap();
        let lp = Dyadic::with_default_cutoffs(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = init::random_band_limited(&g, 3, 0.0, 8.0, &mut rng);
        assert_eq!(lp.partial_sum(&v, -1).unwrap().coefficient_energy(), 0.0);
        assert_eq!(lp.partial_sum(&v, 0).unwrap(), lp.delta(&v, -1).unwrap());
        for j in -1..=lp.q_max() {
            let diff = &lp.partial_sum(&v, j + 1).unwrap() - &lp.partial_sum(&v, j).unwrap();
            assert!(diff.relative_l2_error(&lp.delta(&v, j).unwrap()) < 1e-12);
        }
        let full = lp.partial_sum(&v, lp.q_max() + 1).unwrap();
        assert!(full.relative_l2_error(&v) < 1e-12);
        assert!(lp.partial_sum(&v, lp.q_max() + 2).is_err());
    }

    #[test]
    fn bernstein_single_modes() {
        let g = Grid::<f64>::new(16).unwrap();
        let lp = Dyadic::with_default_cutoffs(&g);
        let v = init::cosine_mode(&g, 1, 0, [3, 0, 0], 1.0);
        assert!((lp.bernstein_ratio(&v, 1).unwrap() - 1.5).abs() < 1e-14);
        let v = init::cosine_mode(&g, 1, 0, [1, 0, 0], 1.0);
        // |k| / 2^{-1} = 2, below the (8/3) cap
        assert!((lp.bernstein_ratio(&v, -1).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(lp.bernstein_ratio(&v, 2), Err(Error::ZeroBlock(2)));
    }

    #[test]
    fn almost_orthogonality() {
        let g = Grid::<f64>::new(32).unwrap();
        let lp = Dyadic::with_default_cutoffs(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let v = init::random_band_limited(&g, 1, 0.0, 16.0, &mut rng);
        for q in lp.blocks() {
            for j in lp.blocks() {
                if (q - j).abs() >= 2 {
                    let dd = lp.delta(&lp.delta(&v, j).unwrap(), q).unwrap();
                    assert!(dd.coefficient_energy().sqrt() <= 1e-12 * v.coefficient_energy().sqrt());
                }
            }
        }
    }

    #[test]
    fn warnings_flag_narrow_bands() {
        let g = Grid::<f64>::new(32).unwrap();
        let c = CutoffSystem::new(1.0).unwrap();
        // width 2^q / 3 < 1 for q = 0, 1
        assert_eq!(c.resolution_warnings(&g).len(), 2);
        let c = CutoffSystem::new(100.0).unwrap();
        assert_eq!(c.resolution_warnings(&g).len(), 5);
    }
}
