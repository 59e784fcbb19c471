//! Bony paraproduct decomposition uv = T_u v + T_v u + R(u, v) with
//! T_u v = Σ_{j≥1} S_{j−1}u Δ_j v and R(u, v) = Σ_j Σ_{|k−j|≤1} Δ_k u Δ_j v.
//!
//! All products are formed on the 3/2-padded grid. Because the padded
//! transform is linear, each sum of block products is accumulated in
//! physical space and transformed once.

use crate::dealias::{from_padded, spectra_to_padded};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::littlewood_paley::Dyadic;
use crate::scalar::Real;

/// Threshold above which `bony_split` reports a reconstruction fault.
pub const RECONSTRUCTION_FAULT: f64 = 1e-8;

/// Padded physical samples of every block Δ_q f of a scalar field, with the
/// running partial sums S_j f.
#[derive(Clone, Debug)]
pub struct PaddedBlocks<T: Real> {
    q_max: i32,
    // blocks[q + 1]
    blocks: Vec<Vec<T>>,
    // partial[j + 1] = S_j, j = -1..=q_max + 1
    partial: Vec<Vec<T>>,
}

impl<T: Real> PaddedBlocks<T> {
    /// Blocks of component `comp` of `f`.
    pub fn new(lp: &Dyadic<T>, f: &SpectralField<T>, comp: usize) -> Result<Self> {
        if f.grid() != lp.grid() {
            return Err(Error::GridMismatch(f.grid().n(), lp.grid().n()));
        }
        let data = f.component(comp);
        let filtered: Vec<Vec<_>> = lp
            .blocks()
            .map(|q| {
                let t = lp.table(q).expect("block in range");
                data.iter().zip(t).map(|(c, w)| *c * *w).collect()
            })
            .collect();
        let refs: Vec<&[_]> = filtered.iter().map(|c: &Vec<_>| c.as_slice()).collect();
        let blocks = spectra_to_padded(lp.grid(), &refs);
        let len = blocks[0].len();
        let mut partial = Vec::with_capacity(blocks.len() + 1);
        partial.push(vec![T::zero(); len]);
        for b in &blocks {
            let prev = partial.last().expect("seeded");
            let next: Vec<T> = prev.iter().zip(b).map(|(x, y)| *x + *y).collect();
            partial.push(next);
        }
        Ok(Self {
            q_max: lp.q_max(),
            blocks,
            partial,
        })
    }

    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    /// Padded samples of Δ_q f.
    pub fn block(&self, q: i32) -> &[T] {
        &self.blocks[(q + 1) as usize]
    }

    /// Padded samples of S_j f, for −1 ≤ j ≤ q_max + 1.
    pub fn partial_sum(&self, j: i32) -> &[T] {
        &self.partial[(j + 1) as usize]
    }

    pub fn len(&self) -> usize {
        self.blocks[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn fma_into<T: Real>(acc: &mut [T], x: &[T], y: &[T]) {
    for ((a, p), q) in acc.iter_mut().zip(x).zip(y) {
        *a = *a + *p * *q;
    }
}

/// Padded samples of Σ_{j ∈ range, j ≥ 1} S_{j−1}a Δ_j b.
pub fn paraproduct_physical<T: Real>(
    a: &PaddedBlocks<T>,
    b: &PaddedBlocks<T>,
    range: std::ops::RangeInclusive<i32>,
) -> Vec<T> {
    let mut acc = vec![T::zero(); a.len()];
    let lo = (*range.start()).max(1);
    let hi = (*range.end()).min(a.q_max);
    for j in lo..=hi {
        fma_into(&mut acc, a.partial_sum(j - 1), b.block(j));
    }
    acc
}

/// Padded samples of Σ_{j ∈ range} Σ_{k=j−1}^{j+1} Δ_k a Δ_j b.
pub fn remainder_physical<T: Real>(
    a: &PaddedBlocks<T>,
    b: &PaddedBlocks<T>,
    range: std::ops::RangeInclusive<i32>,
) -> Vec<T> {
    let mut acc = vec![T::zero(); a.len()];
    let q_max = a.q_max;
    let lo = (*range.start()).max(-1);
    let hi = (*range.end()).min(q_max);
    for j in lo..=hi {
        for k in (j - 1).max(-1)..=(j + 1).min(q_max) {
            fma_into(&mut acc, a.block(k), b.block(j));
        }
    }
    acc
}

fn scalar_input<T: Real>(f: &SpectralField<T>) -> Result<()> {
    if f.ncomp() == 1 {
        Ok(())
    } else {
        Err(Error::ComponentMismatch {
            expected: "scalar",
            got: f.ncomp(),
        })
    }
}

/// T_a b = Σ_{j=1}^{q_max} S_{j−1}a Δ_j b.
pub fn para_t<T: Real>(
    lp: &Dyadic<T>,
    a: &SpectralField<T>,
    b: &SpectralField<T>,
) -> Result<SpectralField<T>> {
    scalar_input(a)?;
    scalar_input(b)?;
    let pa = PaddedBlocks::new(lp, a, 0)?;
    let pb = PaddedBlocks::new(lp, b, 0)?;
    let phys = paraproduct_physical(&pa, &pb, 1..=lp.q_max());
    Ok(from_padded(lp.grid(), &[phys]))
}

/// R(a, b) = Σ_{j≥−1} Σ_{j−1≤k≤j+1} Δ_k a Δ_j b.
pub fn para_r<T: Real>(
    lp: &Dyadic<T>,
    a: &SpectralField<T>,
    b: &SpectralField<T>,
) -> Result<SpectralField<T>> {
    scalar_input(a)?;
    scalar_input(b)?;
    let pa = PaddedBlocks::new(lp, a, 0)?;
    let pb = PaddedBlocks::new(lp, b, 0)?;
    let phys = remainder_physical(&pa, &pb, -1..=lp.q_max());
    Ok(from_padded(lp.grid(), &[phys]))
}

/// The three pieces of a product ab.
#[derive(Clone, Debug)]
pub struct ParaproductSplit<T: Real> {
    /// T_a b: low frequencies of a times high frequencies of b.
    pub t_ab: SpectralField<T>,
    /// T_b a.
    pub t_ba: SpectralField<T>,
    pub remainder: SpectralField<T>,
    /// Dealiased product ab.
    pub product: SpectralField<T>,
    /// ‖T_a b + T_b a + R − ab‖₂ / ‖ab‖₂.
    pub residual: T,
}

pub fn bony_split<T: Real>(
    lp: &Dyadic<T>,
    a: &SpectralField<T>,
    b: &SpectralField<T>,
) -> Result<ParaproductSplit<T>> {
    scalar_input(a)?;
    scalar_input(b)?;
    let pa = PaddedBlocks::new(lp, a, 0)?;
    let pb = PaddedBlocks::new(lp, b, 0)?;
    let t_ab = paraproduct_physical(&pa, &pb, 1..=lp.q_max());
    let t_ba = paraproduct_physical(&pb, &pa, 1..=lp.q_max());
    let r = remainder_physical(&pa, &pb, -1..=lp.q_max());
    let full = spectra_to_padded(lp.grid(), &[a.component(0), b.component(0)]);
    let prod: Vec<T> = full[0].iter().zip(&full[1]).map(|(x, y)| *x * *y).collect();
    let mut fields = from_padded_many(lp, vec![t_ab, t_ba, r, prod]);
    let product = fields.pop().expect("four fields");
    let remainder = fields.pop().expect("four fields");
    let t_ba = fields.pop().expect("four fields");
    let t_ab = fields.pop().expect("four fields");
    let sum = &(&t_ab + &t_ba) + &remainder;
    let residual = sum.relative_l2_error(&product);
    if residual.to_f64_lossy() > RECONSTRUCTION_FAULT || !residual.is_finite() {
        return Err(Error::Reconstruction(residual.to_f64_lossy()));
    }
    Ok(ParaproductSplit {
        t_ab,
        t_ba,
        remainder,
        product,
        residual,
    })
}

fn from_padded_many<T: Real>(lp: &Dyadic<T>, phys: Vec<Vec<T>>) -> Vec<SpectralField<T>> {
    let refs: Vec<&[T]> = phys.iter().map(|p| p.as_slice()).collect();
    crate::dealias::padded_to_spectra(lp.grid(), &refs)
        .into_iter()
        .map(|c| SpectralField::from_coefficients(lp.grid(), vec![c]).expect("scalar"))
        .collect()
}

/// Comparison of Δ_q applied to a full sum and to its truncated window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowCheck<T> {
    pub q: i32,
    /// ‖Δ_q(full) − Δ_q(window)‖₂.
    pub difference: T,
    /// ‖full‖₂, the scale the difference is measured against.
    pub scale: T,
}

impl<T: Real> WindowCheck<T> {
    pub fn relative(&self) -> T {
        if self.scale > T::zero() {
            self.difference / self.scale
        } else {
            self.difference
        }
    }

    pub fn holds(&self, tol: T) -> bool {
        self.relative() <= tol
    }
}

/// Δ_q(T_v b) from the full sum against the window q−2 ≤ j ≤ q+4, for every
/// block q.
pub fn paraproduct_windows<T: Real>(
    lp: &Dyadic<T>,
    b: &SpectralField<T>,
    v: &SpectralField<T>,
) -> Result<Vec<WindowCheck<T>>> {
    scalar_input(b)?;
    scalar_input(v)?;
    let pv = PaddedBlocks::new(lp, v, 0)?;
    let pb = PaddedBlocks::new(lp, b, 0)?;
    let mut phys = vec![paraproduct_physical(&pv, &pb, 1..=lp.q_max())];
    for q in lp.blocks() {
        phys.push(paraproduct_physical(&pv, &pb, (q - 2)..=(q + 4)));
    }
    compare_windows(lp, phys)
}

/// Δ_q R(a, b) from the full sum against the tail j ≥ q − 3.
pub fn remainder_windows<T: Real>(
    lp: &Dyadic<T>,
    a: &SpectralField<T>,
    b: &SpectralField<T>,
) -> Result<Vec<WindowCheck<T>>> {
    scalar_input(a)?;
    scalar_input(b)?;
    let pa = PaddedBlocks::new(lp, a, 0)?;
    let pb = PaddedBlocks::new(lp, b, 0)?;
    let mut phys = vec![remainder_physical(&pa, &pb, -1..=lp.q_max())];
    for q in lp.blocks() {
        phys.push(remainder_physical(&pa, &pb, (q - 3)..=lp.q_max()));
    }
    compare_windows(lp, phys)
}

fn compare_windows<T: Real>(lp: &Dyadic<T>, phys: Vec<Vec<T>>) -> Result<Vec<WindowCheck<T>>> {
    let mut fields = from_padded_many(lp, phys).into_iter();
    let full = fields.next().expect("full sum present");
    let scale = full.l2_norm();
    lp.blocks()
        .zip(fields)
        .map(|(q, window)| {
            let a = lp.delta(&full, q)?;
            let b = lp.delta(&window, q)?;
            Ok(WindowCheck {
                q,
                difference: (&a - &b).l2_norm(),
                scale,
            })
        })
        .collect()
}

/// Whether Δ_q(T_v b) is reproduced by the window j ∈ [q−2, q+4] to 1e-10.
pub fn support_range_check<T: Real>(
    lp: &Dyadic<T>,
    b: &SpectralField<T>,
    v: &SpectralField<T>,
    q: i32,
) -> Result<bool> {
    if q < -1 || q > lp.q_max() {
        return Err(Error::BlockOutOfRange { q, q_max: lp.q_max() });
    }
    let checks = paraproduct_windows(lp, b, v)?;
    Ok(checks[(q + 1) as usize].holds(T::lit(1e-10)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dealias::product;
    use crate::grid::Grid;
    use crate::init;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(n: usize) -> Dyadic<f64> {
        Dyadic::with_default_cutoffs(&Grid::new(n).unwrap())
    }

    fn random(lp: &Dyadic<f64>, seed: u64) -> SpectralField<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        init::random_band_limited(lp.grid(), 1, 0.0, lp.grid().n() as f64 / 2.0, &mut rng)
    }

    #[test]
    fn zero_inputs_give_zero() {
        let lp = setup(16);
        let z = SpectralField::zeros(lp.grid(), 1);
        let b = random(&lp, 1);
        assert_eq!(para_t(&lp, &z, &b).unwrap().coefficient_energy(), 0.0);
        assert_eq!(para_r(&lp, &z, &b).unwrap().coefficient_energy(), 0.0);
        assert!(support_range_check(&lp, &z, &z, 1).unwrap());
    }

    #[test]
    fn low_times_high_lands_in_t() {
        let lp = setup(32);
        // a in block -1 (|k| = 1), b in block 3 (|k| = 12 = 1.5·8)
        let a = init::cosine_mode(lp.grid(), 1, 0, [1, 0, 0], 1.0);
        let b = init::cosine_mode(lp.grid(), 1, 0, [0, 12, 0], 1.0);
        let ab = product(&a, &b);
        let t_ab = para_t(&lp, &a, &b).unwrap();
        let t_ba = para_t(&lp, &b, &a).unwrap();
        assert!(t_ab.relative_l2_error(&ab) < 1e-13);
        assert!(t_ba.coefficient_energy() < 1e-28);
        assert!(para_r(&lp, &a, &b).unwrap().coefficient_energy() < 1e-28);
    }

    #[test]
    fn same_annulus_lands_in_r() {
        let lp = setup(32);
        let a = init::cosine_mode(lp.grid(), 1, 0, [6, 0, 0], 1.0);
        let b = init::cosine_mode(lp.grid(), 1, 0, [0, 0, 5], 2.0);
        let r = para_r(&lp, &a, &b).unwrap();
        assert!(r.relative_l2_error(&product(&a, &b)) < 1e-13);
        let r2 = para_r(&lp, &b, &a).unwrap();
        assert!(r2.relative_l2_error(&r) < 1e-13);
    }

    #[test]
    fn linearity_of_t() {
        let lp = setup(16);
        let (a, b, c) = (random(&lp, 1), random(&lp, 2), random(&lp, 3));
        let lhs = para_t(&lp, &(&a + &c.scaled(2.0)), &b).unwrap();
        let rhs = &para_t(&lp, &a, &b).unwrap() + &para_t(&lp, &c, &b).unwrap().scaled(2.0);
        assert!(lhs.relative_l2_error(&rhs) < 1e-12);
    }

    #[test]
    fn split_reconstructs_product() {
        let lp = setup(16);
        let (a, b) = (random(&lp, 5), random(&lp, 6));
        let s = bony_split(&lp, &a, &b).unwrap();
        assert!(s.residual < 1e-12);
        // symmetric split of a²
        let s = bony_split(&lp, &a, &a).unwrap();
        assert!(s.t_ab.relative_l2_error(&s.t_ba) < 1e-13);
        let twice = &s.t_ab.scaled(2.0) + &s.remainder;
        assert!(twice.relative_l2_error(&s.product) < 1e-12);
    }

    #[test]
    fn constant_factor_split() {
        let lp = setup(16);
        let mut one = SpectralField::zeros(lp.grid(), 1);
        one.component_mut(0)[0] = num_complex::Complex::new(1.0, 0.0);
        let b = random(&lp, 7);
        let s = bony_split(&lp, &one, &b).unwrap();
        // the constant sits in Δ_{-1}, so T_b 1 = 0 and T_1 b + R = b
        assert!(s.t_ba.coefficient_energy() < 1e-26 * b.coefficient_energy());
        let sum = &s.t_ab + &s.remainder;
        assert!(sum.relative_l2_error(&b) < 1e-12);
    }

    #[test]
    fn windows_hold_for_random_fields() {
        let lp = setup(32);
        let (b, v) = (random(&lp, 8), random(&lp, 9));
        for c in paraproduct_windows(&lp, &b, &v).unwrap() {
            assert!(c.holds(1e-10), "q={} rel={}", c.q, c.relative());
        }
        for c in remainder_windows(&lp, &b, &v).unwrap() {
            assert!(c.holds(1e-10), "q={} rel={}", c.q, c.relative());
        }
    }

    #[test]
    fn vector_inputs_rejected() {
        let lp = setup(8);
        let v = SpectralField::zeros(lp.grid(), 3);
        let s = SpectralField::zeros(lp.grid(), 1);
        assert!(para_t(&lp, &v, &s).is_err());
        assert!(support_range_check(&lp, &s, &s, 9).is_err());
    }
}
