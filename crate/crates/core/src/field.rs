//! Real-valued scalar and vector fields stored as Fourier coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{Direction, Grid};
use crate::scalar::Real;

pub(crate) type C<T> = Complex<T>;

#[inline]
pub(crate) fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

/// Fourier coefficients of a real scalar (1 component) or vector
/// (3 components) field on a periodic grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField<T: Real> {
    grid: Grid<T>,
    comps: Vec<Vec<C<T>>>,
    divergence_free: bool,
}

impl<T: Real> SpectralField<T> {
    pub fn zeros(grid: &Grid<T>, ncomp: usize) -> Self {
        assert!(ncomp == 1 || ncomp == 3, "fields have 1 or 3 components");
        Self {
            grid: grid.clone(),
            comps: vec![vec![czero(); grid.len()]; ncomp],
            divergence_free: ncomp == 3,
        }
    }

    pub fn from_coefficients(grid: &Grid<T>, comps: Vec<Vec<C<T>>>) -> Result<Self> {
        if comps.len() != 1 && comps.len() != 3 {
            return Err(Error::ComponentMismatch {
                expected: "scalar or vector",
                got: comps.len(),
            });
        }
        for c in &comps {
            if c.len() != grid.len() {
                return Err(Error::SampleCount {
                    expected: grid.len(),
                    got: c.len(),
                });
            }
        }
        Ok(Self {
            grid: grid.clone(),
            comps,
            divergence_free: false,
        })
    }

    /// Forward transform of physical samples, one `n³` array per component.
    pub fn from_samples(grid: &Grid<T>, samples: &[Vec<T>]) -> Result<Self> {
        if samples.len() != 1 && samples.len() != 3 {
            return Err(Error::ComponentMismatch {
                expected: "scalar or vector",
                got: samples.len(),
            });
        }
        for s in samples {
            if s.len() != grid.len() {
                return Err(Error::SampleCount {
                    expected: grid.len(),
                    got: s.len(),
                });
            }
        }
        let refs: Vec<&[T]> = samples.iter().map(|s| s.as_slice()).collect();
        let comps = forward_real(grid.n(), &refs, |d, dir| grid.fft_base(d, dir));
        Ok(Self {
            grid: grid.clone(),
            comps,
            divergence_free: false,
        })
    }

    /// Physical samples of every component on the base grid.
    pub fn to_samples(&self) -> Vec<Vec<T>> {
        let refs: Vec<&[C<T>]> = self.comps.iter().map(|c| c.as_slice()).collect();
        inverse_real(&refs, |d, dir| self.grid.fft_base(d, dir))
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn ncomp(&self) -> usize {
        self.comps.len()
    }

    #[inline]
    pub fn is_vector(&self) -> bool {
        self.comps.len() == 3
    }

    #[inline]
    pub fn component(&self, c: usize) -> &[C<T>] {
        &self.comps[c]
    }

    #[inline]
    pub fn component_mut(&mut self, c: usize) -> &mut [C<T>] {
        self.divergence_free = false;
        &mut self.comps[c]
    }

    pub fn components(&self) -> &[Vec<C<T>>] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<Vec<C<T>>> {
        self.comps
    }

    /// Whether the field is known to be divergence-free (set by `curl`,
    /// `leray_project` and `biot_savart`).
    pub fn is_flagged_divergence_free(&self) -> bool {
        self.is_vector() && self.divergence_free
    }

    pub(crate) fn with_divergence_free(mut self, flag: bool) -> Self {
        self.divergence_free = flag && self.is_vector();
        self
    }

    pub fn coefficient(&self, c: usize, k: [i64; 3]) -> Option<C<T>> {
        self.grid.index_of(k).map(|f| self.comps[c][f])
    }

    pub(crate) fn require_vector(&self) -> Result<()> {
        if self.is_vector() {
            Ok(())
        } else {
            Err(Error::ComponentMismatch {
                expected: "vector",
                got: self.ncomp(),
            })
        }
    }

    pub(crate) fn require_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch(self.grid.n(), other.grid.n()))
        }
    }

    /// Apply a real Fourier multiplier that depends only on the flat index.
    pub fn map_multiplier(&self, mut weight: impl FnMut(usize) -> T) -> Self {
        let mut out = self.clone();
        let w: Vec<T> = (0..self.grid.len()).map(&mut weight).collect();
        for comp in &mut out.comps {
            for (c, &wi) in comp.iter_mut().zip(&w) {
                *c = *c * wi;
            }
        }
        out.divergence_free = self.divergence_free;
        out
    }

    /// Coefficientwise multiplication by a precomputed real table.
    pub fn apply_table(&self, table: &[T]) -> Self {
        let mut out = self.clone();
        for comp in &mut out.comps {
            for (c, &wi) in comp.iter_mut().zip(table) {
                *c = *c * wi;
            }
        }
        out
    }

    /// Σ |coeff|² over all components (no volume factor).
    pub fn coefficient_energy(&self) -> T {
        let mut acc = T::zero();
        for comp in &self.comps {
            for c in comp {
                acc = acc + c.norm_sqr();
            }
        }
        acc
    }

    /// Continuum L² norm on the box via Parseval, including the (2π)^{3/2}
    /// volume factor.
    pub fn l2_norm(&self) -> T {
        (self.grid.volume() * self.coefficient_energy()).sqrt()
    }

    /// max over grid points of the Euclidean magnitude of the field.
    pub fn linf_norm(&self) -> T {
        let samples = self.to_samples();
        pointwise_max_magnitude(&samples)
    }

    /// ‖∇f‖₂ computed spectrally (sum over all components).
    pub fn grad_l2_norm(&self) -> T {
        let n = self.grid.n();
        let mut acc = T::zero();
        for comp in &self.comps {
            for (flat, c) in comp.iter().enumerate() {
                let k2 = derivative_k2(&self.grid, flat, n);
                acc = acc + c.norm_sqr() * k2;
            }
        }
        (self.grid.volume() * acc).sqrt()
    }

    /// Real inner product ∫ f·g dx, via the coefficient inner product.
    pub fn inner(&self, other: &Self) -> Result<T> {
        self.require_same_grid(other)?;
        if self.ncomp() != other.ncomp() {
            return Err(Error::ComponentMismatch {
                expected: if self.is_vector() { "vector" } else { "scalar" },
                got: other.ncomp(),
            });
        }
        let mut acc = T::zero();
        for (a, b) in self.comps.iter().zip(&other.comps) {
            for (x, y) in a.iter().zip(b) {
                acc = acc + (x.conj() * y).re;
            }
        }
        Ok(acc * self.grid.volume())
    }

    /// ‖self − other‖₂ / ‖other‖₂ (absolute difference when `other` is zero).
    pub fn relative_l2_error(&self, reference: &Self) -> T {
        let mut diff = T::zero();
        for (a, b) in self.comps.iter().zip(&reference.comps) {
            for (x, y) in a.iter().zip(b) {
                diff = diff + (x - y).norm_sqr();
            }
        }
        let denom = reference.coefficient_energy();
        if denom > T::zero() {
            (diff / denom).sqrt()
        } else {
            diff.sqrt()
        }
    }

    /// Largest violation of Hermitian symmetry, max_k |c(−k) − conj c(k)|.
    pub fn hermitian_defect(&self) -> T {
        let mut worst = T::zero();
        for comp in &self.comps {
            for flat in 0..self.grid.len() {
                let j = self.grid.conjugate_index(flat);
                worst = worst.max((comp[j] - comp[flat].conj()).norm());
            }
        }
        worst
    }

    /// max over k of |Σ_j k_j c_j(k)| / ‖c(k)‖ for a vector field.
    pub fn divergence_defect(&self) -> Result<T> {
        self.require_vector()?;
        let n = self.grid.n();
        let mut worst = T::zero();
        for flat in 0..self.grid.len() {
            let k = derivative_k(&self.grid, flat, n);
            let mut div = czero::<T>();
            let mut mag = T::zero();
            for c in 0..3 {
                div = div + self.comps[c][flat] * k[c];
                mag = mag + self.comps[c][flat].norm_sqr();
            }
            if mag > T::zero() {
                worst = worst.max(div.norm() / mag.sqrt());
            }
        }
        Ok(worst)
    }

    /// max over k of |k·c(k)|, the absolute divergence defect.
    pub fn max_abs_divergence(&self) -> Result<T> {
        self.require_vector()?;
        let n = self.grid.n();
        let mut worst = T::zero();
        for flat in 0..self.grid.len() {
            let k = derivative_k(&self.grid, flat, n);
            let mut div = czero::<T>();
            for c in 0..3 {
                div = div + self.comps[c][flat] * k[c];
            }
            worst = worst.max(div.norm());
        }
        Ok(worst)
    }

    /// Mean (k = 0) coefficient magnitude over all components.
    pub fn mean_magnitude(&self) -> T {
        self.comps
            .iter()
            .map(|c| c[0].norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    /// Zero every coefficient on a Nyquist index.
    pub fn strip_nyquist(&mut self) {
        let n = self.grid.n();
        for comp in &mut self.comps {
            for (flat, c) in comp.iter_mut().enumerate() {
                if has_nyquist(flat, n) {
                    *c = czero();
                }
            }
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C<T>, C<T>) -> C<T>) -> Self {
        assert_eq!(self.grid, other.grid, "fields on different grids");
        assert_eq!(self.ncomp(), other.ncomp(), "component count mismatch");
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
            .collect();
        Self {
            grid: self.grid.clone(),
            comps,
            divergence_free: self.divergence_free && other.divergence_free,
        }
    }

    pub fn scaled(&self, s: T) -> Self {
        let mut out = self.clone();
        for comp in &mut out.comps {
            for c in comp.iter_mut() {
                *c = *c * s;
            }
        }
        out
    }
}

impl<'a, T: Real> Add for &'a SpectralField<T> {
    type Output = SpectralField<T>;
    fn add(self, rhs: Self) -> SpectralField<T> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<'a, T: Real> Sub for &'a SpectralField<T> {
    type Output = SpectralField<T>;
    fn sub(self, rhs: Self) -> SpectralField<T> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<'a, T: Real> Mul<T> for &'a SpectralField<T> {
    type Output = SpectralField<T>;
    fn mul(self, rhs: T) -> SpectralField<T> {
        self.scaled(rhs)
    }
}

impl<'a, T: Real> Neg for &'a SpectralField<T> {
    type Output = SpectralField<T>;
    fn neg(self) -> SpectralField<T> {
        self.scaled(-T::one())
    }
}

#[inline]
pub(crate) fn has_nyquist(flat: usize, n: usize) -> bool {
    let (a, rem) = (flat / (n * n), flat % (n * n));
    let (b, c) = (rem / n, rem % n);
    a == n / 2 || b == n / 2 || c == n / 2
}

#[inline]
pub(crate) fn derivative_k<T: Real>(grid: &Grid<T>, flat: usize, n: usize) -> [T; 3] {
    let (a, rem) = (flat / (n * n), flat % (n * n));
    let (b, c) = (rem / n, rem % n);
    [
        T::from_i64(grid.derivative_wavenumber(a)).unwrap(),
        T::from_i64(grid.derivative_wavenumber(b)).unwrap(),
        T::from_i64(grid.derivative_wavenumber(c)).unwrap(),
    ]
}

#[inline]
pub(crate) fn derivative_k2<T: Real>(grid: &Grid<T>, flat: usize, n: usize) -> T {
    let k = derivative_k(grid, flat, n);
    k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
}

pub(crate) fn pointwise_max_magnitude<T: Real>(samples: &[Vec<T>]) -> T {
    let len = samples.first().map_or(0, |s| s.len());
    let mut worst = T::zero();
    for i in 0..len {
        let mut m2 = T::zero();
        for s in samples {
            m2 = m2 + s[i] * s[i];
        }
        worst = worst.max(m2);
    }
    worst.sqrt()
}

#[inline]
fn conj_index(flat: usize, n: usize) -> usize {
    let (a, rem) = (flat / (n * n), flat % (n * n));
    let (b, c) = (rem / n, rem % n);
    let neg = |i: usize| (n - i) % n;
    (neg(a) * n + neg(b)) * n + neg(c)
}

/// Forward transform of real arrays on an `n³` grid, two at a time through
/// one complex FFT. Output carries the 1/n³ normalization.
pub(crate) fn forward_real<T: Real>(
    n: usize,
    inputs: &[&[T]],
    fft: impl Fn(&mut [C<T>], Direction),
) -> Vec<Vec<C<T>>> {
    let len = n * n * n;
    let scale = T::one() / T::from_usize_lossy(len);
    let half = T::lit(0.5);
    let mut out = Vec::with_capacity(inputs.len());
    for pair in inputs.chunks(2) {
        let mut buf: Vec<C<T>> = match pair {
            [a, b] => a.iter().zip(b.iter()).map(|(&x, &y)| Complex::new(x, y)).collect(),
            [a] => a.iter().map(|&x| Complex::new(x, T::zero())).collect(),
            _ => unreachable!(),
        };
        fft(&mut buf, Direction::Forward);
        if pair.len() == 1 {
            out.push(buf.into_iter().map(|c| c * scale).collect());
            continue;
        }
        let mut first = vec![czero(); len];
        let mut second = vec![czero(); len];
        for flat in 0..len {
            let z = buf[flat];
            let zc = buf[conj_index(flat, n)].conj();
            first[flat] = (z + zc) * (half * scale);
            // (z - zc) / 2i
            let d = (z - zc) * (half * scale);
            second[flat] = Complex::new(d.im, -d.re);
        }
        out.push(first);
        out.push(second);
    }
    out
}

/// Inverse transform of Hermitian spectra on an `n³` grid to real samples,
/// two at a time through one complex FFT.
pub(crate) fn inverse_real<T: Real>(
    inputs: &[&[C<T>]],
    fft: impl Fn(&mut [C<T>], Direction),
) -> Vec<Vec<T>> {
    let mut out = Vec::with_capacity(inputs.len());
    for pair in inputs.chunks(2) {
        let mut buf: Vec<C<T>> = match pair {
            [a, b] => a
                .iter()
                .zip(b.iter())
                .map(|(&x, &y)| x + Complex::new(-y.im, y.re))
                .collect(),
            [a] => a.to_vec(),
            _ => unreachable!(),
        };
        fft(&mut buf, Direction::Inverse);
        out.push(buf.iter().map(|c| c.re).collect());
        if pair.len() == 2 {
            out.push(buf.iter().map(|c| c.im).collect());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(n: usize) -> Grid<f64> {
        Grid::new(n).unwrap()
    }

    #[test]
    fn zero_field_has_zero_coefficients() {
        let g = grid(8);
        let f = SpectralField::from_samples(&g, &[vec![0.0; g.len()]]).unwrap();
        assert_eq!(f.coefficient_energy(), 0.0);
        assert_eq!(f.l2_norm(), 0.0);
        assert_eq!(f.linf_norm(), 0.0);
    }

    #[test]
    fn cosine_maps_to_half_at_unit_wavevectors() {
        let g = grid(16);
        let s: Vec<f64> = (0..g.len()).map(|i| g.point(i)[0].cos()).collect();
        let f = SpectralField::from_samples(&g, &[s]).unwrap();
        for flat in 0..g.len() {
            let k = g.wavevector(flat);
            let c = f.component(0)[flat];
            if k == [1, 0, 0] || k == [-1, 0, 0] {
                assert!((c - Complex::new(0.5, 0.0)).norm() < 1e-14);
            } else {
                assert!(c.norm() < 1e-14, "k={k:?} c={c}");
            }
        }
        let two_pi = 2.0 * std::f64::consts::PI;
        assert_relative_eq!(f.l2_norm(), two_pi.powf(1.5) / 2f64.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(f.linf_norm(), 1.0, max_relative = 1e-13);
    }

    #[test]
    fn paired_transforms_match_single() {
        let g = grid(8);
        let a: Vec<f64> = (0..g.len()).map(|i| ((i * 7 % 13) as f64).sin()).collect();
        let b: Vec<f64> = (0..g.len()).map(|i| ((i * 3 % 11) as f64).cos()).collect();
        let pair = SpectralField::from_samples(&g, &[a.clone(), b.clone(), a.clone()]).unwrap();
        let single = SpectralField::from_samples(&g, &[b]).unwrap();
        for (x, y) in pair.component(1).iter().zip(single.component(0)) {
            assert!((x - y).norm() < 1e-14);
        }
        assert!(pair.hermitian_defect() < 1e-14);
        let back = pair.to_samples();
        for (x, y) in back[2].iter().zip(&a) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn sample_count_is_checked() {
        let g = grid(8);
        let err = SpectralField::from_samples(&g, &[vec![0.0; 10]]).unwrap_err();
        assert_eq!(err, Error::SampleCount { expected: 512, got: 10 });
        let err = SpectralField::from_samples(&g, &[vec![0.0; 512], vec![0.0; 512]]).unwrap_err();
        assert!(matches!(err, Error::ComponentMismatch { .. }));
    }
}
