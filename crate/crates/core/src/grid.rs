//! Periodic grid on the box [0, 2π)³ and its discrete Fourier transforms.
//!
//! Coefficients use the Fourier-series normalization: the forward transform
//! carries the factor 1/n³ so that a sample of `cos(x₁)` maps to ½ at
//! k = (±1, 0, 0). Index `i` along an axis corresponds to the integer
//! wavenumber `i` for `i < n/2` and `i - n` otherwise.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone)]
struct Plans<T: Real> {
    size: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> Plans<T> {
    fn new(planner: &mut FftPlanner<T>, size: usize) -> Self {
        Self {
            size,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }
}

struct GridInner<T: Real> {
    n: usize,
    base: Plans<T>,
    padded: Plans<T>,
    // padded-axis index of each base index (None at the Nyquist index)
    pad_index: Vec<Option<usize>>,
    // padded-axis indices that carry base wavenumbers
    active: Vec<bool>,
}

/// An `n³` periodic grid with cached FFT plans for the base and the
/// 3/2-padded resolution. Cloning is cheap.
#[derive(Clone)]
pub struct Grid<T: Real> {
    inner: Arc<GridInner<T>>,
}

impl<T: Real> fmt::Debug for Grid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("n", &self.n()).finish()
    }
}

impl<T: Real> PartialEq for Grid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.n() == other.n()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

impl<T: Real> Grid<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGridSize(n));
        }
        let mut planner = FftPlanner::new();
        let base = Plans::new(&mut planner, n);
        let m = 3 * n / 2;
        let padded = Plans::new(&mut planner, m);
        let pad_index: Vec<Option<usize>> = (0..n)
            .map(|i| (i != n / 2).then(|| wavenumber(i, n).rem_euclid(m as i64) as usize))
            .collect();
        let mut active = vec![false; m];
        for p in pad_index.iter().flatten() {
            active[*p] = true;
        }
        Ok(Self {
            inner: Arc::new(GridInner {
                n,
                base,
                padded,
                pad_index,
                active,
            }),
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.inner.n
    }

    /// Points per dimension of the dealiasing grid (3n/2).
    #[inline]
    pub fn padded_n(&self) -> usize {
        self.inner.padded.size
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n() * self.n() * self.n()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn box_length(&self) -> T {
        T::lit(2.0) * T::PI()
    }

    /// Physical cell volume (2π/n)³, the weight of one grid point in a
    /// spatial quadrature.
    pub fn cell_volume(&self) -> T {
        let h = self.box_length() / T::from_usize_lossy(self.n());
        h * h * h
    }

    /// Volume of the box, (2π)³.
    pub fn volume(&self) -> T {
        let l = self.box_length();
        l * l * l
    }

    /// Integer wavenumber held at FFT index `i` along one axis.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        wavenumber(i, self.n())
    }

    /// Wavenumber used for spectral derivatives: the Nyquist index is mapped
    /// to zero so that derivatives of real fields stay real.
    #[inline]
    pub fn derivative_wavenumber(&self, i: usize) -> i64 {
        if i == self.n() / 2 {
            0
        } else {
            self.wavenumber(i)
        }
    }

    #[inline]
    pub fn is_nyquist(&self, i: usize) -> bool {
        i == self.n() / 2
    }

    /// Integer wavevector at a flat coefficient index.
    #[inline]
    pub fn wavevector(&self, flat: usize) -> [i64; 3] {
        let n = self.n();
        let (a, rem) = (flat / (n * n), flat % (n * n));
        let (b, c) = (rem / n, rem % n);
        [self.wavenumber(a), self.wavenumber(b), self.wavenumber(c)]
    }

    /// Flat index of the wavevector −k for the coefficient stored at `flat`.
    #[inline]
    pub fn conjugate_index(&self, flat: usize) -> usize {
        let n = self.n();
        let (a, rem) = (flat / (n * n), flat % (n * n));
        let (b, c) = (rem / n, rem % n);
        let neg = |i: usize| (n - i) % n;
        (neg(a) * n + neg(b)) * n + neg(c)
    }

    /// Flat index of an integer wavevector, if it is representable.
    pub fn index_of(&self, k: [i64; 3]) -> Option<usize> {
        let n = self.n() as i64;
        let mut flat = 0usize;
        for kc in k {
            if kc < -n / 2 || kc >= n / 2 {
                return None;
            }
            flat = flat * self.n() + kc.rem_euclid(n) as usize;
        }
        Some(flat)
    }

    /// Euclidean norm |k| of the wavevector at every flat index.
    pub fn magnitudes(&self) -> Vec<T> {
        (0..self.len())
            .map(|f| {
                let k = self.wavevector(f);
                T::from_i64((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as i64)
                    .unwrap()
                    .sqrt()
            })
            .collect()
    }

    /// Coordinates of physical grid point `flat`.
    pub fn point(&self, flat: usize) -> [T; 3] {
        let n = self.n();
        let h = self.box_length() / T::from_usize_lossy(n);
        let (a, rem) = (flat / (n * n), flat % (n * n));
        let (b, c) = (rem / n, rem % n);
        [
            T::from_usize_lossy(a) * h,
            T::from_usize_lossy(b) * h,
            T::from_usize_lossy(c) * h,
        ]
    }

    pub(crate) fn fft_base(&self, data: &mut [Complex<T>], dir: Direction) {
        fft3(&self.inner.base, data, dir, None);
    }

    /// Padded-grid transform of a buffer filled by [`Grid::pad_pair`]
    /// (inverse) or read back by [`Grid::truncate_pair`] (forward). Lines
    /// that are identically zero on input, or not needed on output, are
    /// skipped.
    pub(crate) fn fft_padded(&self, data: &mut [Complex<T>], dir: Direction) {
        fft3(&self.inner.padded, data, dir, Some(&self.inner.active));
    }

    /// Like [`Grid::fft_padded`], with the input (inverse) or output
    /// (forward) confined further to the axis indices set in `lines`.
    pub(crate) fn fft_padded_within(&self, data: &mut [Complex<T>], dir: Direction, lines: &[bool]) {
        fft3(&self.inner.padded, data, dir, Some(lines));
    }

    /// Padded-axis indices carrying base wavenumbers of modulus ≤ `reach`.
    pub(crate) fn padded_lines(&self, reach: i64) -> Vec<bool> {
        let m = self.padded_n();
        (0..m)
            .map(|i| self.inner.active[i] && wavenumber(i, m).abs() <= reach)
            .collect()
    }

    /// Zero-filled padded buffer holding a + i·b at the base wavevectors.
    /// Base Nyquist coefficients are dropped.
    pub(crate) fn pad_pair(&self, a: &[Complex<T>], b: Option<&[Complex<T>]>) -> Vec<Complex<T>> {
        let m = self.padded_n();
        let mut out = vec![Complex::new(T::zero(), T::zero()); m * m * m];
        self.pad_pair_into(&mut out, a, b);
        out
    }

    /// [`Grid::pad_pair`] into a buffer that is already zero off the base
    /// wavevectors.
    pub(crate) fn pad_pair_into(&self, out: &mut [Complex<T>], a: &[Complex<T>], b: Option<&[Complex<T>]>) {
        let (n, m) = (self.n(), self.padded_n());
        let map = &self.inner.pad_index;
        for (ia, pa) in map.iter().enumerate() {
            let Some(pa) = pa else { continue };
            for (ib, pb) in map.iter().enumerate() {
                let Some(pb) = pb else { continue };
                let src = (ia * n + ib) * n;
                let dst = (pa * m + pb) * m;
                for (ic, pc) in map.iter().enumerate() {
                    let Some(pc) = pc else { continue };
                    let x = a[src + ic];
                    out[dst + pc] = match b {
                        Some(b) => {
                            let y = b[src + ic];
                            Complex::new(x.re - y.im, x.im + y.re)
                        }
                        None => x,
                    };
                }
            }
        }
    }

    /// Split a forward-transformed padded buffer of x + i·y (x, y real) into
    /// the base-grid spectra of x and y, scaled by `scale`. Base Nyquist
    /// indices are zeroed.
    pub(crate) fn truncate_pair(&self, padded: &[Complex<T>], scale: T) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
        let (n, m) = (self.n(), self.padded_n());
        let zero = Complex::new(T::zero(), T::zero());
        let mut x = vec![zero; n * n * n];
        let mut y = vec![zero; n * n * n];
        let map = &self.inner.pad_index;
        let neg = |i: usize| (m - i) % m;
        let half = scale * T::lit(0.5);
        for (ia, pa) in map.iter().enumerate() {
            let Some(pa) = *pa else { continue };
            for (ib, pb) in map.iter().enumerate() {
                let Some(pb) = *pb else { continue };
                let dst = (ia * n + ib) * n;
                let row = (pa * m + pb) * m;
                let crow = (neg(pa) * m + neg(pb)) * m;
                for (ic, pc) in map.iter().enumerate() {
                    let Some(pc) = *pc else { continue };
                    let z = padded[row + pc];
                    let zc = padded[crow + neg(pc)].conj();
                    x[dst + ic] = (z + zc) * half;
                    let d = (z - zc) * half;
                    y[dst + ic] = Complex::new(d.im, -d.re);
                }
            }
        }
        (x, y)
    }
}

#[inline]
pub(crate) fn wavenumber(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// In-place unnormalized 3-D FFT of a row-major `size³` array.
///
/// With `active`, the data is a padded spectrum: an inverse transform assumes
/// nonzero input only where every index is active, a forward transform only
/// produces the outputs where every index is active.
fn fft3<T: Real>(plans: &Plans<T>, data: &mut [Complex<T>], dir: Direction, active: Option<&[bool]>) {
    let n = plans.size;
    debug_assert_eq!(data.len(), n * n * n);
    let fft = match dir {
        Direction::Forward => &plans.forward,
        Direction::Inverse => &plans.inverse,
    };
    let on = |i: usize| active.map_or(true, |a| a[i]);
    let inverse = dir == Direction::Inverse;
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); fft.get_inplace_scratch_len()];
    let nn = n * n;

    // Contiguous axis.
    if inverse && active.is_some() {
        for a in (0..n).filter(|&a| on(a)) {
            for b in (0..n).filter(|&b| on(b)) {
                let start = a * nn + b * n;
                fft.process_with_scratch(&mut data[start..start + n], &mut scratch);
            }
        }
    } else {
        fft.process_with_scratch(data, &mut scratch);
    }

    let mut lines = vec![Complex::new(T::zero(), T::zero()); nn];
    // Middle axis, one plane at a time; line c holds the values along b.
    let cs: Vec<usize> = (0..n).filter(|&c| inverse || on(c)).collect();
    for (a, plane) in data.chunks_exact_mut(nn).enumerate() {
        if inverse && !on(a) {
            continue;
        }
        let count = cs.len();
        for b in 0..n {
            let src = &plane[b * n..(b + 1) * n];
            for (row, &c) in cs.iter().enumerate() {
                lines[row * n + b] = src[c];
            }
        }
        fft.process_with_scratch(&mut lines[..count * n], &mut scratch);
        for b in 0..n {
            let dst = &mut plane[b * n..(b + 1) * n];
            for (row, &c) in cs.iter().enumerate() {
                dst[c] = lines[row * n + b];
            }
        }
    }
    // Slowest axis, one slab of fixed middle index at a time.
    for b in (0..n).filter(|&b| inverse || on(b)) {
        let count = cs.len();
        for a in 0..n {
            let src = &data[a * nn + b * n..a * nn + (b + 1) * n];
            for (row, &c) in cs.iter().enumerate() {
                lines[row * n + a] = src[c];
            }
        }
        fft.process_with_scratch(&mut lines[..count * n], &mut scratch);
        for a in 0..n {
            let dst = &mut data[a * nn + b * n..a * nn + (b + 1) * n];
            for (row, &c) in cs.iter().enumerate() {
                dst[c] = lines[row * n + a];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert_eq!(Grid::<f64>::new(4).unwrap_err(), Error::InvalidGridSize(4));
        assert_eq!(Grid::<f64>::new(12).unwrap_err(), Error::InvalidGridSize(12));
        assert!(Grid::<f64>::new(8).is_ok());
    }

    #[test]
    fn wavevector_index_roundtrip() {
        let g = Grid::<f64>::new(8).unwrap();
        for flat in 0..g.len() {
            let k = g.wavevector(flat);
            assert_eq!(g.index_of(k), Some(flat));
        }
        assert_eq!(g.index_of([4, 0, 0]), None);
        let f = g.index_of([1, -2, 3]).unwrap();
        assert_eq!(g.wavevector(g.conjugate_index(f)), [-1, 2, -3]);
    }

    fn hermitian(g: &Grid<f64>, seed: f64) -> Vec<Complex<f64>> {
        let raw = |k: [i64; 3]| {
            let h = (k[0] * 7 + k[1] * 13 + k[2] * 29) as f64 + seed;
            Complex::new(h.sin(), (1.3 * h).cos())
        };
        (0..g.len())
            .map(|i| {
                let k = g.wavevector(i);
                if k.iter().any(|&c| c == -(g.n() as i64) / 2) {
                    return Complex::new(0.0, 0.0);
                }
                raw(k) + raw([-k[0], -k[1], -k[2]]).conj()
            })
            .collect()
    }

    #[test]
    fn pad_transform_truncate_roundtrip() {
        let g = Grid::<f64>::new(8).unwrap();
        let (a, b) = (hermitian(&g, 0.1), hermitian(&g, 2.0));
        let m = g.padded_n();
        let mut buf = g.pad_pair(&a, Some(&b));
        let mut full = buf.clone();
        g.fft_padded(&mut buf, Direction::Inverse);
        fft3(&g.inner.padded, &mut full, Direction::Inverse, None);
        // pruned inverse is exact and yields real pairs
        for (x, y) in buf.iter().zip(&full) {
            assert!((x - y).norm() < 1e-12);
        }
        g.fft_padded(&mut buf, Direction::Forward);
        let (x, y) = g.truncate_pair(&buf, 1.0 / (m * m * m) as f64);
        for i in 0..g.len() {
            assert!((x[i] - a[i]).norm() < 1e-12 && (y[i] - b[i]).norm() < 1e-12);
        }
    }
}
