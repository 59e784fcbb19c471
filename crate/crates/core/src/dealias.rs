//! Products of spectral fields evaluated on the 3/2-padded grid.
//!
//! Inputs are zero-padded to (3n/2)³, multiplied pointwise, transformed back
//! and truncated to the base wavevectors. For inputs without Nyquist content
//! every retained coefficient of the product is exact (no aliasing).

use num_complex::Complex;

use crate::field::{czero, SpectralField, C};
use crate::grid::{Direction, Grid};
use crate::scalar::Real;

/// Physical samples of every component of `f` on the padded grid.
pub fn to_padded<T: Real>(f: &SpectralField<T>) -> Vec<Vec<T>> {
    let refs: Vec<&[C<T>]> = f.components().iter().map(|c| c.as_slice()).collect();
    spectra_to_padded(f.grid(), &refs)
}

/// Padded physical samples for a batch of base-grid spectra.
pub fn spectra_to_padded<T: Real>(grid: &Grid<T>, spectra: &[&[C<T>]]) -> Vec<Vec<T>> {
    let mut out = Vec::with_capacity(spectra.len());
    for pair in spectra.chunks(2) {
        let mut buf = grid.pad_pair(pair[0], pair.get(1).copied());
        grid.fft_padded(&mut buf, Direction::Inverse);
        out.push(buf.iter().map(|c| c.re).collect());
        if pair.len() == 2 {
            out.push(buf.iter().map(|c| c.im).collect());
        }
    }
    out
}

/// Base-grid spectra of padded physical samples (Nyquist indices zeroed).
pub fn padded_to_spectra<T: Real>(grid: &Grid<T>, samples: &[&[T]]) -> Vec<Vec<C<T>>> {
    let m = grid.padded_n();
    let scale = T::one() / T::from_usize_lossy(m * m * m);
    let mut out = Vec::with_capacity(samples.len());
    for pair in samples.chunks(2) {
        let mut buf: Vec<C<T>> = match pair {
            [a, b] => a.iter().zip(b.iter()).map(|(&x, &y)| Complex::new(x, y)).collect(),
            [a] => a.iter().map(|&x| Complex::new(x, T::zero())).collect(),
            _ => unreachable!(),
        };
        grid.fft_padded(&mut buf, Direction::Forward);
        let (x, y) = grid.truncate_pair(&buf, scale);
        out.push(x);
        if pair.len() == 2 {
            out.push(y);
        }
    }
    out
}

/// Field (1 or 3 components) from padded physical samples.
pub fn from_padded<T: Real>(grid: &Grid<T>, samples: &[Vec<T>]) -> SpectralField<T> {
    let refs: Vec<&[T]> = samples.iter().map(|s| s.as_slice()).collect();
    SpectralField::from_coefficients(grid, padded_to_spectra(grid, &refs))
        .expect("1 or 3 components")
}

/// Dealiased product of two scalar fields.
pub fn product<T: Real>(a: &SpectralField<T>, b: &SpectralField<T>) -> SpectralField<T> {
    assert_eq!(a.grid(), b.grid(), "fields on different grids");
    assert!(a.ncomp() == 1 && b.ncomp() == 1, "scalar product of scalar fields");
    let phys = spectra_to_padded(a.grid(), &[a.component(0), b.component(0)]);
    let prod: Vec<T> = phys[0].iter().zip(&phys[1]).map(|(x, y)| *x * *y).collect();
    from_padded(a.grid(), &[prod])
}

/// Zero-padded (spectrally interpolated) samples on a 2×-refined grid, used
/// to compare grid maxima across resolutions.
pub fn refine<T: Real>(f: &SpectralField<T>) -> crate::Result<SpectralField<T>> {
    let fine = Grid::new(2 * f.grid().n())?;
    let n = f.grid().n();
    let comps = f
        .components()
        .iter()
        .map(|comp| {
            let mut out = vec![czero(); fine.len()];
            for (flat, c) in comp.iter().enumerate() {
                let k = f.grid().wavevector(flat);
                if k.iter().any(|&x| x == -(n as i64) / 2) {
                    continue;
                }
                let dst = fine.index_of(k).expect("coarse wavevector fits");
                out[dst] = *c;
            }
            out
        })
        .collect();
    SpectralField::from_coefficients(&fine, comps)
}
