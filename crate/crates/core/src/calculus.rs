//! Spectral differential operators and the velocity/vorticity maps.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::field::{czero, derivative_k, SpectralField, C};
use crate::scalar::Real;

#[inline]
fn times_i<T: Real>(z: C<T>) -> C<T> {
    Complex::new(-z.im, z.re)
}

/// (curl u)^(k) = i k × û(k).
pub fn curl<T: Real>(u: &SpectralField<T>) -> Result<SpectralField<T>> {
    u.require_vector()?;
    let grid = u.grid();
    let n = grid.n();
    let mut out = vec![vec![czero(); grid.len()]; 3];
    let (u0, u1, u2) = (u.component(0), u.component(1), u.component(2));
    for flat in 0..grid.len() {
        let k = derivative_k(grid, flat, n);
        out[0][flat] = times_i(u2[flat] * k[1] - u1[flat] * k[2]);
        out[1][flat] = times_i(u0[flat] * k[2] - u2[flat] * k[0]);
        out[2][flat] = times_i(u1[flat] * k[0] - u0[flat] * k[1]);
    }
    Ok(SpectralField::from_coefficients(grid, out)?.with_divergence_free(true))
}

/// Scalar divergence Σ_j i k_j û_j(k).
pub fn divergence<T: Real>(u: &SpectralField<T>) -> Result<SpectralField<T>> {
    u.require_vector()?;
    let grid = u.grid();
    let n = grid.n();
    let mut out = vec![czero(); grid.len()];
    for (flat, o) in out.iter_mut().enumerate() {
        let k = derivative_k(grid, flat, n);
        let mut acc = czero();
        for c in 0..3 {
            acc = acc + u.component(c)[flat] * k[c];
        }
        *o = times_i(acc);
    }
    SpectralField::from_coefficients(grid, vec![out])
}

/// Spectral partial derivative ∂_axis of every component.
pub fn partial<T: Real>(f: &SpectralField<T>, axis: usize) -> SpectralField<T> {
    let grid = f.grid();
    let n = grid.n();
    let comps = f
        .components()
        .iter()
        .map(|comp| {
            comp.iter()
                .enumerate()
                .map(|(flat, &z)| times_i(z * derivative_k(grid, flat, n)[axis]))
                .collect()
        })
        .collect();
    SpectralField::from_coefficients(grid, comps).expect("shape preserved")
}

/// Gradient of a scalar field as a vector field.
pub fn gradient<T: Real>(g: &SpectralField<T>) -> Result<SpectralField<T>> {
    if g.ncomp() != 1 {
        return Err(Error::ComponentMismatch {
            expected: "scalar",
            got: g.ncomp(),
        });
    }
    let comps = (0..3)
        .map(|axis| partial(g, axis).into_components().remove(0))
        .collect();
    SpectralField::from_coefficients(g.grid(), comps)
}

/// Projection onto divergence-free fields:
/// ŵ(k) − k (k·ŵ(k))/|k|² for k ≠ 0, the mean mode untouched.
pub fn leray_project<T: Real>(w: &SpectralField<T>) -> Result<SpectralField<T>> {
    w.require_vector()?;
    let grid = w.grid();
    let n = grid.n();
    let mut out: Vec<Vec<C<T>>> = w.components().to_vec();
    for flat in 0..grid.len() {
        let k = derivative_k(grid, flat, n);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == T::zero() {
            continue;
        }
        let mut dot = czero();
        for c in 0..3 {
            dot = dot + out[c][flat] * k[c];
        }
        let dot = dot / k2;
        for c in 0..3 {
            out[c][flat] = out[c][flat] - dot * k[c];
        }
    }
    Ok(SpectralField::from_coefficients(grid, out)?.with_divergence_free(true))
}

/// Velocity of a mean-free, divergence-free vorticity on the torus:
/// û(k) = i k × v̂(k) / |k|², û(0) = 0.
pub fn biot_savart<T: Real>(v: &SpectralField<T>) -> Result<SpectralField<T>> {
    v.require_vector()?;
    let scale = v.l2_norm() / v.grid().volume().sqrt();
    let mean = v.mean_magnitude();
    if mean > T::lit(1e-12) * scale.max(T::one()) {
        return Err(Error::NonzeroMean(mean.to_f64_lossy()));
    }
    let grid = v.grid();
    let n = grid.n();
    let mut out = vec![vec![czero(); grid.len()]; 3];
    let (v0, v1, v2) = (v.component(0), v.component(1), v.component(2));
    for flat in 0..grid.len() {
        let k = derivative_k(grid, flat, n);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == T::zero() {
            continue;
        }
        out[0][flat] = times_i(v2[flat] * k[1] - v1[flat] * k[2]) / k2;
        out[1][flat] = times_i(v0[flat] * k[2] - v2[flat] * k[0]) / k2;
        out[2][flat] = times_i(v1[flat] * k[0] - v0[flat] * k[1]) / k2;
    }
    Ok(SpectralField::from_coefficients(grid, out)?.with_divergence_free(true))
}
