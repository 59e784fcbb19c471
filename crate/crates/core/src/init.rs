//! Initial-data families: ABC (Beltrami) flow, single Fourier modes and
//! seeded band-limited random fields.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::calculus::{curl, leray_project};
use crate::field::{czero, has_nyquist, SpectralField};
use crate::grid::Grid;
use crate::scalar::Real;

/// ABC velocity u = (A sin x₃ + C cos x₂, B sin x₁ + A cos x₃, C sin x₂ + B cos x₁),
/// which satisfies curl u = u.
pub fn abc<T: Real>(grid: &Grid<T>, a: T, b: T, c: T) -> SpectralField<T> {
    let mut comps = vec![vec![T::zero(); grid.len()]; 3];
    for i in 0..grid.len() {
        let [x1, x2, x3] = grid.point(i);
        comps[0][i] = a * x3.sin() + c * x2.cos();
        comps[1][i] = b * x1.sin() + a * x3.cos();
        comps[2][i] = c * x2.sin() + b * x1.cos();
    }
    SpectralField::from_samples(grid, &comps)
        .expect("sample shape matches grid")
        .with_divergence_free(true)
}

/// Real mode `amplitude · cos(k·x)` in component `comp` of a field with
/// `ncomp` components.
pub fn cosine_mode<T: Real>(
    grid: &Grid<T>,
    ncomp: usize,
    comp: usize,
    k: [i64; 3],
    amplitude: T,
) -> SpectralField<T> {
    let mut f = SpectralField::zeros(grid, ncomp);
    let half = Complex::new(amplitude * T::lit(0.5), T::zero());
    let pos = grid.index_of(k).expect("wavevector resolvable on grid");
    let neg = grid.index_of([-k[0], -k[1], -k[2]]).expect("wavevector resolvable on grid");
    let data = f.component_mut(comp);
    data[pos] = data[pos] + half;
    data[neg] = data[neg] + half;
    f
}

/// Divergence-free vector mode `amplitude · e cos(k·x)` with a polarization
/// `e ⊥ k`.
pub fn solenoidal_mode<T: Real>(grid: &Grid<T>, k: [i64; 3], amplitude: T) -> SpectralField<T> {
    let kf = k.map(|x| T::from_i64(x).unwrap());
    // any vector not parallel to k, then Gram-Schmidt
    let trial = if k[0] == 0 && k[1] == 0 {
        [T::one(), T::zero(), T::zero()]
    } else {
        [T::zero(), T::zero(), T::one()]
    };
    let k2 = kf[0] * kf[0] + kf[1] * kf[1] + kf[2] * kf[2];
    let dot = trial[0] * kf[0] + trial[1] * kf[1] + trial[2] * kf[2];
    let mut e = [T::zero(); 3];
    for c in 0..3 {
        e[c] = trial[c] - kf[c] * dot / k2;
    }
    let norm = (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt();
    let mut out = SpectralField::zeros(grid, 3);
    for (c, ec) in e.iter().enumerate() {
        let comp = cosine_mode(grid, 3, c, k, amplitude * *ec / norm);
        out = &out + &comp;
    }
    out.with_divergence_free(true)
}

/// Seeded Gaussian coefficients on the shell `k_min ≤ |k| ≤ k_max`,
/// Hermitian-symmetrized, with Nyquist and mean modes removed.
pub fn random_band_limited<T: Real, R: Rng + ?Sized>(
    grid: &Grid<T>,
    ncomp: usize,
    k_min: f64,
    k_max: f64,
    rng: &mut R,
) -> SpectralField<T> {
    let n = grid.n();
    let mut comps = vec![vec![czero::<T>(); grid.len()]; ncomp];
    for comp in comps.iter_mut() {
        for (flat, c) in comp.iter_mut().enumerate() {
            // draw for every index so the stream does not depend on the band
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let k = grid.wavevector(flat);
            let mag = ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt();
            if has_nyquist(flat, n) || mag < k_min || mag > k_max || mag == 0.0 {
                continue;
            }
            *c = Complex::new(T::lit(re), T::lit(im));
        }
        let raw = comp.clone();
        for (flat, c) in comp.iter_mut().enumerate() {
            let partner = raw[grid.conjugate_index(flat)].conj();
            *c = (raw[flat] + partner) * T::lit(0.5);
        }
    }
    SpectralField::from_coefficients(grid, comps).expect("shape matches grid")
}

/// Band-limited random vorticity: the curl of a Leray-projected random
/// velocity on 2 ≤ |k| ≤ n/4, rescaled so the velocity has sup norm
/// `velocity_amplitude`. Returns `(vorticity, velocity)`.
pub fn random_vorticity<T: Real, R: Rng + ?Sized>(
    grid: &Grid<T>,
    velocity_amplitude: T,
    rng: &mut R,
) -> (SpectralField<T>, SpectralField<T>) {
    let raw = random_band_limited(grid, 3, 2.0, grid.n() as f64 / 4.0, rng);
    let u = leray_project(&raw).expect("vector field");
    let sup = u.linf_norm();
    let u = if sup > T::zero() {
        u.scaled(velocity_amplitude / sup)
    } else {
        u
    };
    let v = curl(&u).expect("vector field");
    (v, u.with_divergence_free(true))
}
