//! Seeded random tensors for the property suites.
//!
//! Every instance draws from its own ChaCha stream, so results do not depend
//! on how instances are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::barycentric::eigenvalues_from_weights;
use crate::tensor::{Mat3, SymTensor3};

pub fn instance_rng(seed: u64, instance: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(instance);
    rng
}

/// Uniformly distributed proper rotation (unit quaternion).
pub fn random_rotation<R: Rng>(rng: &mut R) -> Mat3 {
    let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
    let tau = std::f64::consts::TAU;
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let (w, x, y, z) = (a * (tau * u2).sin(), a * (tau * u2).cos(), b * (tau * u3).sin(), b * (tau * u3).cos());
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - z * w), 2.0 * (x * z + y * w)],
        [2.0 * (x * y + z * w), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - x * w)],
        [2.0 * (x * z - y * w), 2.0 * (y * z + x * w), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

/// Non-negative spectrum in `[0, max)`, occasionally with exact zeros or ties.
pub fn random_psd_spectrum<R: Rng>(rng: &mut R, max: f64) -> [f64; 3] {
    let mut rho = [rng.random::<f64>() * max, rng.random::<f64>() * max, rng.random::<f64>() * max];
    match rng.random_range(0..8) {
        0 => rho[rng.random_range(0..3)] = 0.0,
        1 => rho[1] = rho[0],
        2 => {
            rho[1] = 0.0;
            rho[2] = 0.0;
        }
        _ => {}
    }
    rho
}

pub fn random_psd<R: Rng>(rng: &mut R, max: f64) -> SymTensor3 {
    let v = random_rotation(rng);
    SymTensor3::from_eigen(random_psd_spectrum(rng, max), &v)
}

/// Sorted traceless spectrum drawn uniformly over the barycentric triangle.
pub fn random_realizable_triple<R: Rng>(rng: &mut R) -> [f64; 3] {
    let (mut r1, mut r2): (f64, f64) = (rng.random(), rng.random());
    if r1 + r2 > 1.0 {
        r1 = 1.0 - r1;
        r2 = 1.0 - r2;
    }
    let w = [r1, r2, 1.0 - r1 - r2];
    let l = eigenvalues_from_weights(&w);
    let mut l = l;
    l.sort_by(|a, b| b.total_cmp(a));
    l
}

/// Realizable stress `k (v diag(λ) vᵀ + 2/3 I)` with `k ∈ [0.1, 2)`.
pub fn random_realizable_stress<R: Rng>(rng: &mut R) -> SymTensor3 {
    let k = 0.1 + 1.9 * rng.random::<f64>();
    let v = random_rotation(rng);
    let a = SymTensor3::from_eigen(random_realizable_triple(rng), &v);
    (a + SymTensor3::identity() * (2.0 / 3.0)) * k
}

/// General symmetric tensor, with some near-degenerate spectra.
pub fn random_symmetric<R: Rng>(rng: &mut R) -> SymTensor3 {
    let v = random_rotation(rng);
    let mut l = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
    match rng.random_range(0..6) {
        0 => l[1] = l[0] + 1e-9 * rng.random::<f64>(),
        1 => l[2] = l[1],
        2 => l = [l[0]; 3],
        _ => {}
    }
    SymTensor3::from_eigen(l, &v)
}
