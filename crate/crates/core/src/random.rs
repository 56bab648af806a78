//! Seeded random objects. Every function takes the RNG explicitly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, CMatrix, CVector, C64};

pub type StreamRng = ChaCha8Rng;

/// Independent stream `stream` derived from a master seed.
pub fn rng_stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// Haar-random unit vector in `C^n`.
pub fn random_pure_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    loop {
        let v = CVector::from_fn(n, |_, _| complex_normal(rng));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / c(norm, 0.0);
        }
    }
}

/// Random real unit vector in `R^n` (stored as complex).
pub fn random_real_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    loop {
        let v = CVector::from_fn(n, |_, _| c(rng.sample(StandardNormal), 0.0));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / c(norm, 0.0);
        }
    }
}

/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..n {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Random Hermitian matrix with i.i.d. Gaussian entries (GUE-like).
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    (&g + g.adjoint()).map(|z| z * 0.5)
}

/// Random full-rank density matrix `G G^dagger / Tr(G G^dagger)`.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    let m = &g * g.adjoint();
    let t = m.trace().re;
    m.map(|z| z / t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = rng_stream(7, 0);
        let u = random_unitary(4, &mut rng);
        assert!((u.adjoint() * &u - CMatrix::identity(4, 4)).norm() < 1e-12);
    }

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let a: u64 = rng_stream(1, 0).random();
        let b: u64 = rng_stream(1, 0).random();
        let d: u64 = rng_stream(1, 1).random();
        assert_eq!(a, b);
        assert_ne!(a, d);
    }
}
