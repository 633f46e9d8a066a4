//! Seeded random batteries: unitary bases, strip spectra, positive matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

pub type BatteryRng = ChaCha20Rng;

pub fn seeded(seed: u64) -> BatteryRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Haar-distributed unitary (QR of a complex Gaussian matrix with the
/// phases of `R` divided out).
pub fn random_unitary(n: usize, rng: &mut BatteryRng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// `n` points with real part in `re` and `|Im| <= omega`.
pub fn random_strip_spectrum(n: usize, omega: f64, re: (f64, f64), rng: &mut BatteryRng) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let a = rng.random_range(re.0..re.1);
            let b = if omega > 0.0 { rng.random_range(-omega..=omega) } else { 0.0 };
            Complex64::new(a, b)
        })
        .collect()
}

/// Hermitian positive definite matrix with spectrum in `spec`.
pub fn random_hpd(n: usize, spec: (f64, f64), rng: &mut BatteryRng) -> DMatrix<Complex64> {
    let u = random_unitary(n, rng);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| {
        Complex64::new(rng.random_range(spec.0..spec.1), 0.0)
    }));
    &u * d * u.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_unitary_and_reproducible() {
        let u = random_unitary(4, &mut seeded(7));
        let e = &u.adjoint() * &u - DMatrix::identity(4, 4);
        assert!(e.iter().all(|z| z.norm() < 1e-13));
        assert_eq!(u, random_unitary(4, &mut seeded(7)));
    }
}
