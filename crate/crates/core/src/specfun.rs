//! Gamma, Bessel and Legendre functions.
//!
//! The Legendre functions are evaluated from their integral representations
//! through the singular-kernel quadrature in [`crate::quad`], which is the
//! same code path the Laplace kernels use.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{integrate_cosh_power, QuadSpec};

/// Accuracy request for the integral-based special functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpecFunAccuracy {
    pub target_rel_err: f64,
}

impl SpecFunAccuracy {
    pub const GAMMA_BESSEL: Self = Self { target_rel_err: 1e-10 };
    pub const LEGENDRE: Self = Self { target_rel_err: 1e-8 };

    pub fn new(target_rel_err: f64) -> Result<Self> {
        if target_rel_err > 0.0 {
            Ok(Self { target_rel_err })
        } else {
            Err(Error::InvalidInput("target_rel_err must be positive".into()))
        }
    }

    fn quad_spec(&self) -> QuadSpec {
        // Quadrature runs well below the requested accuracy.
        let t = (self.target_rel_err * 1e-3).max(1e-15);
        QuadSpec::with_tol(t, t)
    }
}

impl Default for SpecFunAccuracy {
    fn default() -> Self {
        Self::LEGENDRE
    }
}

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Complex Gamma function (Lanczos, with reflection for `Re z < 1/2`).
pub fn gamma_complex(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::Pole(z.re));
    }
    Ok(gamma_unchecked(z))
}

fn gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return PI / (s * gamma_unchecked(1.0 - z));
    }
    let z = z - 1.0;
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * acc
}

/// Real Gamma function.
pub fn gamma(x: f64) -> Result<f64> {
    gamma_complex(Complex64::new(x, 0.0)).map(|z| z.re)
}

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma needs a positive argument");
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

fn bessel_series_normalized(gamma: f64, z: f64) -> f64 {
    // sum_k (-z^2/4)^k / (k! (gamma+1)_k)
    let q = -0.25 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + gamma));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && k > 0.5 * z {
            break;
        }
        if k > 500.0 {
            break;
        }
    }
    sum
}

// Hankel expansion of J_gamma(x) for large x.
fn bessel_asymptotic(gamma: f64, x: f64) -> f64 {
    let mu = 4.0 * gamma * gamma;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if a.abs() > prev || a == 0.0 {
            break;
        }
        prev = a.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
        } else {
            // k = 2j+1 contributes (-1)^j a_k to Q
            q += if ((k - 1) / 2) % 2 == 0 { a } else { -a };
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * gamma + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Bessel function of the first kind `J_gamma(x)`, `gamma > -1`, `x >= 0`.
pub fn bessel_j(gamma: f64, x: f64) -> f64 {
    assert!(gamma > -1.0 && x >= 0.0, "bessel_j domain: gamma > -1, x >= 0");
    if x == 0.0 {
        return if gamma == 0.0 {
            1.0
        } else if gamma > 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    if x < 12f64.max(2.0 * gamma) {
        let pref = (gamma * (0.5 * x).ln() - ln_gamma(gamma + 1.0)).exp();
        pref * bessel_series_normalized(gamma, x)
    } else {
        bessel_asymptotic(gamma, x)
    }
}

/// `2^gamma Gamma(gamma+1) z^{-gamma} J_gamma(z)`, equal to 1 at `z = 0`.
pub fn bessel_j_normalized(gamma: f64, z: f64) -> f64 {
    let z = z.abs();
    if z < 12f64.max(2.0 * gamma) {
        bessel_series_normalized(gamma, z)
    } else {
        (gamma * 2f64.ln() + ln_gamma(gamma + 1.0) - gamma * z.ln()).exp() * bessel_asymptotic(gamma, z)
    }
}

/// Complex-argument version of [`bessel_j_normalized`] by its power series;
/// intended for `|z|` up to about 20.
pub fn bessel_j_normalized_complex(gamma: f64, z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        return Complex64::new(bessel_j_normalized(gamma, z.re), 0.0);
    }
    let q = -0.25 * z * z;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut k = 0.0;
    while k < 500.0 {
        k += 1.0;
        term *= q / (k * (k + gamma));
        sum += term;
        if term.norm() < 1e-17 * sum.norm().max(1e-300) && k > 0.5 * z.norm() {
            break;
        }
    }
    sum
}

/// Conical function `P_{i lambda - 1/2}(cosh x)`.
pub fn legendre_conical(lambda: Complex64, x: f64) -> Result<Complex64> {
    legendre_conical_with(lambda, x, SpecFunAccuracy::LEGENDRE)
}

pub fn legendre_conical_with(lambda: Complex64, x: f64, acc: SpecFunAccuracy) -> Result<Complex64> {
    if !(x >= 0.0) {
        return Err(Error::InvalidInput(format!("legendre_conical needs x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if x >= CONICAL_SERIES_X && lambda.norm() >= 0.25 && lambda.norm() <= 100.0 && lambda.im.abs() < 0.45 {
        return conical_series(lambda, x);
    }
    let spec = acc.quad_spec();
    let v = integrate_cosh_power(|y: f64| (lambda * y).cos(), x, -0.5, &spec)?;
    Ok(v * (2f64.sqrt() / PI))
}

/// Switch from the integral to the expansion in `e^{-2x}`.
const CONICAL_SERIES_X: f64 = 3.0;

// c(l) e^{(il - 1/2)x} F(1/2, 1/2 - il; 1 - il; e^{-2x}) + (l -> -l).
fn conical_series(lambda: Complex64, x: f64) -> Result<Complex64> {
    let z = (-2.0 * x).exp();
    let one = Complex64::new(1.0, 0.0);
    let term = |l: Complex64| -> Result<Complex64> {
        let il = Complex64::i() * l;
        let c = gamma_complex(il)? / (gamma_complex(il + 0.5)? * PI.sqrt());
        let (a, b, cc) = (Complex64::new(0.5, 0.0), 0.5 - il, one - il);
        let (mut t, mut sum) = (one, one);
        for k in 0..200 {
            let k = k as f64;
            t *= (a + k) * (b + k) / ((cc + k) * (k + 1.0)) * z;
            sum += t;
            if t.norm() < 1e-17 * sum.norm() {
                break;
            }
        }
        Ok(c * ((il - 0.5) * x).exp() * sum)
    };
    Ok(term(lambda)? + term(-lambda)?)
}

/// Associated Legendre function `P_nu^mu(cosh x)` for `mu < 1/2`, from
/// the Laplace-type integral with kernel `(cosh x - cosh y)^{-mu-1/2}`.
pub fn assoc_legendre(nu: Complex64, mu: f64, x: f64) -> Result<Complex64> {
    assoc_legendre_with(nu, mu, x, SpecFunAccuracy::LEGENDRE)
}

pub fn assoc_legendre_with(nu: Complex64, mu: f64, x: f64, acc: SpecFunAccuracy) -> Result<Complex64> {
    let g = 0.5 - mu;
    if g <= 0.0 && g == g.round() {
        return Err(Error::Pole(g));
    }
    if mu >= 0.5 {
        return Err(Error::InvalidInput(format!("integral representation needs mu < 1/2, got {mu}")));
    }
    if !(x >= 0.0) {
        return Err(Error::InvalidInput(format!("assoc_legendre needs x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(if mu == 0.0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
    }
    let spec = acc.quad_spec();
    let a = nu + 0.5;
    let v = integrate_cosh_power(|y: f64| (a * y).cosh(), x, -mu - 0.5, &spec)?;
    Ok(v * ((2.0 / PI).sqrt() * x.sinh().powf(mu) / gamma(g)?))
}
