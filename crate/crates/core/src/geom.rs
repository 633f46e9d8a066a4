//! Hyperbolic space forms: sphere areas, ball volumes, point-mass
//! convolution and log-concavity witnesses.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadSpec, RadonMeasure};
use crate::specfun::gamma;

/// Constant-curvature space of dimension `n >= 2` and curvature `kappa < 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpaceForm {
    pub n: u32,
    pub kappa: f64,
}

impl SpaceForm {
    pub fn new(n: u32, kappa: f64) -> Result<Self> {
        if n < 2 || !(kappa < 0.0) {
            return Err(Error::InvalidInput(format!("space form needs n >= 2 and kappa < 0 (n={n}, kappa={kappa})")));
        }
        Ok(Self { n, kappa })
    }

    pub fn hyperbolic(n: u32) -> Result<Self> {
        Self::new(n, -1.0)
    }

    /// Area of the unit `(n-1)`-sphere, `n pi^{n/2} / Gamma(n/2 + 1)`.
    pub fn unit_sphere(&self) -> f64 {
        let n = self.n as f64;
        n * PI.powf(0.5 * n) / gamma(0.5 * n + 1.0).expect("positive argument")
    }

    /// `sigma_kappa(r)`.
    pub fn sigma(&self, r: f64) -> f64 {
        let k = (-self.kappa).sqrt();
        self.unit_sphere() * ((r * k).sinh() / k).powi(self.n as i32 - 1)
    }

    /// `m_kappa(r) = int_0^r sigma`.
    pub fn volume(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        // m <= r sigma(r), so this absolute floor is relative to m.
        let spec = QuadSpec::with_tol((1e-16 * r * self.sigma(r)).max(f64::MIN_POSITIVE), 1e-14);
        integrate(|s: f64| self.sigma(s), 0.0, r, &spec).expect("smooth integrand")
    }

    /// `d/dr log m(r)`.
    pub fn log_volume_slope(&self, r: f64) -> f64 {
        self.sigma(r) / self.volume(r)
    }
}

/// Geodesic point-mass convolution on `H^n`.
pub fn hyperbolic_conv(n: u32, r: f64, s: f64) -> RadonMeasure {
    crate::hypergroup::geodesic_convolution(n, r, s)
}

fn sinh_power_integral(n: u32, x: f64) -> f64 {
    let spec = QuadSpec::with_tol((1e-16 * x * x.sinh().powi(n as i32)).max(f64::MIN_POSITIVE), 1e-14);
    integrate(|t: f64| t.sinh().powi(n as i32), 0.0, x, &spec).expect("smooth integrand")
}

/// `h_0(x) = n cosh x int_0^x sinh^n - sinh^{n+1} x`.
pub fn h0(n: u32, x: f64) -> f64 {
    n as f64 * x.cosh() * sinh_power_integral(n, x) - x.sinh().powi(n as i32 + 1)
}

/// `h_1(x) = n int_0^x sinh^n - cosh x sinh^{n-1} x`.
pub fn h1(n: u32, x: f64) -> f64 {
    n as f64 * sinh_power_integral(n, x) - x.cosh() * x.sinh().powi(n as i32 - 1)
}

/// Largest values of `h_0`, `h_1` (each scaled by its leading term) and of
/// `(log m)''` over a grid.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct LogConcavityReport {
    pub n: u32,
    pub points: usize,
    pub max_h0: f64,
    pub max_h1: f64,
    pub max_log_m_second: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Step of the second difference of `log m`.
pub const LOG_M_STEP: f64 = 1e-2;

pub fn log_concavity_witness(n: u32, x_grid: &[f64], tolerance: f64) -> Result<LogConcavityReport> {
    if x_grid.is_empty() || x_grid.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::InvalidInput("witness grid must be nonempty and in (0, inf)".into()));
    }
    let sf = SpaceForm::hyperbolic(n)?;
    let mut rep = LogConcavityReport {
        n,
        points: x_grid.len(),
        max_h0: f64::NEG_INFINITY,
        max_h1: f64::NEG_INFINITY,
        max_log_m_second: f64::NEG_INFINITY,
        tolerance,
        pass: false,
    };
    for &x in x_grid {
        let s = x.sinh();
        rep.max_h0 = rep.max_h0.max(h0(n, x) / (x.cosh() * s.powi(n as i32 + 1)));
        rep.max_h1 = rep.max_h1.max(h1(n, x) / (x.cosh() * s.powi(n as i32 - 1)));
        let h = LOG_M_STEP.min(0.5 * x);
        let d2 = (sf.volume(x + h).ln() - 2.0 * sf.volume(x).ln() + sf.volume(x - h).ln()) / (h * h);
        rep.max_log_m_second = rep.max_log_m_second.max(d2);
    }
    rep.pass = rep.max_h0 <= tolerance && rep.max_h1 <= tolerance && rep.max_log_m_second <= tolerance;
    Ok(rep)
}

/// Checks on a user-supplied table of `(r, sigma(r), m(r))`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct VolumeTableReport {
    pub rows: usize,
    /// Largest `|sigma - m'|` (central differences) relative to `sigma`.
    pub max_derivative_mismatch: f64,
    /// Largest second difference of `log m`.
    pub max_log_m_second: f64,
    pub ratio_decreasing: bool,
    /// Infimum of `sigma / m` over the table.
    pub cheeger_estimate: f64,
    /// `sigma / m` at the last row.
    pub tail_ratio: f64,
}

pub fn check_volume_table(rows: &[(f64, f64, f64)]) -> Result<VolumeTableReport> {
    if rows.len() < 3 {
        return Err(Error::InvalidInput("table needs at least three rows".into()));
    }
    if rows.windows(2).any(|w| !(w[1].0 > w[0].0)) || rows.iter().any(|r| !(r.2 > 0.0)) {
        return Err(Error::InvalidInput("table must have increasing r and positive m".into()));
    }
    let mut mismatch = 0.0f64;
    let mut second = f64::NEG_INFINITY;
    for w in rows.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        let (h1, h2) = (b.0 - a.0, c.0 - b.0);
        // Nonuniform three-point derivative at the middle node.
        let dm = (-h2 / (h1 * (h1 + h2))) * a.2 + ((h2 - h1) / (h1 * h2)) * b.2 + (h1 / (h2 * (h1 + h2))) * c.2;
        mismatch = mismatch.max((dm - b.1).abs() / b.1.abs().max(1e-300));
        let (la, lb, lc) = (a.2.ln(), b.2.ln(), c.2.ln());
        let d2 = 2.0 * (h1 * lc - (h1 + h2) * lb + h2 * la) / (h1 * h2 * (h1 + h2));
        second = second.max(d2);
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r.1 / r.2).collect();
    Ok(VolumeTableReport {
        rows: rows.len(),
        max_derivative_mismatch: mismatch,
        max_log_m_second: second,
        ratio_decreasing: ratios.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)),
        cheeger_estimate: ratios.iter().cloned().fold(f64::INFINITY, f64::min),
        tail_ratio: *ratios.last().unwrap(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_dimensional_areas() {
        let h2 = SpaceForm::hyperbolic(2).unwrap();
        let h3 = SpaceForm::hyperbolic(3).unwrap();
        for r in [0.1, 1.0, 3.0] {
            assert!((h2.sigma(r) - 2.0 * PI * r.sinh()).abs() < 1e-12 * h2.sigma(r));
            assert!((h3.sigma(r) - 4.0 * PI * r.sinh().powi(2)).abs() < 1e-12 * h3.sigma(r));
            let m = PI * ((2.0 * r).sinh() - 2.0 * r);
            assert!((h3.volume(r) - m).abs() < 1e-10 * m.max(1e-3));
        }
        assert_eq!(h3.volume(0.0), 0.0);
    }

    #[test]
    fn small_radius_limit() {
        for n in 2..=6 {
            let sf = SpaceForm::hyperbolic(n).unwrap();
            let r: f64 = 1e-4;
            let ratio = sf.sigma(r) / r.powi(n as i32 - 1);
            assert!((ratio - sf.unit_sphere()).abs() < 1e-7 * sf.unit_sphere());
        }
    }

    #[test]
    fn witnesses_vanish_at_origin() {
        assert_eq!(h0(3, 0.0), 0.0);
        assert_eq!(h1(3, 0.0), 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SpaceForm::new(1, -1.0).is_err());
        assert!(SpaceForm::new(3, 0.0).is_err());
        assert!(log_concavity_witness(3, &[], 0.0).is_err());
    }
}
