//! Hypergroup Fourier transform and its Plancherel inversion, the Mellin
//! transform pair, and strip-analyticity probes.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::RadialFunction;
use crate::hypergroup::{GridFunction, Hypergroup, InstanceKind};
use crate::quad::{composite_gauss_legendre, integrate, integrate_semi_infinite, Decay, QuadSpec, QuadValue};

/// Sampled transform with provenance.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TransformTable {
    pub instance: String,
    pub descriptor: String,
    /// How the values were produced (quadrature path, regularization, closed form).
    pub provenance: String,
    pub lambda: Vec<Complex64>,
    pub values: Vec<Complex64>,
    /// Quadrature weights in `lambda` when the nodes form a rule.
    pub weights: Option<Vec<f64>>,
}

impl TransformTable {
    pub fn from_closed_form<F: Fn(f64) -> f64>(h: &Hypergroup, label: &str, lambda: &[f64], f: F) -> Self {
        Self {
            instance: h.name().to_string(),
            descriptor: label.to_string(),
            provenance: "closed form".into(),
            lambda: lambda.iter().map(|&l| Complex64::new(l, 0.0)).collect(),
            values: lambda.iter().map(|&l| Complex64::new(f(l), 0.0)).collect(),
            weights: None,
        }
    }

    pub fn with_weights(mut self, w: Vec<f64>) -> Self {
        assert_eq!(w.len(), self.lambda.len());
        self.weights = Some(w);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regularization {
    /// Green's identity when the direct integrand does not decay.
    Auto,
    Direct,
    /// `f^(lambda) = ((L - omega0^2) f)^(lambda) / lambda^2`
    Green,
}

#[derive(Clone, Copy, Debug)]
pub struct ForwardOptions {
    pub spec: QuadSpec,
    pub allow_outside_strip: bool,
    pub regularization: Regularization,
}

impl Default for ForwardOptions {
    fn default() -> Self {
        Self {
            spec: QuadSpec::with_tol(1e-13, 1e-11),
            allow_outside_strip: false,
            regularization: Regularization::Auto,
        }
    }
}

fn needs_green(h: &Hypergroup, f: &dyn RadialFunction) -> bool {
    if f.support_end().is_finite() {
        return false;
    }
    let env = |x: f64| f.value(x).abs() * h.phi0(x).unwrap_or(1.0) * h.haar(x);
    let (a, b) = (env(15.0), env(30.0));
    b > 1e-6 * a.max(1e-300)
}

fn green_source(h: &Hypergroup, f: &dyn RadialFunction, x: f64) -> Option<f64> {
    let w2 = h.omega0() * h.omega0();
    Some(-f.d2(x)? - h.haar_log_derivative(x) * f.d1(x)? - w2 * f.value(x))
}

fn forward_one(h: &Hypergroup, f: &dyn RadialFunction, lambda: Complex64, opts: &ForwardOptions) -> Result<(Complex64, &'static str)> {
    let mut green = match opts.regularization {
        Regularization::Direct => false,
        Regularization::Green => true,
        Regularization::Auto => needs_green(h, f),
    };
    if green && (lambda.norm() < 1e-3 || f.d2(1.0).is_none()) {
        // Green's identity divides by lambda^2 and needs derivatives.
        if opts.regularization == Regularization::Green {
            return Err(Error::InvalidInput("Green regularization needs derivatives and lambda away from 0".into()));
        }
        green = false;
    }
    let spec = opts.spec;
    let kernel = |x: f64| -> Complex64 {
        match h.character(lambda, x) {
            Ok(p) => p * h.haar(x),
            Err(_) => Complex64::new(f64::NAN, 0.0),
        }
    };
    let integrand = |x: f64| -> Complex64 {
        let fx = if green { green_source(h, f, x).unwrap_or(f64::NAN) } else { f.value(x) };
        if fx == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        kernel(x) * fx
    };
    let end = f.support_end();
    let v = if end.is_finite() {
        integrate(integrand, 0.0, end, &spec)?
    } else {
        integrate_semi_infinite(integrand, 0.0, Decay::Exponential, &spec)?
    };
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::NonConvergence { error: f64::NAN, tolerance: spec.abs_tol });
    }
    Ok(if green { (v / (lambda * lambda), "quadrature, Green identity") } else { (v, "quadrature, direct") })
}

/// `f^(lambda) = int_0^inf f(x) phi_lambda(x) m(x) dx` at each node.
pub fn forward(h: &Hypergroup, f: &dyn RadialFunction, lambda: &[Complex64], opts: &ForwardOptions) -> Result<TransformTable> {
    if h.kind == InstanceKind::Multiplicative {
        let s: Vec<Complex64> = lambda.iter().map(|l| Complex64::i() * l).collect();
        let mut t = mellin_forward(|x| f.value(x), &s, Decay::Exponential, &opts.spec)?;
        t.lambda = lambda.to_vec();
        t.instance = h.name().to_string();
        t.descriptor = f.describe();
        return Ok(t);
    }
    if !opts.allow_outside_strip {
        if let Some(l) = lambda.iter().find(|l| !h.in_strip(**l)) {
            return Err(Error::StripViolation { re: l.re, im: l.im, omega: h.omega0() });
        }
    }
    let results: Vec<Result<(Complex64, &str)>> = lambda.par_iter().map(|&l| forward_one(h, f, l, opts)).collect();
    let mut values = Vec::with_capacity(lambda.len());
    let mut provenance = Vec::new();
    for r in results {
        let (v, p) = r?;
        values.push(v);
        if !provenance.contains(&p) {
            provenance.push(p);
        }
    }
    Ok(TransformTable {
        instance: h.name().to_string(),
        descriptor: f.describe(),
        provenance: provenance.join("; "),
        lambda: lambda.to_vec(),
        values,
        weights: None,
    })
}

/// Forward transform of a grid function by the grid's own quadrature.
pub fn forward_grid(h: &Hypergroup, f: &GridFunction, lambda: &[Complex64]) -> Result<TransformTable> {
    let values: Result<Vec<Complex64>> = lambda
        .par_iter()
        .map(|&l| {
            let mut acc = Complex64::new(0.0, 0.0);
            for ((&x, v), w) in f.nodes().iter().zip(&f.values).zip(&f.weights) {
                acc += v * w * h.character(l, x)?;
            }
            Ok(acc)
        })
        .collect();
    Ok(TransformTable {
        instance: h.name().to_string(),
        descriptor: "grid function".into(),
        provenance: "grid quadrature".into(),
        lambda: lambda.to_vec(),
        values: values?,
        weights: None,
    })
}

/// Gauss–Legendre nodes and weights on `[lo, lambda_max]` for Plancherel
/// integrals (`lo = -lambda_max` on the multiplicative instance).
pub fn plancherel_rule(h: &Hypergroup, lambda_max: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let lo = if h.plancherel_support_lo().is_finite() { 0.0 } else { -lambda_max };
    composite_gauss_legendre(lo, lambda_max, panels, order)
}

/// Default truncation of the spectral integral.
pub const LAMBDA_MAX_DEFAULT: f64 = 40.0;

/// `f(x) = c_H int_S f^(lambda) phi_lambda(x) pi_0(lambda) d lambda`
/// from a table on a quadrature rule (trapezoid weights when the table
/// carries none).
pub fn inverse_plancherel(h: &Hypergroup, table: &TransformTable, x: &[f64]) -> Result<Vec<Complex64>> {
    let c_h = h.plancherel_constant()?;
    let lam: Vec<f64> = table.lambda.iter().map(|l| l.re).collect();
    let weights = match &table.weights {
        Some(w) => w.clone(),
        None => trapezoid_weights(&lam)?,
    };
    x.par_iter()
        .map(|&xi| {
            let mut acc = Complex64::new(0.0, 0.0);
            for ((&l, v), w) in lam.iter().zip(&table.values).zip(&weights) {
                let phi = if h.kind == InstanceKind::Multiplicative {
                    // Inversion pairs f^ with the conjugate character.
                    h.character(Complex64::new(-l, 0.0), xi)?
                } else {
                    h.character(Complex64::new(l, 0.0), xi)?
                };
                acc += v * phi * (w * h.plancherel_density(l));
            }
            Ok(acc * c_h)
        })
        .collect()
}

fn trapezoid_weights(lam: &[f64]) -> Result<Vec<f64>> {
    if lam.len() < 2 || lam.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::InvalidInput("inversion needs increasing real lambda nodes".into()));
    }
    let n = lam.len();
    let mut w = vec![0.0; n];
    for i in 0..n - 1 {
        let d = 0.5 * (lam[i + 1] - lam[i]);
        w[i] += d;
        w[i + 1] += d;
    }
    Ok(w)
}

/// `(int |f|^2 m, c_H int_S |f^|^2 pi_0)`.
pub fn plancherel_norm_check(
    h: &Hypergroup,
    f: &dyn RadialFunction,
    lambda_max: f64,
    opts: &ForwardOptions,
) -> Result<(f64, f64)> {
    let c_h = h.plancherel_constant()?;
    let (lhs, raw) = plancherel_parts(h, f, lambda_max, opts)?;
    Ok((lhs, c_h * raw))
}

// (int |f|^2 m, int_S |f^|^2 pi_0) without the constant.
fn plancherel_parts(h: &Hypergroup, f: &dyn RadialFunction, lambda_max: f64, opts: &ForwardOptions) -> Result<(f64, f64)> {
    let sq = |x: f64| f.value(x).powi(2) * h.haar(x);
    let end = f.support_end();
    let lhs = if h.kind == InstanceKind::Multiplicative {
        integrate(|u: f64| sq(u.exp()) * u.exp(), -60.0, 60.0, &opts.spec)?
    } else if end.is_finite() {
        integrate(sq, 0.0, end, &opts.spec)?
    } else {
        integrate_semi_infinite(sq, 0.0, Decay::Exponential, &opts.spec)?
    };
    if lhs == 0.0 {
        return Ok((0.0, 0.0));
    }
    // Panels of width 1/2 outward from 0, stopping once the spectral
    // integrand has died out (or at lambda_max).
    let (gx, gw) = crate::quad::gauss_legendre(8);
    let symmetric = !h.plancherel_support_lo().is_finite();
    let width = 0.5;
    let mut raw = 0.0;
    let mut quiet = 0;
    let mut lo = 0.0;
    while lo < lambda_max && quiet < 2 {
        let hi = (lo + width).min(lambda_max);
        let mut lam = Vec::new();
        let mut wts = Vec::new();
        for (x, w) in gx.iter().zip(&gw) {
            let l = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x;
            lam.push(l);
            wts.push(0.5 * (hi - lo) * w);
            if symmetric {
                lam.push(-l);
                wts.push(0.5 * (hi - lo) * w);
            }
        }
        let nodes: Vec<Complex64> = lam.iter().map(|&l| Complex64::new(l, 0.0)).collect();
        let table = forward(h, f, &nodes, opts)?;
        let panel: f64 = table
            .values
            .iter()
            .zip(&lam)
            .zip(&wts)
            .map(|((v, &l), w)| v.norm_sqr() * h.plancherel_density(l) * w)
            .sum();
        raw += panel;
        quiet = if panel < 1e-15 * raw { quiet + 1 } else { 0 };
        lo = hi;
    }
    Ok((lhs, raw))
}

/// Least-squares Plancherel constant from round trips of the given
/// functions: minimizes `sum (lhs_k - c raw_k)^2`.
pub fn calibrate_plancherel_constant(
    h: &Hypergroup,
    fns: &[&dyn RadialFunction],
    lambda_max: f64,
    opts: &ForwardOptions,
) -> Result<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for f in fns {
        let (lhs, raw) = plancherel_parts(h, *f, lambda_max, opts)?;
        num += lhs * raw;
        den += raw * raw;
    }
    if den == 0.0 {
        return Err(Error::InvalidInput("calibration needs a nonzero function".into()));
    }
    Ok(num / den)
}

/// Mellin transform `f*(s) = int_0^inf f(x) x^{s-1} dx`; `decay` describes
/// the behaviour at infinity.
pub fn mellin_forward<F: Fn(f64) -> f64 + Sync>(
    f: F,
    s: &[Complex64],
    decay: Decay,
    spec: &QuadSpec,
) -> Result<TransformTable> {
    let values: Result<Vec<Complex64>> = s
        .par_iter()
        .map(|&s| {
            // x = e^{-u} on (0, 1]
            let head = integrate_semi_infinite(
                |u: f64| (-u * s).exp() * f((-u).exp()),
                0.0,
                Decay::Exponential,
                spec,
            )?;
            let tail = match decay {
                Decay::Exponential => integrate_semi_infinite(
                    |u: f64| (u * s).exp() * f(u.exp()),
                    0.0,
                    Decay::Exponential,
                    spec,
                )?,
                Decay::Oscillatory => integrate_semi_infinite(
                    |x: f64| ((s - 1.0) * x.ln()).exp() * f(x),
                    1.0,
                    Decay::Oscillatory,
                    spec,
                )?,
            };
            Ok(head + tail)
        })
        .collect();
    Ok(TransformTable {
        instance: "multiplicative".into(),
        descriptor: "mellin".into(),
        provenance: match decay {
            Decay::Exponential => "quadrature in log x".into(),
            Decay::Oscillatory => "quadrature, exp(-eps x) regulator extrapolated to eps = 0".into(),
        },
        lambda: s.to_vec(),
        values: values?,
        weights: None,
    })
}

/// Options for the inverse Mellin transform on the line `Re s = sigma`.
#[derive(Clone, Copy, Debug)]
pub struct MellinInverseOptions {
    pub sigma: f64,
    pub spec: QuadSpec,
    /// First truncation `|tau| <= t0`; doubled until stable.
    pub t0: f64,
    pub t_max: f64,
}

impl Default for MellinInverseOptions {
    fn default() -> Self {
        Self { sigma: 0.0, spec: QuadSpec::with_tol(1e-12, 1e-11), t0: 10.0, t_max: 5000.0 }
    }
}

/// `int_R g(tau) d tau` by a doubling truncation ladder.
pub(crate) fn line_integral<V: QuadValue, G: Fn(f64) -> V>(g: G, opts: &MellinInverseOptions) -> Result<V> {
    let mut t = opts.t0;
    let mut acc = integrate(&g, -t, t, &opts.spec)?;
    loop {
        let next_t = 2.0 * t;
        let mut add = integrate(&g, t, next_t, &opts.spec)?;
        add.add_scaled(&integrate(&g, -next_t, -t, &opts.spec)?, 1.0);
        acc.add_scaled(&add, 1.0);
        let tol = opts.spec.abs_tol.max(opts.spec.rel_tol * acc.norm());
        if add.norm() <= tol {
            return Ok(acc);
        }
        if next_t >= opts.t_max {
            return Err(Error::NonConvergence { error: add.norm(), tolerance: tol });
        }
        t = next_t;
    }
}

/// `f(z) = (1/2 pi) int z^{-s} f*(s) d tau`, `s = sigma + i tau`.
pub fn mellin_inverse<F: Fn(Complex64) -> Complex64 + Sync>(
    f_star: F,
    z: &[f64],
    opts: &MellinInverseOptions,
) -> Result<Vec<Complex64>> {
    if z.iter().any(|&z| !(z > 0.0)) {
        return Err(Error::InvalidInput("inverse Mellin nodes must be positive".into()));
    }
    z.par_iter()
        .map(|&zi| {
            let lz = zi.ln();
            let g = |tau: f64| {
                let s = Complex64::new(opts.sigma, tau);
                (-s * lz).exp() * f_star(s)
            };
            Ok(line_integral(g, opts)? / (2.0 * PI))
        })
        .collect()
}

/// Both sides of the `L^p` extension bound
/// `sup |f^| <= M0^alpha ||f||_p (int phi0^{(1-alpha) q} m)^{1/q}`
/// with `p = nu / (nu + alpha - 1)`, over probes in the strip of width
/// `alpha omega0`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct LpBound {
    pub p: f64,
    pub q: f64,
    pub sup_transform: f64,
    pub bound: f64,
}

pub fn lp_extension_bound(
    h: &Hypergroup,
    f: &dyn RadialFunction,
    nu: f64,
    alpha: f64,
    probes: &[Complex64],
    opts: &ForwardOptions,
) -> Result<LpBound> {
    if !(alpha > 0.0 && alpha < 1.0) || !(nu + alpha - 1.0 > 0.0) {
        return Err(Error::InvalidInput(format!("need 0 < alpha < 1 and nu + alpha > 1 (nu={nu}, alpha={alpha})")));
    }
    let omega = alpha * h.omega0();
    if let Some(l) = probes.iter().find(|l| l.im.abs() > omega * (1.0 + 1e-12)) {
        return Err(Error::StripViolation { re: l.re, im: l.im, omega });
    }
    let p = nu / (nu + alpha - 1.0);
    let q = p / (p - 1.0);
    let spec = &opts.spec;
    let norm_p = integrate_semi_infinite(|x: f64| f.value(x).abs().powf(p) * h.haar(x), 0.0, Decay::Exponential, spec)?
        .powf(1.0 / p);
    let j = integrate_semi_infinite(
        |x: f64| h.phi0(x).unwrap_or(f64::NAN).powf((1.0 - alpha) * q) * h.haar(x),
        0.0,
        Decay::Exponential,
        spec,
    )?;
    let t = forward(h, f, probes, opts)?;
    Ok(LpBound {
        p,
        q,
        sup_transform: t.values.iter().fold(0.0f64, |m, v| m.max(v.norm())),
        bound: h.m0().powf(alpha) * norm_p * j.powf(1.0 / q),
    })
}

/// Outcome of probing a function for analyticity on a strip.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct StripReport {
    pub omega: f64,
    pub probes: usize,
    pub max_cauchy_riemann: f64,
    pub max_cauchy_integral: f64,
    pub sup_bound: f64,
    /// Probe points where evaluation failed or produced non-finite values.
    pub diverged: Vec<Complex64>,
}

/// Finite-difference Cauchy–Riemann residuals and a mean-value
/// (discrete Cauchy integral) test at `n_probe` points of the strip
/// `|Im z| < omega`, with real parts in `[re_lo, re_hi]`.
pub fn strip_analyticity_check<F>(f: F, omega: f64, n_probe: usize, re_range: (f64, f64)) -> StripReport
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let h = 1e-3;
    let n_circle = 32;
    let probes: Vec<Complex64> = (0..n_probe)
        .map(|k| {
            let t = (k as f64 + 0.5) / n_probe as f64;
            let re = re_range.0 + (re_range.1 - re_range.0) * t;
            // Imaginary parts sweep (-0.8 omega, 0.8 omega) with a different period.
            let im = 0.8 * omega * (2.0 * ((k as f64 * 0.618_033_988_749_895) % 1.0) - 1.0);
            Complex64::new(re, im)
        })
        .collect();
    let per: Vec<(f64, f64, f64, Option<Complex64>)> = probes
        .par_iter()
        .map(|&z| {
            let eval = |w: Complex64| f(w).ok().filter(|v| v.re.is_finite() && v.im.is_finite());
            let vals = (|| {
                let f0 = eval(z)?;
                // Fourth-order central differences along both axes.
                let d = |e: Complex64| -> Option<Complex64> {
                    let a = eval(z + e * h)? - eval(z - e * h)?;
                    let b = eval(z + e * (2.0 * h))? - eval(z - e * (2.0 * h))?;
                    Some((8.0 * a - b) / (12.0 * h))
                };
                let dx = d(Complex64::new(1.0, 0.0))?;
                let dy = d(Complex64::i())?;
                let cr = (dy - Complex64::i() * dx).norm();
                let rho = 0.5 * (omega - z.im.abs());
                let mut mean = Complex64::new(0.0, 0.0);
                for j in 0..n_circle {
                    let th = 2.0 * PI * j as f64 / n_circle as f64;
                    mean += eval(z + Complex64::from_polar(rho, th))?;
                }
                mean /= n_circle as f64;
                Some((cr, (mean - f0).norm(), f0.norm()))
            })();
            match vals {
                Some((a, b, c)) => (a, b, c, None),
                None => (0.0, 0.0, 0.0, Some(z)),
            }
        })
        .collect();
    let mut rep = StripReport {
        omega,
        probes: n_probe,
        max_cauchy_riemann: 0.0,
        max_cauchy_integral: 0.0,
        sup_bound: 0.0,
        diverged: Vec::new(),
    };
    for (cr, ci, sup, div) in per {
        rep.max_cauchy_riemann = rep.max_cauchy_riemann.max(cr);
        rep.max_cauchy_integral = rep.max_cauchy_integral.max(ci);
        rep.sup_bound = rep.sup_bound.max(sup);
        if let Some(z) = div {
            rep.diverged.push(z);
        }
    }
    rep
}
