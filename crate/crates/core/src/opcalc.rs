//! Matrix cosine families and the operator calculi built from them:
//! `phi_A(x)`, `T_A(f)`, the Mellin calculus, discretized convolution
//! operators, translation cosine families and fractional integrals.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functions::RadialFunction;
use crate::hypergroup::{translate_below, Grid, GridFunction, Hypergroup};
use crate::quad::{integrate, integrate_cosh_power, integrate_measure, integrate_semi_infinite, Decay, QuadSpec};
use crate::specfun::gamma_complex;
use crate::transforms::{line_integral, MellinInverseOptions};

pub type CMat = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Spectral norm (largest singular value).
pub fn norm2(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

fn nan_matrix(n: usize) -> CMat {
    CMat::from_element(n, n, c(f64::NAN))
}

#[derive(Clone, Debug)]
enum Generator {
    /// `A = U diag(lambda) U*` with `U` unitary.
    Normal { eig: Vec<Complex64>, u: CMat },
    Dense { a: CMat },
}

/// `t -> cos(tA)` with a growth bound `||cos(tA)|| <= kappa cosh(omega0 t)`.
#[derive(Clone, Debug)]
pub struct CosineFamily {
    pub n: usize,
    generator: Generator,
    pub kappa: f64,
    pub omega0: f64,
    /// True when the growth bound is proved rather than fitted.
    pub certified: bool,
    /// RMS residual of the growth fit (zero when certified).
    pub omega0_fit_rms: f64,
    pub method_tag: String,
}

/// Largest `||tA||` for which the dense evaluator is used.
pub const DENSE_NORM_BUDGET: f64 = 600.0;

/// Normal generator from eigenvalues and a unitary eigenbasis.
pub fn cos_family_normal(eigenvalues: &[Complex64], u: &CMat, omega0: f64) -> Result<CosineFamily> {
    let n = eigenvalues.len();
    if u.nrows() != n || u.ncols() != n {
        return Err(Error::InvalidInput(format!("basis is {}x{}, expected {n}x{n}", u.nrows(), u.ncols())));
    }
    let defect = (u.adjoint() * u - CMat::identity(n, n)).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if defect > 1e-10 {
        return Err(Error::InvalidInput(format!("basis is not unitary (defect {defect:.2e})")));
    }
    if let Some(l) = eigenvalues.iter().find(|l| l.im.abs() > omega0 * (1.0 + 1e-12)) {
        return Err(Error::SpectrumOutsideStrip { re: l.re, im: l.im, omega: omega0 });
    }
    Ok(CosineFamily {
        n,
        generator: Generator::Normal { eig: eigenvalues.to_vec(), u: u.clone() },
        kappa: 1.0,
        omega0,
        certified: true,
        omega0_fit_rms: 0.0,
        method_tag: "normal/spectral".into(),
    })
}

/// `cos(X)` by a Taylor series on `X / 2^s` and `s` double-angle steps.
fn dense_cos(x: &CMat) -> Result<CMat> {
    let n = x.nrows();
    let nrm = x.norm();
    if nrm > DENSE_NORM_BUDGET {
        return Err(Error::OverflowRisk(nrm));
    }
    let s = if nrm > 0.5 { (nrm / 0.5).log2().ceil() as i32 } else { 0 };
    let y = x.map(|z| z / 2f64.powi(s));
    let y2 = &y * &y;
    let mut term = CMat::identity(n, n);
    let mut sum = term.clone();
    for k in 1..40 {
        term = -(&term * &y2) / c((2 * k - 1) as f64 * (2 * k) as f64);
        sum += &term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    for _ in 0..s {
        sum = (&sum * &sum) * c(2.0) - CMat::identity(n, n);
    }
    Ok(sum)
}

/// Dense generator; `t_scale` is the largest `|t|` the family will be used at
/// and the growth exponent is fitted on `t in [0, 10]`.
pub fn cos_family_dense(a: &CMat, t_scale: f64) -> Result<CosineFamily> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::InvalidInput("generator must be square".into()));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidInput("generator has non-finite entries".into()));
    }
    let reach = a.norm() * t_scale.abs().max(10.0);
    if reach > DENSE_NORM_BUDGET {
        return Err(Error::OverflowRisk(reach));
    }
    let ts: Vec<f64> = (0..=40).map(|k| 0.25 * k as f64).collect();
    let logs: Vec<f64> = ts
        .iter()
        .map(|&t| dense_cos(&a.map(|z| z * t)).map(|m| norm2(&m).max(1e-300).ln()))
        .collect::<Result<_>>()?;
    // Fit log ||cos tA|| ~ log kappa + log cosh(w t); kappa absorbs the mean offset.
    let resid = |w: f64| -> (f64, f64) {
        let d: Vec<f64> = ts.iter().zip(&logs).map(|(&t, &l)| l - log_cosh(w * t)).collect();
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        let ss = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
        (ss, d.iter().cloned().fold(f64::MIN, f64::max))
    };
    let (mut lo, mut hi) = (0.0, a.norm().max(1e-12));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if resid(m1).0 <= resid(m2).0 {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let w = 0.5 * (lo + hi);
    let (ss, max_off) = resid(w);
    Ok(CosineFamily {
        n,
        generator: Generator::Dense { a: a.clone() },
        kappa: max_off.exp().max(1.0),
        omega0: w,
        certified: false,
        omega0_fit_rms: (ss / ts.len() as f64).sqrt(),
        method_tag: "dense/taylor-doubling".into(),
    })
}

fn log_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

impl CosineFamily {
    /// The generator `A`.
    pub fn generator(&self) -> CMat {
        match &self.generator {
            Generator::Normal { eig, u } => u * CMat::from_diagonal(&DVector::from_column_slice(eig)) * u.adjoint(),
            Generator::Dense { a } => a.clone(),
        }
    }

    pub fn eigenvalues(&self) -> Option<&[Complex64]> {
        match &self.generator {
            Generator::Normal { eig, .. } => Some(eig),
            Generator::Dense { .. } => None,
        }
    }

    /// `U diag(f(lambda_j)) U*` for normal generators.
    pub fn spectral<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Option<CMat> {
        match &self.generator {
            Generator::Normal { eig, u } => {
                let d = DVector::from_iterator(eig.len(), eig.iter().map(|&l| f(l)));
                Some(u * CMat::from_diagonal(&d) * u.adjoint())
            }
            Generator::Dense { .. } => None,
        }
    }

    pub fn cos(&self, t: f64) -> Result<CMat> {
        match &self.generator {
            Generator::Normal { .. } => Ok(self.spectral(|l| (l * t).cos()).expect("normal")),
            Generator::Dense { a } => dense_cos(&a.map(|z| z * t)),
        }
    }

    /// The family generated by `alpha A`.
    pub fn scaled(&self, alpha: f64) -> Self {
        let generator = match &self.generator {
            Generator::Normal { eig, u } => {
                Generator::Normal { eig: eig.iter().map(|l| l * alpha).collect(), u: u.clone() }
            }
            Generator::Dense { a } => Generator::Dense { a: a.map(|z| z * alpha) },
        };
        Self { generator, omega0: self.omega0 * alpha.abs(), ..self.clone() }
    }

    /// Largest `||C(s+t) + C(s-t) - 2C(s)C(t)||_2 / (kappa^2 cosh(w s) cosh(w t))`.
    pub fn dalembert_residual(&self, pairs: &[(f64, f64)]) -> Result<f64> {
        let mut worst = 0.0f64;
        for &(s, t) in pairs {
            let r = self.cos(s + t)? + self.cos(s - t)? - self.cos(s)? * self.cos(t)? * c(2.0);
            let scale = self.kappa.powi(2) * (self.omega0 * s).cosh() * (self.omega0 * t).cosh();
            worst = worst.max(norm2(&r) / scale);
        }
        Ok(worst)
    }
}

/// An operator-valued result with its provenance.
#[derive(Clone, Debug)]
pub struct OperatorResult {
    pub matrix: CMat,
    pub method_tag: String,
    pub report: OpReport,
}

#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct OpReport {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub notes: Vec<String>,
}

impl OpReport {
    fn new(spec: &QuadSpec) -> Self {
        Self { abs_tol: spec.abs_tol, rel_tol: spec.rel_tol, notes: Vec::new() }
    }
}

fn finite(m: CMat) -> Result<CMat> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(m)
    } else {
        Err(Error::NonConvergence { error: f64::NAN, tolerance: 0.0 })
    }
}

/// `phi_A(x) = int cos(tA) tau_x(dt)`.
pub fn phi_a(h: &Hypergroup, fam: &CosineFamily, x: f64, spec: &QuadSpec) -> Result<OperatorResult> {
    let kernel = h
        .laplace_kernel(x)
        .ok_or_else(|| Error::InvalidInput(format!("{} has no Laplace representation", h.name())))?;
    let mut report = OpReport::new(spec);
    if fam.omega0 > h.omega0() * (1.0 + 1e-12) {
        report.notes.push(format!(
            "family growth {} exceeds the instance strip {}; phi_A may be unbounded",
            fam.omega0,
            h.omega0()
        ));
    }
    fam.cos(x)?;
    let n = fam.n;
    let m = integrate_measure(|t: f64| fam.cos(t).unwrap_or_else(|_| nan_matrix(n)), &kernel, spec)?;
    Ok(OperatorResult { matrix: finite(m)?, method_tag: format!("laplace/{}", fam.method_tag), report })
}

/// Function argument of `T_A`.
pub enum FnInput<'a> {
    Evaluator(&'a dyn RadialFunction),
    /// Integrated with the grid's own (m-weighted) rule.
    Grid(&'a GridFunction),
}

/// `T_{alpha A}(f) = int f(x) phi_{alpha A}(x) m(x) dx`.
pub fn t_a(
    h: &Hypergroup,
    fam: &CosineFamily,
    f: FnInput<'_>,
    alpha: f64,
    spec: &QuadSpec,
) -> Result<OperatorResult> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidInput(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let fam_a = if alpha == 1.0 { fam.clone() } else { fam.scaled(alpha) };
    let n = fam.n;
    let inner = QuadSpec { abs_tol: spec.abs_tol * 1e-2, rel_tol: spec.rel_tol * 1e-2, ..*spec };
    let phi = |x: f64| phi_a(h, &fam_a, x, &inner).map(|r| r.matrix);
    let matrix = match f {
        FnInput::Grid(g) => {
            let terms: Vec<CMat> = (0..g.values.len())
                .into_par_iter()
                .map(|i| {
                    let v = g.values[i];
                    if v == c(0.0) {
                        Ok(CMat::zeros(n, n))
                    } else {
                        Ok(phi(g.nodes()[i])? * (v * g.weights[i]))
                    }
                })
                .collect::<Result<_>>()?;
            // Summed in node order so the result does not depend on scheduling.
            terms.into_iter().fold(CMat::zeros(n, n), |acc, t| acc + t)
        }
        FnInput::Evaluator(f) => {
            let integrand = |x: f64| -> CMat {
                let fx = f.value(x);
                if fx == 0.0 {
                    return CMat::zeros(n, n);
                }
                phi(x).map(|m| m * c(fx * h.haar(x))).unwrap_or_else(|_| nan_matrix(n))
            };
            let end = f.support_end();
            if end.is_finite() {
                integrate(integrand, 0.0, end, spec)?
            } else {
                integrate_semi_infinite(integrand, 0.0, Decay::Exponential, spec)?
            }
        }
    };
    Ok(OperatorResult {
        matrix: finite(matrix)?,
        method_tag: format!("T_A/laplace/{}", fam.method_tag),
        report: OpReport::new(spec),
    })
}

/// `f * g` for compactly supported `f`, `g`, sampled on a Gauss grid over
/// `[0, supp f + supp g]`.
pub fn sample_convolution(
    h: &Hypergroup,
    f: &dyn RadialFunction,
    g: &dyn RadialFunction,
    spec: &QuadSpec,
) -> Result<GridFunction> {
    let (fe, ge) = (f.support_end(), g.support_end());
    if !(fe.is_finite() && ge.is_finite()) {
        return Err(Error::InvalidInput("homomorphism check needs compact supports".into()));
    }
    let end = fe + ge;
    let grid = std::sync::Arc::new(Grid::gauss(0.0, end, (end / 0.1).ceil() as usize, 10)?);
    let fg: Vec<Complex64> = grid
        .nodes
        .par_iter()
        .map(|&x| crate::hypergroup::convolve_at(h, |y| f.value(y), |t| c(g.value(t)), x, (0.0, fe), spec))
        .collect::<Result<_>>()?;
    Ok(GridFunction::from_values(h, grid, fg))
}

/// `||T_A(f * g) - T_A(f) T_A(g)||_F / (||T_A(f)||_F ||T_A(g)||_F)` for
/// compactly supported `f`, `g`.
pub fn homomorphism_residual(
    h: &Hypergroup,
    fam: &CosineFamily,
    f: &dyn RadialFunction,
    g: &dyn RadialFunction,
    spec: &QuadSpec,
) -> Result<f64> {
    let fg = sample_convolution(h, f, g, spec)?;
    homomorphism_residual_sampled(h, fam, &fg, f, g, spec)
}

/// As [`homomorphism_residual`] with `f * g` already sampled.
pub fn homomorphism_residual_sampled(
    h: &Hypergroup,
    fam: &CosineFamily,
    fg: &GridFunction,
    f: &dyn RadialFunction,
    g: &dyn RadialFunction,
    spec: &QuadSpec,
) -> Result<f64> {
    let lhs = t_a(h, fam, FnInput::Grid(fg), 1.0, spec)?.matrix;
    let tf = t_a(h, fam, FnInput::Evaluator(f), 1.0, spec)?.matrix;
    let tg = t_a(h, fam, FnInput::Evaluator(g), 1.0, spec)?.matrix;
    Ok((lhs - &tf * &tg).norm() / (tf.norm() * tg.norm()))
}

/// `sin(x mu) / mu` with the removable singularity at `mu = 0`.
pub fn sin_over(x: f64, mu: Complex64) -> Complex64 {
    let z = mu * x;
    if z.norm() < 1e-4 {
        let z2 = z * z;
        c(x) * (1.0 - z2 / 6.0 + z2 * z2 / 120.0)
    } else {
        z.sin() / mu
    }
}

/// `int_0^inf (sin(alpha x A) / (alpha A)) f(x) sinh x dx`.
pub fn t_jacobi_sine(fam: &CosineFamily, f: &dyn RadialFunction, alpha: f64, spec: &QuadSpec) -> Result<OperatorResult> {
    let n = fam.n;
    let s_of = |x: f64| -> Result<CMat> {
        match fam.spectral(|l| sin_over(x, l * alpha)) {
            Some(m) => Ok(m),
            // sin(axA)/(aA) = int_0^x cos(a t A) dt
            None => integrate(
                |t: f64| fam.cos(alpha * t).unwrap_or_else(|_| nan_matrix(n)),
                0.0,
                x,
                &spec.plain(),
            ),
        }
    };
    let integrand = |x: f64| -> CMat {
        let fx = f.value(x);
        if fx == 0.0 || x == 0.0 {
            return CMat::zeros(n, n);
        }
        s_of(x).map(|m| m * c(fx * x.sinh())).unwrap_or_else(|_| nan_matrix(n))
    };
    let end = f.support_end();
    let m = if end.is_finite() {
        integrate(integrand, 0.0, end, spec)?
    } else {
        integrate_semi_infinite(integrand, 0.0, Decay::Exponential, spec)?
    };
    let tag = if fam.eigenvalues().is_some() { "sine/spectral" } else { "sine/cosine-integral" };
    Ok(OperatorResult { matrix: finite(m)?, method_tag: tag.into(), report: OpReport::new(spec) })
}

/// `f(A) = (1/2 pi) int A^{-i tau} f*(i tau) d tau` for Hermitian positive
/// definite `A`.
pub fn mellin_operator_calculus<F: Fn(Complex64) -> Complex64>(
    a: &CMat,
    f_star: F,
    opts: &MellinInverseOptions,
) -> Result<OperatorResult> {
    let n = a.nrows();
    let herm = (a - a.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if a.ncols() != n || herm > 1e-10 * a.norm().max(1.0) {
        return Err(Error::InvalidInput("Mellin calculus needs a Hermitian matrix".into()));
    }
    let eig = a.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::InvalidInput("Mellin calculus needs a positive spectrum".into()));
    }
    let u = eig.eigenvectors;
    let logs: Vec<f64> = eig.eigenvalues.iter().map(|l| l.ln()).collect();
    let g = |tau: f64| -> CMat {
        let fs = f_star(Complex64::new(0.0, tau));
        let d = DVector::from_iterator(n, logs.iter().map(|&ll| Complex64::new(0.0, -tau * ll).exp() * fs));
        &u * CMat::from_diagonal(&d) * u.adjoint()
    };
    let m = line_integral(g, opts)? / c(2.0 * PI);
    Ok(OperatorResult {
        matrix: finite(m)?,
        method_tag: "mellin/line-integral".into(),
        report: OpReport::new(&opts.spec),
    })
}

/// Discretized convolution operator `Lambda_f g = f * g` on a grid.
#[derive(Clone, Debug)]
pub struct LambdaOp {
    pub nodes: Vec<f64>,
    /// Quadrature weights including the Haar density.
    pub weights: Vec<f64>,
    /// `(K g)_i = sum_j K_ij g_j`.
    pub k: DMatrix<f64>,
    /// `W^{1/2} K W^{-1/2}` after symmetrization.
    pub sym: DMatrix<f64>,
}

impl LambdaOp {
    /// Operator norm on the discretized `L^2(m)`.
    pub fn norm(&self) -> f64 {
        self.sym.clone().symmetric_eigen().eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()))
    }

    pub fn apply(&self, g: &[f64]) -> Vec<f64> {
        (&self.k * DVector::from_column_slice(g)).iter().copied().collect()
    }
}

/// `K_ij = w_j (Lambda_{x_i} f)(x_j)`, symmetrized in the weighted inner
/// product.
pub fn lambda_op(h: &Hypergroup, f: &dyn RadialFunction, grid: &Grid, spec: &QuadSpec) -> Result<LambdaOp> {
    let nodes = grid.nodes.clone();
    let weights: Vec<f64> = nodes.iter().zip(&grid.weights).map(|(&x, w)| w * h.haar(x)).collect();
    let n = nodes.len();
    let end = f.support_end();
    let mut tau = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let (lo, _) = h.conv_support(nodes[i], nodes[j]);
            if lo >= end {
                continue;
            }
            let v = translate_below(h, |t| c(f.value(t)), nodes[i], nodes[j], end, spec)?.re;
            tau[(i, j)] = v;
            tau[(j, i)] = v;
        }
    }
    let sq: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let sym = DMatrix::from_fn(n, n, |i, j| sq[i] * sq[j] * tau[(i, j)]);
    let k = DMatrix::from_fn(n, n, |i, j| weights[j] * tau[(i, j)]);
    Ok(LambdaOp { nodes, weights, k, sym })
}

/// Grid for discretized convolution operators: `[0, 10(level + 2)]` with
/// panels of width 1/2. Each level extends and refines.
pub fn lambda_grid(level: u32) -> Grid {
    let x = 10.0 * (level as f64 + 2.0);
    Grid::gauss(0.0, x, (2.0 * x) as usize, 8).expect("valid grid")
}

/// Translations `S_t f(x) = f(x + t)` on a uniform symmetric grid, measured
/// in `L^p(q dx)`.
#[derive(Clone, Debug)]
pub struct TranslationCosine {
    pub step: f64,
    pub x: Vec<f64>,
    pub q: Vec<f64>,
    pub p: f64,
}

/// Fitted growth of `||S_t||`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct GrowthFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// `max(|kappa_1|, |kappa_2|) / p` from the grid log-derivative.
    pub predicted: f64,
}

pub fn translation_cosine<Q: Fn(f64) -> f64>(q: Q, p: f64, half_width: f64, step: f64) -> Result<TranslationCosine> {
    if !(p >= 1.0) || !(step > 0.0) || !(half_width > step) {
        return Err(Error::InvalidInput("translation grid needs p >= 1 and 0 < step < half_width".into()));
    }
    let m = (half_width / step).round() as i64;
    let x: Vec<f64> = (-m..=m).map(|k| k as f64 * step).collect();
    let q: Vec<f64> = x.iter().map(|&x| q(x)).collect();
    if q.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidInput("weight must be positive".into()));
    }
    Ok(TranslationCosine { step, x, q, p })
}

impl TranslationCosine {
    /// `S_t` for `t = k step`, zero outside the grid.
    pub fn shift(&self, f: &[f64], k: i64) -> Vec<f64> {
        let n = f.len() as i64;
        (0..n).map(|i| if (0..n).contains(&(i + k)) { f[(i + k) as usize] } else { 0.0 }).collect()
    }

    /// `sigma_t f = (f(x + t) + f(x - t)) / 2`, the cosine family.
    pub fn sigma(&self, f: &[f64], k: i64) -> Vec<f64> {
        self.shift(f, k).iter().zip(self.shift(f, -k)).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    /// Exact `||S_t||` on the grid space: `max_j (q(x_j - t)/q(x_j))^{1/p}`.
    pub fn shift_norm(&self, k: i64) -> f64 {
        let n = self.q.len() as i64;
        (0..n)
            .filter(|j| (0..n).contains(&(j - k)))
            .map(|j| self.q[(j - k) as usize] / self.q[j as usize])
            .fold(0.0f64, f64::max)
            .powf(1.0 / self.p)
    }

    pub fn lp_norm(&self, f: &[f64]) -> f64 {
        (f.iter().zip(&self.q).map(|(v, q)| v.abs().powf(self.p) * q).sum::<f64>() * self.step).powf(1.0 / self.p)
    }

    /// Least-squares line through `log ||S_t||` for `t in [1, t_max]`.
    pub fn growth_fit(&self, t_max: f64) -> GrowthFit {
        let k_lo = (1.0 / self.step).ceil() as i64;
        let k_hi = (t_max / self.step).floor() as i64;
        let pts: Vec<(f64, f64)> = (k_lo..=k_hi)
            .flat_map(|k| [k, -k])
            .map(|k| ((k as f64 * self.step).abs(), self.shift_norm(k).ln()))
            .collect();
        let n = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (mx, my) = (sx / n, sy / n);
        let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
        let slope = sxy / sxx;
        let kappa = self
            .q
            .windows(2)
            .map(|w| ((w[1] / w[0]).ln() / self.step).abs())
            .fold(0.0f64, f64::max);
        GrowthFit { exponent: slope, prefactor: (my - slope * mx).exp(), predicted: kappa / self.p }
    }
}

/// Kind of fractional integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FracKind {
    /// `(1/Gamma(a)) int_0^x (cosh x - cosh t)^{a-1} sinh t f(t) dt`
    W,
    /// `(1/Gamma(a)) int_0^x (cosh x - cosh t)^{a-1} f(t) dt`
    U,
}

/// Fractional integral of `f` at each node.
pub fn frac_integrate<F: Fn(f64) -> Complex64>(
    kind: FracKind,
    alpha: Complex64,
    f: F,
    x: &[f64],
    spec: &QuadSpec,
) -> Result<Vec<Complex64>> {
    if !(alpha.re > 0.0) {
        return Err(Error::InvalidInput(format!("fractional order needs Re > 0, got {alpha}")));
    }
    let g = gamma_complex(alpha)?;
    let beta = alpha.re - 1.0;
    x.iter()
        .map(|&xi| {
            let integrand = |t: f64| -> Complex64 {
                let mut v = f(t);
                if kind == FracKind::W {
                    v *= t.sinh();
                }
                if alpha.im != 0.0 {
                    let gap = 2.0 * (0.5 * (xi + t)).sinh() * (0.5 * (xi - t)).sinh();
                    v *= Complex64::new(0.0, alpha.im * gap.ln()).exp();
                }
                v
            };
            Ok(integrate_cosh_power(integrand, xi, beta, spec)? / g)
        })
        .collect()
}

/// `U_{1/2}(t -> cos(tA))(x)`.
pub fn frac_cosine_family(fam: &CosineFamily, x: f64, spec: &QuadSpec) -> Result<OperatorResult> {
    let n = fam.n;
    fam.cos(x)?;
    let m = integrate_cosh_power(|t: f64| fam.cos(t).unwrap_or_else(|_| nan_matrix(n)), x, -0.5, spec)?;
    Ok(OperatorResult {
        matrix: finite(m / c(PI.sqrt()))?,
        method_tag: format!("U_1/2/{}", fam.method_tag),
        report: OpReport::new(spec),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() < tol)
    }

    #[test]
    fn zero_generator_gives_identity() {
        let fam = cos_family_normal(&[c(0.0), c(0.0)], &CMat::identity(2, 2), 0.0).unwrap();
        assert!(close(&fam.cos(3.7).unwrap(), &CMat::identity(2, 2), 1e-15));
        let dense = cos_family_dense(&CMat::zeros(2, 2), 10.0).unwrap();
        assert!(close(&dense.cos(5.0).unwrap(), &CMat::identity(2, 2), 1e-15));
    }

    #[test]
    fn spectrum_outside_strip_is_rejected() {
        let r = cos_family_normal(&[Complex64::new(1.0, 0.6)], &CMat::identity(1, 1), 0.5);
        assert!(matches!(r, Err(Error::SpectrumOutsideStrip { .. })));
    }

    #[test]
    fn jordan_block_closed_form() {
        let j = CMat::from_row_slice(2, 2, &[c(1.0), c(1.0), c(0.0), c(1.0)]);
        let fam = cos_family_dense(&j, 10.0).unwrap();
        for t in [0.3f64, 1.0, 4.0, 9.5] {
            let exact = CMat::from_row_slice(2, 2, &[c(t.cos()), c(-t * t.sin()), c(0.0), c(t.cos())]);
            assert!(close(&fam.cos(t).unwrap(), &exact, 1e-10), "t={t}");
        }
    }

    #[test]
    fn overflow_is_flagged() {
        let a = CMat::from_element(2, 2, c(100.0));
        assert!(matches!(cos_family_dense(&a, 10.0), Err(Error::OverflowRisk(_))));
    }

    #[test]
    fn sinc_limit() {
        assert_eq!(sin_over(2.0, c(0.0)), c(2.0));
        let mu = c(3e-5);
        assert!((sin_over(2.0, mu) - (mu * 2.0).sin() / mu).norm() < 1e-15);
    }

    #[test]
    fn flat_weight_shift_is_isometric() {
        let tc = translation_cosine(|_| 1.0, 2.0, 5.0, 0.1).unwrap();
        for k in [1, 7, 30] {
            assert!((tc.shift_norm(k) - 1.0).abs() < 1e-15);
        }
    }
}
