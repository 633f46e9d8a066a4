//! Hypergroups on the half-line: Haar densities, point-mass convolutions,
//! characters, Laplace kernels and Plancherel data for the four concrete
//! instances, plus sampled functions on grids.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::{
    composite_gauss_legendre, cosh_gap, gauss_legendre, integrate, integrate_measure, Kernel, QuadSpec, RadonMeasure,
};
use crate::specfun::{bessel_j_normalized_complex, gamma, legendre_conical_with, SpecFunAccuracy};

pub const X_MAX_DEFAULT: f64 = 20.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceKind {
    Multiplicative,
    BesselKingman { gamma: f64 },
    JacobiSl2c,
    MehlerFock,
}

/// Serializable description of an instance.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct InstanceMeta {
    pub name: String,
    pub omega0: f64,
    pub m0: f64,
    pub gamma: Option<f64>,
    pub haar_density: String,
    pub plancherel_density: String,
    pub plancherel_constant: Option<f64>,
}

/// A hypergroup instance. Immutable apart from the Plancherel constant,
/// which can be overridden for calibration experiments.
#[derive(Clone, Debug)]
pub struct Hypergroup {
    pub kind: InstanceKind,
    pub meta: InstanceMeta,
    /// Accuracy of integral-based characters.
    pub accuracy: SpecFunAccuracy,
}

impl fmt::Display for Hypergroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.meta.name)
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `Gamma(a+1) / (sqrt(pi) Gamma(a+1/2))`, the normalizer of
/// `(1-u^2)^{a-1/2}` on `[-1, 1]`.
pub fn poisson_constant(a: f64) -> f64 {
    gamma(a + 1.0).unwrap() / (PI.sqrt() * gamma(a + 0.5).unwrap())
}

impl Hypergroup {
    pub const NAMES: [&'static str; 4] = ["multiplicative", "bessel_kingman", "jacobi_sl2c", "mehler_fock"];

    /// Builds an instance by name. `bessel_kingman` takes its order as
    /// `bessel_kingman:<gamma>` (default 0).
    pub fn new(name: &str) -> Result<Self> {
        let (base, param) = match name.split_once(':') {
            Some((b, p)) => (b, Some(p)),
            None => (name, None),
        };
        match (base, param) {
            ("multiplicative", None) => Ok(Self::multiplicative()),
            ("jacobi_sl2c", None) => Ok(Self::jacobi_sl2c()),
            ("mehler_fock", None) => Ok(Self::mehler_fock()),
            ("bessel_kingman", p) => {
                let g = match p {
                    None => 0.0,
                    Some(s) => s
                        .parse::<f64>()
                        .map_err(|_| Error::UnknownInstance(name.to_string()))?,
                };
                Self::bessel_kingman(g)
            }
            _ => Err(Error::UnknownInstance(name.to_string())),
        }
    }

    pub fn multiplicative() -> Self {
        Self {
            kind: InstanceKind::Multiplicative,
            meta: InstanceMeta {
                name: "multiplicative".into(),
                omega0: 0.0,
                m0: 1.0,
                gamma: None,
                haar_density: "1/x".into(),
                plancherel_density: "1 on the real line".into(),
                plancherel_constant: Some(1.0 / (2.0 * PI)),
            },
            accuracy: SpecFunAccuracy::LEGENDRE,
        }
    }

    pub fn bessel_kingman(g: f64) -> Result<Self> {
        if !(g > -0.5) {
            return Err(Error::SingularStart(g));
        }
        let ga1 = gamma(g + 1.0)?;
        Ok(Self {
            kind: InstanceKind::BesselKingman { gamma: g },
            meta: InstanceMeta {
                name: format!("bessel_kingman:{g}"),
                omega0: 0.0,
                m0: 1.0,
                gamma: Some(g),
                haar_density: format!("x^{}", 2.0 * g + 1.0),
                plancherel_density: format!("lambda^{}", 2.0 * g + 1.0),
                plancherel_constant: Some(1.0 / (2f64.powf(2.0 * g) * ga1 * ga1)),
            },
            accuracy: SpecFunAccuracy::LEGENDRE,
        })
    }

    pub fn jacobi_sl2c() -> Self {
        Self {
            kind: InstanceKind::JacobiSl2c,
            meta: InstanceMeta {
                name: "jacobi_sl2c".into(),
                omega0: 1.0,
                m0: 1.0,
                gamma: Some(0.5),
                haar_density: "sinh(x)^2".into(),
                plancherel_density: "lambda^2/(4 pi)".into(),
                plancherel_constant: Some(8.0),
            },
            accuracy: SpecFunAccuracy::LEGENDRE,
        }
    }

    pub fn mehler_fock() -> Self {
        Self {
            kind: InstanceKind::MehlerFock,
            meta: InstanceMeta {
                name: "mehler_fock".into(),
                omega0: 0.5,
                m0: 1.0,
                gamma: Some(0.0),
                haar_density: "sinh(x)".into(),
                plancherel_density: "lambda tanh(pi lambda)".into(),
                plancherel_constant: Some(1.0),
            },
            // Transforms need characters well below the default accuracy.
            accuracy: SpecFunAccuracy { target_rel_err: 1e-10 },
        }
    }

    pub fn name(&self) -> &str {
        &self.meta.name
    }

    pub fn omega0(&self) -> f64 {
        self.meta.omega0
    }

    pub fn m0(&self) -> f64 {
        self.meta.m0
    }

    /// Identity element of the hypergroup.
    pub fn identity(&self) -> f64 {
        match self.kind {
            InstanceKind::Multiplicative => 1.0,
            _ => 0.0,
        }
    }

    /// Involution; the identity map except on the multiplicative group.
    pub fn involution(&self, x: f64) -> f64 {
        match self.kind {
            InstanceKind::Multiplicative => 1.0 / x,
            _ => x,
        }
    }

    /// Haar density `m(x)`.
    pub fn haar(&self, x: f64) -> f64 {
        match self.kind {
            InstanceKind::Multiplicative => 1.0 / x,
            InstanceKind::BesselKingman { gamma } => x.powf(2.0 * gamma + 1.0),
            InstanceKind::JacobiSl2c => x.sinh().powi(2),
            InstanceKind::MehlerFock => x.sinh(),
        }
    }

    /// `m'(x)/m(x)`.
    pub fn haar_log_derivative(&self, x: f64) -> f64 {
        match self.kind {
            InstanceKind::Multiplicative => -1.0 / x,
            InstanceKind::BesselKingman { gamma } => (2.0 * gamma + 1.0) / x,
            InstanceKind::JacobiSl2c => 2.0 / x.tanh(),
            InstanceKind::MehlerFock => 1.0 / x.tanh(),
        }
    }

    /// True when `|Im lambda| <= omega0`.
    pub fn in_strip(&self, lambda: Complex64) -> bool {
        lambda.im.abs() <= self.omega0() * (1.0 + 1e-12) + 1e-15
    }

    /// Character `phi_lambda(x)`.
    pub fn character(&self, lambda: Complex64, x: f64) -> Result<Complex64> {
        if !(x >= 0.0) {
            return Err(Error::InvalidInput(format!("character needs x >= 0, got {x}")));
        }
        match self.kind {
            InstanceKind::Multiplicative => {
                if x == 0.0 {
                    return Err(Error::InvalidInput("multiplicative characters live on (0, inf)".into()));
                }
                Ok((Complex64::i() * lambda * x.ln()).exp())
            }
            InstanceKind::JacobiSl2c => Ok(jacobi_character(lambda, x)),
            InstanceKind::MehlerFock => legendre_conical_with(lambda, x, self.accuracy),
            InstanceKind::BesselKingman { gamma } => {
                let z = lambda * x;
                if z.im == 0.0 || z.norm() < 20.0 {
                    Ok(bessel_j_normalized_complex(gamma, z))
                } else {
                    let tau = self.laplace_kernel(x).expect("bessel kernel");
                    integrate_measure(|t: f64| (lambda * t).cos(), &tau, &QuadSpec::tight())
                }
            }
        }
    }

    /// Real characters for real `lambda`.
    pub fn character_real(&self, lambda: f64, x: f64) -> Result<f64> {
        self.character(c(lambda), x).map(|z| z.re)
    }

    /// Sturm-Liouville weight whose regular solution is the character
    /// (`None` on the multiplicative instance).
    pub fn sl_weight(&self) -> Option<crate::slode::SLWeight> {
        use crate::slode::SLWeight;
        match self.kind {
            InstanceKind::Multiplicative => None,
            InstanceKind::BesselKingman { gamma } => Some(SLWeight::bessel(gamma)),
            InstanceKind::JacobiSl2c => Some(SLWeight::sinh_power(2.0)),
            InstanceKind::MehlerFock => Some(SLWeight::sinh_power(1.0)),
        }
    }

    /// The positive character `phi_0` in the Plancherel support.
    pub fn phi0(&self, x: f64) -> Result<f64> {
        match self.kind {
            InstanceKind::Multiplicative | InstanceKind::BesselKingman { .. } => Ok(1.0),
            _ => self.character_real(0.0, x),
        }
    }

    /// `epsilon_x * epsilon_y`.
    pub fn conv_point(&self, x: f64, y: f64) -> RadonMeasure {
        self.conv_point_below(x, y, f64::INFINITY)
    }

    /// `epsilon_x * epsilon_y` restricted to `[0, t_max]` (on the
    /// multiplicative instance, to `(0, t_max]`).
    pub fn conv_point_below(&self, x: f64, y: f64, t_max: f64) -> RadonMeasure {
        match self.kind {
            InstanceKind::Multiplicative => RadonMeasure::atom(x * y, if x * y <= t_max { 1.0 } else { 0.0 }),
            InstanceKind::JacobiSl2c => geodesic_convolution_below(3, x, y, t_max),
            InstanceKind::MehlerFock => geodesic_convolution_below(2, x, y, t_max),
            InstanceKind::BesselKingman { gamma } => {
                if x == 0.0 || y == 0.0 {
                    return RadonMeasure::atom(x + y, if x + y <= t_max { 1.0 } else { 0.0 });
                }
                let d = (x - y).abs();
                if t_max <= d {
                    return RadonMeasure::atom(d, 0.0);
                }
                let th_max = if t_max >= x + y {
                    PI
                } else {
                    let k = (t_max - d) * (t_max + d) / (4.0 * x * y);
                    2.0 * k.sqrt().min(1.0).asin()
                };
                let cg = poisson_constant(gamma);
                let map = move |th: f64| (d * d + 4.0 * x * y * (0.5 * th).sin().powi(2)).sqrt();
                let weight = move |th: f64| cg * th.sin().powf(2.0 * gamma);
                RadonMeasure::pushforward(d, (x + y).min(t_max), 0.0, th_max, Arc::new(map), Arc::new(weight))
            }
        }
    }

    /// Laplace kernel `tau_x` on `[-x, x]`; absent for the multiplicative
    /// instance.
    pub fn laplace_kernel(&self, x: f64) -> Option<RadonMeasure> {
        if x == 0.0 && self.kind != InstanceKind::Multiplicative {
            return Some(RadonMeasure::dirac(0.0));
        }
        match self.kind {
            InstanceKind::Multiplicative => None,
            InstanceKind::JacobiSl2c => {
                let d = 1.0 / (2.0 * x.sinh());
                Some(RadonMeasure::density(-x, x, Arc::new(move |_| d), Kernel::Smooth))
            }
            InstanceKind::MehlerFock => {
                let d = 1.0 / (PI * 2f64.sqrt());
                Some(RadonMeasure::density(-x, x, Arc::new(move |_| d), Kernel::InvSqrtCosh { x }))
            }
            InstanceKind::BesselKingman { gamma } => {
                let d = poisson_constant(gamma) * x.powf(-2.0 * gamma);
                let beta = gamma - 0.5;
                let kernel = if beta == 0.0 { Kernel::Smooth } else { Kernel::Algebraic { x, beta } };
                Some(RadonMeasure::density(-x, x, Arc::new(move |_| d), kernel))
            }
        }
    }

    /// Plancherel density `pi_0(lambda)`.
    pub fn plancherel_density(&self, lambda: f64) -> f64 {
        match self.kind {
            InstanceKind::Multiplicative => 1.0,
            InstanceKind::BesselKingman { gamma } => lambda.abs().powf(2.0 * gamma + 1.0),
            InstanceKind::JacobiSl2c => lambda * lambda / (4.0 * PI),
            InstanceKind::MehlerFock => lambda * (PI * lambda).tanh(),
        }
    }

    /// Lower end of the Plancherel support (the support is `[lo, inf)`).
    pub fn plancherel_support_lo(&self) -> f64 {
        match self.kind {
            InstanceKind::Multiplicative => f64::NEG_INFINITY,
            _ => 0.0,
        }
    }

    pub fn plancherel_constant(&self) -> Result<f64> {
        self.meta
            .plancherel_constant
            .ok_or_else(|| Error::NormalizationUnset(self.meta.name.clone()))
    }

    pub fn set_plancherel_constant(&mut self, c_h: Option<f64>) {
        self.meta.plancherel_constant = c_h;
    }

    /// Support of `epsilon_x * epsilon_y` predicted by the convolution rule.
    pub fn conv_support(&self, x: f64, y: f64) -> (f64, f64) {
        match self.kind {
            InstanceKind::Multiplicative => (x * y, x * y),
            _ => ((x - y).abs(), x + y),
        }
    }
}

fn jacobi_character(lambda: Complex64, x: f64) -> Complex64 {
    if x == 0.0 {
        return c(1.0);
    }
    let z = lambda * x;
    let sinc = if z.norm() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    };
    sinc * (x / x.sinh())
}

/// Hyperbolic point-mass convolution in dimension `n >= 2`: the image of
/// `c_n sin^{n-2}(theta) d theta` on `[0, pi]` under
/// `theta -> arccosh(cosh r cosh s + sinh r sinh s cos theta)`.
pub fn geodesic_convolution(n: u32, r: f64, s: f64) -> RadonMeasure {
    geodesic_convolution_below(n, r, s, f64::INFINITY)
}

/// The part of [`geodesic_convolution`] on `[|r - s|, t_max]`.
///
/// Parametrized by `phi = pi - theta`, so that the image is resolved near
/// `|r - s|` even when `sinh r sinh s` is large.
pub fn geodesic_convolution_below(n: u32, r: f64, s: f64, t_max: f64) -> RadonMeasure {
    assert!(n >= 2, "dimension must be at least 2");
    if r == 0.0 || s == 0.0 {
        let w = if r + s <= t_max { 1.0 } else { 0.0 };
        return RadonMeasure::atom(r + s, w);
    }
    let d = (r - s).abs();
    if t_max <= d {
        return RadonMeasure::atom(d, 0.0);
    }
    let nf = n as f64;
    let cn = gamma(0.5 * nf).unwrap() / (PI.sqrt() * gamma(0.5 * (nf - 1.0)).unwrap());
    let sh = r.sinh() * s.sinh();
    let base = 2.0 * (0.5 * d).sinh().powi(2);
    let phi_max = if t_max >= r + s {
        PI
    } else {
        let k = cosh_gap(t_max, d) / (2.0 * sh);
        2.0 * k.sqrt().min(1.0).asin()
    };
    let map = move |phi: f64| {
        let w = base + 2.0 * sh * (0.5 * phi).sin().powi(2);
        2.0 * (0.5 * w).sqrt().asinh()
    };
    let k = (n - 2) as i32;
    let weight = move |phi: f64| cn * phi.sin().powi(k);
    RadonMeasure::pushforward(d, (r + s).min(t_max), 0.0, phi_max, Arc::new(map), Arc::new(weight))
}

/// `Lambda_x f(y) = int f d(epsilon_x * epsilon_y)`.
pub fn translate<F: Fn(f64) -> Complex64>(
    h: &Hypergroup,
    f: F,
    x: f64,
    y: f64,
    spec: &QuadSpec,
) -> Result<Complex64> {
    integrate_measure(f, &h.conv_point(x, y), spec)
}

/// [`translate`] for `f` vanishing beyond `support_end`; the convolution
/// measure is restricted to `[0, support_end]` before integrating.
pub fn translate_below<F: Fn(f64) -> Complex64>(
    h: &Hypergroup,
    f: F,
    x: f64,
    y: f64,
    support_end: f64,
    spec: &QuadSpec,
) -> Result<Complex64> {
    integrate_measure(f, &h.conv_point_below(x, y, support_end), spec)
}

/// Quadrature grid on `[lo, hi]`: composite Gauss–Legendre panels, either
/// uniform in `x` or uniform in `ln x`.
#[derive(Clone, Debug)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub panels: usize,
    pub order: usize,
    pub logarithmic: bool,
    pub nodes: Vec<f64>,
    /// `dx` weights (no Haar factor).
    pub weights: Vec<f64>,
    ref_nodes: Vec<f64>,
    bary: Vec<f64>,
}

impl Grid {
    pub fn gauss(lo: f64, hi: f64, panels: usize, order: usize) -> Result<Self> {
        Self::build(lo, hi, panels, order, false)
    }

    pub fn log_gauss(lo: f64, hi: f64, panels: usize, order: usize) -> Result<Self> {
        if !(lo > 0.0) {
            return Err(Error::InvalidInput("logarithmic grids need lo > 0".into()));
        }
        Self::build(lo, hi, panels, order, true)
    }

    fn build(lo: f64, hi: f64, panels: usize, order: usize, logarithmic: bool) -> Result<Self> {
        if !(hi > lo) || panels == 0 || order < 2 || !hi.is_finite() {
            return Err(Error::InvalidInput(format!(
                "bad grid [{lo}, {hi}] with {panels} panels of order {order}"
            )));
        }
        let (ref_nodes, _) = gauss_legendre(order);
        let bary = (0..order)
            .map(|j| {
                let p: f64 = (0..order).filter(|&k| k != j).map(|k| ref_nodes[j] - ref_nodes[k]).product();
                1.0 / p
            })
            .collect();
        let (nodes, weights) = if logarithmic {
            let (u, w) = composite_gauss_legendre(lo.ln(), hi.ln(), panels, order);
            let x: Vec<f64> = u.iter().map(|u| u.exp()).collect();
            let wx = w.iter().zip(&x).map(|(w, x)| w * x).collect();
            (x, wx)
        } else {
            composite_gauss_legendre(lo, hi, panels, order)
        };
        Ok(Self { lo, hi, panels, order, logarithmic, nodes, weights, ref_nodes, bary })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Same layout with twice as many panels.
    pub fn refined(&self) -> Self {
        Self::build(self.lo, self.hi, 2 * self.panels, self.order, self.logarithmic).expect("valid grid")
    }

    /// Piecewise-polynomial interpolation of nodal values; zero outside
    /// `[lo, hi]`.
    pub fn interpolate(&self, values: &[Complex64], x: f64) -> Complex64 {
        if !(x >= self.lo && x <= self.hi) {
            return c(0.0);
        }
        let (a, b) = if self.logarithmic { (self.lo.ln(), self.hi.ln()) } else { (self.lo, self.hi) };
        let u = if self.logarithmic { x.ln() } else { x };
        let h = (b - a) / self.panels as f64;
        let p = (((u - a) / h).floor() as usize).min(self.panels - 1);
        let s = 2.0 * (u - (a + p as f64 * h)) / h - 1.0;
        let vals = &values[p * self.order..(p + 1) * self.order];
        let mut num = c(0.0);
        let mut den = 0.0;
        for j in 0..self.order {
            let d = s - self.ref_nodes[j];
            if d == 0.0 {
                return vals[j];
            }
            let w = self.bary[j] / d;
            num += vals[j] * w;
            den += w;
        }
        num / den
    }
}

/// A function sampled on a [`Grid`], with weights that include the Haar
/// density of its hypergroup.
#[derive(Clone, Debug)]
pub struct GridFunction {
    pub grid: Arc<Grid>,
    pub values: Vec<Complex64>,
    pub weights: Vec<f64>,
}

impl GridFunction {
    pub fn sample<F: Fn(f64) -> Complex64>(h: &Hypergroup, grid: Arc<Grid>, f: F) -> Self {
        let values = grid.nodes.iter().map(|&x| f(x)).collect();
        Self::from_values(h, grid, values)
    }

    pub fn sample_real<F: Fn(f64) -> f64>(h: &Hypergroup, grid: Arc<Grid>, f: F) -> Self {
        Self::sample(h, grid, |x| c(f(x)))
    }

    pub fn from_values(h: &Hypergroup, grid: Arc<Grid>, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), grid.len(), "value count must match the grid");
        let weights = grid.nodes.iter().zip(&grid.weights).map(|(&x, &w)| w * h.haar(x)).collect();
        Self { grid, values, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.grid.nodes
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.grid.interpolate(&self.values, x)
    }

    /// `int f dm`
    pub fn integral(&self) -> Complex64 {
        self.values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// `||f||_{L^p(m)}`
    pub fn lp_norm(&self, p: f64) -> f64 {
        let s: f64 = self.values.iter().zip(&self.weights).map(|(v, w)| w * v.norm().powf(p)).sum();
        s.powf(1.0 / p)
    }
}

/// `(f * g)(x) = int f(y) g(x * y^-) m(dy)` for evaluators, with `y`
/// restricted to `[y_lo, y_hi]`.
pub fn convolve_at<F, G>(
    h: &Hypergroup,
    f: F,
    g: G,
    x: f64,
    y_range: (f64, f64),
    spec: &QuadSpec,
) -> Result<Complex64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> Complex64 + Copy,
{
    let inner = *spec;
    let integrand = |y: f64| -> Complex64 {
        let fy = f(y);
        if fy == 0.0 {
            return c(0.0);
        }
        match translate(h, g, x, h.involution(y), &inner) {
            Ok(v) => v * (fy * h.haar(y)),
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    let v = if h.kind == InstanceKind::Multiplicative {
        let (a, b) = (y_range.0.ln(), y_range.1.ln());
        integrate(|u: f64| integrand(u.exp()) * u.exp(), a, b, spec)?
    } else {
        integrate(integrand, y_range.0, y_range.1, spec)?
    };
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::NonConvergence { error: f64::NAN, tolerance: spec.abs_tol });
    }
    Ok(v)
}

/// Grid convolution `f * g` on the grid of `f`, with `g` interpolated.
pub fn convolve(h: &Hypergroup, f: &GridFunction, g: &GridFunction, spec: &QuadSpec) -> Result<GridFunction> {
    let mut out = Vec::with_capacity(f.values.len());
    let ginterp = |t: f64| g.eval(t);
    for &x in f.nodes() {
        let mut acc = c(0.0);
        for ((&y, fy), w) in f.nodes().iter().zip(&f.values).zip(&f.weights) {
            if *fy == c(0.0) {
                continue;
            }
            acc += fy * w * translate(h, ginterp, x, h.involution(y), spec)?;
        }
        out.push(acc);
    }
    Ok(GridFunction { grid: f.grid.clone(), values: out, weights: f.weights.clone() })
}

/// Maximal violations of the hypergroup axioms over a grid of pairs.
#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct AxiomReport {
    pub instance: String,
    pub pairs: usize,
    pub probability_mass: f64,
    pub commutativity: f64,
    pub identity: f64,
    pub support: f64,
}

impl AxiomReport {
    pub fn max_violation(&self) -> f64 {
        self.probability_mass.max(self.commutativity).max(self.identity).max(self.support)
    }
}

fn test_battery() -> Vec<Box<dyn Fn(f64) -> f64>> {
    vec![
        Box::new(|t: f64| t.cos()),
        Box::new(|t: f64| (-t).exp()),
        Box::new(|t: f64| t * t / (1.0 + t * t)),
        Box::new(|t: f64| (2.3 * t).sin()),
    ]
}

// Spread of the image of the measure, sampled on its parameter range.
fn support_violation(mu: &RadonMeasure, lo: f64, hi: f64) -> f64 {
    let tol_scale = 1.0 + hi.abs();
    let mut worst: f64 = 0.0;
    let mut check = |t: f64| {
        worst = worst.max((lo - t).max(t - hi).max(0.0) / tol_scale);
    };
    for &(t, _) in &mu.atoms {
        check(t);
    }
    if let Some(crate::quad::Continuous::Pushforward { lo: a, hi: b, map, .. }) = &mu.continuous {
        for k in 0..=256 {
            check(map(a + (b - a) * k as f64 / 256.0));
        }
    }
    worst
}

/// Checks probability mass, commutativity, identity and support on all
/// pairs drawn from `grid`.
pub fn check_hypergroup_axioms(h: &Hypergroup, grid: &[f64], spec: &QuadSpec) -> Result<AxiomReport> {
    let mut pairs = Vec::new();
    for (i, &x) in grid.iter().enumerate() {
        for &y in &grid[i..] {
            pairs.push((x, y));
        }
    }
    check_axioms_on_pairs(h, &pairs, spec)
}

/// Axiom checks on explicit pairs `(x, y)`.
pub fn check_axioms_on_pairs(h: &Hypergroup, pairs: &[(f64, f64)], spec: &QuadSpec) -> Result<AxiomReport> {
    let battery = test_battery();
    let mut rep = AxiomReport { instance: h.name().to_string(), ..Default::default() };
    let e = h.identity();
    for &(x, y) in pairs {
        let with_id = h.conv_point(x, e);
        for f in &battery {
            let v: f64 = integrate_measure(f, &with_id, spec)?;
            rep.identity = rep.identity.max((v - f(x)).abs());
        }
        rep.pairs += 1;
        let xy = h.conv_point(x, y);
        let yx = h.conv_point(y, x);
        let mass: f64 = xy.total_mass(spec)?;
        rep.probability_mass = rep.probability_mass.max((mass - 1.0).abs());
        for f in &battery {
            let a: f64 = integrate_measure(f, &xy, spec)?;
            let b: f64 = integrate_measure(f, &yx, spec)?;
            rep.commutativity = rep.commutativity.max((a - b).abs());
        }
        let (lo, hi) = h.conv_support(x, y);
        rep.support = rep.support.max(support_violation(&xy, lo, hi));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        for n in Hypergroup::NAMES {
            assert!(Hypergroup::new(n).is_ok());
        }
        assert!(Hypergroup::new("bessel_kingman:1.5").is_ok());
        assert!(matches!(Hypergroup::new("sphere"), Err(Error::UnknownInstance(_))));
    }

    #[test]
    fn jacobi_character_closed_form() {
        let h = Hypergroup::jacobi_sl2c();
        let v = h.character_real(1.0, 1.0).unwrap();
        assert!((v - 1f64.sin() / 1f64.sinh()).abs() < 1e-15);
        assert_eq!(h.character_real(0.0, 0.0).unwrap(), 1.0);
        assert!((h.phi0(2.0).unwrap() - 2.0 / 2f64.sinh()).abs() < 1e-15);
        let triv = h.character(Complex64::i(), 1.7).unwrap();
        assert!((triv - 1.0).norm() < 1e-14);
    }

    #[test]
    fn geodesic_identity_and_mass() {
        let h = Hypergroup::mehler_fock();
        let mu = h.conv_point(1.3, 0.0);
        assert_eq!(mu.atoms, vec![(1.3, 1.0)]);
        let j = Hypergroup::jacobi_sl2c();
        let m: f64 = j.conv_point(1.0, 1.0).total_mass(&QuadSpec::default()).unwrap();
        assert!((m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn multiplicative_translate_is_product() {
        let h = Hypergroup::multiplicative();
        let v = translate(&h, |t| c(t), 2.0, 3.0, &QuadSpec::default()).unwrap();
        assert_eq!(v, c(6.0));
    }

    #[test]
    fn grid_interpolation_reproduces_polynomials() {
        let g = Grid::gauss(0.0, 4.0, 4, 8).unwrap();
        let vals: Vec<Complex64> = g.nodes.iter().map(|x| c(x.powi(5) - x)).collect();
        for x in [0.1, 1.0, 2.37, 3.99] {
            assert!((g.interpolate(&vals, x).re - (x.powi(5) - x)).abs() < 1e-9);
        }
        assert_eq!(g.interpolate(&vals, 5.0), c(0.0));
        assert!(Grid::gauss(1.0, 0.0, 1, 4).is_err());
    }

    #[test]
    fn plancherel_constant_can_be_unset() {
        let mut h = Hypergroup::mehler_fock();
        h.set_plancherel_constant(None);
        assert!(matches!(h.plancherel_constant(), Err(Error::NormalizationUnset(_))));
    }
}
