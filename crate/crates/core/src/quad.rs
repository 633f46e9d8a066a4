//! Adaptive quadrature, measures on intervals, and the integration engine
//! the rest of the crate is built on.
//!
//! The core routine is a globally adaptive 21-point Gauss–Kronrod scheme
//! (QUADPACK error model) over any value type implementing [`QuadValue`],
//! so the same code integrates scalars, complex numbers and matrices.
//! Square-root endpoint singularities are removed by exact substitution
//! before the adaptive engine sees the integrand.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be accumulated by the quadrature engine.
pub trait QuadValue: Clone {
    /// `self += w * other`
    fn add_scaled(&mut self, other: &Self, w: f64);
    fn scaled(&self, w: f64) -> Self;
    fn norm(&self) -> f64;

    fn dist(&self, other: &Self) -> f64 {
        let mut d = self.clone();
        d.add_scaled(other, -1.0);
        d.norm()
    }
}

impl QuadValue for f64 {
    fn add_scaled(&mut self, other: &Self, w: f64) {
        *self += w * other;
    }
    fn scaled(&self, w: f64) -> Self {
        self * w
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn add_scaled(&mut self, other: &Self, w: f64) {
        *self += other * w;
    }
    fn scaled(&self, w: f64) -> Self {
        self * w
    }
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
}

impl QuadValue for DMatrix<Complex64> {
    fn add_scaled(&mut self, other: &Self, w: f64) {
        self.zip_apply(other, |a, b| *a += b * w);
    }
    fn scaled(&self, w: f64) -> Self {
        self.map(|z| z * w)
    }
    fn norm(&self) -> f64 {
        // Entrywise maximum keeps the error model comparable to the scalar case.
        self.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// Marker for an integrable endpoint singularity that is removed by
/// substitution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EndpointSingularity {
    #[default]
    None,
    /// Behaves like `1/sqrt|cosh e - cosh t|` at the endpoint `e` (`e != 0`);
    /// removed with `s^2 = |cosh e - cosh t|`.
    InvSqrtCosh,
    /// Behaves like `1/sqrt|e - t|`; removed with `s^2 = |e - t|`.
    InvSqrtPoly,
}

/// Tolerances and singularity markers for a single integral.
#[derive(Clone, Copy, Debug)]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub left: EndpointSingularity,
    pub right: EndpointSingularity,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_subdivisions: 2000,
            left: EndpointSingularity::None,
            right: EndpointSingularity::None,
        }
    }
}

impl QuadSpec {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    /// Tolerances used by the special-function integrals.
    pub fn tight() -> Self {
        Self::with_tol(1e-14, 1e-13)
    }

    pub fn singular(mut self, left: EndpointSingularity, right: EndpointSingularity) -> Self {
        self.left = left;
        self.right = right;
        self
    }

    pub fn plain(mut self) -> Self {
        self.left = EndpointSingularity::None;
        self.right = EndpointSingularity::None;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidInput("quadrature tolerances must be positive".into()));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidInput("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }
}

/// Result of an adaptive integration.
#[derive(Clone, Debug)]
pub struct QuadReport<V> {
    pub value: V,
    pub error: f64,
    /// Integral of the integrand's norm (QUADPACK `resabs`).
    pub abs_value: f64,
    pub evaluations: usize,
}

// 21-point Kronrod abscissae; odd indices are the 10-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

struct Segment<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
    abs_value: f64,
    roundoff: bool,
}

impl<V> PartialEq for Segment<V> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<V> Eq for Segment<V> {}
impl<V> PartialOrd for Segment<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Segment<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<V: QuadValue, F: Fn(f64) -> V>(f: &F, a: f64, b: f64) -> Segment<V> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut kronrod = f_center.scaled(WGK[10]);
    let mut gauss = f_center.scaled(0.0);
    let mut vals = Vec::with_capacity(21);
    let mut abs_sum = WGK[10] * f_center.norm();
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod.add_scaled(&f1, WGK[j]);
        kronrod.add_scaled(&f2, WGK[j]);
        if j % 2 == 1 {
            gauss.add_scaled(&f1, WG[j / 2]);
            gauss.add_scaled(&f2, WG[j / 2]);
        }
        abs_sum += WGK[j] * (f1.norm() + f2.norm());
        vals.push((f1, f2));
    }
    let mean = kronrod.scaled(0.5);
    let mut asc = WGK[10] * f_center.dist(&mean);
    for (j, (f1, f2)) in vals.iter().enumerate() {
        asc += WGK[j] * (f1.dist(&mean) + f2.dist(&mean));
    }
    let h = half.abs();
    let abs_value = abs_sum * h;
    let res_asc = asc * h;
    let raw = kronrod.dist(&gauss) * h;

    let mut error = raw;
    if res_asc != 0.0 && error != 0.0 {
        let scale = (200.0 * error / res_asc).powf(1.5);
        error = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    let floor = 50.0 * f64::EPSILON * abs_value;
    let roundoff = floor >= error;
    if roundoff {
        error = floor;
    }
    Segment {
        a,
        b,
        value: kronrod.scaled(half),
        error,
        abs_value,
        roundoff,
    }
}

fn adaptive<V: QuadValue, F: Fn(f64) -> V>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadSpec,
) -> Result<QuadReport<V>> {
    let first = gk21(f, a, b);
    if !first.error.is_finite() {
        return Err(Error::NonConvergence { error: f64::NAN, tolerance: spec.abs_tol });
    }
    let mut evaluations = 21;
    let mut value = first.value.clone();
    let mut error = first.error;
    let mut abs_value = first.abs_value;
    let mut frozen_error = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut splits = 0usize;

    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * value.norm());
        if error <= tol || error - frozen_error <= tol && heap.is_empty() {
            break;
        }
        let Some(seg) = heap.pop() else {
            // Everything left is at the rounding floor.
            break;
        };
        let mid = 0.5 * (seg.a + seg.b);
        let width = (seg.b - seg.a).abs();
        if seg.roundoff || width <= 4.0 * f64::EPSILON * mid.abs().max(1.0) {
            frozen_error += seg.error;
            if !seg.roundoff && seg.error > tol {
                return Err(Error::NonConvergence { error, tolerance: tol });
            }
            continue;
        }
        if splits >= spec.max_subdivisions {
            return Err(Error::NonConvergence { error, tolerance: tol });
        }
        splits += 1;
        let left = gk21(f, seg.a, mid);
        let right = gk21(f, mid, seg.b);
        evaluations += 42;
        value.add_scaled(&seg.value, -1.0);
        value.add_scaled(&left.value, 1.0);
        value.add_scaled(&right.value, 1.0);
        error += left.error + right.error - seg.error;
        if !error.is_finite() {
            return Err(Error::NonConvergence { error: f64::NAN, tolerance: tol });
        }
        abs_value += left.abs_value + right.abs_value - seg.abs_value;
        heap.push(left);
        heap.push(right);
    }
    Ok(QuadReport {
        value,
        error,
        abs_value,
        evaluations,
    })
}

/// Stable `t` with `cosh t = cosh e - s^2` (`toward_zero`) or `cosh e + s^2`,
/// carrying the sign of `e`.
pub(crate) fn cosh_shift(e: f64, s: f64, toward_zero: bool) -> f64 {
    let half = (0.5 * e).sinh();
    let inner = if toward_zero {
        (half * half - 0.5 * s * s).max(0.0)
    } else {
        half * half + 0.5 * s * s
    };
    2.0 * inner.sqrt().asinh() * e.signum()
}

/// `cosh x - cosh t` without cancellation.
pub(crate) fn cosh_gap(x: f64, t: f64) -> f64 {
    2.0 * (0.5 * (x + t)).sinh() * (0.5 * (x - t)).sinh()
}

// Integrates the piece of [a, b] adjacent to endpoint `e` (direction `dir`
// into the interval) of length `len` after removing the singularity.
fn singular_piece<V: QuadValue, F: Fn(f64) -> V>(
    f: &F,
    e: f64,
    dir: f64,
    len: f64,
    kind: EndpointSingularity,
    spec: &QuadSpec,
) -> Result<QuadReport<V>> {
    let plain = spec.plain();
    match kind {
        EndpointSingularity::None => {
            let (lo, hi) = if dir > 0.0 { (e, e + len) } else { (e - len, e) };
            adaptive(f, lo, hi, &plain)
        }
        EndpointSingularity::InvSqrtPoly => {
            let g = |u: f64| f(e + dir * u * u).scaled(2.0 * u);
            adaptive(&g, 0.0, len.sqrt(), &plain)
        }
        EndpointSingularity::InvSqrtCosh => {
            if e == 0.0 {
                return Err(Error::InvalidInput(
                    "inverse-sqrt-cosh singularity at 0 is not integrable".into(),
                ));
            }
            // Moving into the interval decreases |t| when dir and e have opposite signs.
            let toward_zero = dir * e < 0.0;
            let far = e + dir * len;
            let s_max = cosh_gap(e, far).abs().sqrt();
            let g = |s: f64| {
                let t = cosh_shift(e, s, toward_zero);
                f(t).scaled(2.0 * s / t.sinh().abs())
            };
            let g0 = |s: f64| {
                // s -> 0 limit of 2 s / |sinh t(s)| is 2/|sinh e|; keep the formula well defined.
                if s == 0.0 {
                    f(e).scaled(0.0)
                } else {
                    g(s)
                }
            };
            adaptive(&g0, 0.0, s_max, &plain)
        }
    }
}

fn piece_limit(e: f64, kind: EndpointSingularity, dir: f64) -> f64 {
    match kind {
        // Keep sinh(t) away from zero on the substituted piece.
        EndpointSingularity::InvSqrtCosh if dir * e < 0.0 => 0.5 * e.abs(),
        _ => f64::INFINITY,
    }
}

/// Adaptive integral of `f` over `[a, b]` with a detailed report.
pub fn integrate_report<V: QuadValue, F: Fn(f64) -> V>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadSpec,
) -> Result<QuadReport<V>> {
    spec.validate()?;
    if !(a <= b) {
        return Err(Error::InvalidInput(format!("integration bounds out of order: [{a}, {b}]")));
    }
    if a == b {
        let z = f(a).scaled(0.0);
        return Ok(QuadReport { value: z, error: 0.0, abs_value: 0.0, evaluations: 1 });
    }
    use EndpointSingularity as S;
    if spec.left == S::None && spec.right == S::None {
        return adaptive(&f, a, b, spec);
    }
    let len = b - a;
    let mut left_len = if spec.left != S::None {
        if spec.right != S::None { 0.5 * len } else { len }
    } else {
        0.0
    };
    let mut right_len = if spec.right != S::None { len - left_len } else { 0.0 };
    left_len = left_len.min(piece_limit(a, spec.left, 1.0));
    right_len = right_len.min(piece_limit(b, spec.right, -1.0));

    let mut pieces: Vec<QuadReport<V>> = Vec::with_capacity(3);
    if left_len > 0.0 {
        pieces.push(singular_piece(&f, a, 1.0, left_len, spec.left, spec)?);
    }
    let (mid_lo, mid_hi) = (a + left_len, b - right_len);
    if mid_hi > mid_lo {
        pieces.push(adaptive(&f, mid_lo, mid_hi, &spec.plain())?);
    }
    if right_len > 0.0 {
        pieces.push(singular_piece(&f, b, -1.0, right_len, spec.right, spec)?);
    }
    let mut iter = pieces.into_iter();
    let mut total = iter.next().expect("at least one piece");
    for p in iter {
        total.value.add_scaled(&p.value, 1.0);
        total.error += p.error;
        total.abs_value += p.abs_value;
        total.evaluations += p.evaluations;
    }
    Ok(total)
}

/// Adaptive integral of `f` over `[a, b]`.
pub fn integrate<V: QuadValue, F: Fn(f64) -> V>(f: F, a: f64, b: f64, spec: &QuadSpec) -> Result<V> {
    integrate_report(f, a, b, spec).map(|r| r.value)
}

/// Decay class of a semi-infinite integrand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decay {
    /// Absolutely integrable with (at least) exponential decay; the range is
    /// truncated once successive panels fall below tolerance.
    Exponential,
    /// Conditionally convergent; evaluated with an `exp(-eps x)` regulator on
    /// a decreasing `eps` ladder and extrapolated to `eps = 0`.
    Oscillatory,
}

const MAX_HORIZON: f64 = 1e5;

fn semi_infinite_exponential<V: QuadValue, F: Fn(f64) -> V>(
    f: &F,
    a: f64,
    spec: &QuadSpec,
) -> Result<V> {
    let mut lo = a;
    let mut width = 1.0;
    let first = integrate_report(f, lo, lo + width, spec)?;
    let mut total = first.value;
    lo += width;
    let mut quiet = 0;
    let mut panel_spec = spec.plain();
    while quiet < 2 {
        if lo - a > MAX_HORIZON {
            return Err(Error::NonConvergence { error: f64::NAN, tolerance: spec.abs_tol });
        }
        // Later panels only need to be accurate relative to the running total.
        panel_spec.abs_tol = spec.abs_tol.max(spec.rel_tol * total.norm()) * 0.1;
        let r = integrate_report(f, lo, lo + width, &panel_spec)?;
        total.add_scaled(&r.value, 1.0);
        if r.abs_value < 0.1 * spec.abs_tol.max(spec.rel_tol * total.norm()) {
            quiet += 1;
        } else {
            quiet = 0;
        }
        lo += width;
        width = (width * 2.0).min(16.0);
    }
    Ok(total)
}

/// Integral of `f` over `[a, inf)` for the declared decay class.
///
/// `spec.left` applies to the finite endpoint `a`.
pub fn integrate_semi_infinite<V: QuadValue, F: Fn(f64) -> V>(
    f: F,
    a: f64,
    decay: Decay,
    spec: &QuadSpec,
) -> Result<V> {
    spec.validate()?;
    match decay {
        Decay::Exponential => semi_infinite_exponential(&f, a, spec),
        Decay::Oscillatory => {
            let eps0 = 0.5;
            let levels = 11;
            let mut table: Vec<Vec<V>> = Vec::new();
            let mut last_err = f64::INFINITY;
            let mut eps_list = Vec::new();
            for k in 0..levels {
                let eps = eps0 / 2f64.powi(k);
                eps_list.push(eps);
                let g = |x: f64| f(x).scaled((-eps * (x - a)).exp());
                let horizon = (100.0 / spec.abs_tol.min(1e-3)).ln() / eps;
                let panel: f64 = 8.0;
                let mut inner = *spec;
                inner.abs_tol = spec.abs_tol * 1e-2;
                inner.rel_tol = spec.rel_tol * 1e-2;
                inner.right = EndpointSingularity::None;
                let mut acc = integrate(&g, a, a + panel.min(horizon), &inner)?;
                let mut lo = a + panel.min(horizon);
                inner.left = EndpointSingularity::None;
                while lo < a + horizon {
                    let hi = (lo + panel).min(a + horizon);
                    acc.add_scaled(&integrate(&g, lo, hi, &inner)?, 1.0);
                    lo = hi;
                }
                // Neville extrapolation to eps = 0 on the geometric ladder.
                let mut row = vec![acc];
                for j in 1..=k {
                    let prev_row = &table[(k - 1) as usize];
                    let ratio = eps_list[(k - j) as usize] / eps;
                    let mut t = row[(j - 1) as usize].clone();
                    t.add_scaled(&prev_row[(j - 1) as usize], -1.0);
                    let mut next = row[(j - 1) as usize].clone();
                    next.add_scaled(&t, 1.0 / (ratio - 1.0));
                    row.push(next);
                }
                table.push(row);
                if k >= 2 {
                    let cur = table[k as usize].last().unwrap();
                    let prev = table[(k - 1) as usize].last().unwrap();
                    let err = cur.dist(prev);
                    let tol = spec.abs_tol.max(spec.rel_tol * cur.norm());
                    if err <= tol && last_err <= 10.0 * tol {
                        return Ok(cur.clone());
                    }
                    last_err = err;
                }
            }
            Err(Error::NonConvergence {
                error: last_err,
                tolerance: spec.abs_tol,
            })
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            } else {
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
            }
            // p1 = P_n(z), p0 = P_{n-1}(z)
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            nodes[0] = 0.0;
            weights[0] = 2.0;
            break;
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre rule: `panels` equal panels of `order` nodes.
pub fn composite_gauss_legendre(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(lo + 0.5 * h * (xi + 1.0));
            weights.push(0.5 * h * wi);
        }
    }
    (nodes, weights)
}

pub type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Singular factor multiplying the regular part of a density on `[-x, x]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kernel {
    Smooth,
    /// `1/sqrt(cosh x - cosh t)`
    InvSqrtCosh { x: f64 },
    /// `(x^2 - t^2)^beta`, `beta > -1`
    Algebraic { x: f64, beta: f64 },
}

impl Kernel {
    fn eval(&self, t: f64) -> f64 {
        match *self {
            Kernel::Smooth => 1.0,
            Kernel::InvSqrtCosh { x } => 1.0 / cosh_gap(x, t).sqrt(),
            Kernel::Algebraic { x, beta } => ((x - t) * (x + t)).powf(beta),
        }
    }
}

/// Absolutely continuous or pushed-forward part of a measure.
#[derive(Clone)]
pub enum Continuous {
    /// `regular(t) * kernel(t) dt` on `[lo, hi]`.
    Density {
        lo: f64,
        hi: f64,
        regular: Evaluator,
        kernel: Kernel,
    },
    /// Image of `weight(theta) d theta` on `[lo, hi]` under `map`.
    Pushforward {
        lo: f64,
        hi: f64,
        map: Evaluator,
        weight: Evaluator,
    },
}

/// Positive measure on an interval: point masses plus a continuous part.
#[derive(Clone)]
pub struct RadonMeasure {
    pub support_lo: f64,
    pub support_hi: f64,
    pub atoms: Vec<(f64, f64)>,
    pub continuous: Option<Continuous>,
}

impl fmt::Debug for RadonMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.continuous {
            None => "none",
            Some(Continuous::Density { .. }) => "density",
            Some(Continuous::Pushforward { .. }) => "pushforward",
        };
        f.debug_struct("RadonMeasure")
            .field("support", &(self.support_lo, self.support_hi))
            .field("atoms", &self.atoms)
            .field("continuous", &kind)
            .finish()
    }
}

impl RadonMeasure {
    pub fn dirac(at: f64) -> Self {
        Self::atom(at, 1.0)
    }

    pub fn atom(at: f64, weight: f64) -> Self {
        Self {
            support_lo: at,
            support_hi: at,
            atoms: vec![(at, weight)],
            continuous: None,
        }
    }

    pub fn density(lo: f64, hi: f64, regular: Evaluator, kernel: Kernel) -> Self {
        Self {
            support_lo: lo,
            support_hi: hi,
            atoms: Vec::new(),
            continuous: Some(Continuous::Density { lo, hi, regular, kernel }),
        }
    }

    /// Pushforward of `weight` on `[lo, hi]` under `map`, with declared
    /// support `[support_lo, support_hi]`.
    pub fn pushforward(
        support_lo: f64,
        support_hi: f64,
        lo: f64,
        hi: f64,
        map: Evaluator,
        weight: Evaluator,
    ) -> Self {
        Self {
            support_lo,
            support_hi,
            atoms: Vec::new(),
            continuous: Some(Continuous::Pushforward { lo, hi, map, weight }),
        }
    }

    pub fn total_mass(&self, spec: &QuadSpec) -> Result<f64> {
        integrate_measure(|_| 1.0, self, spec)
    }

    /// Checks atom placement, atom weights and density positivity on a
    /// sample of nodes.
    pub fn validate(&self) -> Result<()> {
        let tol = 1e-12 * (1.0 + self.support_hi.abs().max(self.support_lo.abs()));
        for &(x, w) in &self.atoms {
            if x < self.support_lo - tol || x > self.support_hi + tol {
                return Err(Error::InvalidInput(format!("atom at {x} outside support")));
            }
            if !(w >= 0.0) {
                return Err(Error::InvalidInput(format!("negative atom weight {w}")));
            }
        }
        match &self.continuous {
            Some(Continuous::Density { lo, hi, regular, kernel }) => {
                for k in 1..64 {
                    let t = lo + (hi - lo) * k as f64 / 64.0;
                    let v = regular(t) * kernel.eval(t);
                    if !(v >= 0.0) {
                        return Err(Error::InvalidInput(format!("negative density {v} at {t}")));
                    }
                }
            }
            Some(Continuous::Pushforward { lo, hi, map, weight }) => {
                for k in 0..=64 {
                    let th = lo + (hi - lo) * k as f64 / 64.0;
                    let (t, w) = (map(th), weight(th));
                    if !(w >= 0.0) {
                        return Err(Error::InvalidInput(format!("negative weight {w}")));
                    }
                    if t < self.support_lo - tol || t > self.support_hi + tol {
                        return Err(Error::InvalidInput(format!("image point {t} outside support")));
                    }
                }
            }
            None => {}
        }
        Ok(())
    }
}

/// `int_0^x f(t) (cosh x - cosh t)^beta dt` for `beta > -1`.
///
/// For `beta < 0` the half `[x/2, x]` is mapped by `cosh x - cosh t = u^k`,
/// `k = 1/(1+beta)`, which turns the kernel into the constant `k`.
pub fn integrate_cosh_power<V: QuadValue, F: Fn(f64) -> V>(
    f: F,
    x: f64,
    beta: f64,
    spec: &QuadSpec,
) -> Result<V> {
    if !(beta > -1.0) || !(x >= 0.0) {
        return Err(Error::InvalidInput(format!("cosh-power kernel needs beta > -1, x >= 0 (beta={beta}, x={x})")));
    }
    let inner = spec.plain();
    if x == 0.0 {
        return Ok(f(0.0).scaled(0.0));
    }
    if beta >= 0.0 {
        return integrate(|t: f64| f(t).scaled(cosh_gap(x, t).powf(beta)), 0.0, x, &inner);
    }
    let mut head = integrate(|t: f64| f(t).scaled(cosh_gap(x, t).powf(beta)), 0.0, 0.5 * x, &inner)?;
    let k = 1.0 / (1.0 + beta);
    let u_max = cosh_gap(x, 0.5 * x).powf(1.0 + beta);
    let tail = integrate(
        |u: f64| {
            let g = u.powf(k);
            let t = cosh_shift(x, g.sqrt(), true);
            f(t).scaled(k / t.sinh())
        },
        0.0,
        u_max,
        &inner,
    )?;
    head.add_scaled(&tail, 1.0);
    Ok(head)
}

/// `int_0^x f(t) (x - t)^beta dt` for `beta > -1`, with `x - t = u^k` on
/// `[x/2, x]` when `beta < 0`.
pub fn integrate_edge_power<V: QuadValue, F: Fn(f64) -> V>(
    f: F,
    x: f64,
    beta: f64,
    spec: &QuadSpec,
) -> Result<V> {
    if !(beta > -1.0) || !(x >= 0.0) {
        return Err(Error::InvalidInput(format!("edge-power kernel needs beta > -1, x >= 0 (beta={beta}, x={x})")));
    }
    let inner = spec.plain();
    if x == 0.0 {
        return Ok(f(0.0).scaled(0.0));
    }
    if beta >= 0.0 {
        return integrate(|t: f64| f(t).scaled((x - t).powf(beta)), 0.0, x, &inner);
    }
    let mut head = integrate(|t: f64| f(t).scaled((x - t).powf(beta)), 0.0, 0.5 * x, &inner)?;
    let k = 1.0 / (1.0 + beta);
    let u_max = (0.5 * x).powf(1.0 + beta);
    let tail = integrate(|u: f64| f(x - u.powf(k)).scaled(k), 0.0, u_max, &inner)?;
    head.add_scaled(&tail, 1.0);
    Ok(head)
}

/// `sum w_i f(x_i) + integral of f against the continuous part`.
pub fn integrate_measure<V: QuadValue, F: Fn(f64) -> V>(
    f: F,
    mu: &RadonMeasure,
    spec: &QuadSpec,
) -> Result<V> {
    let mut total: Option<V> = None;
    let mut add = |v: V| match total.as_mut() {
        Some(t) => t.add_scaled(&v, 1.0),
        None => total = Some(v),
    };
    for &(x, w) in &mu.atoms {
        add(f(x).scaled(w));
    }
    match &mu.continuous {
        None => {}
        Some(Continuous::Pushforward { lo, hi, map, weight }) => {
            add(integrate(|th: f64| f(map(th)).scaled(weight(th)), *lo, *hi, &spec.plain())?);
        }
        Some(Continuous::Density { lo, hi, regular, kernel }) => match *kernel {
            Kernel::Smooth => {
                add(integrate(|t: f64| f(t).scaled(regular(t)), *lo, *hi, &spec.plain())?);
            }
            Kernel::InvSqrtCosh { x } | Kernel::Algebraic { x, .. } => {
                if (*lo + x).abs() > 1e-12 * (1.0 + x) || (*hi - x).abs() > 1e-12 * (1.0 + x) {
                    return Err(Error::InvalidInput("singular kernels live on [-x, x]".into()));
                }
                // Fold [-x, x] onto [0, x].
                let sym = |t: f64| {
                    let mut v = f(t).scaled(regular(t));
                    v.add_scaled(&f(-t), regular(-t));
                    v
                };
                let v = match *kernel {
                    Kernel::InvSqrtCosh { .. } => integrate_cosh_power(sym, x, -0.5, spec)?,
                    Kernel::Algebraic { beta, .. } => {
                        integrate_edge_power(|t: f64| sym(t).scaled((x + t).powf(beta)), x, beta, spec)?
                    }
                    Kernel::Smooth => unreachable!(),
                };
                add(v);
            }
        },
    }
    match total {
        Some(t) => Ok(t),
        // Empty measure: integrate f against nothing.
        None => Ok(f(mu.support_lo).scaled(0.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_and_cosine() {
        let spec = QuadSpec::default();
        let one: f64 = integrate(|_| 1.0, 0.0, 1.0, &spec).unwrap();
        assert!((one - 1.0).abs() < 1e-14);
        let c: f64 = integrate(|t: f64| t.cos(), -1.0, 1.0, &spec).unwrap();
        assert!((c - 2.0 * 1f64.sin()).abs() < 1e-13);
    }

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let (x, w) = gauss_legendre(7);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((s - 2.0 / 13.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn atom_only_measure() {
        let mu = RadonMeasure::atom(2.0, 0.5);
        let v: f64 = integrate_measure(|_| 1.0, &mu, &QuadSpec::default()).unwrap();
        assert_eq!(v, 0.5);
    }

    #[test]
    fn jacobi_kernel_cosh_moment_is_one() {
        let x = 3.0;
        let mu = RadonMeasure::density(-x, x, Arc::new(move |_| 1.0 / (2.0 * x.sinh())), Kernel::Smooth);
        let v: f64 = integrate_measure(|t: f64| t.cosh(), &mu, &QuadSpec::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let c: f64 = integrate_measure(|t: f64| t.cos(), &RadonMeasure::density(
            -1.0, 1.0, Arc::new(|_| 1.0 / (2.0 * 1f64.sinh())), Kernel::Smooth), &QuadSpec::default()).unwrap();
        assert!((c - 1f64.sin() / 1f64.sinh()).abs() < 1e-12);
    }

    #[test]
    fn inverse_sqrt_poly_endpoint() {
        // integral of 1/sqrt(1-t) over [0,1] = 2
        let spec = QuadSpec::default().singular(EndpointSingularity::None, EndpointSingularity::InvSqrtPoly);
        let v: f64 = integrate(|t: f64| 1.0 / (1.0 - t).sqrt(), 0.0, 1.0, &spec).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        let spec = QuadSpec::default().singular(EndpointSingularity::InvSqrtPoly, EndpointSingularity::InvSqrtPoly);
        let v: f64 = integrate(|t: f64| 1.0 / (1.0 - t * t).sqrt(), -1.0, 1.0, &spec).unwrap();
        assert!((v - PI).abs() < 1e-12);
    }

    #[test]
    fn empty_budget_reports_nonconvergence() {
        let spec = QuadSpec { max_subdivisions: 1, ..QuadSpec::with_tol(1e-15, 1e-15) };
        let r: Result<f64> = integrate(|t: f64| (50.0 * t).sin().abs(), 0.0, 10.0, &spec);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn bad_spec_rejected() {
        let spec = QuadSpec { abs_tol: 0.0, ..QuadSpec::default() };
        assert!(integrate(|_| 1.0f64, 0.0, 1.0, &spec).is_err());
        assert!(integrate(|_| 1.0f64, 1.0, 0.0, &QuadSpec::default()).is_err());
    }

    #[test]
    fn exponential_tail() {
        let v: f64 = integrate_semi_infinite(|x: f64| (-x).exp(), 0.0, Decay::Exponential, &QuadSpec::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn oscillatory_regulated_sine_integral() {
        // integral of sin(x)/x over [1, inf) = pi/2 - Si(1)
        let si1 = 0.946_083_070_367_183_1;
        let spec = QuadSpec::with_tol(1e-8, 1e-8);
        let v: f64 = integrate_semi_infinite(|x: f64| x.sin() / x, 1.0, Decay::Oscillatory, &spec).unwrap();
        assert!((v - (PI / 2.0 - si1)).abs() < 1e-6, "{v}");
    }

    #[test]
    fn measure_validation() {
        let mut mu = RadonMeasure::atom(1.0, 1.0);
        mu.atoms.push((5.0, 1.0));
        assert!(mu.validate().is_err());
        let mu = RadonMeasure::atom(1.0, -1.0);
        assert!(mu.validate().is_err());
    }
}
