//! Characters of Sturm–Liouville hypergroups by direct integration of
//! `-phi'' - (m'/m) phi' = (omega0^2 + lambda^2) phi`, the Langer form of
//! that equation, and a checker for the growth conditions on `m`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Weight `m(x) = x^{2 gamma + 1} q(x)`.
#[derive(Clone)]
pub struct SLWeight {
    pub label: String,
    pub gamma: f64,
    pub omega0: f64,
    pub q: Evaluator,
    /// `q'/q`
    pub beta: Evaluator,
    /// `(q'/q)'`; finite differences of `beta` when absent.
    pub beta_prime: Option<Evaluator>,
}

impl std::fmt::Debug for SLWeight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SLWeight")
            .field("label", &self.label)
            .field("gamma", &self.gamma)
            .field("omega0", &self.omega0)
            .finish()
    }
}

// coth x - 1/x
fn coth_minus_inv(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        x * (1.0 / 3.0 - x2 * (1.0 / 45.0 - x2 * (2.0 / 945.0 - x2 / 4725.0)))
    } else {
        1.0 / x.tanh() - 1.0 / x
    }
}

// 1/x^2 - 1/sinh^2 x, the derivative of coth x - 1/x
fn coth_minus_inv_prime(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        1.0 / 3.0 - x2 * (1.0 / 15.0 - x2 * (2.0 / 189.0 - x2 / 675.0))
    } else {
        1.0 / (x * x) - 1.0 / x.sinh().powi(2)
    }
}

impl SLWeight {
    /// General weight from `q` and `q'/q`.
    pub fn new(label: impl Into<String>, gamma: f64, omega0: f64, q: Evaluator, beta: Evaluator) -> Self {
        Self { label: label.into(), gamma, omega0, q, beta, beta_prime: None }
    }

    /// `m(x) = x^{2 gamma + 1}`
    pub fn bessel(gamma: f64) -> Self {
        Self {
            label: format!("x^{}", 2.0 * gamma + 1.0),
            gamma,
            omega0: 0.0,
            q: Arc::new(|_| 1.0),
            beta: Arc::new(|_| 0.0),
            beta_prime: Some(Arc::new(|_| 0.0)),
        }
    }

    /// `m(x) = sinh^k x`, so `gamma = (k-1)/2` and `omega0 = k/2`.
    pub fn sinh_power(k: f64) -> Self {
        Self {
            label: format!("sinh(x)^{k}"),
            gamma: 0.5 * (k - 1.0),
            omega0: 0.5 * k,
            q: Arc::new(move |x: f64| if x == 0.0 { 1.0 } else { (x.sinh() / x).powf(k) }),
            beta: Arc::new(move |x| k * coth_minus_inv(x)),
            beta_prime: Some(Arc::new(move |x| k * coth_minus_inv_prime(x))),
        }
    }

    /// `m(x) = cosh^k x`; formally `gamma = -1/2`, outside the admissible
    /// class.
    pub fn cosh_power(k: f64) -> Self {
        Self {
            label: format!("cosh(x)^{k}"),
            gamma: -0.5,
            omega0: 0.5 * k,
            q: Arc::new(move |x: f64| x.cosh().powf(k)),
            beta: Arc::new(move |x: f64| k * x.tanh()),
            beta_prime: Some(Arc::new(move |x: f64| k / x.cosh().powi(2))),
        }
    }

    pub fn m(&self, x: f64) -> f64 {
        x.powf(2.0 * self.gamma + 1.0) * (self.q)(x)
    }

    /// `m'/m`
    pub fn log_derivative(&self, x: f64) -> f64 {
        (2.0 * self.gamma + 1.0) / x + (self.beta)(x)
    }

    fn beta_prime_at(&self, x: f64) -> f64 {
        match &self.beta_prime {
            Some(bp) => bp(x),
            None => {
                let h = 1e-5 * x.abs().max(1.0);
                ((self.beta)(x + h) - (self.beta)(x - h)) / (2.0 * h)
            }
        }
    }

    /// `Q(x) = (1/2) beta' + (1/4) beta^2 + ((2 gamma + 1)/(2x)) beta - omega0^2`
    pub fn big_q(&self, x: f64) -> f64 {
        let b = (self.beta)(x);
        0.5 * self.beta_prime_at(x) + 0.25 * b * b + (2.0 * self.gamma + 1.0) / (2.0 * x) * b
            - self.omega0 * self.omega0
    }

    /// `q''(0)/q(0) = beta'(0)`
    fn series_b(&self) -> f64 {
        self.beta_prime_at(0.0)
    }
}

/// `phi_lambda` and its derivative on a set of nodes.
#[derive(Clone, Debug, Serialize)]
pub struct CharacterSolution {
    pub lambda: Complex64,
    pub nodes: Vec<f64>,
    pub phi: Vec<Complex64>,
    pub dphi: Vec<Complex64>,
    pub steps: usize,
}

type State = [Complex64; 2];

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B_LOW: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Dopri<'a> {
    rhs: &'a dyn Fn(f64, &State) -> State,
    rtol: f64,
    atol: f64,
    steps: usize,
    max_steps: usize,
}

impl Dopri<'_> {
    // One attempted step; returns the 5th-order state and the scaled error.
    fn step(&self, x: f64, y: &State, h: f64) -> (State, f64) {
        let mut k: [State; 7] = [[Complex64::new(0.0, 0.0); 2]; 7];
        k[0] = (self.rhs)(x, y);
        for s in 1..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    ys[0] += kj[0] * (h * a);
                    ys[1] += kj[1] * (h * a);
                }
            }
            k[s] = (self.rhs)(x + C[s] * h, &ys);
        }
        let mut y5 = *y;
        for (j, kj) in k.iter().enumerate().take(6) {
            y5[0] += kj[0] * (h * A[6][j]);
            y5[1] += kj[1] * (h * A[6][j]);
        }
        let mut err: f64 = 0.0;
        for i in 0..2 {
            let mut e = Complex64::new(0.0, 0.0);
            for (j, kj) in k.iter().enumerate() {
                let b5 = if j < 6 { A[6][j] } else { 0.0 };
                e += kj[i] * (h * (b5 - B_LOW[j]));
            }
            let scale = self.atol + self.rtol * y[i].norm().max(y5[i].norm());
            err = err.max(e.norm() / scale);
        }
        (y5, err)
    }

    /// Integrates from `x0` to `x1` landing exactly on `x1`.
    fn advance(&mut self, x0: f64, y0: State, x1: f64, h: &mut f64) -> Result<State> {
        let mut x = x0;
        let mut y = y0;
        while x < x1 {
            if self.steps >= self.max_steps {
                return Err(Error::StepFailure { x, reason: "step budget exhausted".into() });
            }
            let last = x + *h >= x1;
            let step = if last { x1 - x } else { *h };
            let (yn, err) = self.step(x, &y, step);
            self.steps += 1;
            if !err.is_finite() {
                *h *= 0.25;
                continue;
            }
            if err <= 1.0 {
                x = if last { x1 } else { x + step };
                y = yn;
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // A short step clipped at a node says little about the step size.
                if !last {
                    *h = step * grow;
                } else if grow < 1.0 {
                    *h = h.min(step * grow);
                }
            } else {
                *h = step * (0.9 * err.powf(-0.2)).max(0.2);
            }
            if *h < 1e-14 * x.abs().max(1.0) {
                return Err(Error::StepFailure { x, reason: "step size underflow".into() });
            }
        }
        Ok(y)
    }
}

/// Solves for `phi_lambda` on the given nodes (any order, all `>= 0`).
pub fn solve_character_on(w: &SLWeight, lambda: Complex64, nodes: &[f64], tol: f64) -> Result<CharacterSolution> {
    if !(w.gamma > -0.5) {
        return Err(Error::SingularStart(w.gamma));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    if nodes.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidInput("nodes must be finite and nonnegative".into()));
    }
    let e = Complex64::new(w.omega0 * w.omega0, 0.0) + lambda * lambda;
    let g = w.gamma;
    let a = -e / (2.0 * (2.0 * g + 2.0));
    let b = w.series_b();
    let c4 = -a * (e + 2.0 * b) / (8.0 * (g + 2.0));
    let series = |x: f64| -> State {
        let x2 = x * x;
        [1.0 + a * x2 + c4 * x2 * x2, a * (2.0 * x) + c4 * (4.0 * x * x2)]
    };
    let mut x_start = 1e-3 * (1.0 / lambda.norm().max(1e-300)).max(1.0);
    // The dropped x^6 term is of size |c4 e| x^6; shrink the start until it is negligible.
    while (c4 * e).norm() * x_start.powi(6) > 1e-3 * tol && x_start > 1e-8 {
        x_start *= 0.5;
    }

    let rhs = |x: f64, y: &State| -> State { [y[1], -w.log_derivative(x) * y[1] - e * y[0]] };
    let mut solver = Dopri { rhs: &rhs, rtol: 0.1 * tol, atol: 0.1 * tol, steps: 0, max_steps: 2_000_000 };

    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&i, &j| nodes[i].total_cmp(&nodes[j]));
    let mut phi = vec![Complex64::new(0.0, 0.0); nodes.len()];
    let mut dphi = phi.clone();
    let mut x = x_start;
    let mut y = series(x_start);
    let mut h = 0.1 * x_start.max(1e-3);
    for &i in &order {
        let xi = nodes[i];
        if xi <= x_start {
            let s = series(xi);
            phi[i] = s[0];
            dphi[i] = s[1];
            continue;
        }
        if xi > x {
            y = solver.advance(x, y, xi, &mut h)?;
            x = xi;
        }
        phi[i] = y[0];
        dphi[i] = y[1];
    }
    Ok(CharacterSolution { lambda, nodes: nodes.to_vec(), phi, dphi, steps: solver.steps })
}

/// Solves on `n + 1` equally spaced nodes of `[0, x_max]`.
pub fn solve_character(w: &SLWeight, lambda: Complex64, x_max: f64, tol: f64) -> Result<CharacterSolution> {
    if !(x_max > 0.0) {
        return Err(Error::InvalidInput("x_max must be positive".into()));
    }
    let n = 200;
    let nodes: Vec<f64> = (0..=n).map(|k| x_max * k as f64 / n as f64).collect();
    solve_character_on(w, lambda, &nodes, tol)
}

/// `psi = sqrt(m) phi` on the solution nodes, with the residual of the
/// Langer equation at interior checkpoints.
#[derive(Clone, Debug, Serialize)]
pub struct LangerResult {
    pub nodes: Vec<f64>,
    pub psi: Vec<Complex64>,
    pub checkpoints: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl LangerResult {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// Stencil spacing for the Langer residual.
pub const LANGER_STEP: f64 = 0.01;

pub fn langer_transform(w: &SLWeight, sol: &CharacterSolution, tol: f64) -> Result<LangerResult> {
    let psi: Vec<Complex64> = sol.nodes.iter().zip(&sol.phi).map(|(&x, p)| p * w.m(x).sqrt()).collect();
    let interior: Vec<f64> = sol.nodes.iter().cloned().filter(|&x| x >= 0.5).collect();
    let stride = (interior.len() / 10).max(1);
    let checkpoints: Vec<f64> = interior.iter().step_by(stride).cloned().collect();
    let h = LANGER_STEP;
    let mut stencil = Vec::with_capacity(checkpoints.len() * 5);
    for &x in &checkpoints {
        for k in -2..=2 {
            stencil.push(x + k as f64 * h);
        }
    }
    let s = solve_character_on(w, sol.lambda, &stencil, tol)?;
    // psi' = (sqrt m)' phi + sqrt m phi', with (sqrt m)' = sqrt(m) (m'/m)/2.
    let dpsi: Vec<Complex64> = stencil
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let sm = w.m(x).sqrt();
            s.phi[i] * (0.5 * sm * w.log_derivative(x)) + s.dphi[i] * sm
        })
        .collect();
    let lam2 = sol.lambda * sol.lambda;
    let g = w.gamma;
    let residuals = checkpoints
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            let d = &dpsi[5 * j..5 * j + 5];
            let d2 = (d[0] - d[1] * 8.0 + d[3] * 8.0 - d[4]) / (12.0 * h);
            let psi_x = s.phi[5 * j + 2] * w.m(x).sqrt();
            let pot = (4.0 * g * g - 1.0) / (4.0 * x * x) + w.big_q(x);
            (-d2 + psi_x * pot - lam2 * psi_x).norm()
        })
        .collect();
    Ok(LangerResult { nodes: sol.nodes.clone(), psi, checkpoints, residuals })
}

/// One condition of the growth-class check, with a witness when it fails.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ConditionResult {
    pub pass: bool,
    pub witness: Option<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct HReport {
    pub weight: String,
    pub covered: bool,
    pub note: String,
    pub increasing: ConditionResult,
    pub limit: ConditionResult,
    pub estimated_two_omega0: f64,
    pub log_derivative_decreasing: ConditionResult,
    pub q_condition: ConditionResult,
    pub pass: bool,
}

fn result(witness: Option<f64>, detail: String) -> ConditionResult {
    ConditionResult { pass: witness.is_none(), witness, detail }
}

/// Checks the growth class of `w` on `grid` (points in `(0, x_max]`).
pub fn check_h_omega0(w: &SLWeight, grid: &[f64]) -> Result<HReport> {
    if grid.len() < 5 || grid.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::InvalidInput("grid needs at least 5 positive points".into()));
    }
    let mut xs = grid.to_vec();
    xs.sort_by(f64::total_cmp);
    let covered = w.gamma > -0.5;
    let note = if covered {
        String::new()
    } else {
        format!("gamma = {} is excluded (need gamma > -1/2); weight not covered", w.gamma)
    };
    let ld: Vec<f64> = xs.iter().map(|&x| w.log_derivative(x)).collect();

    let increasing = result(
        xs.iter().zip(&ld).find(|(_, &l)| l < 0.0).map(|(x, _)| *x),
        "m'/m >= 0 on the grid".into(),
    );

    // Fit m'/m ~ L + C/x over the final 20% of the grid.
    let start = (xs.len() * 4) / 5;
    let (mut s1, mut su, mut suu, mut sy, mut suy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (x, y) in xs[start..].iter().zip(&ld[start..]) {
        let u = 1.0 / x;
        s1 += 1.0;
        su += u;
        suu += u * u;
        sy += y;
        suy += u * y;
    }
    let det = s1 * suu - su * su;
    let est = if det.abs() > 1e-300 { (suu * sy - su * suy) / det } else { sy / s1 };
    let target = 2.0 * w.omega0;
    let limit_ok = (est - target).abs() <= 1e-2 * target.max(1.0);
    let limit = ConditionResult {
        pass: limit_ok,
        witness: if limit_ok { None } else { xs.last().cloned() },
        detail: format!("fitted limit of m'/m = {est:.6}, claimed 2 omega0 = {target}"),
    };

    let slack = 1e-12;
    let decreasing = result(
        ld.windows(2).zip(&xs[1..]).find(|(p, _)| p[1] > p[0] + slack * p[0].abs().max(1.0)).map(|(_, x)| *x),
        "m'/m nonincreasing".into(),
    );

    let qv: Vec<f64> = xs.iter().map(|&x| w.big_q(x)).collect();
    let q_witness = xs
        .iter()
        .zip(&qv)
        .find(|(_, &q)| !(q > 0.0))
        .map(|(x, _)| *x)
        .or_else(|| qv.windows(2).zip(&xs[1..]).find(|(p, _)| p[1] > p[0] + slack).map(|(_, x)| *x))
        .or_else(|| {
            // integrability proxy: x Q(x) small at the end of the grid
            let xe = *xs.last().unwrap();
            let qe = *qv.last().unwrap();
            if xe * qe > 1e-2 { Some(xe) } else { None }
        });
    let q_condition = result(q_witness, "Q positive, decreasing and integrable".into());

    let pass = covered && increasing.pass && limit.pass && (decreasing.pass || q_condition.pass);
    Ok(HReport {
        weight: w.label.clone(),
        covered,
        note,
        increasing,
        limit,
        estimated_two_omega0: est,
        log_derivative_decreasing: decreasing,
        q_condition,
        pass,
    })
}

/// Exponential growth rate of `|phi_{i nu omega0}|` fitted on `[x_max/2, x_max]`.
pub fn character_growth_rate(w: &SLWeight, nu: f64, x_max: f64, tol: f64) -> Result<f64> {
    let lambda = Complex64::new(0.0, nu * w.omega0);
    let nodes = [0.5 * x_max, x_max];
    let s = solve_character_on(w, lambda, &nodes, tol)?;
    Ok((s.phi[1].norm().ln() - s.phi[0].norm().ln()) / (0.5 * x_max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_weight_matches_closed_form() {
        let w = SLWeight::sinh_power(2.0);
        let sol = solve_character(&w, Complex64::new(1.0, 0.0), 10.0, 1e-10).unwrap();
        for (x, p) in sol.nodes.iter().zip(&sol.phi) {
            let exact = if *x == 0.0 { 1.0 } else { x.sin() / x.sinh() };
            assert!((p.re - exact).abs() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn excluded_gamma_is_rejected() {
        let w = SLWeight::cosh_power(3.0);
        assert!(matches!(
            solve_character(&w, Complex64::new(1.0, 0.0), 1.0, 1e-8),
            Err(Error::SingularStart(_))
        ));
        let grid: Vec<f64> = (1..=100).map(|k| 0.1 * k as f64).collect();
        let rep = check_h_omega0(&w, &grid).unwrap();
        assert!(!rep.covered && !rep.pass);
        assert!(rep.note.contains("excluded"));
    }

    #[test]
    fn h_omega0_examples() {
        let grid: Vec<f64> = (1..=200).map(|k| 0.05 * k as f64).collect();
        let rep = check_h_omega0(&SLWeight::sinh_power(2.0), &grid).unwrap();
        assert!(rep.pass && rep.log_derivative_decreasing.pass, "{rep:?}");
        assert!((rep.estimated_two_omega0 - 2.0).abs() < 1e-4);
        let rep = check_h_omega0(&SLWeight::bessel(1.0), &grid).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.estimated_two_omega0.abs() < 1e-9);
    }

    #[test]
    fn series_helpers() {
        for x in [0.05, 0.099, 0.101, 0.3] {
            assert!((coth_minus_inv(x) - (1.0 / x.tanh() - 1.0 / x)).abs() < 1e-12);
        }
        let x: f64 = 0.0999;
        assert!((coth_minus_inv_prime(x) - (1.0 / (x * x) - 1.0 / x.sinh().powi(2))).abs() < 1e-10);
    }
}
