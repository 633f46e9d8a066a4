//! Radial test functions with analytic derivatives.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::specfun::bessel_j;

/// A real function on `[0, inf)` with (optional) analytic first and second
/// derivatives.
pub trait RadialFunction: Send + Sync {
    fn value(&self, x: f64) -> f64;

    fn d1(&self, _x: f64) -> Option<f64> {
        None
    }

    fn d2(&self, _x: f64) -> Option<f64> {
        None
    }

    /// Beyond this point the function is treated as zero (infinite when it
    /// only decays).
    fn support_end(&self) -> f64 {
        f64::INFINITY
    }

    fn describe(&self) -> String;
}

/// Built-in test functions, selectable by name from the command line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Builtin {
    /// `sech(x/2)^p`
    SechHalf { power: i32 },
    /// `exp(-((x - center)/width)^2)`
    Gauss { center: f64, width: f64 },
    /// `exp(-rate x)`
    Exp { rate: f64 },
    /// `exp(1 - 1/(1 - u^2))`, `u = (x - center)/radius`, zero for `|u| >= 1`
    Bump { center: f64, radius: f64 },
    /// `(2N/pi) x^N / (1 + x^{2N})`
    HN { n: i32 },
    /// `sqrt(x) J_0(x)`
    SqrtXJ0,
    Zero,
}

impl Builtin {
    pub fn sech_half() -> Self {
        Builtin::SechHalf { power: 1 }
    }

    pub fn from_name(name: &str, n: i32) -> Result<Self> {
        Ok(match name {
            "sech_half" => Builtin::SechHalf { power: 1 },
            "sech3_half" => Builtin::SechHalf { power: 3 },
            "sech5_half" => Builtin::SechHalf { power: 5 },
            "gauss" => Builtin::Gauss { center: 0.0, width: 1.0 },
            "exp_decay" => Builtin::Exp { rate: 1.0 },
            "bump" => Builtin::Bump { center: 1.5, radius: 1.0 },
            "h_N" => Builtin::HN { n },
            "sqrtx_j0" => Builtin::SqrtXJ0,
            "zero" => Builtin::Zero,
            other => return Err(Error::InvalidInput(format!("unknown function `{other}`"))),
        })
    }

    pub const NAMES: [&'static str; 9] = [
        "sech_half",
        "sech3_half",
        "sech5_half",
        "gauss",
        "exp_decay",
        "bump",
        "h_N",
        "sqrtx_j0",
        "zero",
    ];
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::SechHalf { power: 1 } => write!(f, "sech(x/2)"),
            Builtin::SechHalf { power } => write!(f, "sech(x/2)^{power}"),
            Builtin::Gauss { center, width } => write!(f, "exp(-((x-{center})/{width})^2)"),
            Builtin::Exp { rate } => write!(f, "exp(-{rate} x)"),
            Builtin::Bump { center, radius } => write!(f, "bump(center={center}, radius={radius})"),
            Builtin::HN { n } => write!(f, "h_{n}(x) = ({}/pi) x^{n}/(1+x^{})", 2 * n, 2 * n),
            Builtin::SqrtXJ0 => write!(f, "sqrt(x) J_0(x)"),
            Builtin::Zero => write!(f, "0"),
        }
    }
}

impl RadialFunction for Builtin {
    fn value(&self, x: f64) -> f64 {
        match *self {
            Builtin::SechHalf { power } => (0.5 * x).cosh().recip().powi(power),
            Builtin::Gauss { center, width } => (-((x - center) / width).powi(2)).exp(),
            Builtin::Exp { rate } => (-rate * x).exp(),
            Builtin::Bump { center, radius } => {
                let u = (x - center) / radius;
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - u * u)).exp()
                }
            }
            Builtin::HN { n } => {
                let xn = x.powi(n);
                2.0 * n as f64 / PI * xn / (1.0 + xn * xn)
            }
            Builtin::SqrtXJ0 => x.sqrt() * bessel_j(0.0, x),
            Builtin::Zero => 0.0,
        }
    }

    fn d1(&self, x: f64) -> Option<f64> {
        match *self {
            Builtin::SechHalf { power } => {
                let p = power as f64;
                let s = (0.5 * x).cosh().recip();
                Some(-0.5 * p * s.powi(power) * (0.5 * x).tanh())
            }
            Builtin::Gauss { center, width } => {
                let u = (x - center) / width;
                Some(-2.0 * u / width * (-u * u).exp())
            }
            Builtin::Exp { rate } => Some(-rate * (-rate * x).exp()),
            Builtin::Bump { center, radius } => {
                let u = (x - center) / radius;
                if u.abs() >= 1.0 {
                    Some(0.0)
                } else {
                    let d = 1.0 - u * u;
                    Some(self.value(x) * (-2.0 * u / (d * d)) / radius)
                }
            }
            Builtin::Zero => Some(0.0),
            _ => None,
        }
    }

    fn d2(&self, x: f64) -> Option<f64> {
        match *self {
            Builtin::SechHalf { power } => {
                let p = power as f64;
                let s = (0.5 * x).cosh().recip();
                let t = (0.5 * x).tanh();
                Some(0.25 * p * p * s.powi(power) * t * t - 0.25 * p * s.powi(power + 2))
            }
            Builtin::Gauss { center, width } => {
                let u = (x - center) / width;
                Some((4.0 * u * u - 2.0) / (width * width) * (-u * u).exp())
            }
            Builtin::Exp { rate } => Some(rate * rate * (-rate * x).exp()),
            Builtin::Bump { center, radius } => {
                let u = (x - center) / radius;
                if u.abs() >= 1.0 {
                    Some(0.0)
                } else {
                    let d = 1.0 - u * u;
                    let g1 = -2.0 * u / (d * d);
                    let g2 = -2.0 / (d * d) - 8.0 * u * u / (d * d * d);
                    Some(self.value(x) * (g1 * g1 + g2) / (radius * radius))
                }
            }
            Builtin::Zero => Some(0.0),
            _ => None,
        }
    }

    fn support_end(&self) -> f64 {
        match *self {
            Builtin::Bump { center, radius } => center + radius,
            Builtin::Zero => 0.0,
            _ => f64::INFINITY,
        }
    }

    fn describe(&self) -> String {
        self.to_string()
    }
}

/// Adapter turning a closure into a [`RadialFunction`] without derivatives.
pub struct FnRadial<F> {
    pub f: F,
    pub label: String,
    pub support_end: f64,
}

impl<F: Fn(f64) -> f64 + Send + Sync> FnRadial<F> {
    pub fn new(label: impl Into<String>, f: F) -> Self {
        Self { f, label: label.into(), support_end: f64::INFINITY }
    }
}

impl<F: Fn(f64) -> f64 + Send + Sync> RadialFunction for FnRadial<F> {
    fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }
    fn support_end(&self) -> f64 {
        self.support_end
    }
    fn describe(&self) -> String {
        self.label.clone()
    }
}
