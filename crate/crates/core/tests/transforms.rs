use std::f64::consts::PI;

use hgcalc::functions::{Builtin, FnRadial, RadialFunction};
use hgcalc::hypergroup::{convolve_at, Hypergroup};
use hgcalc::quad::{composite_gauss_legendre, Decay, QuadSpec};
use hgcalc::specfun::{gamma, gamma_complex};
use hgcalc::transforms::*;
use num_complex::Complex64;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn reals(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| c(x)).collect()
}

fn csch(x: f64) -> f64 {
    1.0 / x.sinh()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

const LAMBDAS: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

#[test]
fn mehler_sech_pairs() {
    let h = Hypergroup::mehler_fock();
    let opts = ForwardOptions::default();
    let rows: [(i32, fn(f64) -> f64); 3] = [
        (1, |l| 2.0 / l * csch(PI * l)),
        (3, |l| 8.0 * l * csch(PI * l)),
        // Contour-integral value of the fifth power.
        (5, |l| 32.0 / 9.0 * l * (1.0 + l * l) * csch(PI * l)),
    ];
    for (p, pair) in rows {
        let t = forward(&h, &Builtin::SechHalf { power: p }, &reals(&LAMBDAS), &opts).unwrap();
        for (v, &l) in t.values.iter().zip(&LAMBDAS) {
            assert!(rel(*v, c(pair(l))) < 1e-6, "power {p} lambda {l}: {v} vs {}", pair(l));
        }
    }
}

#[test]
fn jacobi_gaussian_pair() {
    let h = Hypergroup::jacobi_sl2c();
    let f = Builtin::Gauss { center: 0.0, width: 1.0 };
    let t = forward(&h, &f, &reals(&LAMBDAS), &ForwardOptions::default()).unwrap();
    for (v, &l) in t.values.iter().zip(&LAMBDAS) {
        let exact = PI.sqrt() / (2.0 * l) * ((1.0 - l * l) / 4.0).exp() * (l / 2.0).sin();
        assert!(rel(*v, c(exact)) < 1e-9, "lambda {l}");
    }
}

#[test]
fn hankel_gaussian_pair() {
    for g in [0.0, 0.5, 1.5] {
        let h = Hypergroup::bessel_kingman(g).unwrap();
        let f = Builtin::Gauss { center: 0.0, width: 1.0 };
        let t = forward(&h, &f, &reals(&LAMBDAS), &ForwardOptions::default()).unwrap();
        for (v, &l) in t.values.iter().zip(&LAMBDAS) {
            let exact = gamma(g + 1.0).unwrap() / 2.0 * (-l * l / 4.0).exp();
            assert!(rel(*v, c(exact)) < 1e-9, "gamma {g} lambda {l}");
        }
    }
}

#[test]
fn multiplicative_forward_is_mellin_on_imaginary_axis() {
    let h = Hypergroup::multiplicative();
    let t = forward(&h, &Builtin::HN { n: 2 }, &reals(&[0.0, 1.0, 2.5]), &ForwardOptions::default()).unwrap();
    for (v, l) in t.values.iter().zip([0.0, 1.0, 2.5]) {
        let exact = c(1.0 / (PI * l / 4.0).cosh());
        assert!(rel(*v, exact) < 1e-9, "{v} vs {exact}");
    }
}

#[test]
fn mellin_pairs() {
    let spec = QuadSpec::with_tol(1e-14, 1e-12);
    let s: Vec<Complex64> = [0.5, 1.0, 2.0].iter().map(|&t| Complex64::new(0.0, t)).collect();
    let h2 = Builtin::HN { n: 2 };
    let t = mellin_forward(|x| h2.value(x), &s, Decay::Exponential, &spec).unwrap();
    for (v, s) in t.values.iter().zip(&s) {
        let exact = c(1.0 / (PI * s.im / 4.0).cosh());
        assert!(rel(*v, exact) < 1e-7, "{s}");
    }

    let tau = 0.3;
    let s = Complex64::new(0.0, tau);
    let g = mellin_forward(|x| Builtin::SqrtXJ0.value(x), &[s], Decay::Oscillatory, &QuadSpec::with_tol(1e-8, 1e-6))
        .unwrap();
    let a = s / 2.0 + 0.25;
    let exact = (s - 0.5).expf(2.0) / PI * (PI * a).sin() * gamma_complex(a).unwrap().powi(2);
    assert!(rel(g.values[0], exact) < 1e-3, "{} vs {exact}", g.values[0]);
}

#[test]
fn mellin_inversion() {
    let opts = MellinInverseOptions::default();
    let xs = [0.5, 1.0, 2.0];
    let v = mellin_inverse(|s| c(1.0 / (PI * s.im / 4.0).cosh()), &xs, &opts).unwrap();
    for (v, &x) in v.iter().zip(&xs) {
        let h2 = 4.0 / PI * x * x / (1.0 + x.powi(4));
        assert!((v - c(h2)).norm() < 1e-6, "x {x}");
    }

    let shifted = MellinInverseOptions { sigma: 2.0, ..opts };
    let v = mellin_inverse(|s| gamma_complex(s).unwrap(), &xs, &shifted).unwrap();
    for (v, &x) in v.iter().zip(&xs) {
        assert!((v - c((-x).exp())).norm() < 1e-8, "x {x}");
    }

    // A bump in log x: forward on a fine line, then back.
    let f = |x: f64| {
        let u = x.ln();
        if u.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - u * u)).exp()
        }
    };
    let fstar = |s: Complex64| {
        // Compact support in u = ln x, so quadrature over u in [-1, 1].
        hgcalc::quad::integrate(|u: f64| (s * u).exp() * f(u.exp()), -1.0, 1.0, &QuadSpec::with_tol(1e-13, 1e-10))
            .unwrap()
    };
    let v = mellin_inverse(fstar, &[0.7, 1.0, 1.8], &MellinInverseOptions { t_max: 2e4, ..opts }).unwrap();
    for (v, x) in v.iter().zip([0.7, 1.0, 1.8]) {
        assert!((v - c(f(x))).norm() < 1e-6, "x {x}: {v} vs {}", f(x));
    }
}

#[test]
fn mehler_inversion_round_trip() {
    let h = Hypergroup::mehler_fock();
    let (l, w) = plancherel_rule(&h, LAMBDA_MAX_DEFAULT, 80, 8);
    let table = TransformTable::from_closed_form(&h, "sech(x/2)", &l, |l| 2.0 / l * csch(PI * l)).with_weights(w);
    let xs: Vec<f64> = (1..=50).map(|k| 0.1 * k as f64).collect();
    let back = inverse_plancherel(&h, &table, &xs).unwrap();
    for (v, &x) in back.iter().zip(&xs) {
        let f = 1.0 / (0.5 * x).cosh();
        assert!((v.re - f).abs() / f < 1e-4, "x {x}: {} vs {f}", v.re);
    }
}

#[test]
fn jacobi_inversion_round_trip() {
    let h = Hypergroup::jacobi_sl2c();
    let f = Builtin::Gauss { center: 0.0, width: 1.0 };
    let (l, w) = plancherel_rule(&h, LAMBDA_MAX_DEFAULT, 40, 8);
    let table = forward(&h, &f, &reals(&l), &ForwardOptions::default()).unwrap().with_weights(w);
    let xs = [0.1, 0.5, 1.0, 2.0, 3.0];
    let back = inverse_plancherel(&h, &table, &xs).unwrap();
    for (v, &x) in back.iter().zip(&xs) {
        assert!((v.re - f.value(x)).abs() < 1e-4 * f.value(x).max(1e-3), "x {x}");
    }
    let zero = TransformTable::from_closed_form(&h, "0", &l, |_| 0.0);
    assert!(inverse_plancherel(&h, &zero, &xs).unwrap().iter().all(|v| v.norm() == 0.0));
}

#[test]
fn plancherel_norm_identity_and_calibration() {
    let opts = ForwardOptions::default();
    let h = Hypergroup::jacobi_sl2c();
    let f = Builtin::Gauss { center: 0.0, width: 1.0 };
    let (a, b) = plancherel_norm_check(&h, &f, LAMBDA_MAX_DEFAULT, &opts).unwrap();
    assert!((a - b).abs() < 1e-4 * a, "{a} vs {b}");
    let g = Builtin::Bump { center: 1.5, radius: 1.0 };
    let c_h = calibrate_plancherel_constant(&h, &[&f, &g], LAMBDA_MAX_DEFAULT, &opts).unwrap();
    assert!((c_h - h.plancherel_constant().unwrap()).abs() < 1e-4 * c_h);

    let h = Hypergroup::mehler_fock();
    let f = Builtin::SechHalf { power: 3 };
    let (a, b) = plancherel_norm_check(&h, &f, LAMBDA_MAX_DEFAULT, &opts).unwrap();
    assert!((a - b).abs() < 1e-4 * a, "{a} vs {b}");
}

#[test]
fn convolution_theorem() {
    let spec = QuadSpec::with_tol(1e-12, 1e-10);
    for h in [Hypergroup::jacobi_sl2c(), Hypergroup::mehler_fock(), Hypergroup::bessel_kingman(0.5).unwrap()] {
        let f = Builtin::Bump { center: 1.0, radius: 0.8 };
        let g = Builtin::Bump { center: 0.8, radius: 0.6 };
        let hh = h.clone();
        let fg = FnRadial {
            f: move |x: f64| {
                convolve_at(&hh, |y| f.value(y), |t| c(g.value(t)), x, (0.2, 1.8), &spec).unwrap().re
            },
            label: "f*g".into(),
            support_end: 3.2,
        };
        let lam = reals(&[0.3, 1.0, 2.0]);
        let opts = ForwardOptions { spec, ..Default::default() };
        let a = forward(&h, &fg, &lam, &opts).unwrap();
        let bf = forward(&h, &f, &lam, &opts).unwrap();
        let bg = forward(&h, &g, &lam, &opts).unwrap();
        for k in 0..lam.len() {
            let prod = bf.values[k] * bg.values[k];
            assert!((a.values[k] - prod).norm() < 1e-5 * prod.norm().max(1e-3), "{} lambda {}", h.name(), lam[k]);
        }
    }
}

#[test]
fn strip_analyticity() {
    let h = Hypergroup::jacobi_sl2c();
    let f = Builtin::Bump { center: 1.5, radius: 1.0 };
    let opts = ForwardOptions::default();
    let rep = strip_analyticity_check(
        |z| Ok(forward(&h, &f, &[z], &opts)?.values[0]),
        0.9,
        6,
        (0.3, 3.0),
    );
    assert!(rep.diverged.is_empty());
    assert!(rep.max_cauchy_riemann < 1e-6, "{rep:?}");
    assert!(rep.max_cauchy_integral < 1e-8, "{rep:?}");

    // exp(-2.2 x) is in L1(m) but its transform blows up at |Im lambda| = 1.5.
    let slow = Builtin::Exp { rate: 2.2 };
    let outside = ForwardOptions { allow_outside_strip: true, regularization: Regularization::Direct, ..opts };
    let rep = strip_analyticity_check(
        |z| Ok(forward(&h, &slow, &[z + Complex64::new(0.0, 1.5)], &outside)?.values[0]),
        0.2,
        3,
        (0.5, 2.0),
    );
    assert_eq!(rep.diverged.len(), 3);
}

#[test]
fn transform_bounded_by_l1_norm() {
    let h = Hypergroup::jacobi_sl2c();
    let f = Builtin::Gauss { center: 0.5, width: 1.0 };
    let (x, w) = composite_gauss_legendre(0.0, 10.0, 20, 10);
    let l1: f64 = x.iter().zip(&w).map(|(&x, w)| f.value(x).abs() * h.haar(x) * w).sum();
    let probes: Vec<Complex64> = [(0.0, 0.0), (1.0, 0.9), (2.0, -0.99), (5.0, 0.5)]
        .iter()
        .map(|&(a, b)| Complex64::new(a, b))
        .collect();
    let t = forward(&h, &f, &probes, &ForwardOptions::default()).unwrap();
    for v in &t.values {
        assert!(v.norm() <= h.m0() * l1 * (1.0 + 1e-9));
    }
}

#[test]
fn lp_extension_bound_mehler() {
    let h = Hypergroup::mehler_fock();
    let f = Builtin::SechHalf { power: 3 };
    let probes: Vec<Complex64> = [(0.1, 0.0), (0.5, 0.25), (1.0, -0.24), (2.0, 0.1), (0.2, 0.2)]
        .iter()
        .map(|&(a, b)| Complex64::new(a, b))
        .collect();
    let b = lp_extension_bound(&h, &f, 3.0, 0.5, &probes, &ForwardOptions::default()).unwrap();
    assert!((b.p - 1.2).abs() < 1e-15);
    assert!(b.sup_transform <= b.bound, "{b:?}");
}
