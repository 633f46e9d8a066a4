use std::f64::consts::PI;

use hgcalc::hypergroup::{check_hypergroup_axioms, translate, Hypergroup};
use hgcalc::quad::{integrate, integrate_measure, QuadSpec};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// P_{i lambda - 1/2}(cosh x) via sinh(y/2) = sinh(x/2) sin(theta), which has
// a smooth integrand on [0, pi/2].
fn conical_oracle(lambda: f64, x: f64) -> f64 {
    let k = (0.5 * x).sinh();
    let v: f64 = integrate(
        |th: f64| {
            let s = k * th.sin();
            (lambda * 2.0 * s.asinh()).cos() / (1.0 + s * s).sqrt()
        },
        0.0,
        PI / 2.0,
        &QuadSpec::tight(),
    )
    .unwrap();
    2.0 / PI * v
}

#[test]
fn mehler_characters_match_theta_oracle() {
    let h = Hypergroup::mehler_fock();
    for &lambda in &[0.0, 0.5, 1.0, 4.0] {
        for &x in &[0.01, 0.5, 2.0, 7.0] {
            let a = h.character_real(lambda, x).unwrap();
            let b = conical_oracle(lambda, x);
            assert!((a - b).abs() < 1e-10, "lambda={lambda} x={x}: {a} vs {b}");
        }
    }
}

#[test]
fn characters_are_multiplicative() {
    let spec = QuadSpec::with_tol(1e-11, 1e-10);
    for name in ["jacobi_sl2c", "mehler_fock", "bessel_kingman:0", "bessel_kingman:1", "multiplicative"] {
        let h = Hypergroup::new(name).unwrap();
        for &(lambda, x, y) in &[(1.3, 0.7, 1.1), (0.4, 2.0, 0.3), (2.5, 1.5, 1.5)] {
            let l = c(lambda, 0.2 * h.omega0());
            let lhs = translate(&h, |t| h.character(l, t).unwrap(), x, y, &spec).unwrap();
            let rhs = h.character(l, x).unwrap() * h.character(l, y).unwrap();
            assert!((lhs - rhs).norm() < 1e-7 * (1.0 + rhs.norm()), "{name}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn laplace_representation_reproduces_characters() {
    let spec = QuadSpec::with_tol(1e-12, 1e-11);
    for name in ["jacobi_sl2c", "mehler_fock", "bessel_kingman:0", "bessel_kingman:0.5", "bessel_kingman:1.5"] {
        let h = Hypergroup::new(name).unwrap();
        for &x in &[0.3, 1.0, 3.0] {
            let tau = h.laplace_kernel(x).unwrap();
            for &lambda in &[0.0, 0.8, 2.0] {
                let v: f64 = integrate_measure(|t: f64| (lambda * t).cos(), &tau, &spec).unwrap();
                let phi = h.character_real(lambda, x).unwrap();
                assert!((v - phi).abs() < 1e-9, "{name} x={x} lambda={lambda}: {v} vs {phi}");
            }
        }
    }
}

#[test]
fn jacobi_axioms_on_grid() {
    let h = Hypergroup::jacobi_sl2c();
    let grid: Vec<f64> = (1..=12).map(|k| 0.25 * k as f64).collect();
    let rep = check_hypergroup_axioms(&h, &grid, &QuadSpec::default()).unwrap();
    assert!(rep.max_violation() < 1e-8, "{rep:?}");
}

#[test]
fn mehler_support_of_one_star_two() {
    let h = Hypergroup::mehler_fock();
    let rep = check_hypergroup_axioms(&h, &[1.0, 2.0], &QuadSpec::default()).unwrap();
    assert_eq!(rep.support, 0.0);
}

mod ode {
    use super::*;
    use hgcalc::slode::{langer_transform, solve_character, solve_character_on, SLWeight};
    use hgcalc::specfun::bessel_j_normalized;

    #[test]
    fn solver_against_closed_forms() {
        let nodes: Vec<f64> = (0..=200).map(|k| 0.05 * k as f64).collect();
        let mf = Hypergroup::mehler_fock();
        for &lambda in &[0.5, 1.0, 3.0] {
            let l = c(lambda, 0.0);
            let s = solve_character_on(&SLWeight::sinh_power(2.0), l, &nodes, 1e-10).unwrap();
            let s2 = solve_character_on(&SLWeight::sinh_power(1.0), l, &nodes, 1e-10).unwrap();
            let s3 = solve_character_on(&SLWeight::bessel(1.0), l, &nodes, 1e-10).unwrap();
            let mut worst = [0.0f64; 3];
            for (i, &x) in nodes.iter().enumerate() {
                let j = if x == 0.0 { 1.0 } else { (lambda * x).sin() / (lambda * x.sinh()) };
                worst[0] = worst[0].max((s.phi[i].re - j).abs());
                worst[1] = worst[1].max((s2.phi[i].re - conical_oracle(lambda, x)).abs());
                worst[2] = worst[2].max((s3.phi[i].re - bessel_j_normalized(1.0, lambda * x)).abs());
                let _ = &mf;
            }
            assert!(worst.iter().all(|w| *w < 1e-7), "lambda={lambda}: {worst:?}");
        }
    }

    #[test]
    fn langer_residual_small() {
        let w = SLWeight::sinh_power(2.0);
        let tol = 1e-9;
        let s = solve_character(&w, c(1.0, 0.0), 10.0, tol).unwrap();
        let l = langer_transform(&w, &s, tol).unwrap();
        assert!(l.max_residual() < 10.0 * tol, "{}", l.max_residual());
        for (x, p) in l.nodes.iter().zip(&l.psi) {
            assert!((p.re - x.sin()).abs() < 1e-7);
        }
    }
}
