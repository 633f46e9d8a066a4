use std::f64::consts::PI;

use hgcalc::functions::{Builtin, RadialFunction};
use hgcalc::hypergroup::Hypergroup;
use hgcalc::opcalc::*;
use hgcalc::quad::QuadSpec;
use hgcalc::rng::{random_hpd, random_strip_spectrum, random_unitary, seeded};
use hgcalc::specfun::legendre_conical;
use hgcalc::transforms::{forward, ForwardOptions, MellinInverseOptions};
use nalgebra::DVector;
use num_complex::Complex64;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn max_dev(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

fn diag_in(u: &CMat, d: Vec<Complex64>) -> CMat {
    u * CMat::from_diagonal(&DVector::from_vec(d)) * u.adjoint()
}

fn random_family(seed: u64, n: usize, omega: f64, re: (f64, f64)) -> CosineFamily {
    let mut rng = seeded(seed);
    let eig = random_strip_spectrum(n, omega, re, &mut rng);
    let u = random_unitary(n, &mut rng);
    cos_family_normal(&eig, &u, omega).unwrap()
}

#[test]
fn normal_family_norm_matches_svd() {
    let eig = [c(1.0), Complex64::new(2.0, 0.5)];
    let u = random_unitary(2, &mut seeded(11));
    let fam = cos_family_normal(&eig, &u, 0.5).unwrap();
    let direct = norm2(&fam.cos(3.0).unwrap());
    let exact = (3f64).cos().abs().max(Complex64::new(6.0, 1.5).cos().norm());
    assert!((direct - exact).abs() < 1e-12 * exact);
    assert!(fam.certified && fam.kappa == 1.0);

    let herm = random_family(3, 4, 0.0, (-3.0, 3.0));
    for t in [0.5, 2.0, 17.0] {
        assert!(norm2(&herm.cos(t).unwrap()) <= 1.0 + 1e-12);
    }
}

#[test]
fn dense_and_normal_paths_agree() {
    for seed in 0..5 {
        let fam = random_family(seed, 4, 0.5, (0.1, 2.0));
        let dense = cos_family_dense(&fam.generator(), 10.0).unwrap();
        for t in [0.0, 0.7, 3.0, 9.0] {
            let a = fam.cos(t).unwrap();
            assert!(max_dev(&a, &dense.cos(t).unwrap()) < 1e-9 * norm2(&a).max(1.0), "seed {seed} t {t}");
        }
        assert!(dense.omega0 <= 0.5 + 0.05, "fitted {}", dense.omega0);
        let pairs = [(0.3, 1.1), (2.0, 0.5), (4.0, 3.0)];
        assert!(fam.dalembert_residual(&pairs).unwrap() < 1e-12);
        assert!(dense.dalembert_residual(&pairs).unwrap() < 1e-9);
    }
}

#[test]
fn phi_a_matches_spectral_characters() {
    let spec = QuadSpec::with_tol(1e-12, 1e-11);
    let cases = [
        (Hypergroup::jacobi_sl2c(), 1.0),
        (Hypergroup::mehler_fock(), 0.5),
        (Hypergroup::bessel_kingman(1.0).unwrap(), 0.0),
        (Hypergroup::bessel_kingman(0.25).unwrap(), 0.0),
    ];
    for (h, omega) in cases {
        let fam = random_family(21, 3, omega, (0.2, 3.0));
        for x in [0.3, 1.0, 4.0] {
            let got = phi_a(&h, &fam, x, &spec).unwrap().matrix;
            let exact = fam.spectral(|l| h.character(l, x).unwrap()).unwrap();
            assert!(max_dev(&got, &exact) < 1e-8, "{} x {x}: {}", h.name(), max_dev(&got, &exact));
        }
    }
}

#[test]
fn phi_a_of_zero_is_phi0() {
    let h = Hypergroup::jacobi_sl2c();
    let fam = cos_family_normal(&[c(0.0); 2], &CMat::identity(2, 2), 1.0).unwrap();
    let m = phi_a(&h, &fam, 2.0, &QuadSpec::default()).unwrap().matrix;
    let p0 = 2.0 / 2f64.sinh();
    assert!(max_dev(&m, &(CMat::identity(2, 2) * c(p0))) < 1e-12);
}

#[test]
fn phi_a_uniformly_bounded() {
    let h = Hypergroup::jacobi_sl2c();
    let spec = QuadSpec::default();
    for seed in 0..4 {
        let fam = random_family(100 + seed, 4, 1.0, (0.0, 3.0));
        for k in 1..=16 {
            let x = 0.5 * k as f64;
            assert!(norm2(&phi_a(&h, &fam, x, &spec).unwrap().matrix) <= h.m0() + 1e-8);
        }
    }
}

#[test]
fn t_a_zero_generator_and_diagonal_consistency() {
    let h = Hypergroup::jacobi_sl2c();
    let spec = QuadSpec::with_tol(1e-11, 1e-10);
    let f = Builtin::Bump { center: 1.2, radius: 0.7 };
    let zero = cos_family_normal(&[c(0.0); 2], &CMat::identity(2, 2), 1.0).unwrap();
    let t0 = t_a(&h, &zero, FnInput::Evaluator(&f), 1.0, &spec).unwrap().matrix;
    let scalar: f64 = hgcalc::quad::integrate(|x: f64| f.value(x) * x * x.sinh(), 0.0, 1.9, &QuadSpec::tight()).unwrap();
    assert!(max_dev(&t0, &(CMat::identity(2, 2) * c(scalar))) < 1e-9);

    let fam = random_family(5, 3, 0.9, (0.2, 3.0));
    let t = t_a(&h, &fam, FnInput::Evaluator(&f), 1.0, &spec).unwrap().matrix;
    let eig = fam.eigenvalues().unwrap().to_vec();
    let fh = forward(&h, &f, &eig, &ForwardOptions::default()).unwrap();
    let exact = fam.spectral(|l| fh.values[eig.iter().position(|e| *e == l).unwrap()]).unwrap();
    assert!(max_dev(&t, &exact) < 1e-6);
}

#[test]
fn homomorphism_small_battery() {
    let h = Hypergroup::jacobi_sl2c();
    let spec = QuadSpec::with_tol(1e-11, 1e-10);
    for seed in 0..3 {
        let fam = random_family(300 + seed, 4, 0.9, (0.2, 2.5));
        let f = Builtin::Bump { center: 1.0 + 0.1 * seed as f64, radius: 0.6 };
        let g = Builtin::Bump { center: 0.8, radius: 0.5 };
        let r = homomorphism_residual(&h, &fam, &f, &g, &spec).unwrap();
        assert!(r < 1e-5, "seed {seed}: {r}");
    }
}

#[test]
fn scaling_and_sine_form() {
    let h = Hypergroup::jacobi_sl2c();
    let spec = QuadSpec::with_tol(1e-11, 1e-10);
    let fam = random_family(9, 3, 1.0, (0.0, 2.0));
    let f = Builtin::Exp { rate: 3.0 };
    let alpha = 0.7;
    let a = t_a(&h, &fam, FnInput::Evaluator(&f), alpha, &spec).unwrap().matrix;
    let b = t_a(&h, &fam.scaled(alpha), FnInput::Evaluator(&f), 1.0, &spec).unwrap().matrix;
    assert!(max_dev(&a, &b) < 1e-12);
    let s = t_jacobi_sine(&fam, &f, alpha, &spec).unwrap().matrix;
    assert!(max_dev(&a, &s) < 1e-6, "{}", max_dev(&a, &s));

    // Dense generator with a zero eigenvalue takes the cosine-integral path.
    let u = random_unitary(2, &mut seeded(4));
    let z = cos_family_normal(&[c(0.0), c(1.0)], &u, 1.0).unwrap();
    let dz = cos_family_dense(&z.generator(), 10.0).unwrap();
    let s1 = t_jacobi_sine(&z, &f, alpha, &spec).unwrap().matrix;
    let s2 = t_jacobi_sine(&dz, &f, alpha, &spec).unwrap().matrix;
    assert!(max_dev(&s1, &s2) < 1e-8);

    // Refinement: tightening the quadrature leaves the result unchanged.
    let tail = Builtin::Exp { rate: 3.0 };
    let fam = random_family(10, 2, 0.2, (0.5, 1.5));
    let coarse = t_jacobi_sine(&fam, &tail, 0.5, &QuadSpec::with_tol(1e-8, 1e-7)).unwrap().matrix;
    let fine = t_jacobi_sine(&fam, &tail, 0.5, &QuadSpec::with_tol(1e-11, 1e-10)).unwrap().matrix;
    assert!(max_dev(&coarse, &fine) < 1e-6 * norm2(&fine));
}

#[test]
fn mellin_calculus() {
    let opts = MellinInverseOptions::default();
    let h2 = |x: f64| 4.0 / PI * x * x / (1.0 + x.powi(4));
    let sech = |s: Complex64| c(1.0 / (PI * s.im / 4.0).cosh());
    let a = CMat::from_diagonal(&DVector::from_vec(vec![c(0.5), c(1.0), c(2.0)]));
    let r = mellin_operator_calculus(&a, sech, &opts).unwrap().matrix;
    for (k, x) in [0.5, 1.0, 2.0].iter().enumerate() {
        assert!((r[(k, k)] - h2(*x)).norm() < 1e-6);
    }
    let z = mellin_operator_calculus(&a, |_| c(0.0), &opts).unwrap().matrix;
    assert!(z.iter().all(|v| v.norm() == 0.0));
    for seed in 0..3 {
        let a = random_hpd(3, (0.3, 3.0), &mut seeded(seed));
        let eig = a.clone().symmetric_eigen();
        let exact = diag_in(&eig.eigenvectors, eig.eigenvalues.iter().map(|&l| c(h2(l))).collect());
        let r = mellin_operator_calculus(&a, sech, &opts).unwrap().matrix;
        assert!(max_dev(&r, &exact) < 1e-6);
    }
}

#[test]
fn lambda_op_properties() {
    let h = Hypergroup::jacobi_sl2c();
    let spec = QuadSpec::with_tol(1e-12, 1e-10);
    let f = Builtin::Bump { center: 1.0, radius: 0.8 };
    let op = lambda_op(&h, &f, &lambda_grid(0), &spec).unwrap();
    // Weighted self-adjointness: W K is symmetric.
    let n = op.nodes.len();
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let a = op.weights[i] * op.k[(i, j)];
            let b = op.weights[j] * op.k[(j, i)];
            asym = asym.max((a - b).abs() / (a.abs() + b.abs()).max(1e-300));
        }
    }
    assert!(asym < 1e-12);

    // Narrow normalized bump near the identity acts as the identity.
    let eps = 0.05;
    let bump = Builtin::Bump { center: 0.0, radius: eps };
    let mass: f64 = hgcalc::quad::integrate(|x: f64| bump.value(x) * h.haar(x), 0.0, eps, &QuadSpec::tight()).unwrap();
    let approx = hgcalc::functions::FnRadial { f: move |x: f64| bump.value(x) / mass, label: "delta".into(), support_end: eps };
    let grid = hgcalc::hypergroup::Grid::gauss(0.0, 4.0, 64, 8).unwrap();
    let op = lambda_op(&h, &approx, &grid, &spec).unwrap();
    let g: Vec<f64> = op.nodes.iter().map(|&x| (-(x - 1.5f64).powi(2)).exp()).collect();
    let kg = op.apply(&g);
    for (i, &x) in op.nodes.iter().enumerate() {
        if (0.5..3.0).contains(&x) {
            assert!((kg[i] - g[i]).abs() < 5e-3, "x {x}: {} vs {}", kg[i], g[i]);
        }
    }
}

#[test]
fn translation_family() {
    let tc = translation_cosine(|x: f64| x.cosh().powi(2), 2.0, 12.0, 0.01).unwrap();
    let fit = tc.growth_fit(6.0);
    assert!(fit.exponent <= 1.05 * fit.predicted, "{fit:?}");
    assert!((fit.predicted - 1.0).abs() < 1e-3);
    for k in [50, 200, 400] {
        let t = k as f64 * 0.01;
        assert!(tc.shift_norm(k) <= (1.0 + (2.0 * t).exp()).sqrt() * (1.0 + 1e-12));
    }
}

#[test]
fn fractional_integrals() {
    let spec = QuadSpec::with_tol(1e-13, 1e-12);
    let lambda = 1.0;
    let cosl = move |t: f64| c((lambda * t).cos());
    let xs = [0.5, 1.0, 2.0];
    let u1 = frac_integrate(FracKind::U, c(1.0), cosl, &xs, &spec).unwrap();
    for (v, &x) in u1.iter().zip(&xs) {
        assert!((v - c((lambda * x).sin() / lambda)).norm() < 1e-9);
    }
    let uh = frac_integrate(FracKind::U, c(0.5), cosl, &xs, &spec).unwrap();
    for (v, &x) in uh.iter().zip(&xs) {
        let p = legendre_conical(c(lambda), x).unwrap();
        assert!((v - p * (PI / 2.0).sqrt()).norm() < 1e-6);
    }
    // W_1/2 U_1/2 = U_1
    let inner = |t: f64| frac_integrate(FracKind::U, c(0.5), cosl, &[t], &spec).unwrap()[0];
    let wu = frac_integrate(FracKind::W, c(0.5), inner, &xs, &spec).unwrap();
    for (v, &x) in wu.iter().zip(&xs) {
        assert!((v - c(x.sin())).norm() < 1e-6, "x {x}");
    }
    // W_a W_b = W_{a+b} on a polynomial
    let p = |t: f64| c(1.0 + t * t);
    let (a, b) = (c(0.4), c(0.8));
    let wb = |t: f64| frac_integrate(FracKind::W, b, p, &[t], &spec).unwrap()[0];
    let lhs = frac_integrate(FracKind::W, a, wb, &[1.3], &spec).unwrap()[0];
    let rhs = frac_integrate(FracKind::W, a + b, p, &[1.3], &spec).unwrap()[0];
    assert!((lhs - rhs).norm() < 1e-6);
    // D U_1 = I
    let hstep = 1e-4;
    let d = frac_integrate(FracKind::U, c(1.0), p, &[1.3 - hstep, 1.3 + hstep], &spec).unwrap();
    assert!(((d[1] - d[0]) / (2.0 * hstep) - p(1.3)).norm() < 1e-6);
    // Complex order reduces to the real case as Im -> 0
    let zc = frac_integrate(FracKind::U, Complex64::new(0.5, 1e-9), cosl, &[1.0], &spec).unwrap()[0];
    assert!((zc - uh[1]).norm() < 1e-7);
}

#[test]
fn fractional_cosine_family_two_paths() {
    let h = Hypergroup::mehler_fock();
    let spec = QuadSpec::with_tol(1e-12, 1e-11);
    let fam = random_family(77, 3, 0.5, (0.0, 2.0));
    for x in [0.5, 1.5, 3.0] {
        let a = frac_cosine_family(&fam, x, &spec).unwrap().matrix;
        let b = phi_a(&h, &fam, x, &spec).unwrap().matrix * c((PI / 2.0).sqrt());
        assert!(max_dev(&a, &b) < 1e-6);
    }
    let zero = cos_family_normal(&[c(0.0)], &CMat::identity(1, 1), 0.5).unwrap();
    let a = frac_cosine_family(&zero, 1.0, &spec).unwrap().matrix[(0, 0)];
    let p0 = legendre_conical(c(0.0), 1.0).unwrap() * (PI / 2.0).sqrt();
    assert!((a - p0).norm() < 1e-8);
}

#[test]
fn kunze_stein_norm() {
    let h = Hypergroup::jacobi_sl2c();
    let spec = QuadSpec::with_tol(1e-12, 1e-10);
    let f = Builtin::Bump { center: 1.0, radius: 0.8 };
    let lam: Vec<Complex64> = (0..=200).map(|k| c(0.05 * k as f64)).collect();
    let sup = forward(&h, &f, &lam, &ForwardOptions::default())
        .unwrap()
        .values
        .iter()
        .fold(0.0f64, |m, v| m.max(v.norm()));
    let gap = |level| (lambda_op(&h, &f, &lambda_grid(level), &spec).unwrap().norm() - sup).abs() / sup;
    let (g0, g1) = (gap(0), gap(1));
    assert!(g1 < g0 && g1 < 0.02, "{g0} {g1}");
}
