//! `hgcalc`: characters, transforms, operator calculi, geometry tables and
//! the acceptance suite from the command line.
//!
//! Exit codes: 0 success, 1 usage or bad input, 2 numerical failure (or a
//! failed acceptance criterion).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hgcalc::functions::{Builtin, RadialFunction};
use hgcalc::geom::{check_volume_table, log_concavity_witness, SpaceForm};
use hgcalc::hypergroup::{Hypergroup, InstanceKind};
use hgcalc::io::{fmt_f64, json_document, read_volume_table, CsvTable, MatrixJson, Metadata};
use hgcalc::opcalc::{
    cos_family_dense, cos_family_normal, homomorphism_residual, norm2, phi_a, t_a, CosineFamily, FnInput,
};
use hgcalc::quad::{Decay, QuadSpec};
use hgcalc::rng::{random_strip_spectrum, random_unitary, seeded};
use hgcalc::slode::solve_character_on;
use hgcalc::specfun::{gamma, gamma_complex};
use hgcalc::transforms::{
    forward, inverse_plancherel, mellin_forward, mellin_inverse, plancherel_rule, ForwardOptions, MellinInverseOptions,
};
use hgcalc::verify::{self, VerifyConfig};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

#[derive(Parser, Debug)]
#[command(name = "hgcalc", version, about = "Hypergroup transforms and operator calculi")]
struct Cli {
    /// JSON object of default option values (keys as the long flag names
    /// with `_` for `-`); flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Tabulate characters from the closed form and from the ODE.
    Characters(CharArgs),
    /// Forward or inverse transforms (hypergroup or Mellin).
    Transform(TransformArgs),
    /// Cosine family of a matrix: phi_A sweep, T_A(f), homomorphism residual.
    Opcalc(OpArgs),
    /// Run the acceptance criteria and write a JSON report.
    Verify(VerifyArgs),
    /// Sphere areas and ball volumes in hyperbolic space, and their checks.
    Geom(GeomArgs),
}

#[derive(Args, Debug)]
struct CharArgs {
    #[arg(long)]
    instance: Option<String>,
    /// Comma-separated spectral parameters.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    lambda: Vec<f64>,
    #[arg(long)]
    xmin: Option<f64>,
    #[arg(long)]
    xmax: Option<f64>,
    /// Number of x nodes (uniform, endpoints included).
    #[arg(long)]
    nx: Option<usize>,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[arg(long)]
    instance: Option<String>,
    /// Built-in function name.
    #[arg(long = "f")]
    function: Option<String>,
    /// Index of `h_N`.
    #[arg(long = "N")]
    n_index: Option<i32>,
    /// Comma-separated spectral parameters (tau for `--mellin`).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    lambda: Vec<f64>,
    /// Mellin transform on the imaginary axis instead of a hypergroup.
    #[arg(long)]
    mellin: bool,
    /// Round trip: forward on a Plancherel rule, then invert on an x grid.
    #[arg(long)]
    inverse: bool,
    /// Spectral cutoff for the inverse.
    #[arg(long)]
    lmax: Option<f64>,
    #[arg(long)]
    xmax: Option<f64>,
    #[arg(long)]
    nx: Option<usize>,
}

#[derive(Args, Debug)]
struct OpArgs {
    #[arg(long)]
    instance: Option<String>,
    /// Generator as JSON (`rows`, `cols`, row-major `[re, im]` pairs).
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Size of the random normal generator.
    #[arg(long)]
    n: Option<usize>,
    /// Strip half-width for the random spectrum (default 0.9 omega0).
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long = "f")]
    function: Option<String>,
    #[arg(long = "g")]
    second: Option<String>,
    #[arg(long)]
    xmax: Option<f64>,
    #[arg(long)]
    nx: Option<usize>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Criterion names or numbers (comma-separated).
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    /// Scale every Plancherel constant by this factor (fault injection).
    #[arg(long)]
    corrupt_plancherel: Option<f64>,
}

#[derive(Args, Debug)]
struct GeomArgs {
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    nr: Option<usize>,
    /// Log-concavity witnesses on (0, rmax] instead of the table.
    #[arg(long)]
    witness: bool,
    /// Check a user table with columns r, sigma, m.
    #[arg(long)]
    check: Option<PathBuf>,
}

enum Fail {
    Usage(String),
    Numeric(String),
}

impl From<hgcalc::Error> for Fail {
    fn from(e: hgcalc::Error) -> Self {
        if e.is_numeric() {
            Fail::Numeric(e.to_string())
        } else {
            Fail::Usage(e.to_string())
        }
    }
}

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Self {
        Fail::Usage(e.to_string())
    }
}

type Res<T> = std::result::Result<T, Fail>;

fn usage(msg: impl Into<String>) -> Fail {
    Fail::Usage(msg.into())
}

/// Option values from the config file.
struct Defaults(Map<String, Value>);

impl Defaults {
    fn load(path: Option<&Path>) -> Res<Self> {
        let Some(p) = path else { return Ok(Self(Map::new())) };
        let text = fs::read_to_string(p).map_err(|e| usage(format!("config {}: {e}", p.display())))?;
        match serde_json::from_str(&text) {
            Ok(Value::Object(m)) => Ok(Self(m)),
            Ok(_) => Err(usage("config must be a JSON object")),
            Err(e) => Err(usage(format!("config {}: {e}", p.display()))),
        }
    }

    fn f64(&self, flag: Option<f64>, key: &str, default: f64) -> Res<f64> {
        match (flag, self.0.get(key)) {
            (Some(v), _) => Ok(v),
            (None, Some(v)) => v.as_f64().ok_or_else(|| usage(format!("config `{key}` must be a number"))),
            (None, None) => Ok(default),
        }
    }

    fn u64(&self, flag: Option<u64>, key: &str, default: u64) -> Res<u64> {
        match (flag, self.0.get(key)) {
            (Some(v), _) => Ok(v),
            (None, Some(v)) => v.as_u64().ok_or_else(|| usage(format!("config `{key}` must be an integer"))),
            (None, None) => Ok(default),
        }
    }

    fn string(&self, flag: Option<String>, key: &str, default: &str) -> Res<String> {
        match (flag, self.0.get(key)) {
            (Some(v), _) => Ok(v),
            (None, Some(v)) => {
                v.as_str().map(str::to_string).ok_or_else(|| usage(format!("config `{key}` must be a string")))
            }
            (None, None) => Ok(default.to_string()),
        }
    }

    fn list(&self, flag: Vec<f64>, key: &str, default: &[f64]) -> Res<Vec<f64>> {
        if !flag.is_empty() {
            return Ok(flag);
        }
        match self.0.get(key) {
            Some(Value::Array(a)) => {
                a.iter().map(|v| v.as_f64().ok_or_else(|| usage(format!("config `{key}` must hold numbers")))).collect()
            }
            Some(_) => Err(usage(format!("config `{key}` must be an array"))),
            None => Ok(default.to_vec()),
        }
    }
}

struct Common {
    out: Option<PathBuf>,
    format: Format,
    seed: u64,
    spec: QuadSpec,
}

fn emit(common: &Common, text: &str) -> Res<()> {
    match &common.out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_table(common: &Common, t: &CsvTable) -> Res<()> {
    match common.format {
        Format::Csv => emit(common, &t.to_string()?),
        Format::Json => {
            let rows: Vec<Value> = t
                .rows
                .iter()
                .map(|r| {
                    let obj: Map<String, Value> = t
                        .header
                        .iter()
                        .zip(r)
                        .map(|(h, v)| {
                            let val = v.parse::<f64>().map(|x| json!(x)).unwrap_or_else(|_| json!(v));
                            (h.clone(), val)
                        })
                        .collect();
                    Value::Object(obj)
                })
                .collect();
            emit(common, &(json_document(&t.meta, &rows)? + "\n"))
        }
    }
}

fn uniform(lo: f64, hi: f64, n: usize) -> Res<Vec<f64>> {
    if n == 0 {
        return Err(usage("grid is empty"));
    }
    if !(lo.is_finite() && hi.is_finite() && hi >= lo) {
        return Err(usage(format!("bad grid bounds [{lo}, {hi}]")));
    }
    Ok(if n == 1 { vec![lo] } else { (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect() })
}

fn closed_form_label(h: &Hypergroup) -> String {
    match h.kind {
        InstanceKind::Multiplicative => "x^{i lambda}".into(),
        InstanceKind::BesselKingman { gamma } => format!("normalized Bessel j_{gamma}(lambda x)"),
        InstanceKind::JacobiSl2c => "sin(lambda x) / (lambda sinh x)".into(),
        InstanceKind::MehlerFock => "P_{i lambda - 1/2}(cosh x)".into(),
    }
}

fn cmd_characters(a: CharArgs, d: &Defaults, common: &Common) -> Res<()> {
    let h = Hypergroup::new(&d.string(a.instance, "instance", "jacobi_sl2c")?)?;
    let lambdas = d.list(a.lambda, "lambda", &[1.0])?;
    if lambdas.is_empty() {
        return Err(usage("lambda grid is empty"));
    }
    let xmin = d.f64(a.xmin, "xmin", 0.0)?;
    let xmax = d.f64(a.xmax, "xmax", 5.0)?;
    let nx = d.u64(a.nx.map(|v| v as u64), "nx", 101)? as usize;
    let xs = uniform(xmin, xmax, nx)?;
    if h.kind == InstanceKind::Multiplicative && xmin <= 0.0 {
        return Err(usage("multiplicative characters need x > 0"));
    }
    let ode_tol = common.spec.rel_tol.max(1e-12);
    let meta = Metadata::new(
        format!(
            "phi_lambda(x) on {}: closed form {} and regular solution of the character ODE",
            h.name(),
            closed_form_label(&h)
        ),
        format!("x: {nx} uniform nodes on [{xmin}, {xmax}]; lambda: {lambdas:?}"),
    )
    .tol("ode", ode_tol)
    .seed(common.seed);
    let mut t = CsvTable::new(meta, &["x", "lambda", "closed_re", "closed_im", "ode_re", "ode_im", "disagreement"]);
    for &l in &lambdas {
        let lc = Complex64::new(l, 0.0);
        let ode = match h.sl_weight() {
            Some(w) => Some(solve_character_on(&w, lc, &xs, ode_tol)?),
            None => None,
        };
        for (i, &x) in xs.iter().enumerate() {
            let cf = h.character(lc, x)?;
            let mut row = vec![fmt_f64(x), fmt_f64(l), fmt_f64(cf.re), fmt_f64(cf.im)];
            match &ode {
                Some(s) => {
                    let v = s.phi[i];
                    row.extend([fmt_f64(v.re), fmt_f64(v.im), fmt_f64((v - cf).norm())]);
                }
                None => row.extend([String::new(), String::new(), String::new()]),
            }
            t.rows.push(row);
        }
    }
    emit_table(common, &t)
}

fn csch(x: f64) -> f64 {
    1.0 / x.sinh()
}

/// Closed-form transform of a built-in function, when one is known.
fn reference(h: &Hypergroup, f: &Builtin, l: f64) -> Option<f64> {
    match (h.kind, *f) {
        (InstanceKind::MehlerFock, Builtin::SechHalf { power: 1 }) => Some(2.0 / l * csch(PI * l)),
        (InstanceKind::MehlerFock, Builtin::SechHalf { power: 3 }) => Some(8.0 * l * csch(PI * l)),
        (InstanceKind::MehlerFock, Builtin::SechHalf { power: 5 }) => Some(32.0 / 9.0 * l * (1.0 + l * l) * csch(PI * l)),
        (InstanceKind::JacobiSl2c, Builtin::Gauss { center, width }) if center == 0.0 && width == 1.0 => {
            Some(PI.sqrt() / (2.0 * l) * ((1.0 - l * l) / 4.0).exp() * (l / 2.0).sin())
        }
        (InstanceKind::BesselKingman { gamma: g }, Builtin::Gauss { center, width }) if center == 0.0 && width == 1.0 => {
            gamma(g + 1.0).ok().map(|v| v / 2.0 * (-l * l / 4.0).exp())
        }
        (InstanceKind::Multiplicative, Builtin::HN { n }) => Some(1.0 / (PI * l / (2.0 * n as f64)).cosh()),
        _ => None,
    }
}

fn mellin_reference(f: &Builtin, s: Complex64) -> Option<Complex64> {
    match *f {
        Builtin::HN { n } => Some(1.0 / (PI * s / (2.0 * n as f64)).cos()),
        Builtin::SqrtXJ0 => {
            let w = s + 0.5;
            Some((w - 1.0).expf(2.0) * gamma_complex(w / 2.0).ok()? / gamma_complex(1.0 - w / 2.0).ok()?)
        }
        _ => None,
    }
}

fn cmd_transform(a: TransformArgs, d: &Defaults, common: &Common) -> Res<()> {
    let fname = d.string(a.function, "f", "sech_half")?;
    let n_index = d.u64(a.n_index.map(|v| v as u64), "N", 2)? as i32;
    let f = Builtin::from_name(&fname, n_index)?;
    let spec = common.spec;
    if a.mellin {
        return transform_mellin(&a.lambda, a.inverse, a.xmax, a.nx, &f, d, common);
    }
    let h = Hypergroup::new(&d.string(a.instance, "instance", "mehler_fock")?)?;
    let opts = ForwardOptions { spec, ..Default::default() };
    if a.inverse {
        let lmax = d.f64(a.lmax, "lmax", 40.0)?;
        let xmax = d.f64(a.xmax, "xmax", 5.0)?;
        let nx = d.u64(a.nx.map(|v| v as u64), "nx", 50)? as usize;
        if !(lmax > 0.0) {
            return Err(usage("lmax must be positive"));
        }
        let panels = (2.0 * lmax).ceil() as usize;
        let (l, w) = plancherel_rule(&h, lmax, panels, 8);
        let lc: Vec<Complex64> = l.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let table = forward(&h, &f, &lc, &opts)?.with_weights(w);
        let xs: Vec<f64> = uniform(0.0, xmax, nx + 1)?.into_iter().skip(1).collect();
        let back = inverse_plancherel(&h, &table, &xs)?;
        let meta = Metadata::new(
            format!("f(x) = c_H int f^(lambda) phi_lambda(x) pi_0(lambda) d lambda on {}, f = {}", h.name(), f.describe()),
            format!("lambda: Gauss-Legendre {panels} panels x 8 on [0, {lmax}]; x: {nx} uniform nodes on (0, {xmax}]"),
        )
        .tol("abs", spec.abs_tol)
        .tol("rel", spec.rel_tol)
        .seed(common.seed)
        .extra("provenance", table.provenance.clone());
        let mut t = CsvTable::new(meta, &["x", "f", "reconstructed_re", "reconstructed_im", "abs_err"]);
        for (v, &x) in back.iter().zip(&xs) {
            let fx = f.value(x);
            t.push_numbers(&[x, fx, v.re, v.im, (v - fx).norm()]);
        }
        return emit_table(common, &t);
    }
    let lambdas = d.list(a.lambda, "lambda", &[0.5, 1.0, 2.0, 4.0])?;
    if lambdas.is_empty() {
        return Err(usage("lambda grid is empty"));
    }
    let lc: Vec<Complex64> = lambdas.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let table = forward(&h, &f, &lc, &opts)?;
    let meta = Metadata::new(
        format!("f^(lambda) = int_0^inf f(x) phi_lambda(x) m(x) dx on {}, f = {}", h.name(), f.describe()),
        format!("lambda: {lambdas:?}"),
    )
    .tol("abs", spec.abs_tol)
    .tol("rel", spec.rel_tol)
    .seed(common.seed)
    .extra("provenance", table.provenance.clone());
    let mut t = CsvTable::new(meta, &["lambda", "value_re", "value_im", "closed_form", "rel_err"]);
    for (v, &l) in table.values.iter().zip(&lambdas) {
        let mut row = vec![fmt_f64(l), fmt_f64(v.re), fmt_f64(v.im)];
        match reference(&h, &f, l) {
            Some(r) => row.extend([fmt_f64(r), fmt_f64((v - r).norm() / r.abs())]),
            None => row.extend([String::new(), String::new()]),
        }
        t.rows.push(row);
    }
    emit_table(common, &t)
}

fn transform_mellin(
    lambda: &[f64],
    inverse: bool,
    xmax: Option<f64>,
    nx: Option<usize>,
    f: &Builtin,
    d: &Defaults,
    common: &Common,
) -> Res<()> {
    let spec = common.spec;
    if inverse {
        let Builtin::HN { n } = *f else {
            return Err(usage("the Mellin inverse runs on h_N, whose transform is known in closed form"));
        };
        let xmax = d.f64(xmax, "xmax", 3.0)?;
        let nx = d.u64(nx.map(|v| v as u64), "nx", 30)? as usize;
        let xs: Vec<f64> = uniform(0.0, xmax, nx + 1)?.into_iter().skip(1).collect();
        let opts = MellinInverseOptions::default();
        let back = mellin_inverse(|s| 1.0 / (PI * s / (2.0 * n as f64)).cos(), &xs, &opts)?;
        let meta = Metadata::new(
            format!("f(x) = (1/2 pi i) int f*(s) x^{{-s}} ds on Re s = {}, f* = sec(pi s/{})", opts.sigma, 2 * n),
            format!("x: {nx} uniform nodes on (0, {xmax}]; tau cutoff ladder {}..{}", opts.t0, opts.t_max),
        )
        .tol("abs", opts.spec.abs_tol)
        .tol("rel", opts.spec.rel_tol)
        .seed(common.seed);
        let mut t = CsvTable::new(meta, &["x", "f", "reconstructed_re", "reconstructed_im", "abs_err"]);
        for (v, &x) in back.iter().zip(&xs) {
            let fx = f.value(x);
            t.push_numbers(&[x, fx, v.re, v.im, (v - fx).norm()]);
        }
        return emit_table(common, &t);
    }
    let taus = d.list(lambda.to_vec(), "lambda", &[0.5, 1.0, 2.0])?;
    if taus.is_empty() {
        return Err(usage("tau grid is empty"));
    }
    let s: Vec<Complex64> = taus.iter().map(|&t| Complex64::new(0.0, t)).collect();
    let decay = if matches!(f, Builtin::SqrtXJ0) { Decay::Oscillatory } else { Decay::Exponential };
    let mspec = if decay == Decay::Oscillatory { QuadSpec::with_tol(1e-8, 1e-6) } else { spec };
    let table = mellin_forward(|x| f.value(x), &s, decay, &mspec)?;
    let meta = Metadata::new(format!("f*(s) = int_0^inf f(x) x^{{s-1}} dx on s = i tau, f = {}", f.describe()), format!("tau: {taus:?}"))
        .tol("abs", mspec.abs_tol)
        .tol("rel", mspec.rel_tol)
        .seed(common.seed)
        .extra("provenance", table.provenance.clone());
    let mut t = CsvTable::new(meta, &["s_re", "s_im", "value_re", "value_im", "closed_re", "closed_im", "rel_err"]);
    for (v, s) in table.values.iter().zip(&s) {
        let mut row = vec![fmt_f64(s.re), fmt_f64(s.im), fmt_f64(v.re), fmt_f64(v.im)];
        match mellin_reference(f, *s) {
            Some(r) => row.extend([fmt_f64(r.re), fmt_f64(r.im), fmt_f64((v - r).norm() / r.norm())]),
            None => row.extend([String::new(), String::new(), String::new()]),
        }
        t.rows.push(row);
    }
    emit_table(common, &t)
}

fn cmd_opcalc(a: OpArgs, d: &Defaults, common: &Common) -> Res<()> {
    let h = Hypergroup::new(&d.string(a.instance, "instance", "jacobi_sl2c")?)?;
    let spec = common.spec;
    let (fam, source): (CosineFamily, String) = match a.matrix {
        Some(p) => {
            let text = fs::read_to_string(&p).map_err(|e| usage(format!("matrix {}: {e}", p.display())))?;
            let m: MatrixJson = serde_json::from_str(&text).map_err(|e| usage(format!("matrix {}: {e}", p.display())))?;
            let m = m.to_matrix()?;
            if m.nrows() != m.ncols() || m.nrows() == 0 {
                return Err(usage("generator must be a nonempty square matrix"));
            }
            (cos_family_dense(&m, 10.0)?, format!("file {}", p.display()))
        }
        None => {
            let n = d.u64(a.n.map(|v| v as u64), "n", 4)? as usize;
            if n == 0 {
                return Err(usage("matrix size must be positive"));
            }
            let omega = d.f64(a.omega, "omega", 0.9 * h.omega0())?;
            let mut rng = seeded(common.seed);
            let eig = random_strip_spectrum(n, omega, (0.2, 2.5), &mut rng);
            let u = random_unitary(n, &mut rng);
            (
                cos_family_normal(&eig, &u, omega)?,
                format!("random normal {n}x{n}, spectrum Re in [0.2, 2.5], |Im| <= {omega}"),
            )
        }
    };
    let f = Builtin::from_name(&d.string(a.function, "f", "bump")?, 2)?;
    let g = Builtin::from_name(&d.string(a.second, "g", "bump")?, 2)?;
    let xmax = d.f64(a.xmax, "xmax", 8.0)?;
    let nx = d.u64(a.nx.map(|v| v as u64), "nx", 16)? as usize;
    let xs: Vec<f64> = uniform(0.0, xmax, nx + 1)?.into_iter().skip(1).collect();

    let mut sweep = Vec::with_capacity(xs.len());
    for &x in &xs {
        sweep.push((x, norm2(&phi_a(&h, &fam, x, &spec)?.matrix)));
    }
    let bound = fam.kappa * h.m0();
    let ta = t_a(&h, &fam, FnInput::Evaluator(&f), 1.0, &spec)?;
    let residual = if f.support_end().is_finite() && g.support_end().is_finite() {
        Some(homomorphism_residual(&h, &fam, &f, &g, &spec)?)
    } else {
        None
    };
    let meta = Metadata::new(
        format!(
            "phi_A(x) = int cos(tA) tau_x(dt), T_A(f) = int f phi_A m and T_A(f*g) - T_A(f) T_A(g) on {}",
            h.name()
        ),
        format!("x: {nx} uniform nodes on (0, {xmax}]"),
    )
    .tol("abs", spec.abs_tol)
    .tol("rel", spec.rel_tol)
    .seed(common.seed)
    .extra("generator", source)
    .extra("method", fam.method_tag.clone())
    .extra("f", f.describe())
    .extra("g", g.describe());
    match common.format {
        Format::Json => {
            let payload = json!({
                "family": {
                    "n": fam.n,
                    "kappa": fam.kappa,
                    "omega0": fam.omega0,
                    "certified": fam.certified,
                    "omega0_fit_rms": fam.omega0_fit_rms,
                },
                "generator": MatrixJson::from_matrix(&fam.generator()),
                "bound_kappa_m0": bound,
                "phi_a_sweep": sweep.iter().map(|(x, n)| json!({"x": x, "norm": n})).collect::<Vec<_>>(),
                "sup_phi_a_norm": sweep.iter().map(|s| s.1).fold(0.0, f64::max),
                "t_a_f": MatrixJson::from_matrix(&ta.matrix),
                "homomorphism_residual": residual,
            });
            emit(common, &(json_document(&meta, &payload)? + "\n"))
        }
        Format::Csv => {
            let mut t = CsvTable::new(meta.extra("bound_kappa_m0", fmt_f64(bound)), &["quantity", "i", "j", "x", "re", "im"]);
            let blank = String::new;
            for (x, n) in &sweep {
                t.rows.push(vec!["phi_a_norm".into(), blank(), blank(), fmt_f64(*x), fmt_f64(*n), blank()]);
            }
            for i in 0..ta.matrix.nrows() {
                for j in 0..ta.matrix.ncols() {
                    let z = ta.matrix[(i, j)];
                    t.rows.push(vec!["t_a_f".into(), i.to_string(), j.to_string(), blank(), fmt_f64(z.re), fmt_f64(z.im)]);
                }
            }
            if let Some(r) = residual {
                t.rows.push(vec!["homomorphism_residual".into(), blank(), blank(), blank(), fmt_f64(r), blank()]);
            }
            emit(common, &t.to_string()?)
        }
    }
}

fn cmd_verify(a: VerifyArgs, d: &Defaults, common: &Common) -> Res<bool> {
    let mut only = a.only;
    if only.is_empty() {
        if let Some(Value::Array(v)) = d.0.get("only") {
            only = v.iter().filter_map(|s| s.as_str().map(str::to_string)).collect();
        }
    }
    verify::select(&only)?;
    let factor = match (a.corrupt_plancherel, d.0.get("corrupt_plancherel")) {
        (Some(v), _) => Some(v),
        (None, Some(v)) => Some(v.as_f64().ok_or_else(|| usage("config `corrupt_plancherel` must be a number"))?),
        (None, None) => None,
    };
    let cfg = VerifyConfig { seed: common.seed, only, plancherel_factor: factor };
    let report = verify::run(&cfg)?;
    for o in &report.outcomes {
        eprintln!("{} {:>2} {}", if o.pass { "PASS" } else { "FAIL" }, o.id, o.name);
    }
    if !report.all_pass {
        eprintln!("failed criteria: {}", report.failed.join(", "));
    }
    emit(common, &(report.to_json() + "\n"))?;
    Ok(report.all_pass)
}

fn cmd_geom(a: GeomArgs, d: &Defaults, common: &Common) -> Res<()> {
    if let Some(p) = a.check {
        let file = fs::File::open(&p).map_err(|e| usage(format!("table {}: {e}", p.display())))?;
        let rows = read_volume_table(file)?;
        let rep = check_volume_table(&rows)?;
        let meta = Metadata::new(
            "checks of a (r, sigma, m) table: sigma = m', (log m)'' <= 0, sigma/m decreasing, inf sigma/m",
            format!("user table {} ({} rows)", p.display(), rows.len()),
        )
        .seed(common.seed);
        return emit(common, &(json_document(&meta, &rep)? + "\n"));
    }
    let n = d.u64(a.n.map(u64::from), "n", 3)? as u32;
    let kappa = d.f64(a.kappa, "kappa", -1.0)?;
    let rmax = d.f64(a.rmax, "rmax", 6.0)?;
    let nr = d.u64(a.nr.map(|v| v as u64), "nr", 60)? as usize;
    let sf = SpaceForm::new(n, kappa)?;
    let rs: Vec<f64> = uniform(0.0, rmax, nr + 1)?.into_iter().skip(1).collect();
    if a.witness {
        let tol = 1e-8;
        let rep = log_concavity_witness(n, &rs, tol)?;
        let meta = Metadata::new(
            "h_0 = n cosh x int_0^x sinh^n - sinh^{n+1} x <= 0, h_1 = n int_0^x sinh^n - cosh x sinh^{n-1} x <= 0, (log m)'' <= 0",
            format!("x: {nr} uniform nodes on (0, {rmax}]"),
        )
        .tol("concavity", tol)
        .seed(common.seed);
        return emit(common, &(json_document(&meta, &rep)? + "\n"));
    }
    let meta = Metadata::new(
        format!("sigma(r) = n pi^(n/2)/Gamma(n/2+1) (sinh(r sqrt(-kappa))/sqrt(-kappa))^(n-1), m(r) = int_0^r sigma; n = {n}, kappa = {kappa}"),
        format!("r: {nr} uniform nodes on (0, {rmax}]"),
    )
    .tol("abs", 1e-16)
    .tol("rel", 1e-14)
    .seed(common.seed);
    let mut t = CsvTable::new(meta, &["r", "sigma", "m", "log_slope"]);
    for &r in &rs {
        t.push_numbers(&[r, sf.sigma(r), sf.volume(r), sf.log_volume_slope(r)]);
    }
    emit_table(common, &t)
}

fn run(cli: Cli) -> Res<bool> {
    let d = Defaults::load(cli.config.as_deref())?;
    let format = match cli.format {
        Some(f) => f,
        None => match d.0.get("format").and_then(Value::as_str) {
            None => {
                if matches!(cli.cmd, Cmd::Opcalc(_)) {
                    Format::Json
                } else {
                    Format::Csv
                }
            }
            Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(other) => return Err(usage(format!("unknown format `{other}`"))),
        },
    };
    let out = cli.out.or_else(|| d.0.get("out").and_then(Value::as_str).map(PathBuf::from));
    let common = Common {
        out,
        format,
        seed: d.u64(cli.seed, "seed", VerifyConfig::default().seed)?,
        spec: QuadSpec::with_tol(d.f64(cli.abs_tol, "abs_tol", 1e-12)?, d.f64(cli.rel_tol, "rel_tol", 1e-10)?),
    };
    common.spec.validate()?;
    match cli.cmd {
        Cmd::Characters(a) => cmd_characters(a, &d, &common).map(|_| true),
        Cmd::Transform(a) => cmd_transform(a, &d, &common).map(|_| true),
        Cmd::Opcalc(a) => cmd_opcalc(a, &d, &common).map(|_| true),
        Cmd::Verify(a) => cmd_verify(a, &d, &common),
        Cmd::Geom(a) => cmd_geom(a, &d, &common).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Fail::Numeric(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(2)
        }
    }
}
