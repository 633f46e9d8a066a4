use std::fs;
use std::process::{Command, Output};

use hgcalc::io::{parse_f64, read_volume_table, CsvTable};

fn hgcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hgcalc")).args(args).output().expect("spawn hgcalc")
}

fn table(o: &Output) -> CsvTable {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    CsvTable::read(o.stdout.as_slice()).unwrap()
}

fn tmp(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("hgcalc-cli-{}-{name}", std::process::id()))
}

#[test]
fn characters_closed_form_and_ode_agree() {
    for inst in ["bessel_kingman:0.5", "jacobi_sl2c", "mehler_fock"] {
        let t = table(&hgcalc(&["characters", "--instance", inst, "--lambda", "0.5,3", "--xmax", "4", "--nx", "9"]));
        assert_eq!(t.rows.len(), 18);
        assert!(t.meta.anchor.contains(inst));
        let worst = t.column("disagreement").unwrap().into_iter().fold(0.0, f64::max);
        assert!(worst < 1e-8, "{inst}: {worst}");
    }
}

#[test]
fn multiplicative_characters_have_no_ode_column() {
    let t = table(&hgcalc(&["characters", "--instance", "multiplicative", "--lambda", "2", "--xmin", "0.5", "--xmax", "2", "--nx", "3"]));
    let j = t.header.iter().position(|h| h == "ode_re").unwrap();
    assert!(t.rows.iter().all(|r| r[j].is_empty()));
    let re = t.column("closed_re").unwrap();
    let x = t.column("x").unwrap();
    for (v, x) in re.iter().zip(&x) {
        assert!((v - (2.0 * x.ln()).cos()).abs() < 1e-14);
    }
    assert_eq!(hgcalc(&["characters", "--instance", "multiplicative", "--lambda", "1"]).status.code(), Some(1));
}

#[test]
fn transform_rows_carry_closed_forms() {
    let t = table(&hgcalc(&["transform", "--f", "sech3_half", "--lambda", "0.5,1,2"]));
    assert!(t.meta.extra.contains_key("provenance"));
    for e in t.column("rel_err").unwrap() {
        assert!(e < 1e-9, "{e}");
    }
    let t = table(&hgcalc(&["transform", "--mellin", "--f", "h_N", "--N", "3", "--lambda", "0.25,1.5"]));
    for e in t.column("rel_err").unwrap() {
        assert!(e < 1e-9, "{e}");
    }
}

#[test]
fn inverse_round_trips() {
    let t = table(&hgcalc(&["transform", "--instance", "bessel_kingman:0", "--f", "gauss", "--inverse", "--lmax", "20", "--xmax", "3", "--nx", "6"]));
    for e in t.column("abs_err").unwrap() {
        assert!(e < 1e-8, "{e}");
    }
    let t = table(&hgcalc(&["transform", "--mellin", "--f", "h_N", "--N", "2", "--inverse", "--xmax", "4", "--nx", "4"]));
    for e in t.column("abs_err").unwrap() {
        assert!(e < 1e-7, "{e}");
    }
}

#[test]
fn config_supplies_defaults_and_flags_override() {
    let cfg = tmp("cfg.json");
    fs::write(&cfg, r#"{"instance": "jacobi_sl2c", "lambda": [1.5], "nx": 4, "xmax": 2.0}"#).unwrap();
    let c = cfg.to_str().unwrap();
    let t = table(&hgcalc(&["--config", c, "characters"]));
    assert_eq!(t.rows.len(), 4);
    assert!(t.meta.anchor.contains("jacobi_sl2c"));
    let t = table(&hgcalc(&["--config", c, "characters", "--nx", "2", "--instance", "mehler_fock"]));
    assert_eq!(t.rows.len(), 2);
    assert!(t.meta.anchor.contains("mehler_fock"));
    fs::write(&cfg, r#"{"nx": "four"}"#).unwrap();
    assert_eq!(hgcalc(&["--config", c, "characters"]).status.code(), Some(1));
    fs::remove_file(&cfg).ok();
}

#[test]
fn json_output_and_out_file() {
    let out = tmp("geom.json");
    let o = hgcalc(&["--format", "json", "--out", out.to_str().unwrap(), "geom", "--n", "2", "--nr", "3"]);
    assert!(o.status.success() && o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["meta"]["seed"], 20240601);
    let rows = v["data"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let r = rows[2]["r"].as_f64().unwrap();
    let m = rows[2]["m"].as_f64().unwrap();
    assert!((m - 2.0 * std::f64::consts::PI * (r.cosh() - 1.0)).abs() < 1e-10 * m);
    fs::remove_file(&out).ok();
}

#[test]
fn geom_table_feeds_the_checker() {
    let path = tmp("vol.csv");
    let o = hgcalc(&["--out", path.to_str().unwrap(), "geom", "--n", "4", "--rmax", "8", "--nr", "80"]);
    assert!(o.status.success());
    let rows = read_volume_table(fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(rows.len(), 80);
    let o = hgcalc(&["geom", "--check", path.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["data"]["ratio_decreasing"], true);
    assert!(v["data"]["max_log_m_second"].as_f64().unwrap() <= 0.0);
    assert!((v["data"]["tail_ratio"].as_f64().unwrap() - 3.0).abs() < 0.05);
    fs::remove_file(&path).ok();
}

#[test]
fn witness_reports_pass() {
    let o = hgcalc(&["geom", "--n", "5", "--witness", "--rmax", "10", "--nr", "20"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["data"]["pass"], true);
}

#[test]
fn opcalc_from_matrix_file() {
    let path = tmp("a.json");
    fs::write(&path, r#"{"rows": 2, "cols": 2, "data": [[1.0, 0.1], [0.2, 0.0], [0.0, 0.0], [1.5, -0.1]]}"#).unwrap();
    let o = hgcalc(&["opcalc", "--instance", "jacobi_sl2c", "--matrix", path.to_str().unwrap(), "--nx", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["data"]["family"]["n"], 2);
    assert!(v["data"]["homomorphism_residual"].as_f64().unwrap() < 1e-8);
    fs::write(&path, r#"{"rows": 2, "cols": 3, "data": []}"#).unwrap();
    assert_eq!(hgcalc(&["opcalc", "--matrix", path.to_str().unwrap()]).status.code(), Some(1));
    fs::remove_file(&path).ok();
}

#[test]
fn opcalc_random_family_is_reproducible() {
    let args = ["--seed", "11", "opcalc", "--n", "3", "--nx", "2", "--format", "csv", "--f", "gauss", "--g", "gauss"];
    let a = hgcalc(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, hgcalc(&args).stdout);
    let t = CsvTable::read(a.stdout.as_slice()).unwrap();
    let bound = parse_f64(&t.meta.extra["bound_kappa_m0"]).unwrap();
    for r in t.rows.iter().filter(|r| r[0] == "phi_a_norm") {
        assert!(parse_f64(&r[4]).unwrap() <= bound * (1.0 + 1e-9));
    }
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(hgcalc(&["nosuch"]).status.code(), Some(1));
    assert_eq!(hgcalc(&["transform", "--f", "nosuch"]).status.code(), Some(1));
    assert_eq!(hgcalc(&["characters", "--instance", "bessel_kingman:-3"]).status.code(), Some(1));
    assert_eq!(hgcalc(&["verify", "--only", "nosuch"]).status.code(), Some(1));
    assert_eq!(hgcalc(&["geom", "--kappa", "1"]).status.code(), Some(1));
    assert_eq!(hgcalc(&["--help"]).status.code(), Some(0));
}
