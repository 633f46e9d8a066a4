use hgcalc::functions::Builtin;
use hgcalc::hypergroup::Hypergroup;
use hgcalc::io::*;
use hgcalc::transforms::{forward, plancherel_rule, ForwardOptions, TransformTable};
use num_complex::Complex64;

#[test]
fn transform_table_csv_is_bit_exact() {
    let h = Hypergroup::jacobi_sl2c();
    let lam = [Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.3), Complex64::new(3.0, -0.7)];
    let t = forward(&h, &Builtin::Gauss { center: 0.0, width: 1.0 }, &lam, &ForwardOptions::default()).unwrap();
    let meta = Metadata::new("f^(lambda) = int f phi_lambda m", "3 points").tol("abs", 1e-13).seed(1);
    let csv = transform_table_csv(&t, &meta).to_string().unwrap();
    let back = transform_table_from_csv(&CsvTable::read(csv.as_bytes()).unwrap()).unwrap();
    assert_eq!(back, t);
    for (a, b) in back.values.iter().zip(&t.values) {
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }
    // Writing twice gives the same bytes.
    assert_eq!(csv, transform_table_csv(&back, &meta).to_string().unwrap());
}

#[test]
fn weighted_table_and_json() {
    let h = Hypergroup::mehler_fock();
    let (l, w) = plancherel_rule(&h, 4.0, 2, 4);
    let t = TransformTable::from_closed_form(&h, "sech(x/2)", &l, |l| 2.0 / l / (std::f64::consts::PI * l).sinh())
        .with_weights(w);
    let meta = Metadata::new("closed form", "GL 2x4 on [0, 4]");
    let c = transform_table_csv(&t, &meta);
    assert_eq!(c.header.last().unwrap(), "weight");
    assert_eq!(transform_table_from_csv(&CsvTable::read(c.to_string().unwrap().as_bytes()).unwrap()).unwrap(), t);

    let js = json_document(&meta, &t).unwrap();
    let v: serde_json::Value = serde_json::from_str(&js).unwrap();
    let back: TransformTable = serde_json::from_value(v["data"].clone()).unwrap();
    assert_eq!(back, t);
    assert_eq!(v["meta"]["anchor"], "closed form");
}

#[test]
fn volume_table_reader() {
    let text = "# anchor: user table\r\nr,sigma,m\r\n1,2,3\r\n2,4,5\r\n";
    assert_eq!(read_volume_table(text.as_bytes()).unwrap(), vec![(1.0, 2.0, 3.0), (2.0, 4.0, 5.0)]);
    assert!(read_volume_table("r,s\n1,2\n".as_bytes()).is_err());
}
