//! CSV and JSON output with embedded run metadata.
//!
//! CSV files start with `# key: value` metadata lines, then a header row and
//! RFC-4180 records. Floats are written with 17 significant digits, which
//! round-trips every `f64` exactly.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opcalc::CMat;
use crate::transforms::TransformTable;

/// Name of the generator behind every random battery.
pub const RNG_NAME: &str = "ChaCha20 (rand_chacha), seed_from_u64";

/// What a file computes and under which settings.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct Metadata {
    /// Formula or statement the output evaluates.
    pub anchor: String,
    pub tolerances: BTreeMap<String, f64>,
    pub seed: Option<u64>,
    pub rng: Option<String>,
    pub grid: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, String>,
}

impl Metadata {
    pub fn new(anchor: impl Into<String>, grid: impl Into<String>) -> Self {
        Self { anchor: anchor.into(), grid: grid.into(), ..Default::default() }
    }

    pub fn tol(mut self, name: &str, v: f64) -> Self {
        self.tolerances.insert(name.to_string(), v);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self.rng = Some(RNG_NAME.to_string());
        self
    }

    pub fn extra(mut self, key: &str, v: impl Into<String>) -> Self {
        self.extra.insert(key.to_string(), v.into());
        self
    }

    fn lines(&self) -> Vec<(String, String)> {
        let mut out = vec![("anchor".to_string(), self.anchor.clone())];
        for (k, v) in &self.tolerances {
            out.push((format!("tol.{k}"), fmt_f64(*v)));
        }
        out.push(("seed".into(), self.seed.map_or("none".into(), |s| s.to_string())));
        out.push(("rng".into(), self.rng.clone().unwrap_or_else(|| "none".into())));
        out.push(("grid".into(), self.grid.clone()));
        for (k, v) in &self.extra {
            out.push((k.clone(), v.clone()));
        }
        out
    }

    fn from_lines(lines: &[(String, String)]) -> Result<Self> {
        let mut m = Metadata::default();
        for (k, v) in lines {
            match k.as_str() {
                "anchor" => m.anchor = v.clone(),
                "seed" => m.seed = if v == "none" { None } else { Some(parse_u64(v)?) },
                "rng" => m.rng = if v == "none" { None } else { Some(v.clone()) },
                "grid" => m.grid = v.clone(),
                _ => match k.strip_prefix("tol.") {
                    Some(t) => {
                        m.tolerances.insert(t.to_string(), parse_f64(v)?);
                    }
                    None => {
                        m.extra.insert(k.clone(), v.clone());
                    }
                },
            }
        }
        Ok(m)
    }
}

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

pub fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::InvalidInput(format!("not a number: `{s}`")))
}

fn parse_u64(s: &str) -> Result<u64> {
    s.trim().parse().map_err(|_| Error::InvalidInput(format!("not an integer: `{s}`")))
}

/// Metadata, header and string records.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub meta: Metadata,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(meta: Metadata, header: &[&str]) -> Self {
        Self { meta, header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|&x| fmt_f64(x)).collect());
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        for (k, v) in self.meta.lines() {
            // Metadata values stay on one line.
            writeln!(w, "# {k}: {}", v.replace(['\n', '\r'], " "))?;
        }
        let mut cw = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(w);
        cw.write_record(&self.header)?;
        for r in &self.rows {
            cw.write_record(r)?;
        }
        cw.flush()?;
        Ok(())
    }

    pub fn to_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::InvalidInput(e.to_string()))
    }

    pub fn read<R: Read>(mut r: R) -> Result<Self> {
        let mut text = String::new();
        r.read_to_string(&mut text)?;
        let mut meta_lines = Vec::new();
        let mut body_start = 0;
        for line in text.split_inclusive('\n') {
            let Some(rest) = line.strip_prefix('#') else { break };
            body_start += line.len();
            let rest = rest.trim_end_matches(['\r', '\n']).trim_start();
            if let Some((k, v)) = rest.split_once(": ") {
                meta_lines.push((k.to_string(), v.to_string()));
            }
        }
        let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(text[body_start..].as_bytes());
        let header = rd.headers()?.iter().map(str::to_string).collect();
        let rows = rd
            .records()
            .map(|r| r.map(|r| r.iter().map(str::to_string).collect()))
            .collect::<std::result::Result<_, _>>()?;
        Ok(Self { meta: Metadata::from_lines(&meta_lines)?, header, rows })
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let j = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidInput(format!("missing column `{name}`")))?;
        self.rows.iter().map(|r| parse_f64(r.get(j).map_or("", String::as_str))).collect()
    }
}

const TABLE_COLUMNS: [&str; 4] = ["lambda_re", "lambda_im", "value_re", "value_im"];

/// Transform table as CSV; provenance and descriptor go to the metadata.
pub fn transform_table_csv(t: &TransformTable, meta: &Metadata) -> CsvTable {
    let mut meta = meta
        .clone()
        .extra("instance", t.instance.clone())
        .extra("function", t.descriptor.clone())
        .extra("provenance", t.provenance.clone());
    let mut header = TABLE_COLUMNS.to_vec();
    if t.weights.is_some() {
        header.push("weight");
        meta = meta.extra("weights", "quadrature rule in lambda");
    }
    let mut out = CsvTable::new(meta, &header);
    for (i, (l, v)) in t.lambda.iter().zip(&t.values).enumerate() {
        let mut row = vec![l.re, l.im, v.re, v.im];
        if let Some(w) = &t.weights {
            row.push(w[i]);
        }
        out.push_numbers(&row);
    }
    out
}

pub fn transform_table_from_csv(c: &CsvTable) -> Result<TransformTable> {
    let col = |n| c.column(n);
    let (lr, li, vr, vi) = (col("lambda_re")?, col("lambda_im")?, col("value_re")?, col("value_im")?);
    let weights = if c.header.iter().any(|h| h == "weight") { Some(col("weight")?) } else { None };
    let get = |k: &str| c.meta.extra.get(k).cloned().unwrap_or_default();
    Ok(TransformTable {
        instance: get("instance"),
        descriptor: get("function"),
        provenance: get("provenance"),
        lambda: lr.iter().zip(&li).map(|(&a, &b)| Complex64::new(a, b)).collect(),
        values: vr.iter().zip(&vi).map(|(&a, &b)| Complex64::new(a, b)).collect(),
        weights,
    })
}

/// Row-major `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMat) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push([m[(i, j)].re, m[(i, j)].im]);
            }
        }
        Self { rows: m.nrows(), cols: m.ncols(), data }
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::InvalidInput(format!(
                "matrix data has {} entries, expected {}",
                self.data.len(),
                self.rows * self.cols
            )));
        }
        Ok(CMat::from_fn(self.rows, self.cols, |i, j| {
            let [re, im] = self.data[i * self.cols + j];
            Complex64::new(re, im)
        }))
    }
}

/// JSON document of metadata plus payload.
pub fn json_document<T: Serialize>(meta: &Metadata, payload: &T) -> Result<String> {
    #[derive(Serialize)]
    struct Doc<'a, T> {
        meta: &'a Metadata,
        data: &'a T,
    }
    Ok(serde_json::to_string_pretty(&Doc { meta, data: payload })?)
}

/// `(r, sigma, m)` rows from a CSV with those three columns (metadata lines
/// optional).
pub fn read_volume_table<R: Read>(r: R) -> Result<Vec<(f64, f64, f64)>> {
    let t = CsvTable::read(r)?;
    let (r, s, m) = (t.column("r")?, t.column("sigma")?, t.column("m")?);
    Ok(r.into_iter().zip(s).zip(m).map(|((a, b), c)| (a, b, c)).collect())
}
