//! Report serialization and atomic file output.

use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::{Format, RunConfig};

/// Compact JSON with every float written with 17 significant digits.
struct FixedFloats;

impl serde_json::ser::Formatter for FixedFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(buf)
}

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Serialize)]
pub struct PointResult {
    pub point: Vec<f64>,
    pub angle: f64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentResult {
    pub k: usize,
    pub polynomial: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub suite: String,
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Results {
    Points(Vec<PointResult>),
    Components(Vec<ComponentResult>),
    Checks(Vec<CheckResult>),
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<RunConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature_nodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
    /// Only present with `--timing`; omitted by default so output is reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub metadata: Metadata,
    pub results: Results,
}

impl RunReport {
    pub fn render(&self, format: Format, dim: usize) -> Result<Vec<u8>> {
        match format {
            Format::Json => to_json(self),
            Format::Csv => self.to_csv(dim),
        }
    }

    fn to_csv(&self, dim: usize) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        match &self.results {
            Results::Points(rows) => {
                let mut header: Vec<String> = (1..=dim).map(|j| format!("x{j}")).collect();
                header.extend(["angle", "value_re", "value_im"].map(String::from));
                w.write_record(&header)?;
                for r in rows {
                    let mut rec: Vec<String> = r.point.iter().copied().map(float).collect();
                    rec.extend([float(r.angle), float(r.re), float(r.im)]);
                    w.write_record(&rec)?;
                }
            }
            Results::Components(rows) => {
                w.write_record(["k", "polynomial"])?;
                for r in rows {
                    w.write_record([r.k.to_string(), r.polynomial.clone()])?;
                }
            }
            Results::Checks(rows) => {
                w.write_record(["suite", "name", "residual", "tolerance", "passed"])?;
                for r in rows {
                    w.write_record([r.suite.clone(), r.name.clone(), float(r.residual), float(r.tolerance), r.passed.to_string()])?;
                }
            }
        }
        w.into_inner().context("flushing CSV output")
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so the target never holds partial output.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, bytes),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}
