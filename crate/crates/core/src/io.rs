//! CSV and JSON serialization of runs.
//!
//! Floats are written with 17 significant digits so every value re-parses to
//! the identical `f64`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::FlowError;
use crate::geometry::{GridCurve, Vec2};
use crate::harness::{ConvergenceConfig, ConvergenceTable, EvolutionRecord, SchemeConfig};

pub const QUANTITIES_FILE: &str = "quantities.csv";
pub const SNAPSHOTS_FILE: &str = "snapshots.csv";
pub const CONVERGENCE_FILE: &str = "convergence.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

pub const QUANTITIES_HEADER: [&str; 5] = ["t", "L", "A", "dA_rel", "Psi"];
pub const SNAPSHOTS_HEADER: [&str; 4] = ["t", "j", "x", "y"];

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed file: {0}")]
    Format(String),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

pub type IoResult<T> = std::result::Result<T, IoError>;

/// Full-precision decimal form of `v`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(field: &str) -> IoResult<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| IoError::Format(format!("not a number: '{field}'")))
}

fn check_header(reader: &mut csv::Reader<impl Read>, expected: &[&str]) -> IoResult<()> {
    let header = reader.headers()?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(IoError::Format(format!(
            "expected header {}, found {}",
            expected.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(())
}

pub fn write_quantities<W: Write>(out: W, record: &EvolutionRecord) -> IoResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(QUANTITIES_HEADER)?;
    for k in 0..record.len() {
        w.write_record([
            fmt_f64(record.times[k]),
            fmt_f64(record.perimeter[k]),
            fmt_f64(record.area[k]),
            fmt_f64(record.area_loss[k]),
            fmt_f64(record.mesh_ratio[k]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row of `quantities.csv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantityRow {
    pub t: f64,
    pub perimeter: f64,
    pub area: f64,
    pub area_loss: f64,
    pub mesh_ratio: f64,
}

pub fn read_quantities<R: Read>(input: R) -> IoResult<Vec<QuantityRow>> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &QUANTITIES_HEADER)?;
    r.records()
        .map(|rec| {
            let rec = rec?;
            let v: Vec<f64> = rec.iter().map(parse_f64).collect::<IoResult<_>>()?;
            Ok(QuantityRow {
                t: v[0],
                perimeter: v[1],
                area: v[2],
                area_loss: v[3],
                mesh_ratio: v[4],
            })
        })
        .collect()
}

pub fn write_snapshots<W: Write>(out: W, record: &EvolutionRecord) -> IoResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SNAPSHOTS_HEADER)?;
    for snap in &record.snapshots {
        let t = fmt_f64(snap.time);
        for (j, v) in snap.curve.vertices().iter().enumerate() {
            w.write_record([t.clone(), j.to_string(), fmt_f64(v.x), fmt_f64(v.y)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Parses `snapshots.csv` back into `(time, curve)` pairs in file order.
pub fn read_snapshots<R: Read>(input: R) -> IoResult<Vec<(f64, GridCurve)>> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &SNAPSHOTS_HEADER)?;
    let mut out = Vec::new();
    let mut current: Option<(f64, Vec<Vec2>)> = None;
    for rec in r.records() {
        let rec = rec?;
        let t = parse_f64(&rec[0])?;
        let j: usize = rec[1]
            .trim()
            .parse()
            .map_err(|_| IoError::Format(format!("bad vertex index '{}'", &rec[1])))?;
        let v = Vec2::new(parse_f64(&rec[2])?, parse_f64(&rec[3])?);
        if j == 0 {
            if let Some((t0, vs)) = current.take() {
                out.push((t0, GridCurve::new(vs)?));
            }
            current = Some((t, vec![v]));
        } else {
            match current.as_mut() {
                Some((t0, vs)) if *t0 == t && vs.len() == j => vs.push(v),
                _ => {
                    return Err(IoError::Format(format!(
                        "vertex {j} at t = {t} is out of sequence"
                    )))
                }
            }
        }
    }
    if let Some((t0, vs)) = current {
        out.push((t0, GridCurve::new(vs)?));
    }
    Ok(out)
}

pub fn convergence_header() -> Vec<String> {
    use crate::harness::ErrorMetric;
    let mut h: Vec<String> = ["N", "h", "tau"].iter().map(|s| s.to_string()).collect();
    h.extend(ErrorMetric::ALL.iter().map(|m| m.name().to_string()));
    h.extend(ErrorMetric::ALL.iter().map(|m| format!("EOC_{}", m.name())));
    h
}

pub fn write_convergence<W: Write>(out: W, table: &ConvergenceTable) -> IoResult<()> {
    use crate::harness::ErrorMetric;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(convergence_header())?;
    let cell = |v: Option<&f64>| v.map(|x| fmt_f64(*x)).unwrap_or_default();
    for row in &table.rows {
        let mut rec = vec![row.n.to_string(), fmt_f64(row.h), fmt_f64(row.tau)];
        rec.extend(ErrorMetric::ALL.iter().map(|m| cell(row.errors.get(m))));
        rec.extend(ErrorMetric::ALL.iter().map(|m| cell(row.eoc.get(m))));
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

/// The configuration echoed into the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum RunConfig {
    Evolve(SchemeConfig),
    Converge(ConvergenceConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: RunConfig,
    pub version: String,
    pub outputs: Vec<PathBuf>,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn new(config: RunConfig, outputs: Vec<PathBuf>, wall_clock_seconds: f64) -> Self {
        RunManifest {
            config,
            version: env!("CARGO_PKG_VERSION").to_string(),
            outputs,
            wall_clock_seconds,
        }
    }

    pub fn write(&self, path: &Path) -> IoResult<()> {
        let mut f = File::create(path)?;
        serde_json::to_writer_pretty(&mut f, self)?;
        f.write_all(b"\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> IoResult<Self> {
        Ok(serde_json::from_reader(File::open(path)?)?)
    }
}

/// Writes the quantity and snapshot files of an evolution into `dir`.
pub fn write_evolution(dir: &Path, record: &EvolutionRecord) -> IoResult<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let q = dir.join(QUANTITIES_FILE);
    let s = dir.join(SNAPSHOTS_FILE);
    write_quantities(File::create(&q)?, record)?;
    write_snapshots(File::create(&s)?, record)?;
    Ok(vec![q, s])
}
