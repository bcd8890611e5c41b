//! File formats.
//!
//! * signals: one-column CSV with header `u`
//! * trajectories: two-column CSV with header `u,y`
//! * jets: CSV with columns `t, u0..u{L-1}, y0..y{L-1}`
//! * systems: `{"n", "A", "B", "C", "D", "domain"}` JSON
//! * generators: `{"Sg", "Lg", "w0", "domain"}` JSON

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::continuous::JetSample;
use crate::error::{Error, Result};
use crate::experiments::ExperimentReport;
use crate::interconnection::{ExceptionalTest, InterconnectionAnalysis};
use crate::lti::{LtiSystem, TimeDomain, Trajectory};
use crate::numerics::{Matrix, Vector};
use crate::siggen::SignalGenerator;

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn parse_columns(text: &str, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let found: Vec<String> = rdr
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_owned)
        .collect();
    if found != header {
        return Err(Error::Parse(format!(
            "expected header {}, found {}",
            header.join(","),
            found.join(",")
        )));
    }
    let mut cols = vec![Vec::new(); header.len()];
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        for (col, field) in rec.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: '{field}' is not a number", row + 1)))?;
            if !v.is_finite() {
                return Err(Error::Parse(format!(
                    "row {}: non-finite value '{field}'",
                    row + 1
                )));
            }
            cols[col].push(v);
        }
    }
    if cols[0].is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    Ok(cols)
}

fn write_columns(header: &[String], rows: impl Iterator<Item = Vec<f64>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string()))
            .map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn parse_signal_csv(text: &str) -> Result<Vec<f64>> {
    Ok(parse_columns(text, &["u"])?.remove(0))
}

pub fn signal_to_csv(u: &[f64]) -> Result<String> {
    write_columns(&["u".into()], u.iter().map(|&v| vec![v]))
}

pub fn parse_trajectory_csv(text: &str) -> Result<Trajectory> {
    let mut cols = parse_columns(text, &["u", "y"])?;
    let y = cols.pop().unwrap_or_default();
    let u = cols.pop().unwrap_or_default();
    Trajectory::new(u, y)
}

pub fn trajectory_to_csv(traj: &Trajectory) -> Result<String> {
    write_columns(
        &["u".into(), "y".into()],
        traj.u.iter().zip(&traj.y).map(|(&u, &y)| vec![u, y]),
    )
}

pub fn jets_to_csv(samples: &[JetSample]) -> Result<String> {
    let l = samples.first().map_or(0, JetSample::depth);
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((0..l).map(|i| format!("u{i}")))
        .chain((0..l).map(|i| format!("y{i}")))
        .collect();
    write_columns(
        &header,
        samples.iter().map(|s| {
            let mut row = vec![s.time];
            row.extend(&s.u_jet);
            row.extend(&s.y_jet);
            row
        }),
    )
}

fn rows_of(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn matrix_from_rows(rows: &[Vec<f64>], what: &str) -> Result<Matrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::Parse(format!("{what}: ragged rows")));
    }
    Ok(Matrix::from_fn(r, c, |i, j| rows[i][j]))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemFile {
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<f64>,
    #[serde(rename = "C")]
    pub c: Vec<f64>,
    #[serde(rename = "D")]
    pub d: f64,
    pub domain: TimeDomain,
}

impl From<&LtiSystem> for SystemFile {
    fn from(sys: &LtiSystem) -> Self {
        Self {
            n: sys.order(),
            a: rows_of(sys.a()),
            b: sys.b().iter().copied().collect(),
            c: sys.c().iter().copied().collect(),
            d: sys.d(),
            domain: sys.domain(),
        }
    }
}

impl TryFrom<SystemFile> for LtiSystem {
    type Error = Error;

    fn try_from(f: SystemFile) -> Result<Self> {
        let a = matrix_from_rows(&f.a, "A")?;
        if a.nrows() != f.n {
            return Err(Error::Parse(format!(
                "\"n\" is {} but A has {} rows",
                f.n,
                a.nrows()
            )));
        }
        LtiSystem::new(
            a,
            Matrix::from_column_slice(f.b.len(), 1, &f.b),
            Matrix::from_row_slice(1, f.c.len(), &f.c),
            f.d,
            f.domain,
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorFile {
    #[serde(rename = "Sg")]
    pub s_g: Vec<Vec<f64>>,
    #[serde(rename = "Lg")]
    pub l_g: Vec<f64>,
    pub w0: Vec<f64>,
    pub domain: TimeDomain,
}

impl From<&SignalGenerator> for GeneratorFile {
    fn from(g: &SignalGenerator) -> Self {
        Self {
            s_g: rows_of(g.s_g()),
            l_g: g.l_g().iter().copied().collect(),
            w0: g.w0().iter().copied().collect(),
            domain: g.domain(),
        }
    }
}

impl TryFrom<GeneratorFile> for SignalGenerator {
    type Error = Error;

    fn try_from(f: GeneratorFile) -> Result<Self> {
        SignalGenerator::new(
            matrix_from_rows(&f.s_g, "Sg")?,
            Matrix::from_row_slice(1, f.l_g.len(), &f.l_g),
            Vector::from_vec(f.w0),
            f.domain,
        )
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn parse_system_json(text: &str) -> Result<LtiSystem> {
    serde_json::from_str::<SystemFile>(text)
        .map_err(json_error)?
        .try_into()
}

pub fn system_to_json(sys: &LtiSystem) -> String {
    serde_json::to_string_pretty(&SystemFile::from(sys)).expect("finite values serialize")
}

pub fn parse_generator_json(text: &str) -> Result<SignalGenerator> {
    serde_json::from_str::<GeneratorFile>(text)
        .map_err(json_error)?
        .try_into()
}

pub fn generator_to_json(gen: &SignalGenerator) -> String {
    serde_json::to_string_pretty(&GeneratorFile::from(gen)).expect("finite values serialize")
}

/// Serializable view of an [`InterconnectionAnalysis`].
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisExport {
    #[serde(rename = "Pi")]
    pub pi: Vec<Vec<f64>>,
    #[serde(rename = "Mg")]
    pub m_g: Vec<f64>,
    #[serde(rename = "Gamma")]
    pub gamma: Vec<Vec<f64>>,
    #[serde(rename = "Pi1")]
    pub pi1: Vec<Vec<f64>>,
    #[serde(rename = "Pi2")]
    pub pi2: Vec<Vec<f64>>,
    pub x_bar0: Vec<f64>,
    pub depth_l: usize,
    pub sylvester_residual: f64,
    pub e1: Option<ExceptionalTest>,
    pub e2: Option<ExceptionalTest>,
}

impl AnalysisExport {
    pub fn new(
        an: &InterconnectionAnalysis,
        e1: Option<ExceptionalTest>,
        e2: Option<ExceptionalTest>,
    ) -> Self {
        Self {
            pi: rows_of(&an.pi),
            m_g: an.m_g.iter().copied().collect(),
            gamma: rows_of(&an.gamma),
            pi1: rows_of(&an.pi1),
            pi2: rows_of(&an.pi2),
            x_bar0: an.x_bar0.iter().copied().collect(),
            depth_l: an.depth_l,
            sylvester_residual: an.sylvester_residual,
            e1,
            e2,
        }
    }
}

/// One row per trial across all arms, for plotting. Missing values are empty.
pub fn report_to_csv(report: &ExperimentReport) -> Result<String> {
    fn opt<T: ToString>(v: Option<T>) -> String {
        v.map(|x| x.to_string()).unwrap_or_default()
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "arm",
        "trial",
        "stream",
        "success",
        "informative",
        "rank_achieved",
        "rank_required",
        "margin",
        "tolerance",
        "e2_margin",
        "e2_tolerance",
        "spectral_gap",
        "pe_order",
        "prediction_error",
    ])
    .map_err(csv_error)?;
    for arm in &report.arms {
        for r in &arm.records {
            w.write_record([
                arm.name.clone(),
                r.trial.to_string(),
                r.stream.to_string(),
                r.success.to_string(),
                opt(r.informative),
                opt(r.rank_achieved),
                opt(r.rank_required),
                opt(r.margin),
                opt(r.tolerance),
                opt(r.e2.map(|e| e.margin)),
                opt(r.e2.map(|e| e.tolerance)),
                opt(r.spectral_gap),
                opt(r.pe_order),
                opt(r.prediction_error),
            ])
            .map_err(csv_error)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn read_to_string(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}
