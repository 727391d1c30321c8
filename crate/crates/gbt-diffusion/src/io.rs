//! On-disk formats: numeric matrices (CSV and JSON), comparison datasets
//! (CSV), model configuration files, fit results, audit reports, replayable
//! violation bundles, and experiment output directories.
//!
//! Conventions shared by every format:
//!
//! - **Matrix CSV** holds one matrix row per line, fields separated by
//!   commas, no header. **Matrix JSON** holds a plain nested array,
//!   row-major.
//! - **Dataset CSV** carries the header `a,b,r` with *1-indexed*
//!   alternative ids (the human-facing convention). Ids are 0-indexed
//!   everywhere in memory, and JSON documents — which exist for machine
//!   replay rather than hand editing — keep the 0-indexed form.
//! - Every object-shaped JSON document carries a `schema_version` field;
//!   this build reads and writes version [`crate::SCHEMA_VERSION`].
//! - Malformed content is reported as [`Error::Parse`] carrying the file
//!   path and a line/column diagnostic; inaccessible files are reported as
//!   [`Error::File`] carrying the path.
//!
//! Readers never modify their inputs; writers replace the whole target file
//! atomically from the caller's perspective (single `write` call).

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::dataset::{ComparisonSample, Dataset, DatasetOp};
use crate::embedding::{DiffusionReport, Embedding, GoodnessReport};
use crate::error::{Error, Result};
use crate::experiment::ExperimentResult;
use crate::laplacian::{
    is_laplacian, is_super_laplacian, laplacian_margin, super_laplacian_margins, PREDICATE_TOL,
};
use crate::model::{FitResult, ModelConfig};
use crate::monotonicity::{OperationTrace, ViolationWitness};
use crate::root_law::RootLaw;
use crate::SCHEMA_VERSION;

fn file_err(path: &Path, source: std::io::Error) -> Error {
    Error::File { path: path.display().to_string(), source }
}

fn parse_err(path: &Path, detail: impl Into<String>) -> Error {
    Error::Parse { path: path.display().to_string(), detail: detail.into() }
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| file_err(path, e))
}

fn write_string(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| file_err(path, e))
}

fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

fn check_schema_version(path: &Path, found: u32) -> Result<()> {
    if found == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(parse_err(
            path,
            format!("unsupported schema_version {found} (this build reads {SCHEMA_VERSION})"),
        ))
    }
}

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

/// Converts a matrix to row-major nested vectors (the JSON wire form).
pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Builds a matrix from row-major nested vectors.
///
/// # Errors
/// [`Error::InvalidParameter`] if the rows are empty or ragged (the message
/// names the first offending row).
pub fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let ncols = match rows.first() {
        Some(first) if !first.is_empty() => first.len(),
        _ => return Err(Error::InvalidParameter("matrix needs at least one non-empty row".into())),
    };
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(Error::InvalidParameter(format!(
                "row {} has {} fields, expected {ncols}",
                i + 1,
                row.len()
            )));
        }
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(DMatrix::from_row_slice(rows.len(), ncols, &flat))
}

/// Reads a matrix from CSV: one row per line, comma-separated, no header.
///
/// Blank lines are skipped. Every row must have the same number of fields.
///
/// # Errors
/// [`Error::Parse`] with a `line N, column M` diagnostic on a malformed
/// field or a ragged row; [`Error::File`] if the file cannot be read.
pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (j, field) in line.split(',').enumerate() {
            let field = field.trim();
            let value: f64 = field.parse().map_err(|_| {
                parse_err(path, format!("line {}, column {}: `{field}` is not a number", i + 1, j + 1))
            })?;
            row.push(value);
        }
        if let Some(w) = width {
            if row.len() != w {
                return Err(parse_err(
                    path,
                    format!("line {}: row has {} fields, expected {w}", i + 1, row.len()),
                ));
            }
        } else {
            width = Some(row.len());
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(path, "no matrix rows found"));
    }
    rows_to_matrix(&rows)
}

/// Writes a matrix as CSV: one row per line, comma-separated, no header.
///
/// Uses shortest round-trip float formatting, so write/read is lossless and
/// byte-deterministic.
pub fn write_matrix_csv(path: impl AsRef<Path>, m: &DMatrix<f64>) -> Result<()> {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let fields: Vec<String> = m.row(i).iter().map(|v| v.to_string()).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    write_string(path.as_ref(), &out)
}

/// Reads a matrix from JSON: a plain nested array, row-major.
pub fn read_matrix_json(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let rows: Vec<Vec<f64>> = serde_json::from_str(&text).map_err(|e| json_err(path, &e))?;
    rows_to_matrix(&rows).map_err(|e| parse_err(path, e.to_string()))
}

/// Writes a matrix as JSON: a plain nested array, row-major.
pub fn write_matrix_json(path: impl AsRef<Path>, m: &DMatrix<f64>) -> Result<()> {
    let rows = matrix_to_rows(m);
    let mut text = serde_json::to_string_pretty(&rows)?;
    text.push('\n');
    write_string(path.as_ref(), &text)
}

/// Reads a matrix, dispatching on the file extension: `.json` means the
/// nested-array JSON form, anything else the CSV form.
pub fn load_matrix(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let path = path.as_ref();
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => read_matrix_json(path),
        _ => read_matrix_csv(path),
    }
}

fn json_err(path: &Path, e: &serde_json::Error) -> Error {
    parse_err(path, format!("line {}, column {}: {e}", e.line(), e.column()))
}

// ---------------------------------------------------------------------------
// Generic JSON documents
// ---------------------------------------------------------------------------

/// Reads any JSON document, converting serde failures into [`Error::Parse`]
/// with line/column diagnostics.
pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| json_err(path, &e))
}

/// Writes any serializable value as pretty-printed JSON with a trailing
/// newline. Field order follows the struct definition, so output is
/// byte-deterministic.
pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_string(path.as_ref(), &text)
}

// ---------------------------------------------------------------------------
// Datasets
// ---------------------------------------------------------------------------

/// Reads a comparison dataset from CSV with header `a,b,r`.
///
/// Alternative ids are 1-indexed in the file and shifted to 0-indexed in
/// memory. When `num_alternatives` is given, every id is validated against
/// it; otherwise the count is inferred as the largest id seen (an empty
/// dataset infers zero alternatives).
///
/// # Errors
/// [`Error::Parse`] with line/column diagnostics for a bad header,
/// non-numeric fields, 0 ids, out-of-range ids, or self-comparisons.
pub fn read_dataset_csv(path: impl AsRef<Path>, num_alternatives: Option<usize>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| file_err(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);

    let headers = reader.headers().map_err(|e| parse_err(path, e.to_string()))?;
    let fields: Vec<&str> = headers.iter().collect();
    if fields != ["a", "b", "r"] {
        return Err(parse_err(
            path,
            format!("line 1: expected header `a,b,r`, got `{}`", fields.join(",")),
        ));
    }

    let mut triples: Vec<(usize, usize, f64, u64)> = Vec::new();
    let mut max_id = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| parse_err(path, e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 3 {
            return Err(parse_err(path, format!("line {line}: expected 3 fields, got {}", record.len())));
        }
        let id = |col: usize, name: &str| -> Result<usize> {
            let field = record.get(col).unwrap_or("");
            let raw: usize = field.parse().map_err(|_| {
                parse_err(path, format!("line {line}, column {}: `{field}` is not a positive integer ({name})", col + 1))
            })?;
            if raw == 0 {
                return Err(parse_err(
                    path,
                    format!("line {line}, column {}: alternative ids are 1-indexed, got 0", col + 1),
                ));
            }
            Ok(raw - 1)
        };
        let a = id(0, "a")?;
        let b = id(1, "b")?;
        let r_field = record.get(2).unwrap_or("");
        let r: f64 = r_field
            .parse()
            .map_err(|_| parse_err(path, format!("line {line}, column 3: `{r_field}` is not a number (r)")))?;
        max_id = max_id.max(a).max(b);
        triples.push((a, b, r, line));
    }

    let total = match num_alternatives {
        Some(n) => n,
        None if triples.is_empty() => 0,
        None => max_id + 1,
    };
    let mut dataset = Dataset::new(total);
    for (a, b, r, line) in triples {
        dataset
            .push(a, b, r)
            .map_err(|e| parse_err(path, format!("line {line}: {e}")))?;
    }
    Ok(dataset)
}

/// Writes a comparison dataset as CSV with header `a,b,r` and 1-indexed ids.
pub fn write_dataset_csv(path: impl AsRef<Path>, dataset: &Dataset) -> Result<()> {
    let mut out = String::from("a,b,r\n");
    for s in dataset.samples() {
        out.push_str(&format!("{},{},{}\n", s.a + 1, s.b + 1, s.r));
    }
    write_string(path.as_ref(), &out)
}

// ---------------------------------------------------------------------------
// Model configuration
// ---------------------------------------------------------------------------

/// The on-disk model configuration document.
///
/// `embedding_path` and `laplacian_path` are resolved relative to the
/// directory containing the configuration file; each may point at a matrix
/// CSV or a matrix JSON (dispatch by extension). A missing or null
/// `laplacian_path` means no prior graph (the zero matrix).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfigFile {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub root_law: RootLaw,
    pub sigma: f64,
    pub embedding_path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub laplacian_path: Option<String>,
}

impl ModelConfigFile {
    /// A configuration document pointing at the given matrix files.
    pub fn new(root_law: RootLaw, sigma: f64, embedding_path: impl Into<String>, laplacian_path: Option<String>) -> Self {
        ModelConfigFile {
            schema_version: SCHEMA_VERSION,
            root_law,
            sigma,
            embedding_path: embedding_path.into(),
            laplacian_path,
        }
    }
}

/// Loads a model configuration document and the matrices it references.
///
/// # Errors
/// [`Error::Parse`] for malformed JSON or matrices, [`Error::File`] for
/// unreadable files, and the [`ModelConfig::new`] validation errors
/// (non-positive sigma, Laplacian shape mismatch, failed Laplacian
/// predicate).
pub fn read_model_config(path: impl AsRef<Path>) -> Result<ModelConfig> {
    let path = path.as_ref();
    let file: ModelConfigFile = read_json(path)?;
    check_schema_version(path, file.schema_version)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let x = load_matrix(base.join(&file.embedding_path))?;
    let a = x.ncols();
    let laplacian = match &file.laplacian_path {
        Some(p) => load_matrix(base.join(p))?,
        None => DMatrix::zeros(a, a),
    };
    ModelConfig::new(file.root_law, file.sigma, Embedding::new(x), laplacian)
}

/// Writes a model configuration document (the matrices it references are
/// written separately).
pub fn write_model_config(path: impl AsRef<Path>, config: &ModelConfigFile) -> Result<()> {
    write_json(path, config)
}

// ---------------------------------------------------------------------------
// Fit results
// ---------------------------------------------------------------------------

/// The on-disk fit-result document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResultFile {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    /// Scores, one per alternative.
    pub theta_star: Vec<f64>,
    /// Minimizer in feature space.
    pub beta_star: Vec<f64>,
    /// Gradient norm at the reported minimizer.
    pub grad_norm: f64,
    /// Newton iterations taken.
    pub iterations: usize,
}

impl From<&FitResult> for FitResultFile {
    fn from(fit: &FitResult) -> Self {
        FitResultFile {
            schema_version: SCHEMA_VERSION,
            theta_star: fit.theta_star.iter().copied().collect(),
            beta_star: fit.beta_star.iter().copied().collect(),
            grad_norm: fit.grad_norm,
            iterations: fit.iterations,
        }
    }
}

/// Writes a fit result as JSON.
pub fn write_fit_result(path: impl AsRef<Path>, fit: &FitResult) -> Result<()> {
    write_json(path, &FitResultFile::from(fit))
}

// ---------------------------------------------------------------------------
// Predicate and embedding-check reports
// ---------------------------------------------------------------------------

/// Outcome of a single matrix predicate, as printed by the auditors.
///
/// `margin` is the signed distance to the predicate boundary: negative
/// means violated, and larger is safer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredicateReport {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub predicate: String,
    pub result: bool,
    pub margin: f64,
}

impl PredicateReport {
    pub fn new(predicate: impl Into<String>, result: bool, margin: f64) -> Self {
        PredicateReport { schema_version: SCHEMA_VERSION, predicate: predicate.into(), result, margin }
    }

    /// Reports whether `m` is a graph Laplacian (at [`PREDICATE_TOL`]).
    pub fn laplacian(m: &DMatrix<f64>) -> Self {
        PredicateReport::new("laplacian", is_laplacian(m, PREDICATE_TOL), laplacian_margin(m))
    }

    /// Reports whether `m` is a super-Laplacian at [`PREDICATE_TOL`] (the
    /// margin is the worse of the off-diagonal and diagonal-dominance
    /// margins).
    pub fn super_laplacian(m: &DMatrix<f64>) -> Self {
        let (off, dom) = super_laplacian_margins(m);
        PredicateReport::new("super_laplacian", is_super_laplacian(m, PREDICATE_TOL), off.min(dom))
    }
}

/// The report written by the embedding checker: which predicate ran, the
/// overall outcome, the worst margin seen (when the check produces one),
/// and the full per-mode detail including any witness matrices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingCheckReport {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    /// Which check ran: `"diffusion"` or `"good"`.
    pub predicate: String,
    /// Overall outcome: `true` when the embedding passed the check.
    pub result: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diffusion: Option<DiffusionReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goodness: Option<GoodnessReport>,
}

impl EmbeddingCheckReport {
    /// Wraps a diffusion-predicate grid check.
    pub fn from_diffusion(report: DiffusionReport) -> Self {
        EmbeddingCheckReport {
            schema_version: SCHEMA_VERSION,
            predicate: "diffusion".into(),
            result: report.pass,
            margin: Some(report.margin),
            diffusion: Some(report),
            goodness: None,
        }
    }

    /// Wraps a goodness check (exact criterion or Monte Carlo hunt).
    pub fn from_goodness(report: GoodnessReport) -> Self {
        EmbeddingCheckReport {
            schema_version: SCHEMA_VERSION,
            predicate: "good".into(),
            result: report.passed(),
            margin: report.witness.as_ref().map(|w| w.margin),
            diffusion: None,
            goodness: Some(report),
        }
    }
}

// ---------------------------------------------------------------------------
// Monotonicity audits
// ---------------------------------------------------------------------------

/// A self-contained, replayable monotonicity violation: feature matrix,
/// prior graph, dataset, and the favoring operation trace whose application
/// lowered the target's score.
///
/// Ids inside `d` and `ops` are 0-indexed (this is a machine-replay format;
/// the CSV dataset format stays 1-indexed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessBundle {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub root_law: RootLaw,
    pub sigma: f64,
    /// Feature matrix, row-major (one column per alternative).
    pub x: Vec<Vec<f64>>,
    /// Prior comparison-graph matrix, row-major.
    pub l: Vec<Vec<f64>>,
    /// Dataset the trace applies to.
    pub d: Vec<ComparisonSample>,
    /// The favoring operations, applied left to right.
    pub ops: Vec<DatasetOp>,
    /// The alternative every operation favors.
    pub target: usize,
    /// Score drop observed when the witness was produced.
    pub drop: f64,
}

impl From<&ViolationWitness> for WitnessBundle {
    fn from(w: &ViolationWitness) -> Self {
        WitnessBundle {
            schema_version: SCHEMA_VERSION,
            root_law: w.law,
            sigma: w.sigma,
            x: matrix_to_rows(&w.embedding),
            l: matrix_to_rows(&w.laplacian),
            d: w.dataset.samples().to_vec(),
            ops: w.trace.ops.clone(),
            target: w.trace.target,
            drop: w.drop,
        }
    }
}

impl WitnessBundle {
    /// Rebuilds the in-memory witness, re-validating the dataset and
    /// re-verifying that every operation favors the target (a tampered
    /// bundle is rejected rather than replayed).
    pub fn to_witness(&self) -> Result<ViolationWitness> {
        let x = rows_to_matrix(&self.x)?;
        let l = rows_to_matrix(&self.l)?;
        let mut dataset = Dataset::new(x.ncols());
        for s in &self.d {
            dataset.push(s.a, s.b, s.r)?;
        }
        let trace = OperationTrace::favoring(self.ops.clone(), self.target, &dataset, self.root_law)?;
        Ok(ViolationWitness {
            law: self.root_law,
            sigma: self.sigma,
            embedding: x,
            laplacian: l,
            dataset,
            trace,
            drop: self.drop,
        })
    }
}

/// Writes a replayable violation bundle as JSON.
pub fn write_witness_bundle(path: impl AsRef<Path>, witness: &ViolationWitness) -> Result<()> {
    write_json(path, &WitnessBundle::from(witness))
}

/// Reads a violation bundle back into a replayable in-memory witness.
pub fn read_witness_bundle(path: impl AsRef<Path>) -> Result<ViolationWitness> {
    let path = path.as_ref();
    let bundle: WitnessBundle = read_json(path)?;
    check_schema_version(path, bundle.schema_version)?;
    bundle.to_witness()
}

/// Summary document written by the monotonicity auditor: how many favoring
/// traces ran, whether all of them preserved the target's score, and the
/// first violation (as a replayable bundle) if any occurred.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditReportFile {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    /// Favoring traces audited.
    pub trials: usize,
    /// Whether every trace preserved the target's score (up to slack).
    pub pass: bool,
    /// Number of violating traces observed.
    pub violations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessBundle>,
}

impl AuditReportFile {
    pub fn new(trials: usize, violations: usize, witness: Option<WitnessBundle>) -> Self {
        AuditReportFile { schema_version: SCHEMA_VERSION, trials, pass: violations == 0, violations, witness }
    }
}

// ---------------------------------------------------------------------------
// Experiment outputs
// ---------------------------------------------------------------------------

/// Writes experiment rows as CSV: one column per grid coordinate (taken
/// from the first row, validated against the rest), then
/// `series,estimate,stderr,n_seeds,discarded`.
///
/// Floats use shortest round-trip formatting, so a fixed seed yields a
/// byte-identical file.
pub fn write_results_csv(path: impl AsRef<Path>, rows: &[ExperimentResult]) -> Result<()> {
    let coord_names: Vec<String> = rows
        .first()
        .map(|r| r.coords.iter().map(|(name, _)| name.clone()).collect())
        .unwrap_or_default();
    let mut out = String::new();
    let mut header: Vec<&str> = coord_names.iter().map(String::as_str).collect();
    header.extend(["series", "estimate", "stderr", "n_seeds", "discarded"]);
    out.push_str(&header.join(","));
    out.push('\n');
    for (i, row) in rows.iter().enumerate() {
        let names: Vec<&str> = row.coords.iter().map(|(name, _)| name.as_str()).collect();
        if names != coord_names.iter().map(String::as_str).collect::<Vec<_>>() {
            return Err(Error::InvalidParameter(format!(
                "row {i} has coordinates ({}) but the first row has ({})",
                names.join(","),
                coord_names.join(",")
            )));
        }
        let mut fields: Vec<String> = row.coords.iter().map(|(_, v)| v.to_string()).collect();
        fields.push(row.series.clone());
        fields.push(row.estimate.to_string());
        fields.push(row.stderr.to_string());
        fields.push(row.n_seeds.to_string());
        fields.push(row.discarded.to_string());
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    write_string(path.as_ref(), &out)
}

/// Reads experiment rows back from CSV (columns before `series` are grid
/// coordinates).
pub fn read_results_csv(path: impl AsRef<Path>) -> Result<Vec<ExperimentResult>> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| file_err(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| parse_err(path, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let series_col = headers.iter().position(|h| h == "series").ok_or_else(|| {
        parse_err(path, format!("line 1: no `series` column in header `{}`", headers.join(",")))
    })?;
    let expected = ["series", "estimate", "stderr", "n_seeds", "discarded"];
    if headers.len() != series_col + expected.len() || headers[series_col..] != expected {
        return Err(parse_err(
            path,
            format!(
                "line 1: expected trailing columns `{}`, got `{}`",
                expected.join(","),
                headers[series_col..].join(",")
            ),
        ));
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_err(path, e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != headers.len() {
            return Err(parse_err(
                path,
                format!("line {line}: expected {} fields, got {}", headers.len(), record.len()),
            ));
        }
        let number = |col: usize| -> Result<f64> {
            let field = record.get(col).unwrap_or("");
            field.parse().map_err(|_| {
                parse_err(path, format!("line {line}, column {}: `{field}` is not a number", col + 1))
            })
        };
        let count = |col: usize| -> Result<usize> {
            let field = record.get(col).unwrap_or("");
            field.parse().map_err(|_| {
                parse_err(path, format!("line {line}, column {}: `{field}` is not a count", col + 1))
            })
        };
        let mut coords = Vec::with_capacity(series_col);
        for (col, name) in headers[..series_col].iter().enumerate() {
            coords.push((name.clone(), number(col)?));
        }
        rows.push(ExperimentResult {
            coords,
            series: record.get(series_col).unwrap_or("").to_string(),
            estimate: number(series_col + 1)?,
            stderr: number(series_col + 2)?,
            n_seeds: count(series_col + 3)?,
            discarded: count(series_col + 4)?,
        });
    }
    Ok(rows)
}

/// Writes a complete experiment output directory: `results.csv`,
/// `meta.json` (stamped with `schema_version` if the caller's document
/// lacks one), and `figure.svg`. Creates the directory if needed.
pub fn write_experiment_dir(
    dir: impl AsRef<Path>,
    rows: &[ExperimentResult],
    meta: &serde_json::Value,
    svg: &str,
) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| file_err(dir, e))?;
    write_results_csv(dir.join("results.csv"), rows)?;
    let mut meta = meta.clone();
    if let serde_json::Value::Object(map) = &mut meta {
        map.entry("schema_version").or_insert_with(|| SCHEMA_VERSION.into());
    }
    write_json(dir.join("meta.json"), &meta)?;
    write_string(&dir.join("figure.svg"), svg)
}
