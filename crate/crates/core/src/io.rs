//! File formats: distribution JSON/CSV, dataset directories and
//! manifests, quadrature CSV.
//!
//! Distribution JSON: `{"probs": [p0, p1, ...], "normalized": true}`.
//! Distribution CSV: one probability per line, photon number = row index.
//! Quadrature CSV: one sample per line, optionally preceded by a JSON
//! header line such as `{"efficiency": 0.85}`.
//! Dataset manifest: `{"label": "...", "files": ["run1.json", ...]}` with
//! paths resolved relative to the manifest.

use std::fs;
use std::path::Path;

use crate::capability::DataSet;
use crate::error::{Error, Result};
use crate::photon_stats::PhotonNumberDistribution;
use crate::tomography::QuadratureDataset;

/// Loader tolerance: inputs declared normalized are accepted when their
/// sum is within 1e-6 of one (and then cleaned up by renormalization);
/// anything further off is rejected unless renormalization is requested.
pub const LOAD_NORMALIZATION_TOL: f64 = 1e-6;

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        message: message.into(),
    }
}

/// Reads a distribution from JSON or CSV (decided by the `.json`
/// extension), validating entries and normalization.
pub fn read_distribution(path: &Path, renormalize: bool) -> Result<PhotonNumberDistribution> {
    let text = read_to_string(path)?;
    let is_json = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("json"))
        .unwrap_or(false);
    if is_json {
        parse_distribution_json(&text, path, renormalize)
    } else {
        parse_distribution_csv(&text, path, renormalize)
    }
}

fn finish_distribution(
    probs: Vec<f64>,
    declared_normalized: bool,
    path: &Path,
    renormalize: bool,
) -> Result<PhotonNumberDistribution> {
    let d = PhotonNumberDistribution::new(probs).map_err(|e| parse_error(path, e.to_string()))?;
    if !declared_normalized || renormalize {
        return d.normalize();
    }
    let sum = d.sum();
    if (sum - 1.0).abs() > LOAD_NORMALIZATION_TOL {
        return Err(parse_error(
            path,
            format!("declared normalized but sums to {sum}; pass --renormalize to accept"),
        ));
    }
    d.normalize()
}

fn parse_distribution_json(
    text: &str,
    path: &Path,
    renormalize: bool,
) -> Result<PhotonNumberDistribution> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| parse_error(path, e.to_string()))?;
    let probs = value
        .get("probs")
        .and_then(|p| p.as_array())
        .ok_or_else(|| parse_error(path, "missing \"probs\" array"))?;
    let mut entries = Vec::with_capacity(probs.len());
    for (i, v) in probs.iter().enumerate() {
        let x = v
            .as_f64()
            .ok_or_else(|| parse_error(path, format!("probs[{i}] is not a number")))?;
        entries.push(x);
    }
    let declared = value
        .get("normalized")
        .and_then(|n| n.as_bool())
        .unwrap_or(true);
    finish_distribution(entries, declared, path, renormalize)
}

fn parse_distribution_csv(
    text: &str,
    path: &Path,
    renormalize: bool,
) -> Result<PhotonNumberDistribution> {
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let value: f64 = trimmed.parse().map_err(|_| {
            parse_error(path, format!("line {}: not a number: {trimmed:?}", lineno + 1))
        })?;
        entries.push(value);
    }
    finish_distribution(entries, true, path, renormalize)
}

/// Loads a dataset from a directory of distribution files (sorted by file
/// name) or from a manifest JSON listing them.
pub fn load_dataset(path: &Path, renormalize: bool) -> Result<DataSet> {
    if path.is_dir() {
        let mut files: Vec<_> = fs::read_dir(path)
            .map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| {
                p.extension()
                    .map(|e| e.eq_ignore_ascii_case("json") || e.eq_ignore_ascii_case("csv"))
                    .unwrap_or(false)
            })
            .collect();
        files.sort();
        if files.is_empty() {
            return Err(parse_error(path, "no .json or .csv run files in directory"));
        }
        let runs = files
            .iter()
            .map(|f| read_distribution(f, renormalize))
            .collect::<Result<Vec<_>>>()?;
        let label = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into());
        DataSet::new(runs, label)
    } else {
        let text = read_to_string(path)?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| parse_error(path, e.to_string()))?;
        let files = value
            .get("files")
            .and_then(|f| f.as_array())
            .ok_or_else(|| parse_error(path, "manifest needs a \"files\" array"))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let mut runs = Vec::with_capacity(files.len());
        for (i, f) in files.iter().enumerate() {
            let rel = f
                .as_str()
                .ok_or_else(|| parse_error(path, format!("files[{i}] is not a string")))?;
            runs.push(read_distribution(&base.join(rel), renormalize)?);
        }
        let label = value
            .get("label")
            .and_then(|l| l.as_str())
            .unwrap_or("dataset")
            .to_string();
        DataSet::new(runs, label)
    }
}

/// Reads quadrature samples: one per line, with an optional JSON header
/// line carrying the assumed detection efficiency. An explicit
/// `efficiency` argument overrides the header.
pub fn read_quadratures(path: &Path, efficiency: Option<f64>) -> Result<QuadratureDataset> {
    let text = read_to_string(path)?;
    let mut header_efficiency = None;
    let mut samples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if lineno == 0 && trimmed.starts_with('{') {
            let value: serde_json::Value = serde_json::from_str(trimmed)
                .map_err(|e| parse_error(path, format!("header: {e}")))?;
            header_efficiency = value.get("efficiency").and_then(|v| v.as_f64());
            continue;
        }
        let x: f64 = trimmed.parse().map_err(|_| {
            parse_error(path, format!("line {}: not a number: {trimmed:?}", lineno + 1))
        })?;
        samples.push(x);
    }
    let eta = efficiency.or(header_efficiency).unwrap_or(1.0);
    let label = path
        .file_stem()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "quadratures".into());
    QuadratureDataset::new(samples, eta, label)
}

/// Writes text to a file, mapping errors to the crate error type.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
