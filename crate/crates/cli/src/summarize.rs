//! Merging replica outputs into per-checkpoint statistics.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::runner::{Manifest, ReplicaSidecar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub checkpoint: u64,
    pub comparator: String,
    pub replicas: usize,
    pub mean_average_regret: f64,
    pub stdev_average_regret: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub config_hash: String,
    pub replicas: usize,
    pub rows: Vec<SummaryRow>,
    /// Share of replicas whose EXP3.IX certificate held, when recorded.
    pub certificate_fraction: Option<f64>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Report(format!("{}: {e}", path.display())))
}

/// Mean and sample standard deviation.
fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = unibandit::sum::sum(xs.iter().copied()) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss = unibandit::sum::sum(xs.iter().map(|x| (x - mean) * (x - mean)));
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Reads `dir`'s manifest, sidecars and summary files and aggregates the
/// average regret `cum_regret / T` of every comparator at every checkpoint.
/// Writes `report.csv` next to the inputs.
pub fn summarize(dir: &Path) -> Result<Report, CliError> {
    let manifest: Manifest = read_json(&dir.join("manifest.json"))?;
    // checkpoint -> comparator -> values across replicas
    let mut table: BTreeMap<u64, BTreeMap<String, Vec<f64>>> = BTreeMap::new();
    let mut certs = Vec::new();
    let mut comparator_order: Vec<String> = Vec::new();
    for entry in &manifest.replicas {
        let side: ReplicaSidecar = read_json(&dir.join(&entry.file))?;
        if side.config_hash != manifest.config_hash {
            return Err(CliError::Report(format!(
                "{} has config hash {}, manifest has {}",
                entry.file, side.config_hash, manifest.config_hash
            )));
        }
        if let Some(c) = side.certificate {
            certs.push(c);
        }
        let path = dir.join(&side.summary.file);
        let mut rd = csv::Reader::from_path(&path)
            .map_err(|e| CliError::Report(format!("{}: {e}", path.display())))?;
        let header = rd
            .headers()
            .map_err(|e| CliError::Report(format!("{}: {e}", path.display())))?
            .clone();
        let names: Vec<String> = header
            .iter()
            .skip(3)
            .map(|h| h.trim_start_matches("cum_regret_").to_string())
            .collect();
        if comparator_order.is_empty() {
            comparator_order = names.clone();
        } else if comparator_order != names {
            return Err(CliError::Report(format!(
                "{}: comparator columns differ between replicas",
                path.display()
            )));
        }
        for rec in rd.records() {
            let rec = rec.map_err(|e| CliError::Report(format!("{}: {e}", path.display())))?;
            let num = |i: usize| -> Result<f64, CliError> {
                rec.get(i)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| CliError::Report(format!("{}: bad field {i}", path.display())))
            };
            let t = num(1)? as u64;
            for (j, name) in names.iter().enumerate() {
                let v = num(3 + j)? / t as f64;
                table
                    .entry(t)
                    .or_default()
                    .entry(name.clone())
                    .or_default()
                    .push(v);
            }
        }
    }
    let mut rows = Vec::new();
    for (t, by_name) in &table {
        for name in &comparator_order {
            let Some(vals) = by_name.get(name) else { continue };
            let (mean, sd) = mean_sd(vals);
            rows.push(SummaryRow {
                checkpoint: *t,
                comparator: name.clone(),
                replicas: vals.len(),
                mean_average_regret: mean,
                stdev_average_regret: sd,
            });
        }
    }
    let report = Report {
        name: manifest.name.clone(),
        config_hash: manifest.config_hash.clone(),
        replicas: manifest.replicas.len(),
        rows,
        certificate_fraction: (!certs.is_empty())
            .then(|| certs.iter().filter(|&&c| c).count() as f64 / certs.len() as f64),
    };
    let out = dir.join("report.csv");
    let mut w = csv::Writer::from_path(&out)
        .map_err(|e| CliError::Report(format!("{}: {e}", out.display())))?;
    let io = |e: csv::Error| CliError::Report(format!("{}: {e}", out.display()));
    w.write_record([
        "checkpoint_T",
        "comparator",
        "replicas",
        "mean_average_regret",
        "stdev_average_regret",
    ])
    .map_err(io)?;
    for r in &report.rows {
        w.write_record([
            r.checkpoint.to_string(),
            r.comparator.clone(),
            r.replicas.to_string(),
            r.mean_average_regret.to_string(),
            r.stdev_average_regret.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(&out, e))?;
    Ok(report)
}
