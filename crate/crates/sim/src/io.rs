//! Result, summary, manifest and trace files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{ExperimentConfig, HarnessError, Result, ResultRow, SummaryRow, TraceLine};

/// Results file name inside an output directory.
pub const RESULTS_FILE: &str = "results.csv";
/// Summary file name inside an output directory.
pub const SUMMARY_FILE: &str = "summary.csv";
/// Manifest file name inside an output directory.
pub const MANIFEST_FILE: &str = "manifest.json";
/// Formation trace file name inside an output directory.
pub const TRACES_FILE: &str = "traces.jsonl";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_owned(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> HarnessError + '_ {
    move |source| HarnessError::Csv {
        path: path.to_owned(),
        source,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

/// Serialize rows as CSV with a header.
pub fn write_results<W: Write>(writer: W, rows: &[ResultRow]) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Write rows to `path`.
pub fn write_results_file(path: &Path, rows: &[ResultRow]) -> Result<()> {
    write_results(create(path)?, rows).map_err(csv_err(path))
}

/// Read rows back from CSV.
pub fn read_results_file(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_err(path))
}

/// Write a summary CSV. The sweep column is named after the swept variable.
pub fn write_summary<W: Write>(writer: W, rows: &[SummaryRow]) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    let x = rows.first().map_or("sweep_value", |r| r.sweep_variable.name());
    w.write_record([
        "method",
        x,
        "count",
        "mean_sum_throughput",
        "stderr_sum_throughput",
        "p10_sum_throughput",
        "p50_sum_throughput",
        "p90_sum_throughput",
        "mean_num_coalitions",
        "mean_num_attempts",
        "mean_num_deviations",
        "mean_prelog",
    ])?;
    for r in rows {
        w.write_record([
            r.method.name().to_string(),
            r.sweep_value.to_string(),
            r.count.to_string(),
            r.mean.to_string(),
            r.stderr.to_string(),
            r.p10.to_string(),
            r.p50.to_string(),
            r.p90.to_string(),
            r.mean_num_coalitions.to_string(),
            r.mean_num_attempts.to_string(),
            r.mean_num_deviations.to_string(),
            r.mean_prelog.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Write a summary to `path`.
pub fn write_summary_file(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    if rows
        .windows(2)
        .any(|w| w[0].sweep_variable != w[1].sweep_variable)
    {
        return Err(HarnessError::Invalid("rows mix different sweep variables".into()));
    }
    write_summary(create(path)?, rows).map_err(csv_err(path))
}

/// Formation traces as JSON lines.
pub fn write_traces_file(path: &Path, traces: &[TraceLine]) -> Result<()> {
    let mut w = create(path)?;
    for t in traces {
        serde_json::to_writer(&mut w, t).map_err(|source| HarnessError::Json {
            path: path.to_owned(),
            source,
        })?;
        w.write_all(b"\n").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Sidecar describing how a results file was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub code_version: String,
    pub config_hash: String,
    pub master_seed: u64,
    pub num_rows: usize,
    pub results_file: PathBuf,
    pub config: ExperimentConfig,
}

impl Manifest {
    /// Manifest for `config` and the rows produced from it.
    pub fn new(config: &ExperimentConfig, num_rows: usize) -> Result<Self> {
        Ok(Self {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config.hash()?,
            master_seed: config.master_seed,
            num_rows,
            results_file: PathBuf::from(RESULTS_FILE),
            config: config.clone(),
        })
    }

    /// Write pretty-printed JSON.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = create(path)?;
        serde_json::to_writer_pretty(&mut w, self).map_err(|source| HarnessError::Json {
            path: path.to_owned(),
            source,
        })?;
        w.write_all(b"\n").map_err(io_err(path))?;
        w.flush().map_err(io_err(path))
    }
}
