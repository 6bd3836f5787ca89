//! Result envelopes and their CSV / JSON encodings.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use cosearch::{
    Cell, MonteCarloResult, SubsetStats, SweepParam, SweepResult, TaskConfig, GENERATOR_ID,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::figure::FigureData;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

/// Everything needed to re-run a single Monte Carlo cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRun {
    pub task: TaskConfig,
    pub n_runs: u64,
    pub result: MonteCarloResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Cell(CellRun),
    Sweep(SweepResult),
    Figure(FigureData),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the canonical JSON of the input specification.
    pub config_hash: String,
    pub tool_version: String,
    pub generator: String,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEnvelope {
    pub provenance: Provenance,
    pub payload: Payload,
}

pub fn config_hash<T: Serialize>(spec: &T) -> String {
    let bytes = serde_json::to_vec(spec).expect("specs serialise");
    hex::encode(Sha256::digest(&bytes))
}

impl ResultEnvelope {
    pub fn new<T: Serialize>(spec: &T, master_seed: u64, payload: Payload) -> Self {
        Self {
            provenance: Provenance {
                config_hash: config_hash(spec),
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                generator: GENERATOR_ID.to_string(),
                master_seed,
            },
            payload,
        }
    }

    fn results(&self) -> Vec<&MonteCarloResult> {
        match &self.payload {
            Payload::Cell(c) => vec![&c.result],
            Payload::Sweep(s) => s.cells.iter().map(|c| &c.result).collect(),
            Payload::Figure(f) => f
                .series
                .iter()
                .flat_map(|s| s.sweep.cells.iter().map(|c| &c.result))
                .collect(),
        }
    }

    fn check_finite(&self) -> Result<(), EmitError> {
        for r in self.results() {
            let mut values = vec![
                r.mean_po_h,
                r.mean_po_ai,
                r.mean_apo,
                r.std_error_apo,
                r.mean_peaks_step1,
                r.mean_peaks_step2,
            ];
            for s in [&r.capability.high, &r.capability.low]
                .into_iter()
                .flatten()
            {
                values.extend([s.mean_po_h, s.mean_po_ai, s.mean_apo, s.std_error_apo]);
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(EmitError::Internal(format!(
                    "non-finite statistic in cell {}",
                    r.rng_provenance.cell_id
                )));
            }
        }
        if let Payload::Figure(f) = &self.payload {
            for curve in &f.curves {
                let fit_ok = curve.fit.as_ref().is_none_or(|fit| {
                    fit.coeffs.iter().all(|c| c.is_finite()) && fit.residual_norm.is_finite()
                });
                if !fit_ok {
                    return Err(EmitError::Internal(format!(
                        "non-finite fit for curve {}",
                        curve.label
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String, EmitError> {
        self.check_finite()?;
        let mut s =
            serde_json::to_string_pretty(self).map_err(|e| EmitError::Internal(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_csv(&self) -> Result<String, EmitError> {
        self.check_finite()?;
        let mut out = String::new();
        out.push_str(&CSV_COLUMNS.join(","));
        out.push('\n');
        match &self.payload {
            Payload::Cell(c) => {
                let k_or_c = c.task.task.c().unwrap_or(c.task.human.k);
                let row = Row {
                    axis1: String::new(),
                    axis2: String::new(),
                    series: "",
                    n_ai_raised: "false",
                    n_ai: c.task.ai.n,
                    k_or_c,
                };
                push_row(&mut out, &row, &c.result);
            }
            Payload::Sweep(s) => push_sweep(&mut out, "", s),
            Payload::Figure(f) => {
                for series in &f.series {
                    push_sweep(&mut out, &series.label, &series.sweep);
                }
            }
        }
        Ok(out)
    }

    pub fn encode(&self, format: Format) -> Result<String, EmitError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

pub const CSV_COLUMNS: [&str; 19] = [
    "axis1",
    "axis2",
    "realized_n_ai",
    "realized_k_h_or_c",
    "mean_po_h",
    "mean_po_ai",
    "mean_apo",
    "std_error_apo",
    "mean_peaks_step1",
    "mean_peaks_step2",
    "series",
    "n_runs",
    "n_ai_raised",
    "high_n_runs",
    "high_mean_apo",
    "high_std_error_apo",
    "low_n_runs",
    "low_mean_apo",
    "low_std_error_apo",
];

fn push_sweep(out: &mut String, label: &str, s: &SweepResult) {
    let spec = &s.metadata.spec;
    let uses_c = spec.axis1.param == SweepParam::CRatio || spec.axis2.param == SweepParam::CRatio;
    for cell in &s.cells {
        push_cell(out, label, cell, uses_c);
    }
}

fn push_cell(out: &mut String, label: &str, cell: &Cell, uses_c: bool) {
    let r = &cell.realized;
    let k_or_c = if uses_c { r.c.unwrap_or(r.k_h) } else { r.k_h };
    let row = Row {
        axis1: cell.axis1.to_string(),
        axis2: cell.axis2.to_string(),
        series: label,
        n_ai_raised: if r.n_ai_raised { "true" } else { "false" },
        n_ai: r.n_ai,
        k_or_c,
    };
    push_row(out, &row, &cell.result);
}

struct Row<'a> {
    axis1: String,
    axis2: String,
    series: &'a str,
    n_ai_raised: &'a str,
    n_ai: usize,
    k_or_c: usize,
}

fn subset_fields(s: &Option<SubsetStats>) -> [String; 3] {
    match s {
        Some(s) => [
            s.n_runs.to_string(),
            s.mean_apo.to_string(),
            s.std_error_apo.to_string(),
        ],
        None => ["0".into(), String::new(), String::new()],
    }
}

fn push_row(out: &mut String, row: &Row, r: &MonteCarloResult) {
    let [hn, hm, hs] = subset_fields(&r.capability.high);
    let [ln, lm, ls] = subset_fields(&r.capability.low);
    let Row {
        axis1,
        axis2,
        series,
        n_ai_raised,
        n_ai,
        k_or_c,
    } = row;
    let _ = writeln!(
        out,
        "{axis1},{axis2},{n_ai},{k_or_c},{},{},{},{},{},{},{series},{},{n_ai_raised},{hn},{hm},{hs},{ln},{lm},{ls}",
        r.mean_po_h,
        r.mean_po_ai,
        r.mean_apo,
        r.std_error_apo,
        r.mean_peaks_step1,
        r.mean_peaks_step2,
        r.n_runs,
    );
}

/// Writes `bytes` to `path` via a sibling temporary file and an atomic
/// rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<u64, EmitError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut builder = tempfile::Builder::new();
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        // temp files default to owner-only; results are ordinary files
        builder.permissions(std::fs::Permissions::from_mode(0o644));
    }
    let mut tmp = builder.tempfile_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| EmitError::Io(e.error))?;
    Ok(bytes.len() as u64)
}

/// Encodes `envelope` and writes it atomically; returns bytes written.
pub fn emit_results(
    envelope: &ResultEnvelope,
    path: &Path,
    format: Format,
) -> Result<u64, EmitError> {
    let text = envelope.encode(format)?;
    write_atomic(path, text.as_bytes())
}
