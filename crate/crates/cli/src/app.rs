//! Command execution and exit-code mapping, independent of argument parsing.

use std::path::{Path, PathBuf};

use cosearch::{monte_carlo_cell, sweep, TaskConfig, Thresholds};
use serde::Serialize;
use thiserror::Error;

use crate::config::{parse_experiment, ConfigError, ExperimentFile};
use crate::envelope::{write_atomic, CellRun, EmitError, Format, Payload, ResultEnvelope};
use crate::figure::{replicate_figure, FigureError, FigureParams};
use crate::plot::render_svg;
use crate::worked::show_worked_examples;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Validation(String),
    #[error("worked examples do not match:\n{0}")]
    Golden(String),
    #[error("{0}")]
    Io(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Validation(_) => 1,
            AppError::Golden(_) => 2,
            // an output that cannot be produced is reported as an output failure
            AppError::Io(_) | AppError::Internal(_) => 3,
        }
    }
}

impl From<ConfigError> for AppError {
    fn from(e: ConfigError) -> Self {
        AppError::Validation(e.to_string())
    }
}

impl From<cosearch::Error> for AppError {
    fn from(e: cosearch::Error) -> Self {
        AppError::Validation(e.to_string())
    }
}

impl From<FigureError> for AppError {
    fn from(e: FigureError) -> Self {
        AppError::Validation(e.to_string())
    }
}

impl From<EmitError> for AppError {
    fn from(e: EmitError) -> Self {
        match e {
            EmitError::Io(e) => AppError::Io(e.to_string()),
            EmitError::Internal(m) => AppError::Internal(m),
        }
    }
}

/// Flags shared by every result-producing command.
#[derive(Debug, Clone, Default)]
pub struct OutputOpts {
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub runs: Option<u64>,
}

/// What a command produced: text for stdout and files written.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub written: Vec<(PathBuf, u64)>,
}

/// Input specification of a single-cell run; hashed into the provenance.
#[derive(Serialize)]
struct RunSpec<'a> {
    task: &'a TaskConfig,
    n_runs: u64,
    master_seed: u64,
    thresholds: Thresholds,
}

pub fn load_experiment(path: &Path, opts: &OutputOpts) -> Result<ExperimentFile, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut file = parse_experiment(&text)
        .map_err(|e| AppError::Validation(format!("{}: {e}", path.display())))?;
    if let Some(seed) = opts.seed {
        file.master_seed = seed;
    }
    if let Some(runs) = opts.runs {
        if runs == 0 {
            return Err(AppError::Validation("--runs must be at least 1".into()));
        }
        file.runs = runs;
    }
    Ok(file)
}

pub fn run_cell(file: &ExperimentFile) -> Result<ResultEnvelope, AppError> {
    let result = monte_carlo_cell(&file.task, file.runs, &file.policy(), 0, file.thresholds)?;
    let spec = RunSpec {
        task: &file.task,
        n_runs: file.runs,
        master_seed: file.master_seed,
        thresholds: file.thresholds,
    };
    let run = CellRun {
        task: file.task,
        n_runs: file.runs,
        result,
    };
    Ok(ResultEnvelope::new(
        &spec,
        file.master_seed,
        Payload::Cell(run),
    ))
}

pub fn run_sweep(file: &ExperimentFile) -> Result<ResultEnvelope, AppError> {
    let spec = file
        .sweep_spec()
        .ok_or_else(|| AppError::Validation("the experiment has no [sweep] table".into()))?;
    let result = sweep(&spec)?;
    Ok(ResultEnvelope::new(
        &spec,
        file.master_seed,
        Payload::Sweep(result),
    ))
}

pub fn run_figure(
    fig: u8,
    overrides: &[(String, String)],
    opts: &OutputOpts,
) -> Result<ResultEnvelope, AppError> {
    let mut params = FigureParams::defaults(fig);
    params.apply(overrides)?;
    if let Some(seed) = opts.seed {
        params.master_seed = seed;
    }
    if let Some(runs) = opts.runs {
        params.apply(&[("runs".into(), runs.to_string())])?;
    }
    let data = replicate_figure(fig, &params)?;
    Ok(ResultEnvelope::new(
        &(fig, &params),
        params.master_seed,
        Payload::Figure(data),
    ))
}

/// Re-executes the computation recorded in an envelope.
pub fn rerun(env: &ResultEnvelope) -> Result<ResultEnvelope, AppError> {
    match &env.payload {
        Payload::Cell(c) => {
            let file = ExperimentFile {
                task: c.task,
                runs: c.n_runs,
                master_seed: env.provenance.master_seed,
                thresholds: c.result.capability.thresholds,
                sweep: None,
                output_path: None,
                output_format: None,
            };
            run_cell(&file)
        }
        Payload::Sweep(s) => {
            let spec = &s.metadata.spec;
            let result = sweep(spec)?;
            Ok(ResultEnvelope::new(
                spec,
                spec.policy.master_seed,
                Payload::Sweep(result),
            ))
        }
        Payload::Figure(f) => {
            let data = replicate_figure(f.figure, &f.params)?;
            Ok(ResultEnvelope::new(
                &(f.figure, &f.params),
                f.params.master_seed,
                Payload::Figure(data),
            ))
        }
    }
}

fn pick_format(flag: Option<Format>, config: Option<Format>, out: Option<&Path>) -> Format {
    flag.or(config)
        .unwrap_or_else(|| match out.and_then(|p| p.extension()) {
            Some(ext) if ext == "json" => Format::Json,
            _ => Format::Csv,
        })
}

/// Encodes `env` and writes it to `out`, or returns it as stdout text.
pub fn deliver(
    env: &ResultEnvelope,
    format: Format,
    out: Option<&Path>,
) -> Result<Outcome, AppError> {
    let text = env.encode(format)?;
    let mut outcome = Outcome::default();
    match out {
        Some(path) => {
            let n = write_atomic(path, text.as_bytes())
                .map_err(|e| AppError::Io(format!("cannot write {}: {e}", path.display())))?;
            outcome.written.push((path.to_path_buf(), n));
        }
        None => outcome.stdout = text,
    }
    Ok(outcome)
}

pub fn cmd_run(config: &Path, opts: &OutputOpts) -> Result<Outcome, AppError> {
    let file = load_experiment(config, opts)?;
    let env = run_cell(&file)?;
    let out = opts.out.clone().or(file.output_path.clone());
    deliver(
        &env,
        pick_format(opts.format, file.output_format, out.as_deref()),
        out.as_deref(),
    )
}

pub fn cmd_sweep(config: &Path, opts: &OutputOpts) -> Result<Outcome, AppError> {
    let file = load_experiment(config, opts)?;
    let env = run_sweep(&file)?;
    let out = opts.out.clone().or(file.output_path.clone());
    deliver(
        &env,
        pick_format(opts.format, file.output_format, out.as_deref()),
        out.as_deref(),
    )
}

pub fn parse_override(s: &str) -> Result<(String, String), AppError> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(AppError::Validation(format!(
            "--set expects key=value, got `{s}`"
        ))),
    }
}

/// Runs a figure; the SVG goes to `svg`, or next to `--out` when only that
/// is given.
pub fn cmd_figure(
    fig: u8,
    sets: &[String],
    svg: Option<&Path>,
    opts: &OutputOpts,
) -> Result<Outcome, AppError> {
    let overrides = sets
        .iter()
        .map(|s| parse_override(s))
        .collect::<Result<Vec<_>, _>>()?;
    let env = run_figure(fig, &overrides, opts)?;
    let format = pick_format(opts.format, None, opts.out.as_deref());
    let mut outcome = deliver(&env, format, opts.out.as_deref())?;
    let svg_path = svg
        .map(Path::to_path_buf)
        .or_else(|| opts.out.as_ref().map(|p| p.with_extension("svg")));
    if let (Some(path), Payload::Figure(data)) = (svg_path, &env.payload) {
        let n = write_atomic(&path, render_svg(data).as_bytes())
            .map_err(|e| AppError::Io(format!("cannot write {}: {e}", path.display())))?;
        outcome.written.push((path, n));
    }
    Ok(outcome)
}

pub fn cmd_examples() -> Result<Outcome, AppError> {
    let report = show_worked_examples();
    let text = report.render();
    if report.all_ok() {
        Ok(Outcome {
            stdout: text,
            written: vec![],
        })
    } else {
        Err(AppError::Golden(text))
    }
}
