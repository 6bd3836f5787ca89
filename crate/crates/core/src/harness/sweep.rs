//! Monte Carlo sweeps over two ratio axes.
//!
//! Ratio coordinates are turned into integer agent parameters with
//! round-half-away-from-zero against the template's base values (`n_h` for
//! the size ratio, `k_ai` for the window ratios). Both the requested ratio
//! and the realised integers are kept per cell.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::capability::Thresholds;
use crate::montecarlo::{MonteCarloResult, RngProvenance};
use crate::par::map_indexed;
use crate::rng::{RngPolicy, GENERATOR_ID};
use crate::task::{run_once, TaskConfig, TaskKind};

pub const PEAK_METRIC: &str =
    "strict interior local maxima of the per-step decision-value trajectory (operationalization)";
pub const ROUNDING: &str =
    "round-half-away-from-zero; n_ai raised to n_h + 1 when the ratio rounds to n_ai <= n_h";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// n_ai = round(ratio * n_h)
    NAiRatio,
    /// k_h = round(ratio * k_ai)
    KHRatio,
    /// c = round(ratio * k_ai); sequenced tasks only
    CRatio,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::NAiRatio => "n_ai_ratio",
            SweepParam::KHRatio => "k_h_ratio",
            SweepParam::CRatio => "c_ratio",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(param: SweepParam, values: Vec<f64>) -> Self {
        Self { param, values }
    }

    fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::config(format!(
                "axis {} is empty",
                self.param.name()
            )));
        }
        if self.values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::config(format!(
                "axis {} values must be positive and finite",
                self.param.name()
            )));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config(format!(
                "axis {} values must be strictly increasing",
                self.param.name()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub template: TaskConfig,
    pub axis1: Axis,
    pub axis2: Axis,
    pub n_runs: u64,
    pub policy: RngPolicy,
    #[serde(default)]
    pub thresholds: Thresholds,
}

/// Integer parameters a cell actually ran with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Realized {
    pub n_h: usize,
    pub k_h: usize,
    pub n_ai: usize,
    pub k_ai: usize,
    pub c: Option<usize>,
    /// Set when the size ratio rounded to `n_ai <= n_h` and was raised.
    pub n_ai_raised: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub axis1: f64,
    pub axis2: f64,
    pub cell_id: u64,
    pub realized: Realized,
    pub result: MonteCarloResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub spec: SweepSpec,
    pub master_seed: u64,
    pub generator: String,
    pub peak_metric: String,
    pub rounding: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub metadata: SweepMetadata,
    pub cells: Vec<Cell>,
}

impl SweepResult {
    pub fn cell(&self, axis1: f64, axis2: f64) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.axis1 == axis1 && c.axis2 == axis2)
    }

    /// Cells sharing one axis-2 value, in axis-1 order.
    pub fn series(&self, axis2: f64) -> Vec<&Cell> {
        self.cells.iter().filter(|c| c.axis2 == axis2).collect()
    }
}

fn round_ratio(ratio: f64, base: usize) -> usize {
    (ratio * base as f64).round() as usize
}

fn apply(
    param: SweepParam,
    ratio: f64,
    cfg: &mut TaskConfig,
    base_n_h: usize,
    base_k_ai: usize,
    raised: &mut bool,
) -> std::result::Result<(), String> {
    match param {
        SweepParam::NAiRatio => {
            let n = round_ratio(ratio, base_n_h);
            if n <= base_n_h {
                *raised = true;
                cfg.ai.n = base_n_h + 1;
            } else {
                cfg.ai.n = n;
            }
        }
        SweepParam::KHRatio => cfg.human.k = round_ratio(ratio, base_k_ai),
        SweepParam::CRatio => {
            let c_new = round_ratio(ratio, base_k_ai);
            match &mut cfg.task {
                TaskKind::Modular => return Err("c_ratio axis needs a sequenced task".into()),
                TaskKind::AiToH { c } | TaskKind::HToAi { c, .. } => *c = c_new,
            }
        }
    }
    Ok(())
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.template.validate()?;
        self.axis1.validate()?;
        self.axis2.validate()?;
        if self.axis1.param == self.axis2.param {
            return Err(Error::config("both axes sweep the same parameter"));
        }
        if self.n_runs == 0 {
            return Err(Error::config("n_runs must be at least 1"));
        }
        Thresholds::new(self.thresholds.hi, self.thresholds.lo)?;
        Ok(())
    }

    /// Every grid cell in row-major order (axis 1 outer), validated.
    pub fn resolve(&self) -> Result<Vec<(f64, f64, TaskConfig, Realized)>> {
        self.validate()?;
        let base_n_h = self.template.human.n;
        let base_k_ai = self.template.ai.k;
        let mut out = Vec::with_capacity(self.axis1.values.len() * self.axis2.values.len());
        for &v1 in &self.axis1.values {
            for &v2 in &self.axis2.values {
                let mut cfg = self.template;
                let mut raised = false;
                let cell_err = |reason: String| Error::InvalidCell {
                    axis1: self.axis1.param.name().to_string(),
                    value1: v1,
                    axis2: self.axis2.param.name().to_string(),
                    value2: v2,
                    reason,
                };
                apply(
                    self.axis1.param,
                    v1,
                    &mut cfg,
                    base_n_h,
                    base_k_ai,
                    &mut raised,
                )
                .map_err(cell_err)?;
                apply(
                    self.axis2.param,
                    v2,
                    &mut cfg,
                    base_n_h,
                    base_k_ai,
                    &mut raised,
                )
                .map_err(cell_err)?;
                cfg.validate().map_err(|e| cell_err(e.to_string()))?;
                let realized = Realized {
                    n_h: cfg.human.n,
                    k_h: cfg.human.k,
                    n_ai: cfg.ai.n,
                    k_ai: cfg.ai.k,
                    c: cfg.task.c(),
                    n_ai_raised: raised,
                };
                out.push((v1, v2, cfg, realized));
            }
        }
        Ok(out)
    }
}

/// Evaluates every cell. Runs of all cells are scheduled together; cell `j`
/// run `i` always draws from stream `(master_seed, j, i)`.
pub fn sweep(spec: &SweepSpec) -> Result<SweepResult> {
    let cells = spec.resolve()?;
    let runs = spec.n_runs;
    let total = cells.len() as u64 * runs;
    let outcomes = map_indexed(total, |idx| {
        let cell = idx / runs;
        let run = idx % runs;
        run_once(&cells[cell as usize].2, &mut spec.policy.stream(cell, run))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let results = cells
        .iter()
        .zip(outcomes.chunks(runs as usize))
        .enumerate()
        .map(|(j, ((v1, v2, _, realized), chunk))| {
            let result = MonteCarloResult::from_runs(
                chunk,
                spec.thresholds,
                RngProvenance {
                    master_seed: spec.policy.master_seed,
                    cell_id: j as u64,
                    generator: GENERATOR_ID.to_string(),
                },
            )?;
            Ok(Cell {
                axis1: *v1,
                axis2: *v2,
                cell_id: j as u64,
                realized: *realized,
                result,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SweepResult {
        metadata: SweepMetadata {
            spec: spec.clone(),
            master_seed: spec.policy.master_seed,
            generator: GENERATOR_ID.to_string(),
            peak_metric: PEAK_METRIC.to_string(),
            rounding: ROUNDING.to_string(),
        },
        cells: results,
    })
}
