//! Monte Carlo averaging over independent derived streams.
//!
//! All aggregates are computed from exact integer totals, so they do not
//! depend on the order in which runs finish.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::capability::{capability_partition, Thresholds};
use crate::par::map_indexed;
use crate::rng::{RngPolicy, GENERATOR_ID};
use crate::task::{run_once, RunOutcome, TaskConfig};

pub const DEFAULT_RUNS: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngProvenance {
    pub master_seed: u64,
    pub cell_id: u64,
    pub generator: String,
}

/// Exact totals behind a set of runs that share agent sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub n_runs: u64,
    pub n_h: u64,
    pub n_ai: u64,
    pub ones_h: u64,
    pub ones_ai: u64,
    pub peaks_step1: u64,
    pub peaks_step2: u64,
    /// Sum of squared per-run joint-payoff numerators over the common
    /// denominator `2 * n_h * n_ai`.
    pub apo_num_sq: u128,
}

impl Totals {
    pub fn from_runs(runs: &[RunOutcome]) -> Result<Self> {
        let first = runs
            .first()
            .ok_or_else(|| Error::input("cannot aggregate zero runs"))?;
        let (n_h, n_ai) = (first.po_h.len, first.po_ai.len);
        let mut t = Totals {
            n_runs: 0,
            n_h,
            n_ai,
            ones_h: 0,
            ones_ai: 0,
            peaks_step1: 0,
            peaks_step2: 0,
            apo_num_sq: 0,
        };
        for r in runs {
            if r.po_h.len != n_h || r.po_ai.len != n_ai {
                return Err(Error::input(
                    "runs in one aggregate must share sequence lengths",
                ));
            }
            t.n_runs += 1;
            t.ones_h += r.po_h.ones;
            t.ones_ai += r.po_ai.ones;
            t.peaks_step1 += u64::from(r.peaks_step1);
            t.peaks_step2 += u64::from(r.peaks_step2);
            let a = u128::from(r.apo_ratio().0);
            t.apo_num_sq += a * a;
        }
        Ok(t)
    }

    /// Sum of per-run joint-payoff numerators.
    pub fn apo_num_sum(&self) -> u128 {
        u128::from(self.ones_h) * u128::from(self.n_ai)
            + u128::from(self.ones_ai) * u128::from(self.n_h)
    }

    pub fn apo_den(&self) -> u128 {
        2 * u128::from(self.n_h) * u128::from(self.n_ai)
    }

    pub fn mean_po_h(&self) -> f64 {
        self.ones_h as f64 / (self.n_h * self.n_runs) as f64
    }

    pub fn mean_po_ai(&self) -> f64 {
        self.ones_ai as f64 / (self.n_ai * self.n_runs) as f64
    }

    pub fn mean_apo(&self) -> f64 {
        0.5 * (self.mean_po_h() + self.mean_po_ai())
    }

    /// Sample standard deviation of the per-run joint payoff over `sqrt(n)`;
    /// zero for a single run.
    pub fn std_error_apo(&self) -> f64 {
        let r = u128::from(self.n_runs);
        if r < 2 {
            return 0.0;
        }
        let s1 = self.apo_num_sum();
        // r * s2 - s1^2 >= 0 by Cauchy-Schwarz
        let spread = r * self.apo_num_sq - s1 * s1;
        let den = self.apo_den() as f64;
        let var = spread as f64 / (r * (r - 1)) as f64 / (den * den);
        (var / r as f64).sqrt()
    }
}

/// Means over one subset of runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetStats {
    pub n_runs: u64,
    pub mean_po_h: f64,
    pub mean_po_ai: f64,
    pub mean_apo: f64,
    pub std_error_apo: f64,
}

impl SubsetStats {
    pub fn from_runs(runs: &[RunOutcome]) -> Option<Self> {
        let t = Totals::from_runs(runs).ok()?;
        Some(Self {
            n_runs: t.n_runs,
            mean_po_h: t.mean_po_h(),
            mean_po_ai: t.mean_po_ai(),
            mean_apo: t.mean_apo(),
            std_error_apo: t.std_error_apo(),
        })
    }
}

/// Runs conditioned on the leading agent's Step-1 payoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapabilityStats {
    pub thresholds: Thresholds,
    pub high: Option<SubsetStats>,
    pub low: Option<SubsetStats>,
    pub mid_runs: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloResult {
    pub n_runs: u64,
    pub mean_po_h: f64,
    pub mean_po_ai: f64,
    pub mean_apo: f64,
    pub std_error_apo: f64,
    pub mean_peaks_step1: f64,
    pub mean_peaks_step2: f64,
    pub capability: CapabilityStats,
    pub totals: Totals,
    pub rng_provenance: RngProvenance,
}

impl MonteCarloResult {
    pub fn from_runs(
        runs: &[RunOutcome],
        thresholds: Thresholds,
        provenance: RngProvenance,
    ) -> Result<Self> {
        let t = Totals::from_runs(runs)?;
        let (high, low, mid) = capability_partition(runs, thresholds.hi, thresholds.lo)?;
        Ok(Self {
            n_runs: t.n_runs,
            mean_po_h: t.mean_po_h(),
            mean_po_ai: t.mean_po_ai(),
            mean_apo: t.mean_apo(),
            std_error_apo: t.std_error_apo(),
            mean_peaks_step1: t.peaks_step1 as f64 / t.n_runs as f64,
            mean_peaks_step2: t.peaks_step2 as f64 / t.n_runs as f64,
            capability: CapabilityStats {
                thresholds,
                high: SubsetStats::from_runs(&high),
                low: SubsetStats::from_runs(&low),
                mid_runs: mid.len() as u64,
            },
            totals: t,
            rng_provenance: provenance,
        })
    }

    /// Peaks found in Step 1 beyond those found in Step 2; may be negative.
    pub fn wastage(&self) -> f64 {
        self.mean_peaks_step1 - self.mean_peaks_step2
    }
}

/// Every run of one cell, in run-index order. Run `i` draws from the stream
/// derived from `(master_seed, cell_id, i)`.
pub fn monte_carlo_runs(
    cfg: &TaskConfig,
    n_runs: u64,
    policy: &RngPolicy,
    cell_id: u64,
) -> Result<Vec<RunOutcome>> {
    if n_runs == 0 {
        return Err(Error::input("n_runs must be at least 1"));
    }
    cfg.validate()?;
    map_indexed(n_runs, |i| run_once(cfg, &mut policy.stream(cell_id, i)))
        .into_iter()
        .collect()
}

pub fn monte_carlo_cell(
    cfg: &TaskConfig,
    n_runs: u64,
    policy: &RngPolicy,
    cell_id: u64,
    thresholds: Thresholds,
) -> Result<MonteCarloResult> {
    let runs = monte_carlo_runs(cfg, n_runs, policy, cell_id)?;
    MonteCarloResult::from_runs(
        &runs,
        thresholds,
        RngProvenance {
            master_seed: policy.master_seed,
            cell_id,
            generator: GENERATOR_ID.to_string(),
        },
    )
}

/// One cell with id 0 and the default capability thresholds.
pub fn monte_carlo(cfg: &TaskConfig, n_runs: u64, policy: &RngPolicy) -> Result<MonteCarloResult> {
    monte_carlo_cell(cfg, n_runs, policy, 0, Thresholds::default())
}
