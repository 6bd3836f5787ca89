use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::task::RunOutcome;

/// Payoff cut-offs that classify a run's leading agent as high or low
/// capability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub hi: f64,
    pub lo: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { hi: 0.6, lo: 0.4 }
    }
}

impl Thresholds {
    pub fn new(hi: f64, lo: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo >= hi {
            return Err(Error::input(format!(
                "capability thresholds need 0 <= lo < hi <= 1, got lo = {lo}, hi = {hi}"
            )));
        }
        Ok(Self { hi, lo })
    }
}

/// Splits runs into `(high, low, mid)` by the leading agent's Step-1
/// payoff: `>= hi` is high, `<= lo` is low. Run order is preserved.
pub fn capability_partition(
    results: &[RunOutcome],
    hi: f64,
    lo: f64,
) -> Result<(Vec<RunOutcome>, Vec<RunOutcome>, Vec<RunOutcome>)> {
    Thresholds::new(hi, lo)?;
    let mut high = Vec::new();
    let mut low = Vec::new();
    let mut mid = Vec::new();
    for r in results {
        let p = r.h_capability_payoff.as_f64();
        if p >= hi {
            high.push(*r);
        } else if p <= lo {
            low.push(*r);
        } else {
            mid.push(*r);
        }
    }
    Ok((high, low, mid))
}
