//! Local-peak counting on decision-value trajectories.
//!
//! A peak is a strict interior local maximum of the per-step decision value.
//! This is the observable used for the "AI wastage" comparison; the model has
//! no tabulated fitness surface, so peaks are read off the search itself.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::adaptation::DecisionValue;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakTrajectory {
    values: Vec<f64>,
}

impl PeakTrajectory {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::input(format!("trajectory value {v} outside [0, 1]")));
        }
        Ok(Self { values })
    }

    pub fn from_decision_values(values: &[DecisionValue]) -> Self {
        Self {
            values: values.iter().map(|v| v.as_f64()).collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

pub fn count_local_peaks(traj: &PeakTrajectory) -> Result<usize> {
    if traj.values.is_empty() {
        return Err(Error::input("cannot count peaks of an empty trajectory"));
    }
    Ok(traj
        .values
        .windows(3)
        .filter(|w| w[1] > w[0] && w[1] > w[2])
        .count())
}

/// Same count on exact ratios; an empty trajectory has no peaks.
pub(crate) fn count_peaks_exact(values: &[DecisionValue]) -> u32 {
    values
        .windows(3)
        .filter(|w| {
            w[1].cmp_value(w[0]) == Ordering::Greater && w[1].cmp_value(w[2]) == Ordering::Greater
        })
        .count() as u32
}
