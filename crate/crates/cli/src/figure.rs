//! Canonical figure sweeps with per-curve cubic smoothing.
//!
//! Every figure uses the same base parameters (see [`FigureParams`]);
//! `--set key=value` overrides any of them. The size-ratio axis always runs
//! over the integers `1..=ratio_max`.

use cosearch::harness::fit::has_interior_max;
use cosearch::{
    argmax_on_interval, fit_polynomial, sweep, AgentSpec, Axis, Cell, Perpetuation, PolyFit,
    RngPolicy, SweepParam, SweepResult, SweepSpec, TaskConfig, TaskKind, Thresholds, UpdateMode,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SUPPORTED: [u8; 5] = [3, 4, 5, 6, 8];

/// Refinement ratios (k_h / k_ai or c / k_ai) swept by the grid figures.
pub const REFINEMENT_RATIOS: [f64; 6] = [0.25, 0.5, 1.0, 2.0, 3.0, 4.0];

#[derive(Debug, Error, PartialEq)]
pub enum FigureError {
    #[error("{0}")]
    Unsupported(String),
    #[error("invalid override: {0}")]
    Override(String),
    #[error(transparent)]
    Core(#[from] cosearch::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FigureParams {
    pub n_h: usize,
    pub k_h: usize,
    pub k_ai: usize,
    /// Coevolution window for the sequenced figures that do not sweep it.
    pub c: usize,
    pub ratio_max: usize,
    pub runs: u64,
    pub master_seed: u64,
    pub mode: UpdateMode,
    pub thresholds: Thresholds,
}

impl FigureParams {
    pub fn defaults(fig: u8) -> Self {
        Self {
            n_h: 20,
            k_h: 2,
            k_ai: 4,
            // the wastage figure sits in the moderate-refinement zone
            c: if fig == 8 { 2 } else { 4 },
            ratio_max: 20,
            runs: 1000,
            master_seed: 1,
            mode: UpdateMode::Probabilistic,
            thresholds: Thresholds::default(),
        }
    }

    /// Applies `key=value` overrides in order.
    pub fn apply(&mut self, overrides: &[(String, String)]) -> Result<(), FigureError> {
        fn num<T: std::str::FromStr>(k: &str, v: &str) -> Result<T, FigureError> {
            v.parse()
                .map_err(|_| FigureError::Override(format!("`{k}` expects a number, got `{v}`")))
        }
        for (k, v) in overrides {
            match k.as_str() {
                "n_h" => self.n_h = num(k, v)?,
                "k_h" => self.k_h = num(k, v)?,
                "k_ai" => self.k_ai = num(k, v)?,
                "c" => self.c = num(k, v)?,
                "ratio_max" => self.ratio_max = num(k, v)?,
                "runs" => self.runs = num(k, v)?,
                "seed" => self.master_seed = num(k, v)?,
                "hi" => self.thresholds.hi = num(k, v)?,
                "lo" => self.thresholds.lo = num(k, v)?,
                "mode" => {
                    self.mode = match v.as_str() {
                        "probabilistic" => UpdateMode::Probabilistic,
                        "threshold" => UpdateMode::THRESHOLD_TIE_ZERO,
                        "threshold_tie_one" => UpdateMode::THRESHOLD_TIE_ONE,
                        _ => {
                            return Err(FigureError::Override(format!(
                                "`mode` is one of probabilistic, threshold, threshold_tie_one; got `{v}`"
                            )))
                        }
                    }
                }
                _ => {
                    return Err(FigureError::Override(format!(
                        "unknown key `{k}` (known: n_h, k_h, k_ai, c, ratio_max, runs, seed, hi, lo, mode)"
                    )))
                }
            }
        }
        if self.ratio_max < 1 {
            return Err(FigureError::Override("ratio_max must be at least 1".into()));
        }
        if self.runs == 0 {
            return Err(FigureError::Override("runs must be at least 1".into()));
        }
        Thresholds::new(self.thresholds.hi, self.thresholds.lo)?;
        Ok(())
    }

    fn ratio_axis(&self) -> Axis {
        Axis::new(
            SweepParam::NAiRatio,
            (1..=self.ratio_max).map(|r| r as f64).collect(),
        )
    }

    fn template(&self, task: TaskKind) -> Result<TaskConfig, FigureError> {
        // ai.n is a placeholder; every cell sets it from the size ratio
        let human = AgentSpec::human(self.n_h, self.k_h, self.mode);
        let ai = AgentSpec::ai(self.n_h * 2 + self.k_ai + 1, self.k_ai, self.mode);
        Ok(TaskConfig::new(task, human, ai)?)
    }

    fn spec(&self, task: TaskKind, axis2: Axis) -> Result<SweepSpec, FigureError> {
        let spec = SweepSpec {
            template: self.template(task)?,
            axis1: self.ratio_axis(),
            axis2,
            n_runs: self.runs,
            policy: RngPolicy::new(self.master_seed),
            thresholds: self.thresholds,
        };
        spec.resolve()?;
        Ok(spec)
    }

    fn fixed_c_axis(&self) -> Axis {
        Axis::new(
            SweepParam::CRatio,
            vec![self.c as f64 / self.k_ai.max(1) as f64],
        )
    }
}

/// Labelled sweeps a figure is built from.
pub fn figure_sweeps(fig: u8, p: &FigureParams) -> Result<Vec<(String, SweepSpec)>, FigureError> {
    let refinement = |param| Axis::new(param, REFINEMENT_RATIOS.to_vec());
    let ai_to_h = TaskKind::AiToH { c: p.c };
    let h_to_ai = |perpetuation| TaskKind::HToAi {
        c: p.c,
        perpetuation,
    };
    let out = match fig {
        3 => vec![(
            "modular".into(),
            p.spec(TaskKind::Modular, refinement(SweepParam::KHRatio))?,
        )],
        4 => vec![(
            "ai_to_h".into(),
            p.spec(ai_to_h, refinement(SweepParam::CRatio))?,
        )],
        5 => vec![
            (
                "rule_based".into(),
                p.spec(h_to_ai(Perpetuation::RuleBased), p.fixed_c_axis())?,
            ),
            (
                "hallucinatory".into(),
                p.spec(h_to_ai(Perpetuation::Hallucinatory), p.fixed_c_axis())?,
            ),
        ],
        6 => vec![
            ("ai_to_h".into(), p.spec(ai_to_h, p.fixed_c_axis())?),
            (
                "h_to_ai".into(),
                p.spec(h_to_ai(Perpetuation::RuleBased), p.fixed_c_axis())?,
            ),
        ],
        8 => vec![("ai_to_h".into(), p.spec(ai_to_h, p.fixed_c_axis())?)],
        other => return Err(unsupported(other)),
    };
    Ok(out)
}

pub fn unsupported(fig: u8) -> FigureError {
    let why = match fig {
        1 => {
            "figure 1 is a conceptual map of task structures and has no simulated data".to_string()
        }
        2 => "figure 2 is a stylized single-step illustration; run `cosearch examples` to check it"
            .to_string(),
        7 => "figure 7 is a conceptual illustration and has no simulated data".to_string(),
        n => format!("figure {n} does not exist"),
    };
    FigureError::Unsupported(format!("{why}; replicable figures are 3, 4, 5, 6 and 8"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    MeanApo,
    HighCapabilityApo,
    LowCapabilityApo,
    PeaksStep1,
    PeaksStep2,
}

impl Metric {
    pub fn of(self, cell: &Cell) -> Option<f64> {
        let r = &cell.result;
        match self {
            Metric::MeanApo => Some(r.mean_apo),
            Metric::HighCapabilityApo => r.capability.high.as_ref().map(|s| s.mean_apo),
            Metric::LowCapabilityApo => r.capability.low.as_ref().map(|s| s.mean_apo),
            Metric::PeaksStep1 => Some(r.mean_peaks_step1),
            Metric::PeaksStep2 => Some(r.mean_peaks_step2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub label: String,
    pub series: String,
    pub axis2: f64,
    pub metric: Metric,
    /// Raw cell means as (size ratio, value).
    pub points: Vec<(f64, f64)>,
    pub fit: Option<PolyFit>,
    /// Maximiser of the fitted curve over the observed ratio range.
    pub argmax: Option<(f64, f64)>,
    pub interior_max: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureSeries {
    pub label: String,
    pub sweep: SweepResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureData {
    pub figure: u8,
    pub params: FigureParams,
    pub series: Vec<FigureSeries>,
    pub curves: Vec<Curve>,
}

fn curve_metrics(fig: u8, series: &str) -> Vec<Metric> {
    match (fig, series) {
        (5, _) => vec![Metric::HighCapabilityApo, Metric::LowCapabilityApo],
        (6, "h_to_ai") => vec![Metric::HighCapabilityApo],
        (8, _) => vec![Metric::PeaksStep1, Metric::PeaksStep2, Metric::MeanApo],
        _ => vec![Metric::MeanApo],
    }
}

fn build_curve(series: &str, axis2: f64, metric: Metric, cells: &[&Cell], multi: bool) -> Curve {
    let points: Vec<(f64, f64)> = cells
        .iter()
        .filter_map(|c| metric.of(c).map(|y| (c.axis1, y)))
        .collect();
    let degree = points.len().saturating_sub(1).min(3);
    let fit = if points.len() >= 2 {
        fit_polynomial(&points, degree).ok()
    } else {
        None
    };
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
            (a.min(p.0), b.max(p.0))
        });
    let argmax = fit
        .as_ref()
        .and_then(|f| argmax_on_interval(&f.coeffs, lo, hi).ok());
    let interior_max = fit
        .as_ref()
        .and_then(|f| has_interior_max(&f.coeffs, lo, hi).ok());
    let metric_name = serde_json::to_value(metric)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default();
    let label = if multi {
        format!("{series} {metric_name} @ {axis2}")
    } else {
        format!("{series} {metric_name}")
    };
    Curve {
        label,
        series: series.to_string(),
        axis2,
        metric,
        points,
        fit,
        argmax,
        interior_max,
    }
}

pub fn curves_for(fig: u8, series: &[FigureSeries]) -> Vec<Curve> {
    let mut out = Vec::new();
    for s in series {
        let axis2 = &s.sweep.metadata.spec.axis2.values;
        for &v in axis2 {
            let cells = s.sweep.series(v);
            for metric in curve_metrics(fig, &s.label) {
                out.push(build_curve(&s.label, v, metric, &cells, axis2.len() > 1));
            }
        }
    }
    out
}

/// Runs the canonical sweeps for figure `fig` and smooths each curve.
pub fn replicate_figure(fig: u8, params: &FigureParams) -> Result<FigureData, FigureError> {
    if !SUPPORTED.contains(&fig) {
        return Err(unsupported(fig));
    }
    let mut series = Vec::new();
    for (label, spec) in figure_sweeps(fig, params)? {
        series.push(FigureSeries {
            label,
            sweep: sweep(&spec)?,
        });
    }
    let curves = curves_for(fig, &series);
    Ok(FigureData {
        figure: fig,
        params: *params,
        series,
        curves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(fig: u8) -> FigureParams {
        let mut p = FigureParams::defaults(fig);
        p.apply(&[
            ("runs".into(), "20".into()),
            ("ratio_max".into(), "4".into()),
        ])
        .unwrap();
        p
    }

    #[test]
    fn rejects_conceptual_figures() {
        for fig in [1, 2, 7] {
            let e = replicate_figure(fig, &FigureParams::defaults(fig)).unwrap_err();
            assert!(matches!(e, FigureError::Unsupported(_)));
        }
        let e = unsupported(7).to_string();
        assert!(e.contains("conceptual illustration"), "{e}");
    }

    #[test]
    fn default_grids_are_valid() {
        for fig in SUPPORTED {
            let sweeps = figure_sweeps(fig, &FigureParams::defaults(fig)).unwrap();
            for (_, spec) in sweeps {
                let cells = spec.resolve().unwrap();
                assert_eq!(cells.len() % 20, 0);
            }
        }
        let grid = &figure_sweeps(3, &FigureParams::defaults(3)).unwrap()[0].1;
        assert_eq!(grid.resolve().unwrap().len(), 120);
    }

    #[test]
    fn overrides() {
        let mut p = FigureParams::defaults(6);
        p.apply(&[
            ("n_h".into(), "12".into()),
            ("mode".into(), "threshold".into()),
        ])
        .unwrap();
        assert_eq!(p.n_h, 12);
        assert_eq!(p.mode, UpdateMode::THRESHOLD_TIE_ZERO);
        assert!(p.apply(&[("bogus".into(), "1".into())]).is_err());
        assert!(p.apply(&[("runs".into(), "x".into())]).is_err());
        // k_h ratio 4 needs k_h = 16 <= n_h - 1
        let mut p = FigureParams::defaults(3);
        p.apply(&[("n_h".into(), "10".into())]).unwrap();
        assert!(figure_sweeps(3, &p).is_err());
    }

    #[test]
    fn curves_per_series() {
        let f = replicate_figure(3, &small(3)).unwrap();
        assert_eq!(f.curves.len(), REFINEMENT_RATIOS.len());
        for c in &f.curves {
            assert_eq!(c.points.len(), 4);
            assert_eq!(c.fit.as_ref().unwrap().coeffs.len(), 4);
        }
        let f = replicate_figure(5, &small(5)).unwrap();
        assert_eq!(f.curves.len(), 4);
        let f = replicate_figure(8, &small(8)).unwrap();
        assert_eq!(f.curves.len(), 3);
    }

    #[test]
    fn deterministic() {
        let a = replicate_figure(6, &small(6)).unwrap();
        let b = replicate_figure(6, &small(6)).unwrap();
        assert_eq!(a, b);
    }
}
