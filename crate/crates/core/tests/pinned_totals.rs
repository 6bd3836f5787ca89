//! Exact integer totals of a fixed sweep. The same numbers must come out of
//! the rayon build and the sequential (`--no-default-features`) build, and
//! must not drift between releases without a deliberate generator change.

use cosearch::{
    sweep, AgentSpec, Axis, Perpetuation, RngPolicy, SweepParam, SweepSpec, TaskConfig, TaskKind,
    Thresholds, UpdateMode,
};

fn spec() -> SweepSpec {
    let p = UpdateMode::Probabilistic;
    SweepSpec {
        template: TaskConfig::new(
            TaskKind::HToAi {
                c: 3,
                perpetuation: Perpetuation::Hallucinatory,
            },
            AgentSpec::human(8, 2, p),
            AgentSpec::ai(20, 3, p),
        )
        .unwrap(),
        axis1: Axis::new(SweepParam::NAiRatio, vec![2.0, 3.0]),
        axis2: Axis::new(SweepParam::CRatio, vec![0.5, 1.0]),
        n_runs: 250,
        policy: RngPolicy::new(99),
        thresholds: Thresholds::default(),
    }
}

#[test]
fn totals_are_pinned() {
    let r = sweep(&spec()).unwrap();
    let got: Vec<(u64, u64, u64, u64, u128)> = r
        .cells
        .iter()
        .map(|c| {
            let t = &c.result.totals;
            (
                t.ones_h,
                t.ones_ai,
                t.peaks_step1,
                t.peaks_step2,
                t.apo_num_sq,
            )
        })
        .collect();
    let expected: Vec<(u64, u64, u64, u64, u128)> = vec![
        (1024, 1978, 9, 0, 5982208),
        (931, 1925, 7, 1, 5503808),
        (983, 2997, 18, 0, 12155776),
        (1044, 3110, 9, 3, 13244544),
    ];
    assert_eq!(got, expected);
}
