//! Monte Carlo means under threshold updating against exhaustive
//! enumeration of every equally likely initialisation.

mod support;

use cosearch::{
    monte_carlo, AdaptationRule, AgentSpec, Perpetuation, RngPolicy, TaskConfig, TaskKind,
    UpdateMode,
};
use support::oracle::{expected, Case, Kind};

fn mode(tie_one: bool) -> UpdateMode {
    UpdateMode::Threshold {
        tie_maps_to_one: tie_one,
    }
}

fn task_config(case: &Case) -> TaskConfig {
    let kind = match case.kind {
        Kind::Modular => TaskKind::Modular,
        Kind::AiToH { c } => TaskKind::AiToH { c },
        Kind::HToAi { c, hallucinate } => TaskKind::HToAi {
            c,
            perpetuation: if hallucinate {
                Perpetuation::Hallucinatory
            } else {
                Perpetuation::RuleBased
            },
        },
    };
    let rule = if case.ai_coin {
        AdaptationRule::Hallucinatory
    } else {
        AdaptationRule::RuleUniform
    };
    TaskConfig::new(
        kind,
        AgentSpec::human(case.n_h, case.k_h, mode(case.h_tie_one)),
        AgentSpec::ai(case.n_ai, case.k_ai, mode(case.ai_tie_one)).with_rule(rule),
    )
    .unwrap()
}

fn assert_within_3se(case: Case, runs: u64, seed: u64) {
    let r = monte_carlo(&task_config(&case), runs, &RngPolicy::new(seed)).unwrap();
    let (_, _, apo) = expected(&case);
    let diff = (r.mean_apo - apo).abs();
    if r.std_error_apo == 0.0 {
        assert!(
            diff < 1e-12,
            "{case:?}: deterministic mean {} vs {apo}",
            r.mean_apo
        );
    } else {
        assert!(
            diff <= 3.0 * r.std_error_apo,
            "{case:?}: {} vs exact {apo} (se {})",
            r.mean_apo,
            r.std_error_apo
        );
    }
}

#[test]
fn modular_small_windows() {
    let case = Case {
        kind: Kind::Modular,
        n_h: 8,
        k_h: 2,
        n_ai: 16,
        k_ai: 2,
        ai_coin: false,
        h_tie_one: false,
        ai_tie_one: false,
    };
    assert_within_3se(case, 10_000, 2024);
}

#[test]
fn every_task_kind() {
    let base = Case {
        kind: Kind::Modular,
        n_h: 6,
        k_h: 3,
        n_ai: 10,
        k_ai: 4,
        ai_coin: false,
        h_tie_one: true,
        ai_tie_one: false,
    };
    let kinds = [
        Kind::Modular,
        Kind::AiToH { c: 3 },
        Kind::HToAi {
            c: 4,
            hallucinate: false,
        },
        Kind::HToAi {
            c: 6,
            hallucinate: true,
        },
    ];
    for (i, kind) in kinds.into_iter().enumerate() {
        assert_within_3se(Case { kind, ..base }, 10_000, 77 + i as u64);
    }
}

#[test]
fn memoryless_agents() {
    let case = Case {
        kind: Kind::AiToH { c: 2 },
        n_h: 4,
        k_h: 0,
        n_ai: 7,
        k_ai: 0,
        ai_coin: false,
        h_tie_one: false,
        ai_tie_one: false,
    };
    assert_within_3se(case, 10_000, 5);
    let coin = Case {
        kind: Kind::Modular,
        ai_coin: true,
        k_ai: 3,
        ..case
    };
    assert_within_3se(coin, 10_000, 6);
}
