//! Recomputes the stylized worked examples and compares them with the
//! pinned published values.

use std::fmt::Write as _;

use cosearch::{
    decision_value, generate_from_seed_window_traced, AdaptationRule, BitSequence, DecisionValue,
    Error, Perpetuation, RngPolicy, UpdateMode, WindowStep,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub label: String,
    pub computed: String,
    pub expected: String,
}

impl Check {
    pub fn ok(&self) -> bool {
        self.computed == self.expected
    }
}

#[derive(Debug, Clone, Default)]
pub struct WorkedReport {
    pub sections: Vec<(String, Vec<Check>)>,
}

impl WorkedReport {
    pub fn all_ok(&self) -> bool {
        self.sections.iter().all(|(_, c)| c.iter().all(Check::ok))
    }

    pub fn mismatches(&self) -> usize {
        self.sections
            .iter()
            .flat_map(|(_, c)| c)
            .filter(|c| !c.ok())
            .count()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (title, checks) in &self.sections {
            let _ = writeln!(out, "{title}");
            let w = checks.iter().map(|c| c.label.len()).max().unwrap_or(0);
            for c in checks {
                let mark = if c.ok() { "ok  " } else { "FAIL" };
                let _ = writeln!(
                    out,
                    "  {mark} {:<w$}  computed: {:<40} expected: {}",
                    c.label, c.computed, c.expected
                );
            }
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "{} checks, {} mismatches",
            self.sections.iter().map(|(_, c)| c.len()).sum::<usize>(),
            self.mismatches()
        );
        out
    }
}

// (window, value numerator over 4, state, window source) per generated AI state
const FADING_ROWS: [([u8; 4], u64, u8, &str); 6] = [
    ([1, 0, 1, 1], 3, 1, "base"),
    ([0, 1, 1, 0], 2, 0, "base"),
    ([1, 1, 0, 1], 3, 1, "base"),
    ([1, 0, 1, 1], 3, 1, "base+ai"),
    ([0, 1, 1, 0], 2, 0, "base+ai"),
    ([1, 1, 0, 1], 3, 1, "base+ai"),
];
const PERPETUATION_ROWS: [([u8; 4], u64, u8, &str); 2] =
    [([1, 1, 0, 1], 3, 1, "ai"), ([1, 0, 1, 1], 3, 1, "ai")];
const BASE: [u8; 6] = [1, 0, 1, 1, 0, 1];
const FINAL: [u8; 8] = [1, 0, 1, 1, 0, 1, 1, 1];

fn bits(v: &[u8]) -> String {
    format!("{v:?}")
}

fn value(v: Option<DecisionValue>) -> String {
    match v {
        Some(d) => format!("{}/{} = {}", d.num, d.den, d.as_f64()),
        None => "none".into(),
    }
}

fn source(step: &WindowStep) -> &'static str {
    match (step.window.is_empty(), step.base_states, step.window.len()) {
        (true, _, _) => "fair draw",
        (_, 0, _) => "ai",
        (_, b, w) if b == w => "base",
        _ => "base+ai",
    }
}

fn row_checks(step: &WindowStep, window: &[u8], num: u64, state: u8, src: &str) -> Vec<Check> {
    let i = step.index;
    vec![
        Check {
            label: format!("x{i} window"),
            computed: format!("{} ({})", bits(&step.window), source(step)),
            expected: format!("{} ({src})", bits(window)),
        },
        Check {
            label: format!("x{i} value"),
            computed: value(step.value),
            expected: value(Some(DecisionValue { num, den: 4 })),
        },
        Check {
            label: format!("x{i} state"),
            computed: step.state.to_string(),
            expected: state.to_string(),
        },
    ]
}

fn seeded_run(perpetuation: Perpetuation) -> (Vec<u8>, Vec<WindowStep>) {
    let base = BitSequence::new(BASE.to_vec()).expect("valid bits");
    let mut rng = RngPolicy::new(0).stream(0, 0);
    let (g, steps) = generate_from_seed_window_traced(
        &base,
        4,
        8,
        AdaptationRule::RuleUniform,
        UpdateMode::THRESHOLD_TIE_ZERO,
        perpetuation,
        &mut rng,
    )
    .expect("worked example parameters are valid");
    (g.sequence.into_vec(), steps)
}

pub fn show_worked_examples() -> WorkedReport {
    let mut report = WorkedReport::default();

    let (seq, steps) = seeded_run(Perpetuation::RuleBased);
    let fading = steps
        .iter()
        .zip(FADING_ROWS)
        .flat_map(|(s, (w, n, x, src))| row_checks(s, &w, n, x, src))
        .collect();
    report.sections.push((
        "memory fading: base [1,0,1,1,0,1], C = 4, uniform rule, ties -> 0".into(),
        fading,
    ));

    let mut rule_based: Vec<Check> = steps[6..]
        .iter()
        .zip(PERPETUATION_ROWS)
        .flat_map(|(s, (w, n, x, src))| row_checks(s, &w, n, x, src))
        .collect();
    rule_based.push(Check {
        label: "final sequence".into(),
        computed: bits(&seq),
        expected: bits(&FINAL),
    });
    report
        .sections
        .push(("rule-based perpetuation, n_AI = 8".into(), rule_based));

    let (hseq, hsteps) = seeded_run(Perpetuation::Hallucinatory);
    let mut halluc = vec![Check {
        label: "x1..x6".into(),
        computed: bits(&hseq[..6]),
        expected: bits(&FINAL[..6]),
    }];
    for s in &hsteps[6..] {
        halluc.push(Check {
            label: format!("x{} source", s.index),
            computed: format!("{}, value {}", source(s), value(s.value)),
            expected: "fair draw, value none".into(),
        });
        halluc.push(Check {
            label: format!("x{} state", s.index),
            computed: if s.state <= 1 {
                "0 or 1 (random)"
            } else {
                "not a bit"
            }
            .into(),
            expected: "0 or 1 (random)".into(),
        });
    }
    report
        .sections
        .push(("hallucinatory perpetuation, n_AI = 8".into(), halluc));

    let prior = [0u8, 0, 0, 1, 1];
    let heuristic = decision_value(&prior, AdaptationRule::HeuristicLinear).ok();
    let rule = decision_value(&prior, AdaptationRule::RuleUniform).ok();
    let coin = match decision_value(&prior, AdaptationRule::Hallucinatory) {
        Err(Error::UnsupportedRule(_)) => "fair coin, p = 0.5",
        _ => "unexpected decision value",
    };
    let mode_one = UpdateMode::THRESHOLD_TIE_ONE;
    let mut rng = RngPolicy::new(0).stream(0, 0);
    let h_state = cosearch::next_state(&prior, AdaptationRule::HeuristicLinear, mode_one, &mut rng)
        .map(|s| s.to_string())
        .unwrap_or_else(|e| e.to_string());
    report.sections.push((
        "single-step example: prior states [0,0,0,1,1]".into(),
        vec![
            Check {
                label: "heuristic value".into(),
                computed: value(heuristic),
                expected: value(Some(DecisionValue { num: 9, den: 15 })),
            },
            Check {
                label: "heuristic state (ties -> 1)".into(),
                computed: h_state,
                expected: "1".into(),
            },
            Check {
                label: "rule value".into(),
                computed: value(rule),
                expected: value(Some(DecisionValue { num: 2, den: 5 })),
            },
            Check {
                label: "hallucinatory".into(),
                computed: coin.into(),
                expected: "fair coin, p = 0.5".into(),
            },
        ],
    ));

    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_worked_examples_match() {
        let r = show_worked_examples();
        assert!(r.all_ok(), "{}", r.render());
        assert_eq!(r.sections.len(), 4);
        assert_eq!(r.sections[0].1.len(), 18);
    }

    #[test]
    fn render_flags_mismatch() {
        let mut r = show_worked_examples();
        r.sections[1].1[0].expected = "something else".into();
        assert!(!r.all_ok());
        assert_eq!(r.mismatches(), 1);
        assert!(r.render().contains("FAIL"));
    }
}
