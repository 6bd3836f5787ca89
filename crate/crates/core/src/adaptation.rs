//! Adaptation primitives: decision values, single-state updates, sequence
//! generation and payoff.
//!
//! Decision values are kept as exact integer ratios. The threshold
//! comparison against one half is done by cross-multiplication and the
//! probabilistic update draws an integer uniformly from `0..den`, so no
//! floating-point value ever decides a state.

use std::cmp::Ordering;
use std::fmt;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::agent::AgentSpec;
use crate::error::{Error, Result};
use crate::rng::{bernoulli_ratio, fair_bit};

/// Ordered binary decision states, oldest first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct BitSequence(Vec<u8>);

impl BitSequence {
    pub fn new(states: Vec<u8>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::input("bit sequence must be non-empty"));
        }
        if let Some(pos) = states.iter().position(|&b| b > 1) {
            return Err(Error::input(format!(
                "state {} at position {pos} is not 0 or 1",
                states[pos]
            )));
        }
        Ok(Self(states))
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false: sequences are non-empty by construction.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ones(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn concat(&self, other: &BitSequence) -> BitSequence {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        BitSequence(v)
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.0
    }
}

impl TryFrom<Vec<u8>> for BitSequence {
    type Error = Error;

    fn try_from(v: Vec<u8>) -> Result<Self> {
        BitSequence::new(v)
    }
}

impl From<BitSequence> for Vec<u8> {
    fn from(s: BitSequence) -> Self {
        s.0
    }
}

impl fmt::Display for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str("]")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdaptationRule {
    /// Window weights 1, 2, ..., W with the most recent state heaviest.
    HeuristicLinear,
    /// Equal weights over the window.
    RuleUniform,
    /// No memory: every state is an independent fair draw.
    Hallucinatory,
}

impl AdaptationRule {
    pub fn name(self) -> &'static str {
        match self {
            AdaptationRule::HeuristicLinear => "heuristic_linear",
            AdaptationRule::RuleUniform => "rule_uniform",
            AdaptationRule::Hallucinatory => "hallucinatory",
        }
    }

    /// Weight applied to the window position `pos` (0 = oldest).
    pub fn weight(self, pos: usize) -> Option<u64> {
        match self {
            AdaptationRule::HeuristicLinear => Some(pos as u64 + 1),
            AdaptationRule::RuleUniform => Some(1),
            AdaptationRule::Hallucinatory => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateMode {
    /// State is 1 when the decision value exceeds one half. A value of
    /// exactly one half maps to 1 only when `tie_maps_to_one` is set.
    Threshold { tie_maps_to_one: bool },
    /// State is a Bernoulli draw with success probability equal to the
    /// decision value.
    #[default]
    Probabilistic,
}

impl UpdateMode {
    pub const THRESHOLD_TIE_ZERO: UpdateMode = UpdateMode::Threshold {
        tie_maps_to_one: false,
    };
    pub const THRESHOLD_TIE_ONE: UpdateMode = UpdateMode::Threshold {
        tie_maps_to_one: true,
    };
}

/// Exact weighted average `num / den` of a window, never reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DecisionValue {
    pub num: u64,
    pub den: u64,
}

impl DecisionValue {
    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn cmp_half(self) -> Ordering {
        (2 * self.num).cmp(&self.den)
    }

    /// Exact rational comparison by cross-multiplication.
    pub fn cmp_value(self, other: DecisionValue) -> Ordering {
        (u128::from(self.num) * u128::from(other.den))
            .cmp(&(u128::from(other.num) * u128::from(self.den)))
    }
}

impl fmt::Display for DecisionValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Weighted average of `window` (oldest first) under `rule`.
pub fn decision_value(window: &[u8], rule: AdaptationRule) -> Result<DecisionValue> {
    if window.is_empty() {
        return Err(Error::input("decision window must be non-empty"));
    }
    if rule == AdaptationRule::Hallucinatory {
        return Err(Error::UnsupportedRule("hallucinatory"));
    }
    let mut num = 0u64;
    let mut den = 0u64;
    for (pos, &bit) in window.iter().enumerate() {
        if bit > 1 {
            return Err(Error::input(format!("window state {bit} is not 0 or 1")));
        }
        // rule is not Hallucinatory here, so a weight always exists
        let w = rule.weight(pos).unwrap_or(1);
        num += w * u64::from(bit);
        den += w;
    }
    Ok(DecisionValue { num, den })
}

/// One update: the new state together with the decision value that drove
/// it (absent for hallucinatory draws).
pub(crate) fn step<R: RngCore + ?Sized>(
    window: &[u8],
    rule: AdaptationRule,
    mode: UpdateMode,
    rng: &mut R,
) -> Result<(u8, Option<DecisionValue>)> {
    if rule == AdaptationRule::Hallucinatory {
        return Ok((fair_bit(rng), None));
    }
    let value = decision_value(window, rule)?;
    let state = match mode {
        UpdateMode::Threshold { tie_maps_to_one } => match value.cmp_half() {
            Ordering::Greater => 1,
            Ordering::Equal => u8::from(tie_maps_to_one),
            Ordering::Less => 0,
        },
        UpdateMode::Probabilistic => bernoulli_ratio(rng, value.num, value.den),
    };
    Ok((state, Some(value)))
}

/// Next state given the most recent `window` (oldest first).
///
/// The stream is consulted only under the hallucinatory rule or in
/// probabilistic mode.
pub fn next_state<R: RngCore + ?Sized>(
    window: &[u8],
    rule: AdaptationRule,
    mode: UpdateMode,
    rng: &mut R,
) -> Result<u8> {
    step(window, rule, mode, rng).map(|(s, _)| s)
}

/// A generated sequence plus the decision value computed at every
/// rule-driven step, in generation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    pub sequence: BitSequence,
    pub trajectory: Vec<DecisionValue>,
}

/// Self-seeded search of `spec.n` states.
///
/// The first `max(k, 1)` states are fair draws; every later state is
/// updated from the `k` most recent ones. With `k = 0` (or the
/// hallucinatory rule) every state is an independent fair draw.
pub fn generate_self_seeded<R: RngCore + ?Sized>(
    spec: &AgentSpec,
    rng: &mut R,
) -> Result<BitSequence> {
    generate_self_seeded_traced(spec, rng).map(|g| g.sequence)
}

pub fn generate_self_seeded_traced<R: RngCore + ?Sized>(
    spec: &AgentSpec,
    rng: &mut R,
) -> Result<Generated> {
    spec.validate()?;
    let n = spec.n;
    let k = spec.k;
    let mut seq = Vec::with_capacity(n);
    let mut trajectory = Vec::new();
    if k == 0 || spec.rule == AdaptationRule::Hallucinatory {
        seq.extend((0..n).map(|_| fair_bit(rng)));
    } else {
        seq.extend((0..k).map(|_| fair_bit(rng)));
        trajectory.reserve(n - k);
        for t in k..n {
            let (s, v) = step(&seq[t - k..t], spec.rule, spec.mode, rng)?;
            seq.push(s);
            trajectory.extend(v);
        }
    }
    Ok(Generated {
        sequence: BitSequence(seq),
        trajectory,
    })
}

/// How states are produced once the seeding sequence is exhausted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Perpetuation {
    RuleBased,
    Hallucinatory,
}

/// One generated state of a seed-window search, with its full provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowStep {
    /// 1-based index of the generated state.
    pub index: usize,
    /// The window consulted, oldest first; empty for hallucinated states.
    pub window: Vec<u8>,
    /// How many leading window entries come from the base sequence.
    pub base_states: usize,
    pub value: Option<DecisionValue>,
    pub state: u8,
}

/// Extends a seeding sequence with `target_len` generated states.
///
/// While `i <= base.len()`, generated state `i` (1-based) reads positions
/// `i..i+C-1` of the tape formed by `base` followed by the states generated
/// so far, so base states fade out of the window one per step. Once the base
/// is exhausted (`i > base.len()`), the window is the `C` most recent
/// generated states under rule-based perpetuation, and every state is a fair
/// draw under hallucinatory perpetuation.
pub fn generate_from_seed_window<R: RngCore + ?Sized>(
    base: &BitSequence,
    window_size: usize,
    target_len: usize,
    rule: AdaptationRule,
    mode: UpdateMode,
    perpetuation: Perpetuation,
    rng: &mut R,
) -> Result<BitSequence> {
    seed_window_impl(
        base,
        window_size,
        target_len,
        rule,
        mode,
        perpetuation,
        rng,
        None,
    )
    .map(|g| g.sequence)
}

pub fn generate_from_seed_window_traced<R: RngCore + ?Sized>(
    base: &BitSequence,
    window_size: usize,
    target_len: usize,
    rule: AdaptationRule,
    mode: UpdateMode,
    perpetuation: Perpetuation,
    rng: &mut R,
) -> Result<(Generated, Vec<WindowStep>)> {
    let mut steps = Vec::with_capacity(target_len);
    let g = seed_window_impl(
        base,
        window_size,
        target_len,
        rule,
        mode,
        perpetuation,
        rng,
        Some(&mut steps),
    )?;
    Ok((g, steps))
}

/// Same as [`generate_from_seed_window`] but also returns the decision-value
/// trajectory.
pub(crate) fn generate_from_seed_window_with_trajectory<R: RngCore + ?Sized>(
    base: &BitSequence,
    window_size: usize,
    target_len: usize,
    rule: AdaptationRule,
    mode: UpdateMode,
    perpetuation: Perpetuation,
    rng: &mut R,
) -> Result<Generated> {
    seed_window_impl(
        base,
        window_size,
        target_len,
        rule,
        mode,
        perpetuation,
        rng,
        None,
    )
}

#[allow(clippy::too_many_arguments)]
fn seed_window_impl<R: RngCore + ?Sized>(
    base: &BitSequence,
    window_size: usize,
    target_len: usize,
    rule: AdaptationRule,
    mode: UpdateMode,
    perpetuation: Perpetuation,
    rng: &mut R,
    mut steps: Option<&mut Vec<WindowStep>>,
) -> Result<Generated> {
    if window_size < 1 {
        return Err(Error::input("seed window size must be at least 1"));
    }
    if target_len < 1 {
        return Err(Error::input("target length must be at least 1"));
    }
    let base_len = base.len();
    if window_size > base_len {
        return Err(Error::InvalidSeed {
            window: window_size,
            base_len,
        });
    }

    let mut tape = Vec::with_capacity(base_len + target_len);
    tape.extend_from_slice(base.as_slice());
    let mut trajectory = Vec::with_capacity(target_len);

    for i in 1..=target_len {
        let hallucinate = perpetuation == Perpetuation::Hallucinatory && i > base_len;
        let (state, value, lo) = if hallucinate {
            (fair_bit(rng), None, None)
        } else {
            // inside the seed the window slides along the tape; past it, the
            // window is the `window_size` most recent generated states
            let lo = if i <= base_len {
                i - 1
            } else {
                tape.len() - window_size
            };
            let (s, v) = step(&tape[lo..lo + window_size], rule, mode, rng)?;
            (s, v, Some(lo))
        };
        trajectory.extend(value);
        if let Some(steps) = steps.as_deref_mut() {
            let (window, base_states) = match lo {
                Some(lo) => (
                    tape[lo..lo + window_size].to_vec(),
                    base_len.saturating_sub(lo).min(window_size),
                ),
                None => (Vec::new(), 0),
            };
            steps.push(WindowStep {
                index: i,
                window,
                base_states,
                value,
                state,
            });
        }
        tape.push(state);
    }

    Ok(Generated {
        sequence: BitSequence(tape.split_off(base_len)),
        trajectory,
    })
}

/// Exact payoff: count of ones over length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Payoff {
    pub ones: u64,
    pub len: u64,
}

impl Payoff {
    pub fn as_f64(self) -> f64 {
        self.ones as f64 / self.len as f64
    }
}

pub fn payoff(seq: &[u8]) -> Result<Payoff> {
    if seq.is_empty() {
        return Err(Error::input("payoff of an empty sequence is undefined"));
    }
    let ones = seq.iter().filter(|&&b| b == 1).count() as u64;
    Ok(Payoff {
        ones,
        len: seq.len() as u64,
    })
}
