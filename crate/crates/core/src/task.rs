//! The three task structures: modular, AI-to-human and human-to-AI.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::adaptation::{
    generate_from_seed_window_with_trajectory, generate_self_seeded_traced, payoff, AdaptationRule,
    BitSequence, Generated, Payoff, Perpetuation,
};
use crate::agent::{AgentSpec, Role};
use crate::error::{Error, Result};
use crate::harness::peaks::count_peaks_exact;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TaskKind {
    /// Independent parallel search; coevolution strength is zero.
    Modular,
    /// AI searches first; the human adapts over the first `c` AI states.
    AiToH { c: usize },
    /// Human searches first; the AI adapts over the human's sequence with
    /// window `c`.
    HToAi {
        c: usize,
        perpetuation: Perpetuation,
    },
}

impl TaskKind {
    pub fn name(&self) -> &'static str {
        match self {
            TaskKind::Modular => "modular",
            TaskKind::AiToH { .. } => "ai_to_h",
            TaskKind::HToAi { .. } => "h_to_ai",
        }
    }

    pub fn c(&self) -> Option<usize> {
        match *self {
            TaskKind::Modular => None,
            TaskKind::AiToH { c } | TaskKind::HToAi { c, .. } => Some(c),
        }
    }
}

/// A validated task: structure plus both agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTaskConfig")]
pub struct TaskConfig {
    pub task: TaskKind,
    pub human: AgentSpec,
    pub ai: AgentSpec,
}

#[derive(Deserialize)]
struct RawTaskConfig {
    task: TaskKind,
    human: AgentSpec,
    ai: AgentSpec,
}

impl TryFrom<RawTaskConfig> for TaskConfig {
    type Error = Error;

    fn try_from(raw: RawTaskConfig) -> Result<Self> {
        TaskConfig::new(raw.task, raw.human, raw.ai)
    }
}

impl TaskConfig {
    pub fn new(task: TaskKind, human: AgentSpec, ai: AgentSpec) -> Result<Self> {
        let cfg = Self { task, human, ai };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.human.role != Role::Human {
            return Err(Error::config("human slot holds a non-human agent"));
        }
        if self.ai.role != Role::Ai {
            return Err(Error::config("ai slot holds a non-ai agent"));
        }
        self.human.validate()?;
        self.ai.validate()?;
        if self.ai.n <= self.human.n {
            return Err(Error::config(format!(
                "|N_AI| > |N_H| violated: n_ai = {} must exceed n_h = {}",
                self.ai.n, self.human.n
            )));
        }
        match self.task {
            TaskKind::Modular => {}
            TaskKind::AiToH { c } => {
                if c < 1 || c > self.ai.n - 1 {
                    return Err(Error::config(format!(
                        "ai_to_h: c = {c} must satisfy 1 <= c <= n_ai - 1 = {}",
                        self.ai.n - 1
                    )));
                }
            }
            TaskKind::HToAi { c, .. } => {
                if c < 1 || c > self.human.n {
                    return Err(Error::config(format!(
                        "h_to_ai: c = {c} must satisfy 1 <= c <= n_h = {}",
                        self.human.n
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Outcome of one simulated run. Payoffs are kept as exact counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub po_h: Payoff,
    pub po_ai: Payoff,
    /// Local peaks in the leading agent's trajectory (the AI's for modular
    /// tasks).
    pub peaks_step1: u32,
    /// Local peaks in the following agent's trajectory (the human's for
    /// modular tasks).
    pub peaks_step2: u32,
    /// Step-1 payoff of the leading agent (the human's for modular tasks).
    pub h_capability_payoff: Payoff,
}

impl RunOutcome {
    /// Joint payoff as an exact ratio `(num, den)`.
    pub fn apo_ratio(&self) -> (u64, u64) {
        let (h, a) = (self.po_h, self.po_ai);
        (h.ones * a.len + a.ones * h.len, 2 * h.len * a.len)
    }

    /// `(po_h + po_ai) / 2`, evaluated so the float identity holds bitwise.
    pub fn apo(&self) -> f64 {
        0.5 * (self.po_h.as_f64() + self.po_ai.as_f64())
    }
}

fn outcome(
    h: &Generated,
    ai: &Generated,
    step1: &Generated,
    step2: &Generated,
    leader: &BitSequence,
) -> Result<RunOutcome> {
    Ok(RunOutcome {
        po_h: payoff(h.sequence.as_slice())?,
        po_ai: payoff(ai.sequence.as_slice())?,
        peaks_step1: count_peaks_exact(&step1.trajectory),
        peaks_step2: count_peaks_exact(&step2.trajectory),
        h_capability_payoff: payoff(leader.as_slice())?,
    })
}

/// Both agents search independently; the human's sequence is drawn first.
pub fn run_modular<R: RngCore + ?Sized>(cfg: &TaskConfig, rng: &mut R) -> Result<RunOutcome> {
    if cfg.task != TaskKind::Modular {
        return Err(Error::config(format!(
            "run_modular given a {} task",
            cfg.task.name()
        )));
    }
    let h = generate_self_seeded_traced(&cfg.human, rng)?;
    let ai = generate_self_seeded_traced(&cfg.ai, rng)?;
    outcome(&h, &ai, &ai, &h, &h.sequence)
}

/// The AI searches its full space, then the human generates `n_h` states
/// over the first `c` AI states with recency weights `1..c`.
pub fn run_ai_to_h<R: RngCore + ?Sized>(cfg: &TaskConfig, rng: &mut R) -> Result<RunOutcome> {
    let TaskKind::AiToH { c } = cfg.task else {
        return Err(Error::config(format!(
            "run_ai_to_h given a {} task",
            cfg.task.name()
        )));
    };
    let ai = generate_self_seeded_traced(&cfg.ai, rng)?;
    let seed = BitSequence::new(ai.sequence.as_slice()[..c].to_vec())?;
    let h = generate_from_seed_window_with_trajectory(
        &seed,
        c,
        cfg.human.n,
        AdaptationRule::HeuristicLinear,
        cfg.human.mode,
        Perpetuation::RuleBased,
        rng,
    )?;
    outcome(&h, &ai, &ai, &h, &ai.sequence)
}

/// The human searches first; its whole sequence seeds the AI, which reads
/// it through a window of width `c`.
pub fn run_h_to_ai<R: RngCore + ?Sized>(cfg: &TaskConfig, rng: &mut R) -> Result<RunOutcome> {
    let TaskKind::HToAi { c, perpetuation } = cfg.task else {
        return Err(Error::config(format!(
            "run_h_to_ai given a {} task",
            cfg.task.name()
        )));
    };
    let h = generate_self_seeded_traced(&cfg.human, rng)?;
    let ai = generate_from_seed_window_with_trajectory(
        &h.sequence,
        c,
        cfg.ai.n,
        AdaptationRule::RuleUniform,
        cfg.ai.mode,
        perpetuation,
        rng,
    )?;
    outcome(&h, &ai, &h, &ai, &h.sequence)
}

pub fn run_once<R: RngCore + ?Sized>(cfg: &TaskConfig, rng: &mut R) -> Result<RunOutcome> {
    match cfg.task {
        TaskKind::Modular => run_modular(cfg, rng),
        TaskKind::AiToH { .. } => run_ai_to_h(cfg, rng),
        TaskKind::HToAi { .. } => run_h_to_ai(cfg, rng),
    }
}
