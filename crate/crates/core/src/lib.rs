//! Seedable simulator of joint AI-human adaptive search on binary decision
//! sequences.
//!
//! Agents build sequences of 0/1 decision states. A human adapts with a
//! recency-weighted average of its last `k` states, an AI with a uniform
//! average (or, when hallucinating, with fair coin flips). Payoff is the
//! fraction of ones. Tasks run the two agents independently (modular) or in
//! sequence, with the leader's output seeding the follower.
//!
//! Monte Carlo cells and sweeps fan out over rayon when the default
//! `parallel` feature is on and fall back to a sequential loop otherwise;
//! results are identical either way.

pub mod adaptation;
pub mod agent;
pub mod error;
pub mod harness;
pub mod montecarlo;
pub mod par;
pub mod rng;
pub mod task;

pub use adaptation::{
    decision_value, generate_from_seed_window, generate_from_seed_window_traced,
    generate_self_seeded, generate_self_seeded_traced, next_state, payoff, AdaptationRule,
    BitSequence, DecisionValue, Generated, Payoff, Perpetuation, UpdateMode, WindowStep,
};
pub use agent::{AgentSpec, Role};
pub use error::{Error, Result};
pub use harness::capability::{capability_partition, Thresholds};
pub use harness::fit::{argmax_on_interval, eval_poly, fit_polynomial, PolyFit};
pub use harness::peaks::{count_local_peaks, PeakTrajectory};
pub use harness::sweep::{sweep, Axis, Cell, Realized, SweepParam, SweepResult, SweepSpec};
pub use montecarlo::{
    monte_carlo, monte_carlo_cell, monte_carlo_runs, MonteCarloResult, SubsetStats, DEFAULT_RUNS,
};
pub use rng::{RngPolicy, GENERATOR_ID};
pub use task::{run_ai_to_h, run_h_to_ai, run_modular, run_once, RunOutcome, TaskConfig, TaskKind};
