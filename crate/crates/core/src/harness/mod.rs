//! Sweeps, trajectory diagnostics, capability conditioning and curve
//! smoothing.

pub mod capability;
pub mod fit;
pub mod peaks;
pub mod sweep;
