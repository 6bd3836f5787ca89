use serde::{Deserialize, Serialize};

use crate::adaptation::{AdaptationRule, UpdateMode};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Human,
    Ai,
}

/// One searching agent: its search-space size, interdependence window,
/// update rule and update mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub role: Role,
    pub n: usize,
    pub k: usize,
    pub rule: AdaptationRule,
    pub mode: UpdateMode,
}

impl AgentSpec {
    /// Human agent with the recency-weighted heuristic rule.
    pub fn human(n: usize, k: usize, mode: UpdateMode) -> Self {
        Self {
            role: Role::Human,
            n,
            k,
            rule: AdaptationRule::HeuristicLinear,
            mode,
        }
    }

    /// AI agent with the uniform rule.
    pub fn ai(n: usize, k: usize, mode: UpdateMode) -> Self {
        Self {
            role: Role::Ai,
            n,
            k,
            rule: AdaptationRule::RuleUniform,
            mode,
        }
    }

    pub fn with_rule(mut self, rule: AdaptationRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let who = match self.role {
            Role::Human => "human",
            Role::Ai => "ai",
        };
        if self.n == 0 {
            return Err(Error::config(format!("{who}: n must be positive")));
        }
        if self.k > self.n - 1 {
            return Err(Error::config(format!(
                "{who}: k = {} must satisfy 0 <= k <= n - 1 = {}",
                self.k,
                self.n - 1
            )));
        }
        match (self.role, self.rule) {
            (Role::Human, AdaptationRule::HeuristicLinear) => Ok(()),
            (Role::Ai, AdaptationRule::RuleUniform | AdaptationRule::Hallucinatory) => Ok(()),
            (Role::Human, rule) => Err(Error::config(format!(
                "human agents adapt heuristically, got {rule:?}"
            ))),
            (Role::Ai, rule) => Err(Error::config(format!(
                "ai agents use the uniform or hallucinatory rule, got {rule:?}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const T0: UpdateMode = UpdateMode::Threshold {
        tie_maps_to_one: false,
    };

    #[test]
    fn window_bounds() {
        assert!(AgentSpec::human(10, 9, T0).validate().is_ok());
        assert!(AgentSpec::human(10, 0, T0).validate().is_ok());
        assert!(AgentSpec::human(10, 10, T0).validate().is_err());
        assert!(AgentSpec::ai(0, 0, T0).validate().is_err());
    }

    #[test]
    fn role_rule_pairing() {
        let h = AgentSpec::human(5, 2, T0).with_rule(AdaptationRule::RuleUniform);
        assert!(h.validate().is_err());
        let ai = AgentSpec::ai(5, 2, T0).with_rule(AdaptationRule::HeuristicLinear);
        assert!(ai.validate().is_err());
        let hall = AgentSpec::ai(5, 2, T0).with_rule(AdaptationRule::Hallucinatory);
        assert!(hall.validate().is_ok());
    }
}
