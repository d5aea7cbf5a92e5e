//! Fixtures shared by the benchmarks.

use std::path::PathBuf;

use mcplan_core::domains::{Domain, Sailing};
use mcplan_core::planners::ConversionRule;
use mcplan_core::PlannerConfig;

pub fn domain(name: &str) -> Domain {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/domains").join(name);
    Domain::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn sailing(name: &str) -> Sailing {
    match domain(name) {
        Domain::Sailing(m) => m,
        other => panic!("{name} is {}", other.family()),
    }
}

/// Every planner with the parameters used by the shipped experiments.
pub fn planners() -> Vec<PlannerConfig> {
    vec![
        PlannerConfig::MabUniform,
        PlannerConfig::Uct { exploration: None },
        PlannerConfig::EpsilonGreedy { epsilon: 0.1 },
        PlannerConfig::Brue,
        PlannerConfig::BrueI,
        PlannerConfig::BrueIc {
            phi: 10,
            psi: 0.0016,
            rule: ConversionRule::Pooled,
        },
    ]
}
