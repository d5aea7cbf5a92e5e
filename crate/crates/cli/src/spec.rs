//! Experiment spec files.
//!
//! One TOML file describes one experiment:
//!
//! ```toml
//! id = "sailing-5x5-regret"
//! mode = "regret-curve"            # or "episode", "score-table"
//! domains = ["../domains/sailing_5x5.toml"]
//! seeds = 300
//! base_seed = 1
//! budgets = [100, 1000, 10000]     # regret-curve only
//!
//! [schedule]                       # episode and score-table only
//! kind = "iterations"              # or "deadline" (milliseconds)
//! start = 1000
//! end = 100
//! replanning = "receding"          # or "fixed"
//!
//! [[planner]]
//! name = "uct"
//! kind = "uct"
//! exploration = 4.0
//!
//! [[planner]]
//! name = "brue-ic"
//! kind = "brue-ic"
//! phi = 10
//! psi = 0.0016
//! ```
//!
//! Domain paths are relative to the spec file. Planner entries take the
//! fields of [`PlannerConfig`] plus a unique `name`, and optionally a
//! `seed_key` that replaces the name when deriving the planner's seeds.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Duration;

use mcplan_core::domains::Domain;
use mcplan_core::{Budget, PlannerConfig};
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    RegretCurve,
    Episode,
    ScoreTable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BudgetKind {
    Iterations,
    /// Wall-clock milliseconds per step.
    Deadline,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Replanning {
    /// Plan with the steps actually remaining.
    #[default]
    Receding,
    /// Plan with the full horizon at every step.
    Fixed,
}

/// Per-step budgets, decreasing linearly from `start` at the first step to
/// `end` at the last.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub kind: BudgetKind,
    pub start: u64,
    pub end: u64,
    #[serde(default)]
    pub replanning: Replanning,
}

impl Schedule {
    pub fn amount(&self, step: usize, steps: usize) -> u64 {
        if steps <= 1 {
            return self.start;
        }
        let f = step as f64 / (steps - 1) as f64;
        (self.start as f64 + (self.end as f64 - self.start as f64) * f).round() as u64
    }

    pub fn budget(&self, step: usize, steps: usize) -> Budget {
        let n = self.amount(step, steps);
        match self.kind {
            BudgetKind::Iterations => Budget::Iterations(n),
            BudgetKind::Deadline => Budget::Deadline(Duration::from_millis(n)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct NamedPlanner {
    pub name: String,
    #[serde(default)]
    pub seed_key: Option<String>,
    #[serde(flatten)]
    pub config: PlannerConfig,
}

impl NamedPlanner {
    pub fn seed_key(&self) -> &str {
        self.seed_key.as_deref().unwrap_or(&self.name)
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub id: String,
    pub mode: Mode,
    pub domains: Vec<PathBuf>,
    pub seeds: u64,
    pub base_seed: u64,
    #[serde(default)]
    pub budgets: Vec<u64>,
    #[serde(default)]
    pub schedule: Option<Schedule>,
    #[serde(rename = "planner")]
    pub planners: Vec<NamedPlanner>,
}

impl ExperimentSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| CliError::Spec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Loads a spec and resolves its domain paths against the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut spec = Self::parse(&text).map_err(|e| CliError::Spec(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for d in &mut spec.domains {
            if d.is_relative() {
                *d = base.join(&*d);
            }
        }
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(CliError::Spec(m.to_string()));
        if self.planners.is_empty() {
            return fail("at least one planner is required");
        }
        if self.seeds == 0 {
            return fail("at least one seed is required");
        }
        if self.domains.is_empty() {
            return fail("at least one domain is required");
        }
        let names: BTreeSet<&str> = self.planners.iter().map(|p| p.name.as_str()).collect();
        if names.len() != self.planners.len() {
            return fail("planner names must be unique");
        }
        for p in &self.planners {
            p.config.validate()?;
        }
        match self.mode {
            Mode::RegretCurve => {
                if self.budgets.is_empty() || self.budgets.contains(&0) {
                    return fail("regret-curve needs positive budgets");
                }
            }
            Mode::Episode | Mode::ScoreTable => match self.schedule {
                None => return fail("episode and score-table need a schedule"),
                Some(s) if s.start == 0 || s.end == 0 => return fail("schedule budgets must be positive"),
                Some(_) => {}
            },
        }
        if self.mode == Mode::ScoreTable && self.planners.len() < 2 {
            return fail("score-table needs at least two planners");
        }
        Ok(())
    }

    /// Loads every domain with a display name (the file stem).
    pub fn load_domains(&self) -> Result<Vec<(String, Domain)>> {
        self.domains
            .iter()
            .map(|p| {
                let name = p
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| p.display().to_string());
                Ok((name, Domain::load(p)?))
            })
            .collect()
    }
}
