//! Online planners recommending a single action at a root state.
//!
//! Every planner runs on a fresh search tree and owns its [`RandomSource`].
//! [`plan`] dispatches on a [`PlannerConfig`] and runs the configured planner
//! under a [`Budget`].

mod baseline;
mod canonical;
mod mcts2e;
pub mod select;
pub mod selective;
pub mod stats;
pub mod tree;

use std::time::{Duration, Instant};

use serde::Deserialize;

pub use baseline::{plan_random, MabUniform};
pub use canonical::{CanonicalMcts, Exploration, TreePolicy};
pub use mcts2e::{brue_switch, brueic_switch, Mcts2e, ProbeContext, ProbeRecord, SelectiveParams, Variant};
pub use selective::{conversion_check, ConversionCheck, ConversionRule};

use crate::error::{Error, Result};
use crate::mdp::Mdp;
use crate::random::RandomSource;

/// How much search a planning call may spend.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Budget {
    /// Exactly this many iterations.
    Iterations(u64),
    /// Iterate until this much wall-clock time has elapsed; no iteration
    /// starts after the deadline.
    Deadline(Duration),
}

/// An anytime planner driven one iteration at a time.
pub trait Planner<M: Mdp> {
    fn iterate(&mut self);
    fn recommend(&mut self) -> M::Action;

    /// Recommendation with tie-breaks drawn from `rng`, leaving the
    /// planner's own random stream untouched.
    fn recommend_with(&self, rng: &mut RandomSource) -> M::Action;
    fn iterations(&self) -> u64;

    fn tree_size(&self) -> usize {
        0
    }

    /// Starts recording one probe-trace line per iteration.
    fn enable_trace(&mut self) {}

    /// Drains the probe-trace lines recorded so far.
    fn take_trace(&mut self) -> Vec<String> {
        Vec::new()
    }
}

/// Runs `planner` until `budget` is spent; returns the iterations performed.
pub fn run<M: Mdp, P: Planner<M> + ?Sized>(planner: &mut P, budget: Budget) -> u64 {
    let mut done = 0;
    match budget {
        Budget::Iterations(n) => {
            for _ in 0..n {
                planner.iterate();
            }
            done = n;
        }
        Budget::Deadline(limit) => {
            let start = Instant::now();
            while start.elapsed() < limit {
                planner.iterate();
                done += 1;
            }
        }
    }
    done
}

/// Recommendations of one planner run at increasing iteration counts.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoints<A> {
    pub actions: Vec<A>,
    pub trace: Vec<String>,
}

/// Runs one planner through non-decreasing iteration `checkpoints` and
/// recommends at each, drawing tie-breaks from `tie_breaks`. The
/// recommendation at checkpoint `b` is distributed as that of a fresh
/// planner given budget `b`.
#[allow(clippy::too_many_arguments)]
pub fn plan_checkpoints<M: Mdp>(
    mdp: &M,
    root: &M::State,
    horizon: usize,
    config: &PlannerConfig,
    checkpoints: &[u64],
    rng: RandomSource,
    tie_breaks: &mut RandomSource,
    trace: bool,
) -> Result<Checkpoints<M::Action>> {
    if checkpoints.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Precondition("checkpoints must be non-decreasing".into()));
    }
    let Some(mut planner) = build(mdp, root, horizon, config, rng.clone())? else {
        let mut rng = rng;
        return Ok(Checkpoints {
            actions: checkpoints.iter().map(|_| plan_random(mdp, root, &mut rng)).collect(),
            trace: Vec::new(),
        });
    };
    if trace {
        planner.enable_trace();
    }
    let mut done = 0;
    let mut actions = Vec::with_capacity(checkpoints.len());
    for &b in checkpoints {
        run(planner.as_mut(), Budget::Iterations(b - done));
        done = b;
        actions.push(planner.recommend_with(tie_breaks));
    }
    Ok(Checkpoints {
        actions,
        trace: planner.take_trace(),
    })
}

fn build<'m, M: Mdp>(
    mdp: &'m M,
    root: &M::State,
    horizon: usize,
    config: &PlannerConfig,
    rng: RandomSource,
) -> Result<Option<Box<dyn Planner<M> + 'm>>> {
    config.validate()?;
    if horizon == 0 {
        return Err(Error::Precondition("planning horizon must be at least 1".into()));
    }
    let root = root.clone();
    Ok(Some(match *config {
        PlannerConfig::Random => return Ok(None),
        PlannerConfig::MabUniform => Box::new(MabUniform::new(mdp, root, horizon, rng)),
        PlannerConfig::Uct { exploration } => {
            let c = exploration.map_or(Exploration::Auto, Exploration::Fixed);
            Box::new(CanonicalMcts::new(mdp, root, horizon, TreePolicy::Ucb1(c), rng))
        }
        PlannerConfig::EpsilonGreedy { epsilon } => Box::new(CanonicalMcts::new(
            mdp,
            root,
            horizon,
            TreePolicy::EpsilonGreedy(epsilon),
            rng,
        )),
        PlannerConfig::Brue => Box::new(Mcts2e::new(mdp, root, horizon, Variant::Brue, rng)),
        PlannerConfig::BrueI => Box::new(Mcts2e::new(mdp, root, horizon, Variant::BrueI, rng)),
        PlannerConfig::BrueIc { phi, psi, rule } => Box::new(Mcts2e::new(
            mdp,
            root,
            horizon,
            Variant::BrueIc(SelectiveParams { phi, psi, rule }),
            rng,
        )),
    }))
}

fn default_epsilon() -> f64 {
    0.1
}

/// A planner kind with its parameters.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PlannerConfig {
    Random,
    MabUniform,
    Uct {
        /// UCB1 constant; estimated from early rollouts when absent.
        #[serde(default)]
        exploration: Option<f64>,
    },
    EpsilonGreedy {
        #[serde(default = "default_epsilon")]
        epsilon: f64,
    },
    Brue,
    BrueI,
    BrueIc {
        /// Bound on the active policy pool.
        phi: usize,
        /// Retirement threshold on a policy's mean-estimate variance.
        psi: f64,
        #[serde(default)]
        rule: ConversionRule,
    },
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        match *self {
            PlannerConfig::Uct { exploration: Some(c) } if !(c > 0.0 && c.is_finite()) => {
                bad(format!("exploration constant must be positive, got {c}"))
            }
            PlannerConfig::EpsilonGreedy { epsilon } if !(0.0..=1.0).contains(&epsilon) => {
                bad(format!("epsilon must lie in [0, 1], got {epsilon}"))
            }
            PlannerConfig::BrueIc { phi: 0, .. } => bad("phi must be at least 1".into()),
            PlannerConfig::BrueIc { psi, .. } if !(psi >= 0.0 && psi.is_finite()) => {
                bad(format!("psi must be non-negative, got {psi}"))
            }
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PlannerConfig::Random => "random",
            PlannerConfig::MabUniform => "mab-uniform",
            PlannerConfig::Uct { .. } => "uct",
            PlannerConfig::EpsilonGreedy { .. } => "epsilon-greedy",
            PlannerConfig::Brue => "brue",
            PlannerConfig::BrueI => "brue-i",
            PlannerConfig::BrueIc { .. } => "brue-ic",
        }
    }
}

/// Result of one planning call.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanOutcome<A> {
    pub action: A,
    pub iterations: u64,
    pub tree_size: usize,
    /// Probe-trace lines, empty unless tracing was requested.
    pub trace: Vec<String>,
}

/// Plans from `root` with `horizon` steps to go.
pub fn plan<M: Mdp>(
    mdp: &M,
    root: &M::State,
    horizon: usize,
    config: &PlannerConfig,
    budget: Budget,
    rng: RandomSource,
    trace: bool,
) -> Result<PlanOutcome<M::Action>> {
    let Some(mut planner) = build(mdp, root, horizon, config, rng.clone())? else {
        let mut rng = rng;
        return Ok(PlanOutcome {
            action: plan_random(mdp, root, &mut rng),
            iterations: 0,
            tree_size: 0,
            trace: Vec::new(),
        });
    };
    if trace {
        planner.enable_trace();
    }
    let iterations = run(planner.as_mut(), budget);
    Ok(PlanOutcome {
        action: planner.recommend(),
        iterations,
        tree_size: planner.tree_size(),
        trace: planner.take_trace(),
    })
}
