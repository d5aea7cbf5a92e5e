//! Seeded experiment runs.
//!
//! Every random stream is derived from the base seed and a label, so a run's
//! result does not depend on which other runs execute or in what order:
//! environment draws use `("env", domain, run)` and planner draws use
//! `("plan", domain, planner, run, step)`.

use mcplan_core::oracle::{simple_regret, value_iteration};
use mcplan_core::planners::plan_checkpoints;
use mcplan_core::random::derive_seed;
use mcplan_core::{plan, sample_transition, Mdp, RandomSource};

use crate::error::Result;
use crate::spec::{NamedPlanner, Replanning, Schedule};

/// One planner's episode on one domain.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub domain: String,
    pub planner: String,
    pub run: u64,
    /// Recommended action per step.
    pub actions: Vec<String>,
    /// Iterations spent per step.
    pub iterations: Vec<u64>,
    pub rewards: Vec<f64>,
    pub total: f64,
    pub trace: Vec<String>,
}

pub fn env_source(base_seed: u64, domain: &str, run: u64) -> RandomSource {
    RandomSource::new(derive_seed(base_seed, &("env", domain, run)))
}

pub fn planner_source(base_seed: u64, domain: &str, planner: &NamedPlanner, run: u64, step: u64) -> RandomSource {
    RandomSource::new(derive_seed(base_seed, &("plan", domain, planner.seed_key(), run, step)))
}

/// Plans and acts for the full horizon, replanning at every step.
pub fn run_episode<M: Mdp>(
    mdp: &M,
    domain: &str,
    planner: &NamedPlanner,
    schedule: &Schedule,
    base_seed: u64,
    run: u64,
    trace: bool,
) -> Result<RunRecord> {
    let horizon = mdp.horizon();
    let mut env = env_source(base_seed, domain, run);
    let mut state = mdp.initial_state();
    let mut record = RunRecord {
        domain: domain.to_string(),
        planner: planner.name.clone(),
        run,
        actions: Vec::with_capacity(horizon),
        iterations: Vec::with_capacity(horizon),
        rewards: Vec::with_capacity(horizon),
        total: 0.0,
        trace: Vec::new(),
    };
    for t in 0..horizon {
        let steps_to_go = match schedule.replanning {
            Replanning::Receding => horizon - t,
            Replanning::Fixed => horizon,
        };
        let rng = planner_source(base_seed, domain, planner, run, t as u64);
        let outcome = plan(
            mdp,
            &state,
            steps_to_go,
            &planner.config,
            schedule.budget(t, horizon),
            rng,
            trace,
        )?;
        let (next, reward) = sample_transition(mdp, &state, outcome.action, &mut env)?;
        record.actions.push(outcome.action.to_string());
        record.iterations.push(outcome.iterations);
        record.rewards.push(reward);
        record.trace.extend(
            outcome
                .trace
                .into_iter()
                .map(|l| format!("domain={domain} planner={} run={run} step={t} {l}", planner.name)),
        );
        state = next;
    }
    record.total = record.rewards.iter().sum();
    Ok(record)
}

/// Simple regret of one seeded planner run at each budget.
pub struct RegretRun {
    pub regrets: Vec<f64>,
    pub trace: Vec<String>,
}

/// Runs one seeded planner through every budget and scores each
/// recommendation against the exact tables.
#[allow(clippy::too_many_arguments)]
pub fn regret_run<M: Mdp>(
    mdp: &M,
    tables: &mcplan_core::ValueTables<M::State, M::Action>,
    domain: &str,
    planner: &NamedPlanner,
    budgets: &[u64],
    base_seed: u64,
    run: u64,
    trace: bool,
) -> Result<RegretRun> {
    let root = mdp.initial_state();
    let horizon = mdp.horizon();
    let mut sorted = budgets.to_vec();
    sorted.sort_unstable();
    let rng = planner_source(base_seed, domain, planner, run, 0);
    let mut ties = RandomSource::new(derive_seed(base_seed, &("recommend", domain, planner.seed_key(), run)));
    let cp = plan_checkpoints(mdp, &root, horizon, &planner.config, &sorted, rng, &mut ties, trace)?;
    let mut regrets = Vec::with_capacity(budgets.len());
    for b in budgets {
        let i = sorted.binary_search(b).expect("budget present");
        regrets.push(simple_regret(tables, &root, horizon, cp.actions[i])?);
    }
    let trace = cp
        .trace
        .into_iter()
        .map(|l| format!("domain={domain} planner={} run={run} {l}", planner.name))
        .collect();
    Ok(RegretRun { regrets, trace })
}

/// Exact tables for the domain's initial state and horizon.
pub fn solve_root<M: Mdp>(mdp: &M) -> Result<mcplan_core::ValueTables<M::State, M::Action>> {
    Ok(value_iteration(mdp, &mdp.initial_state(), mdp.horizon())?)
}
