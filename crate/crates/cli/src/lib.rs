//! Experiment runner behind the `mcplan` command.
//!
//! An [`ExperimentSpec`] names domains, planners, seeds and budgets; running
//! it yields CSV [`Row`]s (see [`output`] for the columns) and, on request,
//! a probe-trace log.

pub mod error;
pub mod output;
pub mod runner;
pub mod score;
pub mod spec;

use mcplan_core::domains::{Domain, DomainVisitor};
use mcplan_core::oracle::uniform_recommendation_regret;
use mcplan_core::Mdp;
use rayon::prelude::*;

pub use error::{CliError, Result};
pub use output::{sort_rows, write_csv, Row};
pub use runner::{run_episode, RunRecord};
pub use score::{ippc_score, mean_stderr};
pub use spec::{ExperimentSpec, Mode, NamedPlanner, Schedule};

/// Regret at or below this counts as an optimal recommendation.
const OPTIMAL_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOptions {
    /// Replaces the spec's base seed.
    pub seed: Option<u64>,
    /// Worker threads; 0 lets the runtime decide.
    pub workers: usize,
    pub trace: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            seed: None,
            workers: 1,
            trace: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentOutput {
    /// Sorted CSV rows.
    pub rows: Vec<Row>,
    pub trace: Vec<String>,
    /// Episode records, in (domain, planner, run) order; empty for regret curves.
    pub records: Vec<RunRecord>,
}

pub fn run_experiment(spec: &ExperimentSpec, options: &RunOptions) -> Result<ExperimentOutput> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers)
        .build()
        .map_err(|e| CliError::Spec(format!("worker pool: {e}")))?;
    let domains = spec.load_domains()?;
    let mut out = ExperimentOutput::default();
    for (name, domain) in &domains {
        let job = Job {
            spec,
            domain: name,
            base_seed: options.seed.unwrap_or(spec.base_seed),
            trace: options.trace,
        };
        let part = pool.install(|| domain.visit(job))?;
        out.rows.extend(part.rows);
        out.trace.extend(part.trace);
        out.records.extend(part.records);
    }
    sort_rows(&mut out.rows);
    Ok(out)
}

struct Job<'a> {
    spec: &'a ExperimentSpec,
    domain: &'a str,
    base_seed: u64,
    trace: bool,
}

impl Job<'_> {
    fn row(&self, planner: &str, key: impl ToString, metric: &str, value: f64, stderr: Option<f64>) -> Row {
        Row {
            experiment: self.spec.id.clone(),
            domain: self.domain.to_string(),
            planner: planner.to_string(),
            seed_or_budget: key.to_string(),
            metric: metric.to_string(),
            value,
            stderr,
        }
    }

    fn summary(&self, planner: &str, key: impl ToString, metric: &str, values: &[f64]) -> Row {
        let (m, se) = mean_stderr(values);
        self.row(planner, key, metric, m, Some(se))
    }

    fn regret_curve<M: Mdp>(&self, mdp: &M) -> Result<ExperimentOutput> {
        let tables = runner::solve_root(mdp)?;
        let spec = self.spec;
        let jobs: Vec<(usize, u64)> = (0..spec.planners.len())
            .flat_map(|p| (0..spec.seeds).map(move |s| (p, s)))
            .collect();
        let runs = jobs
            .par_iter()
            .map(|&(p, s)| {
                runner::regret_run(
                    mdp,
                    &tables,
                    self.domain,
                    &spec.planners[p],
                    &spec.budgets,
                    self.base_seed,
                    s,
                    self.trace,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let mut out = ExperimentOutput::default();
        let seeds = spec.seeds as usize;
        for (p, planner) in spec.planners.iter().enumerate() {
            let mine = &runs[p * seeds..(p + 1) * seeds];
            for (b, budget) in spec.budgets.iter().enumerate() {
                let regrets: Vec<f64> = mine.iter().map(|r| r.regrets[b]).collect();
                let optimal: Vec<f64> = regrets
                    .iter()
                    .map(|&r| if r <= OPTIMAL_TOLERANCE { 1.0 } else { 0.0 })
                    .collect();
                out.rows.push(self.summary(&planner.name, budget, "simple_regret", &regrets));
                out.rows.push(self.summary(&planner.name, budget, "optimal_rate", &optimal));
            }
        }
        let root = mdp.initial_state();
        let baseline = uniform_recommendation_regret(&tables, &root, mdp.horizon())?;
        out.rows.push(self.row("uniform-baseline", "all", "expected_regret", baseline, None));
        out.trace = runs.into_iter().flat_map(|r| r.trace).collect();
        Ok(out)
    }

    fn episodes<M: Mdp>(&self, mdp: &M) -> Result<Vec<RunRecord>> {
        let spec = self.spec;
        let schedule = spec.schedule.expect("validated");
        let jobs: Vec<(usize, u64)> = (0..spec.planners.len())
            .flat_map(|p| (0..spec.seeds).map(move |s| (p, s)))
            .collect();
        jobs.par_iter()
            .map(|&(p, s)| {
                run_episode(
                    mdp,
                    self.domain,
                    &spec.planners[p],
                    &schedule,
                    self.base_seed,
                    s,
                    self.trace,
                )
            })
            .collect()
    }

    fn episode_table<M: Mdp>(&self, mdp: &M) -> Result<ExperimentOutput> {
        let records = self.episodes(mdp)?;
        let mut out = ExperimentOutput::default();
        let seeds = self.spec.seeds as usize;
        for (p, planner) in self.spec.planners.iter().enumerate() {
            let mine = &records[p * seeds..(p + 1) * seeds];
            for r in mine {
                out.rows.push(self.row(&planner.name, r.run, "total_reward", r.total, None));
            }
            let totals: Vec<f64> = mine.iter().map(|r| r.total).collect();
            out.rows.push(self.summary(&planner.name, "all", "mean_total_reward", &totals));
        }
        out.trace = records.iter().flat_map(|r| r.trace.iter().cloned()).collect();
        out.records = records;
        Ok(out)
    }

    fn score_table<M: Mdp>(&self, mdp: &M) -> Result<ExperimentOutput> {
        let records = self.episodes(mdp)?;
        let planners = &self.spec.planners;
        let seeds = self.spec.seeds as usize;
        let mut scores = vec![Vec::with_capacity(seeds); planners.len()];
        for run in 0..seeds {
            let totals: Vec<f64> = (0..planners.len()).map(|p| records[p * seeds + run].total).collect();
            for (p, s) in ippc_score(&totals).into_iter().enumerate() {
                scores[p].push(s);
            }
        }
        let mut out = ExperimentOutput::default();
        for (p, planner) in planners.iter().enumerate() {
            let totals: Vec<f64> = records[p * seeds..(p + 1) * seeds].iter().map(|r| r.total).collect();
            out.rows.push(self.summary(&planner.name, "all", "ippc_score", &scores[p]));
            out.rows.push(self.summary(&planner.name, "all", "mean_total_reward", &totals));
            out.rows.push(self.row(&planner.name, "all", "runs", seeds as f64, None));
        }
        out.trace = records.iter().flat_map(|r| r.trace.iter().cloned()).collect();
        out.records = records;
        Ok(out)
    }
}

impl DomainVisitor for Job<'_> {
    type Output = Result<ExperimentOutput>;

    fn visit<M: Mdp>(self, mdp: &M) -> Self::Output {
        match self.spec.mode {
            Mode::RegretCurve => self.regret_curve(mdp),
            Mode::Episode => self.episode_table(mdp),
            Mode::ScoreTable => self.score_table(mdp),
        }
    }
}

/// Exact solution of a domain instance from its initial state.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub optimal_value: f64,
    pub q_values: Vec<(String, f64)>,
    pub uniform_regret: f64,
    pub entries: usize,
    /// Flat `state\tsteps_to_go\taction\tq` export.
    pub table: String,
}

struct SolveJob;

impl DomainVisitor for SolveJob {
    type Output = Result<Solution>;

    fn visit<M: Mdp>(self, mdp: &M) -> Self::Output {
        let tables = runner::solve_root(mdp)?;
        let root = mdp.initial_state();
        let h = mdp.horizon();
        let mut table = Vec::new();
        tables.export(&mut table).map_err(|source| CliError::Io {
            path: "<table>".into(),
            source,
        })?;
        Ok(Solution {
            optimal_value: tables.value(&root, h).expect("root solved"),
            q_values: tables
                .q_values(&root, h)
                .expect("root solved")
                .iter()
                .map(|(a, q)| (a.to_string(), *q))
                .collect(),
            uniform_regret: uniform_recommendation_regret(&tables, &root, h)?,
            entries: tables.len(),
            table: String::from_utf8(table).expect("export is UTF-8"),
        })
    }
}

pub fn solve(domain: &Domain) -> Result<Solution> {
    domain.visit(SolveJob)
}
