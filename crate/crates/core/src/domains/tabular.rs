//! Explicitly tabulated MDPs for fixtures and micro instances.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::mdp::{check_distribution, sample_index, Actions, Mdp, Transition};
use crate::random::RandomSource;

/// One `(state, action) -> (next, probability, reward)` row of a table.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabularRow {
    pub state: usize,
    pub action: usize,
    pub next: usize,
    pub probability: f64,
    pub reward: f64,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabularConfig {
    pub states: usize,
    pub initial: usize,
    pub horizon: usize,
    #[serde(rename = "transition")]
    pub transitions: Vec<TabularRow>,
}

/// An MDP over states `0..n` whose actions are small integer labels.
#[derive(Clone, Debug)]
pub struct TabularMdp {
    initial: usize,
    horizon: usize,
    /// Per state, the applicable actions in ascending label order.
    actions: Vec<Actions<usize>>,
    /// Per state, per applicable action (same order), the outcomes.
    outcomes: Vec<Vec<Vec<Transition<usize>>>>,
}

impl TabularMdp {
    pub fn builder(states: usize) -> TabularBuilder {
        TabularBuilder {
            states,
            initial: 0,
            horizon: 1,
            rows: Vec::new(),
        }
    }

    pub fn from_config(config: &TabularConfig) -> Result<Self> {
        let mut b = TabularMdp::builder(config.states)
            .initial(config.initial)
            .horizon(config.horizon);
        for r in &config.transitions {
            b = b.transition(r.state, r.action, r.next, r.probability, r.reward);
        }
        b.build()
    }

    pub fn states(&self) -> usize {
        self.actions.len()
    }

    fn slot(&self, s: usize, a: usize) -> Option<usize> {
        self.actions.get(s)?.iter().position(|&x| x == a)
    }
}

pub struct TabularBuilder {
    states: usize,
    initial: usize,
    horizon: usize,
    rows: Vec<TabularRow>,
}

impl TabularBuilder {
    pub fn initial(mut self, s: usize) -> Self {
        self.initial = s;
        self
    }

    pub fn horizon(mut self, h: usize) -> Self {
        self.horizon = h;
        self
    }

    pub fn transition(mut self, state: usize, action: usize, next: usize, probability: f64, reward: f64) -> Self {
        self.rows.push(TabularRow {
            state,
            action,
            next,
            probability,
            reward,
        });
        self
    }

    /// Deterministic shorthand for `transition(state, action, next, 1.0, reward)`.
    pub fn edge(self, state: usize, action: usize, next: usize, reward: f64) -> Self {
        self.transition(state, action, next, 1.0, reward)
    }

    pub fn build(self) -> Result<TabularMdp> {
        let fail = |msg: String| Err(Error::Config(format!("tabular: {msg}")));
        if self.states == 0 {
            return fail("no states".into());
        }
        if self.initial >= self.states {
            return fail(format!("initial state {} out of range", self.initial));
        }
        if self.horizon == 0 {
            return fail("horizon must be at least 1".into());
        }
        let mut table: Vec<std::collections::BTreeMap<usize, Vec<Transition<usize>>>> =
            vec![Default::default(); self.states];
        for r in self.rows {
            if r.state >= self.states || r.next >= self.states {
                return fail(format!("row {}->{} references an unknown state", r.state, r.next));
            }
            if !r.reward.is_finite() {
                return fail(format!("non-finite reward in state {}", r.state));
            }
            let dist = table[r.state].entry(r.action).or_default();
            // Zero-probability rows only declare the action.
            if r.probability != 0.0 {
                dist.push(Transition::new(r.next, r.probability, r.reward));
            }
        }
        let mut actions = Vec::with_capacity(self.states);
        let mut outcomes = Vec::with_capacity(self.states);
        for (s, per_action) in table.into_iter().enumerate() {
            if per_action.is_empty() {
                return fail(format!("state {s} has no actions"));
            }
            for (a, dist) in &per_action {
                check_distribution(dist, 1e-12).map_err(|e| Error::Config(format!("tabular ({s}, {a}): {e}")))?;
            }
            actions.push(per_action.keys().copied().collect());
            outcomes.push(per_action.into_values().collect());
        }
        Ok(TabularMdp {
            initial: self.initial,
            horizon: self.horizon,
            actions,
            outcomes,
        })
    }
}

impl Mdp for TabularMdp {
    type State = usize;
    type Action = usize;

    fn initial_state(&self) -> usize {
        self.initial
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn actions(&self, s: &usize) -> Actions<usize> {
        self.actions[*s].clone()
    }

    fn sample(&self, s: &usize, a: usize, rng: &mut RandomSource) -> (usize, f64) {
        let slot = self.slot(*s, a).expect("action not applicable");
        let dist = &self.outcomes[*s][slot];
        let i = sample_index(dist.iter().map(|t| t.probability), rng);
        (dist[i].next, dist[i].reward)
    }

    fn distribution(&self, s: &usize, a: usize) -> Result<Vec<Transition<usize>>> {
        let slot = self.slot(*s, a).ok_or_else(|| Error::InapplicableAction {
            state: s.to_string(),
            action: a.to_string(),
        })?;
        Ok(self.outcomes[*s][slot].clone())
    }
}
