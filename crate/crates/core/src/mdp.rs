//! The generative-MDP contract shared by domains, oracles and planners.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::random::RandomSource;

/// Applicable actions of a state, in a fixed order.
pub type Actions<A> = SmallVec<[A; 8]>;

/// One outcome of an explicit transition distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition<S> {
    pub next: S,
    pub probability: f64,
    pub reward: f64,
}

impl<S> Transition<S> {
    pub fn new(next: S, probability: f64, reward: f64) -> Self {
        Self {
            next,
            probability,
            reward,
        }
    }
}

/// A finite-horizon MDP accessed through sampled transitions.
///
/// Implementations must return the same non-empty, identically ordered action
/// list for a state on every call. Planners index per-action statistics by
/// position in that list.
pub trait Mdp: Send + Sync {
    type State: Clone + Eq + Hash + Ord + Debug + Display + Send + Sync;
    type Action: Copy + Eq + Hash + Ord + Debug + Display + Send + Sync;

    fn initial_state(&self) -> Self::State;

    /// Number of decision steps, at least 1.
    fn horizon(&self) -> usize;

    fn actions(&self, state: &Self::State) -> Actions<Self::Action>;

    /// Draws a successor and the reward of the step. `action` must be
    /// applicable; use [`sample_transition`] when that is not guaranteed.
    fn sample(
        &self,
        state: &Self::State,
        action: Self::Action,
        rng: &mut RandomSource,
    ) -> (Self::State, f64);

    /// The explicit distribution sampled by [`Mdp::sample`], when the model
    /// can enumerate it. Outcomes with zero probability are omitted.
    fn distribution(
        &self,
        state: &Self::State,
        action: Self::Action,
    ) -> Result<Vec<Transition<Self::State>>> {
        let _ = (state, action);
        Err(Error::Capability(
            "model provides no explicit transition distribution".into(),
        ))
    }

    fn is_applicable(&self, state: &Self::State, action: Self::Action) -> bool {
        self.actions(state).contains(&action)
    }
}

/// Checked sampling: rejects actions outside `A(state)`.
pub fn sample_transition<M: Mdp>(
    mdp: &M,
    state: &M::State,
    action: M::Action,
    rng: &mut RandomSource,
) -> Result<(M::State, f64)> {
    if !mdp.is_applicable(state, action) {
        return Err(Error::InapplicableAction {
            state: state.to_string(),
            action: action.to_string(),
        });
    }
    Ok(mdp.sample(state, action, rng))
}

/// Checks that an explicit distribution is non-negative and sums to one.
pub fn check_distribution<S>(outcomes: &[Transition<S>], tolerance: f64) -> Result<()> {
    if outcomes.is_empty() {
        return Err(Error::Config("empty transition distribution".into()));
    }
    if let Some(t) = outcomes.iter().find(|t| t.probability.is_nan() || t.probability < 0.0) {
        return Err(Error::Config(format!(
            "negative transition probability {}",
            t.probability
        )));
    }
    let total: f64 = outcomes.iter().map(|t| t.probability).sum();
    if (total - 1.0).abs() > tolerance {
        return Err(Error::Config(format!(
            "transition probabilities sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// Samples an index from a list of outcome probabilities by inversion.
pub(crate) fn sample_index(probabilities: impl Iterator<Item = f64>, rng: &mut RandomSource) -> usize {
    let u = rng.unit();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, p) in probabilities.enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = i;
        if u < acc {
            return i;
        }
    }
    // Rounding left `acc` a hair below one.
    last
}
