//! Deterministic policies drawn uniformly from the policy space.
//!
//! A policy maps `(state, depth)` to an action. The full policy space is far
//! too large to enumerate, so a [`LazyPolicy`] fixes its choice at a pair the
//! first time the pair is queried, from a hash of `(seed, state, depth)`.
//! Because the choice is a pure function of those three values, two policies
//! with the same seed agree everywhere, and a policy's action at a pair can be
//! recovered later from the seed alone (see [`policy_action`]).

use rustc_hash::FxHashMap;

use crate::mdp::Mdp;
use crate::random::{splitmix64, stable_hash, RandomSource};

/// A uniformly drawn depth-indexed deterministic policy, materialized on demand.
pub struct LazyPolicy<'m, M: Mdp> {
    seed: u64,
    mdp: &'m M,
    memo: FxHashMap<(M::State, usize), M::Action>,
}

impl<'m, M: Mdp> LazyPolicy<'m, M> {
    pub fn new(mdp: &'m M, seed: u64) -> Self {
        Self {
            seed,
            mdp,
            memo: FxHashMap::default(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The action this policy takes at `state` when `depth` steps have elapsed.
    pub fn action(&mut self, state: &M::State, depth: usize) -> M::Action {
        if let Some(&a) = self.memo.get(&(state.clone(), depth)) {
            return a;
        }
        let a = policy_action(self.mdp, self.seed, state, depth);
        self.memo.insert((state.clone(), depth), a);
        a
    }

    /// Number of materialized `(state, depth)` choices.
    pub fn materialized(&self) -> usize {
        self.memo.len()
    }
}

/// Creates a fresh uniformly drawn policy identified by `seed`.
pub fn generate_random_policy<M: Mdp>(mdp: &M, seed: u64) -> LazyPolicy<'_, M> {
    LazyPolicy::new(mdp, seed)
}

/// The action of policy `seed` at `(state, depth)`, without memoization.
pub fn policy_action<M: Mdp>(mdp: &M, seed: u64, state: &M::State, depth: usize) -> M::Action {
    let actions = mdp.actions(state);
    debug_assert!(!actions.is_empty(), "A({state}) is empty");
    let h = splitmix64(seed ^ stable_hash(&(state, depth as u64)));
    // 64-bit hash against at most a few dozen actions: modulo bias is negligible.
    actions[(h % actions.len() as u64) as usize]
}

/// Runs `policy` from `state` at `depth` up to `horizon` and returns the
/// accumulated undiscounted reward.
pub fn execute_policy<M: Mdp>(
    mdp: &M,
    policy: &mut LazyPolicy<'_, M>,
    state: &M::State,
    depth: usize,
    horizon: usize,
    rng: &mut RandomSource,
) -> f64 {
    execute_policy_observed(mdp, policy, state, depth, horizon, rng, |_, _, _, _| {})
}

/// [`execute_policy`] with a callback receiving `(state, action, next, reward)`
/// for every step taken.
pub fn execute_policy_observed<M, F>(
    mdp: &M,
    policy: &mut LazyPolicy<'_, M>,
    state: &M::State,
    depth: usize,
    horizon: usize,
    rng: &mut RandomSource,
    mut observe: F,
) -> f64
where
    M: Mdp,
    F: FnMut(&M::State, M::Action, &M::State, f64),
{
    debug_assert!(depth <= horizon);
    let mut total = 0.0;
    let mut s = state.clone();
    for t in depth..horizon {
        let a = policy.action(&s, t);
        debug_assert!(mdp.is_applicable(&s, a), "policy chose {a} outside A({s})");
        let (next, r) = mdp.sample(&s, a, rng);
        observe(&s, a, &next, r);
        total += r;
        s = next;
    }
    total
}

/// Return of a rollout that picks every action uniformly at random.
pub fn uniform_rollout<M: Mdp>(
    mdp: &M,
    state: &M::State,
    depth: usize,
    horizon: usize,
    rng: &mut RandomSource,
) -> f64 {
    let mut total = 0.0;
    let mut s = state.clone();
    for _ in depth..horizon {
        let actions = mdp.actions(&s);
        let a = *rng.choose(&actions);
        let (next, r) = mdp.sample(&s, a, rng);
        total += r;
        s = next;
    }
    total
}
