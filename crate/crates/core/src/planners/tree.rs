//! Search nodes keyed by `(state, depth)` in a transposition map.
//!
//! Two paths reaching the same state at the same depth share one node, so
//! the "tree" is really a DAG.

use std::fmt;

use rustc_hash::FxHashMap;

use super::stats::{ActionStats, PolicyStats};
use crate::mdp::Actions;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeKey<S> {
    pub state: S,
    /// Steps taken from the root; steps-to-go is `horizon - depth`.
    pub depth: usize,
}

impl<S> NodeKey<S> {
    pub fn new(state: S, depth: usize) -> Self {
        Self { state, depth }
    }
}

impl<S: fmt::Display> fmt::Display for NodeKey<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.state, self.depth)
    }
}

/// Forecaster typing of a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// Estimates its value through a pool of sampled policies and is still
    /// being evaluated for conversion.
    Candidate,
    /// Distinguishes between its actions through per-action statistics.
    Internal,
}

#[derive(Clone, Debug)]
pub struct SearchNode<S, A> {
    pub key: NodeKey<S>,
    pub kind: NodeKind,
    pub actions: Actions<A>,
    pub stats: Vec<ActionStats>,
    /// Sampled policies, retired ones included. Empty for nodes that were
    /// never candidates.
    pub pool: Vec<PolicyStats>,
    pub active_policies: usize,
    visits: u64,
}

impl<S, A: Copy + PartialEq> SearchNode<S, A> {
    pub fn new(key: NodeKey<S>, kind: NodeKind, actions: Actions<A>) -> Self {
        let stats = vec![ActionStats::default(); actions.len()];
        Self {
            key,
            kind,
            actions,
            stats,
            pool: Vec::new(),
            active_policies: 0,
            visits: 0,
        }
    }

    /// `n(s)`: total action visits.
    pub fn visits(&self) -> u64 {
        self.visits
    }

    pub fn index_of(&self, action: A) -> Option<usize> {
        self.actions.iter().position(|&a| a == action)
    }

    pub fn update(&mut self, index: usize, reward: f64) {
        self.stats[index].update(reward);
        self.visits += 1;
    }

    /// Seeds an action's statistics as if `visits` returns averaging `value`
    /// had been observed.
    pub fn initialize(&mut self, index: usize, visits: u64, value: f64) {
        let st = &mut self.stats[index];
        self.visits = self.visits - st.visits + visits;
        *st = ActionStats { visits, value };
    }

    pub fn is_candidate(&self) -> bool {
        self.kind == NodeKind::Candidate
    }
}

/// Optional audit log of tree growth and statistic updates.
#[derive(Clone, Debug)]
pub struct Audit<S, A> {
    /// Every inserted node with the in-tree node it was reached from.
    pub insertions: Vec<(NodeKey<S>, Option<NodeKey<S>>)>,
    /// Every action-statistic update as `(node, action, return)`.
    pub updates: Vec<(NodeKey<S>, A, f64)>,
    /// Conversion initializations as `(node, action, visits, value)`.
    pub initializations: Vec<(NodeKey<S>, A, u64, f64)>,
}

impl<S, A> Default for Audit<S, A> {
    fn default() -> Self {
        Self {
            insertions: Vec::new(),
            updates: Vec::new(),
            initializations: Vec::new(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchTree<S, A> {
    nodes: FxHashMap<NodeKey<S>, SearchNode<S, A>>,
    audit: Option<Audit<S, A>>,
}

impl<S, A> Default for SearchTree<S, A> {
    fn default() -> Self {
        Self {
            nodes: FxHashMap::default(),
            audit: None,
        }
    }
}

impl<S, A> SearchTree<S, A>
where
    S: Clone + Eq + std::hash::Hash,
    A: Copy + PartialEq,
{
    pub fn new() -> Self {
        Self::default()
    }

    pub fn enable_audit(&mut self) {
        self.audit.get_or_insert_with(Audit::default);
    }

    pub fn audit(&self) -> Option<&Audit<S, A>> {
        self.audit.as_ref()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, key: &NodeKey<S>) -> bool {
        self.nodes.contains_key(key)
    }

    pub fn get(&self, key: &NodeKey<S>) -> Option<&SearchNode<S, A>> {
        self.nodes.get(key)
    }

    pub fn get_mut(&mut self, key: &NodeKey<S>) -> Option<&mut SearchNode<S, A>> {
        self.nodes.get_mut(key)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &SearchNode<S, A>> {
        self.nodes.values()
    }

    /// Inserts `node` unless its key is present; returns the stored node.
    pub fn insert(&mut self, node: SearchNode<S, A>, parent: Option<&NodeKey<S>>) -> &mut SearchNode<S, A> {
        let key = node.key.clone();
        if !self.nodes.contains_key(&key) {
            if let Some(audit) = &mut self.audit {
                audit.insertions.push((key.clone(), parent.cloned()));
            }
            self.nodes.insert(key.clone(), node);
        }
        self.nodes.get_mut(&key).expect("just inserted")
    }

    /// Applies one return to `(key, action)` and logs it when auditing.
    pub fn update(&mut self, key: &NodeKey<S>, index: usize, reward: f64) {
        let node = self.nodes.get_mut(key).expect("update of a node outside the tree");
        node.update(index, reward);
        if let Some(audit) = &mut self.audit {
            audit.updates.push((key.clone(), node.actions[index], reward));
        }
    }

    pub(crate) fn log_initialization(&mut self, key: &NodeKey<S>, action: A, visits: u64, value: f64) {
        if let Some(audit) = &mut self.audit {
            audit.initializations.push((key.clone(), action, visits, value));
        }
    }
}
