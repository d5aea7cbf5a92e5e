//! The canonical MCTS scheme: tree descent, single-node expansion, uniform
//! rollout, and backup of the full return along the traversed path.

use super::select::{epsilon_greedy_select, recommend, ucb1_select};
use super::tree::{NodeKey, NodeKind, SearchNode, SearchTree};
use super::Planner;
use crate::mdp::{Actions, Mdp};
use crate::policy::uniform_rollout;
use crate::random::RandomSource;

/// Returns observed before the automatic UCB1 constant is frozen.
const AUTO_WARMUP: u64 = 100;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exploration {
    Fixed(f64),
    /// Twice the spread of the returns seen in the first rollouts.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TreePolicy {
    Ucb1(Exploration),
    EpsilonGreedy(f64),
}

pub struct CanonicalMcts<'m, M: Mdp> {
    mdp: &'m M,
    root: NodeKey<M::State>,
    root_actions: Actions<M::Action>,
    horizon: usize,
    policy: TreePolicy,
    tree: SearchTree<M::State, M::Action>,
    rng: RandomSource,
    iterations: u64,
    return_range: Option<(f64, f64)>,
    path: Vec<(NodeKey<M::State>, usize, f64)>,
    trace: Option<Vec<String>>,
}

impl<'m, M: Mdp> CanonicalMcts<'m, M> {
    pub fn new(mdp: &'m M, root: M::State, horizon: usize, policy: TreePolicy, rng: RandomSource) -> Self {
        let root_actions = mdp.actions(&root);
        let key = NodeKey::new(root, 0);
        let mut tree = SearchTree::new();
        tree.insert(SearchNode::new(key.clone(), NodeKind::Internal, root_actions.clone()), None);
        Self {
            mdp,
            root: key,
            root_actions,
            horizon,
            policy,
            tree,
            rng,
            iterations: 0,
            return_range: None,
            path: Vec::new(),
            trace: None,
        }
    }

    /// Records tree insertions and updates. Must be called before the first
    /// iteration.
    pub fn enable_audit(&mut self) {
        assert_eq!(self.iterations, 0, "audit enabled mid-search");
        let mut tree = SearchTree::new();
        tree.enable_audit();
        tree.insert(
            SearchNode::new(self.root.clone(), NodeKind::Internal, self.root_actions.clone()),
            None,
        );
        self.tree = tree;
    }

    pub fn tree(&self) -> &SearchTree<M::State, M::Action> {
        &self.tree
    }

    /// The UCB1 constant the next iteration will use.
    pub fn exploration(&self) -> f64 {
        match self.policy {
            TreePolicy::Ucb1(Exploration::Fixed(c)) => c,
            _ => match self.return_range {
                Some((lo, hi)) if hi > lo => 2.0 * (hi - lo),
                _ => 1.0,
            },
        }
    }

    fn select(&mut self, key: &NodeKey<M::State>, c: f64) -> usize {
        let node = self.tree.get(key).expect("descent stays in the tree");
        match self.policy {
            TreePolicy::Ucb1(_) => ucb1_select(node, c, &mut self.rng),
            TreePolicy::EpsilonGreedy(eps) => epsilon_greedy_select(node, eps, &mut self.rng),
        }
    }
}

impl<M: Mdp> Planner<M> for CanonicalMcts<'_, M> {
    fn iterate(&mut self) {
        self.iterations += 1;
        let c = self.exploration();
        self.path.clear();
        let mut key = self.root.clone();
        let mut expanded = None;
        while key.depth < self.horizon {
            let i = self.select(&key, c);
            let a = self.tree.get(&key).expect("in tree").actions[i];
            let (next, r) = self.mdp.sample(&key.state, a, &mut self.rng);
            let next = NodeKey::new(next, key.depth + 1);
            self.path.push((key, i, r));
            if next.depth < self.horizon && !self.tree.contains(&next) {
                let parent = &self.path.last().expect("just pushed").0;
                let actions = self.mdp.actions(&next.state);
                self.tree
                    .insert(SearchNode::new(next.clone(), NodeKind::Internal, actions), Some(parent));
                expanded = Some(next.clone());
                key = next;
                break;
            }
            key = next;
        }
        let mut ret = uniform_rollout(self.mdp, &key.state, key.depth, self.horizon, &mut self.rng);
        for (k, i, r) in self.path.iter().rev() {
            ret += r;
            self.tree.update(k, *i, ret);
        }
        if matches!(self.policy, TreePolicy::Ucb1(Exploration::Auto)) && self.iterations <= AUTO_WARMUP {
            let (lo, hi) = self.return_range.unwrap_or((ret, ret));
            self.return_range = Some((lo.min(ret), hi.max(ret)));
        }
        if let Some(t) = &mut self.trace {
            let e = expanded.map_or_else(|| "-".to_string(), |k| k.to_string());
            t.push(format!("probe={} depth={} expanded={}", self.iterations, self.path.len(), e));
        }
    }

    fn recommend(&mut self) -> M::Action {
        recommend(self.tree.get(&self.root), &self.root_actions, &mut self.rng)
    }

    fn recommend_with(&self, rng: &mut RandomSource) -> M::Action {
        recommend(self.tree.get(&self.root), &self.root_actions, rng)
    }

    fn iterations(&self) -> u64 {
        self.iterations
    }

    fn tree_size(&self) -> usize {
        self.tree.len()
    }

    fn enable_trace(&mut self) {
        self.trace.get_or_insert_with(Vec::new);
    }

    fn take_trace(&mut self) -> Vec<String> {
        self.trace.as_mut().map(std::mem::take).unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::TabularMdp;
    use crate::planners::{run, Budget};

    fn two_arms(h: usize) -> TabularMdp {
        TabularMdp::builder(1).horizon(h).edge(0, 0, 0, 1.0).edge(0, 1, 0, 0.0).build().unwrap()
    }

    #[test]
    fn one_iteration_adds_one_child() {
        let m = two_arms(3);
        let mut p = CanonicalMcts::new(&m, 0, 3, TreePolicy::Ucb1(Exploration::Fixed(1.0)), RandomSource::new(0));
        p.enable_audit();
        run(&mut p, Budget::Iterations(1));
        assert_eq!(p.tree().len(), 2);
        let root = p.tree().get(&NodeKey::new(0, 0)).unwrap();
        assert_eq!(root.stats.iter().filter(|s| s.visits > 0).count(), 1);
        let audit = p.tree().audit().unwrap();
        assert_eq!(audit.insertions[1], (NodeKey::new(0, 1), Some(NodeKey::new(0, 0))));
    }

    #[test]
    fn deterministic_bandit_separates() {
        let m = two_arms(1);
        for policy in [TreePolicy::Ucb1(Exploration::Auto), TreePolicy::EpsilonGreedy(0.1)] {
            for seed in 0..20 {
                let mut p = CanonicalMcts::new(&m, 0, 1, policy, RandomSource::new(seed));
                run(&mut p, Budget::Iterations(2));
                assert_eq!(p.recommend(), 0);
            }
        }
    }

    #[test]
    fn backup_is_full_return() {
        let m = two_arms(3);
        let mut p = CanonicalMcts::new(&m, 0, 3, TreePolicy::Ucb1(Exploration::Fixed(1.0)), RandomSource::new(4));
        p.enable_audit();
        run(&mut p, Budget::Iterations(50));
        // Root returns lie in [0, 3]; each update at depth d sees 3 - d steps.
        for (k, _, r) in &p.tree().audit().unwrap().updates {
            assert!(*r >= 0.0 && *r <= (3 - k.depth) as f64);
        }
    }

    #[test]
    fn auto_exploration_tracks_return_spread() {
        let m = two_arms(2);
        let mut p = CanonicalMcts::new(&m, 0, 2, TreePolicy::Ucb1(Exploration::Auto), RandomSource::new(1));
        assert_eq!(p.exploration(), 1.0);
        run(&mut p, Budget::Iterations(100));
        assert_eq!(p.exploration(), 4.0);
    }
}
