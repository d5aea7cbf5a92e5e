use super::select::recommend;
use super::tree::{NodeKey, NodeKind, SearchNode};
use super::Planner;
use crate::mdp::Mdp;
use crate::policy::uniform_rollout;
use crate::random::RandomSource;

/// Uniform draw from `A(root)`; spends no search.
pub fn plan_random<M: Mdp>(mdp: &M, root: &M::State, rng: &mut RandomSource) -> M::Action {
    *rng.choose(&mdp.actions(root))
}

/// Round-robin over the root actions, each followed by a uniform rollout.
pub struct MabUniform<'m, M: Mdp> {
    mdp: &'m M,
    horizon: usize,
    root: SearchNode<M::State, M::Action>,
    rng: RandomSource,
    iterations: u64,
}

impl<'m, M: Mdp> MabUniform<'m, M> {
    pub fn new(mdp: &'m M, root: M::State, horizon: usize, rng: RandomSource) -> Self {
        let actions = mdp.actions(&root);
        Self {
            mdp,
            horizon,
            root: SearchNode::new(NodeKey::new(root, 0), NodeKind::Internal, actions),
            rng,
            iterations: 0,
        }
    }

    pub fn root(&self) -> &SearchNode<M::State, M::Action> {
        &self.root
    }
}

impl<M: Mdp> Planner<M> for MabUniform<'_, M> {
    fn iterate(&mut self) {
        let i = (self.iterations % self.root.actions.len() as u64) as usize;
        let a = self.root.actions[i];
        let (next, r) = self.mdp.sample(&self.root.key.state, a, &mut self.rng);
        let ret = r + uniform_rollout(self.mdp, &next, 1, self.horizon, &mut self.rng);
        self.root.update(i, ret);
        self.iterations += 1;
    }

    fn recommend(&mut self) -> M::Action {
        recommend(Some(&self.root), &self.root.actions, &mut self.rng)
    }

    fn recommend_with(&self, rng: &mut RandomSource) -> M::Action {
        recommend(Some(&self.root), &self.root.actions, rng)
    }

    fn iterations(&self) -> u64 {
        self.iterations
    }

    fn tree_size(&self) -> usize {
        1
    }
}
