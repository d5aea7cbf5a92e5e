//! The two-phase probe scheme and its BRUE instances.
//!
//! Each probe follows an exploration policy above its switching point `σ` and
//! an estimation policy from there on. Only the pair `(s_{σ-1}, a_σ)`, the
//! last exploratory choice, receives the probe's return.

use std::fmt::Write as _;

use rand::RngCore;

use super::select::{greedy, recommend};
use super::selective::{conversion_check, ConversionCheck, ConversionRule};
use super::stats::PolicyStats;
use super::tree::{NodeKey, NodeKind, SearchNode, SearchTree};
use super::Planner;
use crate::error::{Error, Result};
use crate::mdp::{Actions, Mdp};
use crate::policy::{execute_policy, policy_action, LazyPolicy};
use crate::random::RandomSource;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectiveParams {
    /// Bound on the active policy pool.
    pub phi: usize,
    /// A policy retires once its mean-estimate variance drops below this.
    pub psi: f64,
    pub rule: ConversionRule,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Variant {
    /// Updates the pair at the switching point, wherever it lies.
    Brue,
    /// Updates the shallowest pair not yet in the tree above the switching
    /// point, so the tree grows connected from the root.
    BrueI,
    /// Grows the tree through candidates that convert once their sampled
    /// policies disagree more than their noise.
    BrueIc(SelectiveParams),
}

/// Switching state carried across probes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ProbeContext {
    /// Depth at which the probe switches to estimation; `-1` suppresses the
    /// update for the rest of the probe.
    pub sigma: i64,
    pub retract: bool,
    pub iteration: u64,
}

/// Round robin `H, H-1, ..., 1, H, ...` over iterations `n = 1, 2, ...`.
pub fn brue_switch(n: u64, horizon: usize) -> i64 {
    assert!(n >= 1, "iterations count from 1");
    let h = horizon as u64;
    (h - (n - 1) % h) as i64
}

/// Sweeps `σ` from the root downwards, restarting at the root after a
/// retracted probe or a full sweep. Clears `retract`.
pub fn brueic_switch(ctx: &mut ProbeContext, horizon: usize) -> i64 {
    ctx.sigma = if ctx.retract || ctx.sigma == horizon as i64 {
        0
    } else {
        ctx.sigma + 1
    };
    ctx.retract = false;
    ctx.sigma
}

/// What one probe did, kept when auditing.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeRecord<S, A> {
    pub iteration: u64,
    /// Switching point chosen for the probe.
    pub sigma: i64,
    /// Switching point at the end of the probe; `-1` after a retract.
    pub final_sigma: i64,
    pub retract: bool,
    /// Per step taken, whether the exploration policy chose the action.
    pub exploratory: Vec<bool>,
    /// Every action-statistic update as `(node, action, return)`.
    pub updates: Vec<(NodeKey<S>, A, f64)>,
    /// Candidate evaluations as `(node, return)`.
    pub evaluations: Vec<(NodeKey<S>, f64)>,
    pub conversions: Vec<(NodeKey<S>, ConversionCheck)>,
}

pub struct Mcts2e<'m, M: Mdp> {
    mdp: &'m M,
    root: NodeKey<M::State>,
    root_actions: Actions<M::Action>,
    horizon: usize,
    variant: Variant,
    tree: SearchTree<M::State, M::Action>,
    rng: RandomSource,
    ctx: ProbeContext,
    record: Option<ProbeRecord<M::State, M::Action>>,
    log: Option<Vec<ProbeRecord<M::State, M::Action>>>,
    trace: Option<Vec<String>>,
}

impl<'m, M: Mdp> Mcts2e<'m, M> {
    pub fn new(mdp: &'m M, root: M::State, horizon: usize, variant: Variant, rng: RandomSource) -> Self {
        let root_actions = mdp.actions(&root);
        Self {
            mdp,
            root: NodeKey::new(root, 0),
            root_actions,
            horizon,
            variant,
            tree: SearchTree::new(),
            rng,
            ctx: ProbeContext::default(),
            record: None,
            log: None,
            trace: None,
        }
    }

    /// Keeps a [`ProbeRecord`] per probe and audits the tree.
    pub fn enable_audit(&mut self) {
        self.tree.enable_audit();
        self.log.get_or_insert_with(Vec::new);
    }

    pub fn tree(&self) -> &SearchTree<M::State, M::Action> {
        &self.tree
    }

    pub fn context(&self) -> ProbeContext {
        self.ctx
    }

    pub fn probes(&self) -> &[ProbeRecord<M::State, M::Action>] {
        self.log.as_deref().unwrap_or(&[])
    }

    pub fn root_node(&self) -> Option<&SearchNode<M::State, M::Action>> {
        self.tree.get(&self.root)
    }

    /// Runs one probe with the switching point forced to `sigma`, leaving the
    /// switching schedule untouched. Returns the probe's return.
    pub fn probe_with_sigma(&mut self, sigma: i64) -> f64 {
        self.ctx.iteration += 1;
        self.ctx.sigma = sigma;
        self.run_probe()
    }

    fn run_probe(&mut self) -> f64 {
        let tracking = self.log.is_some() || self.trace.is_some();
        if tracking {
            self.record = Some(ProbeRecord {
                iteration: self.ctx.iteration,
                sigma: self.ctx.sigma,
                final_sigma: self.ctx.sigma,
                retract: false,
                exploratory: Vec::new(),
                updates: Vec::new(),
                evaluations: Vec::new(),
                conversions: Vec::new(),
            });
        }
        let root = self.root.clone();
        let ret = self.probe(&root, None);
        if let Some(mut rec) = self.record.take() {
            rec.final_sigma = self.ctx.sigma;
            rec.retract = self.ctx.retract;
            if let Some(t) = &mut self.trace {
                t.push(trace_line(&rec));
            }
            if let Some(log) = &mut self.log {
                log.push(rec);
            }
        }
        ret
    }

    fn probe(&mut self, key: &NodeKey<M::State>, parent: Option<&NodeKey<M::State>>) -> f64 {
        if key.depth == self.horizon {
            return 0.0;
        }
        if let Variant::BrueIc(params) = self.variant {
            if self.end_of_probe(key, parent, params) {
                return self.evaluate(key, params);
            }
        }
        let d = key.depth as i64;
        if self.variant == Variant::BrueI && d < self.ctx.sigma - 1 && !self.tree.contains(key) {
            self.ctx.sigma = d + 1;
        }
        let explore = d < self.ctx.sigma;
        let (actions, index) = self.choose(key, explore);
        let a = actions[index];
        if let Some(rec) = &mut self.record {
            rec.exploratory.push(explore);
        }
        let (next, r) = self.mdp.sample(&key.state, a, &mut self.rng);
        let next = NodeKey::new(next, key.depth + 1);
        let ret = r + self.probe(&next, Some(key));
        if d == self.ctx.sigma - 1 {
            self.update_node(key, parent, actions, index, ret);
        }
        ret
    }

    /// Uniform when exploring; otherwise the empirical best, uniform when the
    /// node has no statistics.
    fn choose(&mut self, key: &NodeKey<M::State>, explore: bool) -> (Actions<M::Action>, usize) {
        match self.tree.get(key) {
            Some(node) => {
                let i = if explore {
                    None
                } else {
                    greedy(node, &mut self.rng)
                };
                let i = i.unwrap_or_else(|| self.rng.index(node.actions.len()));
                (node.actions.clone(), i)
            }
            None => {
                let actions = self.mdp.actions(&key.state);
                let i = self.rng.index(actions.len());
                (actions, i)
            }
        }
    }

    fn update_node(
        &mut self,
        key: &NodeKey<M::State>,
        parent: Option<&NodeKey<M::State>>,
        actions: Actions<M::Action>,
        index: usize,
        ret: f64,
    ) {
        if !self.tree.contains(key) {
            self.tree
                .insert(SearchNode::new(key.clone(), NodeKind::Internal, actions), parent);
        }
        self.tree.update(key, index, ret);
        if let Some(rec) = &mut self.record {
            let a = self.tree.get(key).expect("updated").actions[index];
            rec.updates.push((key.clone(), a, ret));
        }
    }

    /// Inserts unseen pairs as candidates. Returns `true` when the probe must
    /// stop here and evaluate the candidate.
    fn end_of_probe(
        &mut self,
        key: &NodeKey<M::State>,
        parent: Option<&NodeKey<M::State>>,
        params: SelectiveParams,
    ) -> bool {
        if !self.tree.contains(key) {
            let actions = self.mdp.actions(&key.state);
            self.tree
                .insert(SearchNode::new(key.clone(), NodeKind::Candidate, actions), parent);
        }
        let node = self.tree.get(key).expect("inserted");
        if node.visits() > 0 {
            return false;
        }
        if !node.pool.is_empty() && self.convert(key, params.rule).expect("pool is non-empty") {
            return false;
        }
        if (key.depth as i64) < self.ctx.sigma {
            self.ctx.sigma = -1;
            self.ctx.retract = true;
        }
        true
    }

    /// Runs one sampled policy from a candidate and records its return.
    fn evaluate(&mut self, key: &NodeKey<M::State>, params: SelectiveParams) -> f64 {
        let node = self.tree.get_mut(key).expect("candidate in tree");
        let slot = if node.active_policies < params.phi {
            node.pool.push(PolicyStats::new(self.rng.next_u64()));
            node.active_policies += 1;
            node.pool.len() - 1
        } else {
            let k = self.rng.index(node.active_policies);
            node.pool
                .iter()
                .enumerate()
                .filter(|(_, p)| p.active)
                .nth(k)
                .expect("active count matches pool")
                .0
        };
        let mut policy = LazyPolicy::new(self.mdp, node.pool[slot].seed);
        let ret = execute_policy(self.mdp, &mut policy, &key.state, key.depth, self.horizon, &mut self.rng);
        let node = self.tree.get_mut(key).expect("candidate in tree");
        let p = &mut node.pool[slot];
        p.update(ret);
        if p.visits >= 2 && p.mean_variance() < params.psi {
            p.active = false;
            node.active_policies -= 1;
        }
        if let Some(rec) = &mut self.record {
            rec.evaluations.push((key.clone(), ret));
        }
        ret
    }

    /// Tests a candidate for conversion and, on success, seeds each action
    /// with the statistics of the best policy starting with it.
    pub fn convert(&mut self, key: &NodeKey<M::State>, rule: ConversionRule) -> Result<bool> {
        let node = self
            .tree
            .get(key)
            .ok_or_else(|| Error::Lookup(format!("no node {key}")))?;
        let check = conversion_check(&node.pool, rule)
            .ok_or_else(|| Error::Precondition(format!("node {key} has no evaluated policy")))?;
        if !check.convert {
            return Ok(false);
        }
        let mut best: Vec<Option<(u64, f64)>> = vec![None; node.actions.len()];
        for p in node.pool.iter().filter(|p| p.visits > 0) {
            let a = policy_action(self.mdp, p.seed, &key.state, key.depth);
            let i = node.index_of(a).expect("policy acts within A(s)");
            if best[i].is_none_or(|(_, q)| p.mean > q) {
                best[i] = Some((p.visits, p.mean));
            }
        }
        let node = self.tree.get_mut(key).expect("present");
        node.kind = NodeKind::Internal;
        let mut seeded = Vec::new();
        for (i, b) in best.into_iter().enumerate() {
            if let Some((n, q)) = b {
                node.initialize(i, n, q);
                seeded.push((node.actions[i], n, q));
            }
        }
        for (a, n, q) in seeded {
            self.tree.log_initialization(key, a, n, q);
        }
        if let Some(rec) = &mut self.record {
            rec.conversions.push((key.clone(), check));
        }
        Ok(true)
    }
}

fn trace_line<S: std::fmt::Display, A: std::fmt::Display>(rec: &ProbeRecord<S, A>) -> String {
    let mut line = format!(
        "probe={} sigma={} end_sigma={} retract={}",
        rec.iteration, rec.sigma, rec.final_sigma, rec.retract
    );
    match rec.updates.first() {
        Some((k, a, r)) => write!(line, " update={k}:{a}:{r}").unwrap(),
        None => line.push_str(" update=-"),
    }
    line.push_str(" convert=");
    if rec.conversions.is_empty() {
        line.push('-');
    }
    for (i, (k, c)) in rec.conversions.iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        write!(line, "{k}[m={} ee={} ev={} ve={}]", c.m, c.ee, c.ev, c.ve).unwrap();
    }
    line
}

impl<M: Mdp> Planner<M> for Mcts2e<'_, M> {
    fn iterate(&mut self) {
        self.ctx.iteration += 1;
        match self.variant {
            Variant::Brue | Variant::BrueI => self.ctx.sigma = brue_switch(self.ctx.iteration, self.horizon),
            Variant::BrueIc(_) => {
                brueic_switch(&mut self.ctx, self.horizon);
            }
        }
        self.run_probe();
    }

    fn recommend(&mut self) -> M::Action {
        recommend(self.tree.get(&self.root), &self.root_actions, &mut self.rng)
    }

    fn recommend_with(&self, rng: &mut RandomSource) -> M::Action {
        recommend(self.tree.get(&self.root), &self.root_actions, rng)
    }

    fn iterations(&self) -> u64 {
        self.ctx.iteration
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
