//! Action-selection rules shared by the planners. All of them return an
//! index into the node's action list.

use smallvec::SmallVec;

use super::tree::SearchNode;
use crate::random::RandomSource;

/// Uniformly random index among the maximizers of `score`, skipping `None`s.
fn argmax_by<F>(len: usize, rng: &mut RandomSource, mut score: F) -> Option<usize>
where
    F: FnMut(usize) -> Option<f64>,
{
    let mut best = f64::NEG_INFINITY;
    let mut ties: SmallVec<[usize; 8]> = SmallVec::new();
    for i in 0..len {
        let Some(v) = score(i) else { continue };
        if v > best || ties.is_empty() {
            best = v;
            ties.clear();
            ties.push(i);
        } else if v == best {
            ties.push(i);
        }
    }
    match ties.len() {
        0 => None,
        1 => Some(ties[0]),
        n => Some(ties[rng.index(n)]),
    }
}

/// Best visited action by empirical mean, ties broken uniformly; `None` when
/// no action has been visited.
pub fn greedy<S, A: Copy + PartialEq>(node: &SearchNode<S, A>, rng: &mut RandomSource) -> Option<usize> {
    argmax_by(node.stats.len(), rng, |i| node.stats[i].estimate())
}

/// Recommendation at the root: the greedy action, or a uniform draw from
/// `actions` when the root has no statistics.
pub fn recommend<S, A: Copy + PartialEq>(root: Option<&SearchNode<S, A>>, actions: &[A], rng: &mut RandomSource) -> A {
    match root.and_then(|node| greedy(node, rng).map(|i| node.actions[i])) {
        Some(a) => a,
        None => *rng.choose(actions),
    }
}

/// UCB1: unvisited actions first in list order, then the maximizer of
/// `Q(s,a) + c * sqrt(ln n(s) / n(s,a))`.
pub fn ucb1_select<S, A: Copy + PartialEq>(node: &SearchNode<S, A>, c: f64, rng: &mut RandomSource) -> usize {
    if let Some(i) = node.stats.iter().position(|s| s.visits == 0) {
        return i;
    }
    let log_n = (node.visits() as f64).ln();
    argmax_by(node.stats.len(), rng, |i| {
        let st = &node.stats[i];
        Some(st.value + c * (log_n / st.visits as f64).sqrt())
    })
    .expect("node has actions")
}

/// With probability `epsilon` a uniform action, otherwise the greedy one.
/// Unvisited actions count as greedy-preferred.
pub fn epsilon_greedy_select<S, A: Copy + PartialEq>(node: &SearchNode<S, A>, epsilon: f64, rng: &mut RandomSource) -> usize {
    let n = node.actions.len();
    if rng.bernoulli(epsilon) {
        return rng.index(n);
    }
    argmax_by(n, rng, |i| Some(node.stats[i].estimate().unwrap_or(f64::INFINITY))).expect("node has actions")
}
