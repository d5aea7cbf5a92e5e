#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::path::PathBuf;

use mcplan_core::domains::{Domain, TabularMdp};
use mcplan_core::Mdp;
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/domains").join(name)
}

pub fn tabular(name: &str) -> TabularMdp {
    match Domain::load(config(name)).unwrap() {
        Domain::Tabular(m) => m,
        other => panic!("{name} is {}", other.family()),
    }
}

pub const MICRO: [&str; 5] = ["micro_a.toml", "micro_b.toml", "micro_c.toml", "micro_d.toml", "micro_e.toml"];

/// Upper-tail p-value of Pearson's statistic for `observed` counts against
/// `expected` probabilities.
pub fn chi_square_p(observed: &[u64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    let n: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0;
    for (&o, &p) in observed.iter().zip(expected) {
        if p == 0.0 {
            assert_eq!(o, 0, "draw with zero probability");
            continue;
        }
        let e = p * n as f64;
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    if cells < 2 {
        return 1.0;
    }
    1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat)
}

/// Every state reachable from the initial state through explicit
/// distributions, ignoring the horizon.
pub fn reachable<M: Mdp>(mdp: &M) -> BTreeSet<M::State> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([mdp.initial_state()]);
    while let Some(s) = queue.pop_front() {
        if !seen.insert(s.clone()) {
            continue;
        }
        for a in mdp.actions(&s) {
            for t in mdp.distribution(&s, a).unwrap() {
                if !seen.contains(&t.next) {
                    queue.push_back(t.next);
                }
            }
        }
    }
    seen
}

/// Counts sampled successors of `(s, a)` and compares them with the explicit
/// distribution; returns the p-value.
pub fn sampler_matches<M: Mdp>(mdp: &M, s: &M::State, a: M::Action, draws: u64, seed: u64) -> f64 {
    let dist = mdp.distribution(s, a).unwrap();
    let index: HashMap<(M::State, u64), usize> = dist
        .iter()
        .enumerate()
        .map(|(i, t)| ((t.next.clone(), t.reward.to_bits()), i))
        .collect();
    let mut counts = vec![0u64; dist.len()];
    let mut rng = mcplan_core::RandomSource::new(seed);
    for _ in 0..draws {
        let (next, r) = mdp.sample(s, a, &mut rng);
        counts[index[&(next, r.to_bits())]] += 1;
    }
    let probs: Vec<f64> = dist.iter().map(|t| t.probability).collect();
    chi_square_p(&counts, &probs)
}
