mod common;

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use common::{config, tabular};
use mcplan_core::domains::{Domain, Sailing, TabularMdp};
use mcplan_core::mdp::{Actions, Transition};
use mcplan_core::planners::select::{epsilon_greedy_select, recommend};
use mcplan_core::planners::tree::{NodeKey, NodeKind, SearchNode};
use mcplan_core::planners::{
    run, CanonicalMcts, ConversionRule, Exploration, MabUniform, Mcts2e, Planner, SelectiveParams, TreePolicy,
    Variant,
};
use mcplan_core::oracle::uniform_recommendation_regret;
use mcplan_core::{plan, simple_regret, value_iteration, Budget, Mdp, PlannerConfig, RandomSource, Result};

fn node(values: &[Option<f64>]) -> SearchNode<u8, u8> {
    let mut n = SearchNode::new(NodeKey::new(0, 0), NodeKind::Internal, (0..values.len() as u8).collect());
    for (i, v) in values.iter().enumerate() {
        if let Some(v) = v {
            n.initialize(i, 1, *v);
        }
    }
    n
}

fn sailing(name: &str) -> Sailing {
    let Domain::Sailing(m) = Domain::load(config(name)).unwrap() else {
        unreachable!()
    };
    m
}

fn selective(phi: usize, psi: f64) -> Variant {
    Variant::BrueIc(SelectiveParams {
        phi,
        psi,
        rule: ConversionRule::Pooled,
    })
}

/// Noisy arms with means 0.6 and 0.4, one step.
fn noisy_arms() -> TabularMdp {
    TabularMdp::builder(1)
        .transition(0, 0, 0, 0.6, 1.0)
        .transition(0, 0, 0, 0.4, 0.0)
        .transition(0, 1, 0, 0.4, 1.0)
        .transition(0, 1, 0, 0.6, 0.0)
        .build()
        .unwrap()
}

#[test]
fn recommendation_breaks_ties_uniformly() {
    let n = node(&[Some(2.0), Some(2.0), Some(0.0)]);
    let mut rng = RandomSource::new(5);
    let draws = 20_000;
    let first = (0..draws).filter(|_| recommend(Some(&n), &n.actions, &mut rng) == 0).count();
    let third = (0..draws).filter(|_| recommend(Some(&n), &n.actions, &mut rng) == 2).count();
    assert!((first as f64 / draws as f64 - 0.5).abs() < 0.02);
    assert_eq!(third, 0);
}

#[test]
fn unvisited_root_recommends_uniformly() {
    let n = node(&[None, None, None, None]);
    let mut rng = RandomSource::new(6);
    let mut counts = [0u64; 4];
    for _ in 0..20_000 {
        counts[recommend(Some(&n), &n.actions, &mut rng) as usize] += 1;
    }
    assert!(common::chi_square_p(&counts, &[0.25; 4]) > 0.001, "{counts:?}");
}

#[test]
fn epsilon_greedy_frequencies() {
    let n = node(&[Some(1.0), Some(0.0)]);
    let mut rng = RandomSource::new(7);
    let draws = 20_000;
    let mut counts = [0u64; 2];
    for _ in 0..draws {
        counts[epsilon_greedy_select(&n, 1.0, &mut rng)] += 1;
    }
    assert!(common::chi_square_p(&counts, &[0.5, 0.5]) > 0.001);
    let greedy = (0..draws).filter(|_| epsilon_greedy_select(&n, 0.2, &mut rng) == 0).count();
    assert!((greedy as f64 / draws as f64 - 0.9).abs() < 0.02);
}

#[test]
fn mab_uniform_finds_the_better_arm() {
    let m = noisy_arms();
    let hits = (0..1000)
        .filter(|&seed| {
            let mut p = MabUniform::new(&m, 0, 1, RandomSource::new(seed));
            run(&mut p, Budget::Iterations(10_000));
            p.recommend() == 0
        })
        .count();
    assert!(hits >= 990, "{hits}");
}

#[test]
fn uct_beats_uniform_recommendation_on_small_sailing() {
    let m = sailing("sailing_3x3.toml");
    let (s0, h) = (m.initial_state(), m.horizon());
    let t = value_iteration(&m, &s0, h).unwrap();
    let baseline = uniform_recommendation_regret(&t, &s0, h).unwrap();
    let config = PlannerConfig::Uct { exploration: None };
    let total: f64 = (0..300)
        .map(|seed| {
            let out = plan(&m, &s0, h, &config, Budget::Iterations(10_000), RandomSource::new(seed), false).unwrap();
            simple_regret(&t, &s0, h, out.action).unwrap()
        })
        .sum();
    assert!(total / 300.0 < baseline, "uct {} vs uniform {baseline}", total / 300.0);
}

#[test]
fn brue_optimal_rate_grows_with_budget() {
    let m = tabular("micro_a.toml");
    let (s0, h) = (m.initial_state(), m.horizon());
    let t = value_iteration(&m, &s0, h).unwrap();
    let best = t.optimal_actions(&s0, h, 1e-9).unwrap();
    let rate = |budget: u64| {
        (0..300)
            .filter(|&seed| {
                let out = plan(&m, &s0, h, &PlannerConfig::Brue, Budget::Iterations(budget), RandomSource::new(seed), false)
                    .unwrap();
                best.contains(&out.action)
            })
            .count() as f64
            / 300.0
    };
    let rates: Vec<f64> = [4, 100, 10_000].into_iter().map(rate).collect();
    assert!(rates[0] <= rates[1] + 0.05 && rates[1] <= rates[2] + 0.05, "{rates:?}");
    assert!(rates[2] > 0.95, "{rates:?}");
}

#[test]
fn brue_i_tree_stays_connected() {
    let m = sailing("sailing_5x5.toml");
    let mut p = Mcts2e::new(&m, m.initial_state(), 15, Variant::BrueI, RandomSource::new(3));
    p.enable_audit();
    run(&mut p, Budget::Iterations(5000));
    let audit = p.tree().audit().unwrap();
    let mut present = HashSet::new();
    for (i, (key, parent)) in audit.insertions.iter().enumerate() {
        match parent {
            None => assert_eq!((i, key.depth), (0, 0)),
            Some(pk) => {
                assert!(present.contains(pk), "{key} inserted below absent {pk}");
                assert_eq!(pk.depth + 1, key.depth);
            }
        }
        present.insert(key.clone());
    }
    assert!(present.len() > 1);
}

#[test]
fn brue_ic_stays_live_for_a_million_probes() {
    let m = tabular("micro_a.toml");
    let mut p = Mcts2e::new(&m, m.initial_state(), m.horizon(), selective(10, 1e-4), RandomSource::new(1));
    run(&mut p, Budget::Iterations(1_000_000));
    assert_eq!(p.iterations(), 1_000_000);
    let root = p.root_node().unwrap();
    assert_eq!(root.kind, NodeKind::Internal);
    assert!(root.visits() > 0);
}

#[test]
fn at_most_one_update_per_probe() {
    let m = sailing("sailing_5x5.toml");
    for variant in [Variant::Brue, Variant::BrueI, selective(5, 1e-3)] {
        let mut p = Mcts2e::new(&m, m.initial_state(), 15, variant, RandomSource::new(9));
        p.enable_audit();
        run(&mut p, Budget::Iterations(3000));
        for rec in p.probes() {
            let reached = rec.exploratory.len() as i64;
            let expected = usize::from(rec.final_sigma != -1 && rec.sigma >= 1 && rec.sigma <= reached);
            assert_eq!(rec.updates.len(), expected, "{variant:?} probe {}", rec.iteration);
            if let Some((k, _, _)) = rec.updates.first() {
                if variant == Variant::Brue {
                    assert_eq!(k.depth as i64, rec.sigma - 1);
                } else {
                    assert!((k.depth as i64) < rec.sigma);
                }
            }
        }
    }
}

#[test]
fn node_statistics_shadow_the_observed_returns() {
    let m = sailing("sailing_5x5.toml");
    for variant in [Variant::Brue, Variant::BrueI, selective(5, 1e-3)] {
        let mut p = Mcts2e::new(&m, m.initial_state(), 15, variant, RandomSource::new(2));
        p.enable_audit();
        run(&mut p, Budget::Iterations(4000));
        let audit = p.tree().audit().unwrap();
        let mut shadow: HashMap<_, (u64, f64)> = HashMap::new();
        for (k, a, n, q) in &audit.initializations {
            shadow.insert((k.clone(), *a), (*n, *q * *n as f64));
        }
        for (k, a, r) in &audit.updates {
            let e = shadow.entry((k.clone(), *a)).or_default();
            e.0 += 1;
            e.1 += r;
        }
        for node in p.tree().nodes() {
            for (i, st) in node.stats.iter().enumerate() {
                let (n, sum) = shadow.get(&(node.key.clone(), node.actions[i])).copied().unwrap_or_default();
                assert_eq!(st.visits, n);
                if n > 0 {
                    assert!((st.value - sum / n as f64).abs() < 1e-9 * (1.0 + st.value.abs()));
                }
            }
        }
    }
}

#[test]
fn conversions_follow_the_rule() {
    let m = sailing("sailing_5x5.toml");
    let mut p = Mcts2e::new(&m, m.initial_state(), 15, selective(10, 0.0016), RandomSource::new(4));
    p.enable_audit();
    run(&mut p, Budget::Iterations(20_000));
    let mut converted = 0;
    for rec in p.probes() {
        for (k, c) in &rec.conversions {
            assert!(c.convert && c.ev / c.m < c.ve, "{k}: {c:?}");
            assert!(c.m >= 2.0);
            converted += 1;
        }
    }
    assert!(converted > 0);
    for node in p.tree().nodes() {
        if node.kind == NodeKind::Internal && node.key.depth > 0 {
            assert!(node.visits() > 0 || node.pool.is_empty());
        }
    }
    let audit = p.tree().audit().unwrap();
    assert!(audit.initializations.iter().all(|(_, _, n, _)| *n >= 1));
}

#[test]
fn iteration_budgets_are_exact() {
    let m = sailing("sailing_5x5.toml");
    for config in every_planner() {
        let out = plan(&m, &m.initial_state(), 15, &config, Budget::Iterations(777), RandomSource::new(0), false).unwrap();
        let expected = if config == PlannerConfig::Random { 0 } else { 777 };
        assert_eq!(out.iterations, expected, "{}", config.label());
    }
}

#[test]
fn deadlines_are_respected() {
    let m = sailing("sailing_5x5.toml");
    let limit = Duration::from_millis(30);
    for config in every_planner() {
        let start = Instant::now();
        let out = plan(&m, &m.initial_state(), 15, &config, Budget::Deadline(limit), RandomSource::new(0), false).unwrap();
        let spent = start.elapsed();
        assert!(spent < limit + Duration::from_millis(250), "{}: {spent:?}", config.label());
        if config != PlannerConfig::Random {
            assert!(out.iterations > 0);
        }
    }
}

fn every_planner() -> Vec<PlannerConfig> {
    vec![
        PlannerConfig::Random,
        PlannerConfig::MabUniform,
        PlannerConfig::Uct { exploration: None },
        PlannerConfig::EpsilonGreedy { epsilon: 0.1 },
        PlannerConfig::Brue,
        PlannerConfig::BrueI,
        PlannerConfig::BrueIc {
            phi: 10,
            psi: 0.0016,
            rule: ConversionRule::Pooled,
        },
    ]
}

/// `inner` with every reward raised by `shift`.
struct Shifted<M> {
    inner: M,
    shift: f64,
}

impl<M: Mdp> Mdp for Shifted<M> {
    type State = M::State;
    type Action = M::Action;

    fn initial_state(&self) -> M::State {
        self.inner.initial_state()
    }

    fn horizon(&self) -> usize {
        self.inner.horizon()
    }

    fn actions(&self, s: &M::State) -> Actions<M::Action> {
        self.inner.actions(s)
    }

    fn sample(&self, s: &M::State, a: M::Action, rng: &mut RandomSource) -> (M::State, f64) {
        let (n, r) = self.inner.sample(s, a, rng);
        (n, r + self.shift)
    }

    fn distribution(&self, s: &M::State, a: M::Action) -> Result<Vec<Transition<M::State>>> {
        let mut d = self.inner.distribution(s, a)?;
        for t in &mut d {
            t.reward += self.shift;
        }
        Ok(d)
    }
}

#[test]
fn recommendations_ignore_reward_shifts() {
    let base = tabular("micro_d.toml");
    let shifted = Shifted {
        inner: base.clone(),
        shift: 8.0,
    };
    let (s0, h) = (base.initial_state(), base.horizon());
    let mut configs = every_planner();
    configs.retain(|c| !matches!(c, PlannerConfig::Uct { .. } | PlannerConfig::EpsilonGreedy { .. }));
    for config in configs {
        let mut mismatches = 0;
        for seed in 0..100 {
            let a = plan(&base, &s0, h, &config, Budget::Iterations(500), RandomSource::new(seed), false).unwrap();
            let b = plan(&shifted, &s0, h, &config, Budget::Iterations(500), RandomSource::new(seed), false).unwrap();
            mismatches += usize::from(a.action != b.action);
        }
        assert_eq!(mismatches, 0, "{}", config.label());
    }
}

#[test]
fn equal_seeds_reproduce_traces() {
    let m = sailing("sailing_5x5.toml");
    for config in every_planner() {
        let go = || plan(&m, &m.initial_state(), 15, &config, Budget::Iterations(300), RandomSource::new(42), true).unwrap();
        let (a, b) = (go(), go());
        assert_eq!(a, b, "{}", config.label());
        if !matches!(config, PlannerConfig::Random | PlannerConfig::MabUniform) {
            assert_eq!(a.trace.len(), 300);
        }
    }
}

#[test]
fn canonical_expands_one_node_per_iteration() {
    let m = sailing("sailing_5x5.toml");
    let mut p = CanonicalMcts::new(&m, m.initial_state(), 15, TreePolicy::Ucb1(Exploration::Auto), RandomSource::new(1));
    p.enable_audit();
    for i in 1..=500 {
        p.iterate();
        assert!(p.tree().len() <= i + 1);
    }
    let audit = p.tree().audit().unwrap();
    let mut present = HashSet::new();
    for (key, parent) in &audit.insertions {
        if let Some(pk) = parent {
            assert!(present.contains(pk));
        }
        present.insert(key.clone());
    }
}
