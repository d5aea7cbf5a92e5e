mod common;

use common::{tabular, MICRO};
use mcplan_core::domains::TabularMdp;
use mcplan_core::oracle::{enumerate_policies, uniform_recommendation_regret};
use mcplan_core::{simple_regret, uniform_policy_value, value_iteration, Error, Mdp};

#[test]
fn backward_induction_matches_policy_enumeration() {
    for name in MICRO {
        let m = tabular(name);
        let s0 = m.initial_state();
        let h = m.horizon();
        let vi = value_iteration(&m, &s0, h).unwrap();
        let en = enumerate_policies(&m, &s0, h).unwrap();
        let v = vi.value(&s0, h).unwrap();
        assert!((v - en.max()).abs() < 1e-9, "{name}: {v} vs {}", en.max());
        let u = uniform_policy_value(&m, &s0, h).unwrap().value(&s0, h).unwrap();
        assert!((u - en.mean()).abs() < 1e-9, "{name}: uniform {u} vs {}", en.mean());
    }
}

#[test]
fn bellman_consistency() {
    for name in MICRO {
        let m = tabular(name);
        let h = m.horizon();
        let t = value_iteration(&m, &m.initial_state(), h).unwrap();
        for (s, k, v, row) in t.entries() {
            let mut best = f64::NEG_INFINITY;
            for &(a, q) in row {
                let expect: f64 = m
                    .distribution(s, a)
                    .unwrap()
                    .iter()
                    .map(|tr| tr.probability * (tr.reward + if k > 1 { t.value(&tr.next, k - 1).unwrap() } else { 0.0 }))
                    .sum();
                assert!((q - expect).abs() < 1e-9);
                best = best.max(q);
            }
            assert_eq!(v, best);
        }
    }
}

#[test]
fn optimal_dominates_uniform_and_regret_is_nonnegative() {
    for name in MICRO {
        let m = tabular(name);
        let (s0, h) = (m.initial_state(), m.horizon());
        let t = value_iteration(&m, &s0, h).unwrap();
        let u = uniform_policy_value(&m, &s0, h).unwrap();
        for (s, k, v, row) in t.entries() {
            assert!(v >= u.value(s, k).unwrap() - 1e-12);
            for &(a, _) in row {
                assert!(simple_regret(&t, s, k, a).unwrap() >= 0.0);
            }
        }
    }
}

#[test]
fn nonnegative_rewards_make_value_monotone_in_horizon() {
    let m = tabular("micro_d.toml");
    let s0 = m.initial_state();
    let mut last = 0.0;
    for h in 1..=6 {
        let v = value_iteration(&m, &s0, h).unwrap().value(&s0, h).unwrap();
        assert!(v >= last - 1e-12);
        last = v;
    }
}

#[test]
fn regret_of_two_armed_example() {
    let m = TabularMdp::builder(1).edge(0, 0, 0, 2.0).edge(0, 1, 0, 1.0).build().unwrap();
    let t = value_iteration(&m, &0, 1).unwrap();
    assert_eq!(simple_regret(&t, &0, 1, 0).unwrap(), 0.0);
    assert_eq!(simple_regret(&t, &0, 1, 1).unwrap(), 1.0);
    assert_eq!(uniform_recommendation_regret(&t, &0, 1).unwrap(), 0.5);
    assert_eq!(t.optimal_actions(&0, 1, 0.0).unwrap(), vec![0]);
}

#[test]
fn lookup_outside_the_cone_fails() {
    let m = TabularMdp::builder(2).edge(0, 0, 0, 1.0).edge(1, 0, 1, 0.0).build().unwrap();
    let t = value_iteration(&m, &0, 1).unwrap();
    assert!(matches!(simple_regret(&t, &1, 1, 0), Err(Error::Lookup(_))));
    assert!(matches!(simple_regret(&t, &0, 1, 7), Err(Error::Lookup(_))));
}

#[test]
fn export_is_sorted_and_complete() {
    let m = tabular("micro_a.toml");
    let t = value_iteration(&m, &m.initial_state(), m.horizon()).unwrap();
    let mut out = Vec::new();
    t.export(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let expected: usize = t.entries().map(|(_, _, _, row)| row.len()).sum();
    assert_eq!(lines.len(), expected);
    for line in &lines {
        let f: Vec<&str> = line.split('\t').collect();
        assert_eq!(f.len(), 4);
        let (s, h, a): (usize, usize, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap());
        assert_eq!(t.q(&s, h, a).unwrap(), f[3].parse::<f64>().unwrap());
    }
}

#[test]
fn too_many_policies_is_a_capability_error() {
    let Ok(mcplan_core::domains::Domain::Sailing(m)) = mcplan_core::domains::Domain::load(common::config("sailing_5x5.toml")) else {
        unreachable!()
    };
    let r = enumerate_policies(&m, &m.initial_state(), 15);
    assert!(matches!(r, Err(Error::Capability(_))));
}
