//! Exact finite-horizon solvers used as ground truth.
//!
//! All tables are restricted to the `(state, steps-to-go)` pairs reachable
//! from the root under some action sequence, found breadth-first over the
//! explicit transition distributions.

mod enumerate;

use std::collections::{BTreeSet, HashMap};
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::mdp::{Actions, Mdp, Transition};

pub use enumerate::{enumerate_policies, PolicyEnumeration, MAX_ENUMERATED_POLICIES};

type Outcomes<S, A> = Vec<(A, Vec<Transition<S>>)>;
type QTable<S, A> = HashMap<(S, usize), Vec<(A, f64)>>;

/// The reachable cone of `(root, horizon)` together with the distributions
/// needed to back values up through it.
pub(crate) struct Cone<S, A> {
    /// `layers[h]` holds the states reachable with `h` steps to go, sorted.
    pub layers: Vec<Vec<S>>,
    pub model: HashMap<S, Outcomes<S, A>>,
}

impl<S: Clone + Ord + std::hash::Hash, A: Copy> Cone<S, A> {
    pub fn build<M>(mdp: &M, root: &S, horizon: usize) -> Result<Self>
    where
        M: Mdp<State = S, Action = A>,
    {
        let mut layers = vec![Vec::new(); horizon + 1];
        let mut model: HashMap<S, Outcomes<S, A>> = HashMap::new();
        layers[horizon] = vec![root.clone()];
        for h in (1..=horizon).rev() {
            let mut next = BTreeSet::new();
            for s in &layers[h] {
                if !model.contains_key(s) {
                    let actions: Actions<A> = mdp.actions(s);
                    if actions.is_empty() {
                        return Err(Error::Precondition("state with no applicable actions".into()));
                    }
                    let mut per_action = Vec::with_capacity(actions.len());
                    for a in actions {
                        per_action.push((a, mdp.distribution(s, a)?));
                    }
                    model.insert(s.clone(), per_action);
                }
                for (_, dist) in &model[s] {
                    next.extend(dist.iter().filter(|t| t.probability > 0.0).map(|t| t.next.clone()));
                }
            }
            layers[h - 1] = next.into_iter().collect();
        }
        Ok(Self { layers, model })
    }

    /// Backward induction combining per-action values with `combine`.
    /// Returns `V_h(s)` for every cone entry and the per-action values.
    pub fn backup<F>(&self, mut combine: F) -> (HashMap<(S, usize), f64>, QTable<S, A>)
    where
        F: FnMut(&[(A, f64)]) -> f64,
    {
        let mut values = HashMap::new();
        let mut q = HashMap::new();
        for s in &self.layers[0] {
            values.insert((s.clone(), 0), 0.0);
        }
        for h in 1..self.layers.len() {
            for s in &self.layers[h] {
                let per_action: Vec<(A, f64)> = self.model[s]
                    .iter()
                    .map(|(a, dist)| {
                        let v = dist
                            .iter()
                            .map(|t| t.probability * (t.reward + values[&(t.next.clone(), h - 1)]))
                            .sum::<f64>();
                        (*a, v)
                    })
                    .collect();
                values.insert((s.clone(), h), combine(&per_action));
                q.insert((s.clone(), h), per_action);
            }
        }
        (values, q)
    }
}

/// Optimal values `V*_h(s)` and action values `Q*_h(s, a)`.
#[derive(Clone, Debug)]
pub struct ValueTables<S, A> {
    root: S,
    horizon: usize,
    values: HashMap<(S, usize), f64>,
    q: HashMap<(S, usize), Vec<(A, f64)>>,
}

impl<S, A> ValueTables<S, A>
where
    S: Clone + Eq + Ord + std::hash::Hash + std::fmt::Display,
    A: Copy + Eq + Ord + std::fmt::Display,
{
    pub fn root(&self) -> &S {
        &self.root
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Number of stored `(state, steps-to-go)` entries.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, s: &S, h: usize) -> Option<f64> {
        self.values.get(&(s.clone(), h)).copied()
    }

    pub fn q_values(&self, s: &S, h: usize) -> Option<&[(A, f64)]> {
        self.q.get(&(s.clone(), h)).map(Vec::as_slice)
    }

    pub fn q(&self, s: &S, h: usize, a: A) -> Option<f64> {
        self.q_values(s, h)?.iter().find(|(x, _)| *x == a).map(|&(_, v)| v)
    }

    /// Actions attaining `V*_h(s)` up to `tolerance`.
    pub fn optimal_actions(&self, s: &S, h: usize, tolerance: f64) -> Option<Vec<A>> {
        let v = self.value(s, h)?;
        Some(
            self.q_values(s, h)?
                .iter()
                .filter(|(_, q)| v - q <= tolerance)
                .map(|&(a, _)| a)
                .collect(),
        )
    }

    /// Iterates over every stored entry as `(state, h, V, Q-row)`.
    pub fn entries(&self) -> impl Iterator<Item = (&S, usize, f64, &[(A, f64)])> {
        self.q.iter().map(move |((s, h), row)| (s, *h, self.values[&(s.clone(), *h)], row.as_slice()))
    }

    /// Writes one `state<TAB>h<TAB>action<TAB>Q` line per stored action value,
    /// sorted by state, steps-to-go and action.
    pub fn export<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut keys: Vec<&(S, usize)> = self.q.keys().collect();
        keys.sort();
        for key in keys {
            let mut row = self.q[key].clone();
            row.sort_by_key(|x| x.0);
            for (a, v) in row {
                writeln!(out, "{}\t{}\t{}\t{}", key.0, key.1, a, v)?;
            }
        }
        Ok(())
    }
}

/// Expected return of a uniformly drawn depth-indexed policy, per cone entry.
#[derive(Clone, Debug)]
pub struct UniformValueTables<S> {
    values: HashMap<(S, usize), f64>,
}

impl<S: Clone + Eq + std::hash::Hash> UniformValueTables<S> {
    pub fn value(&self, s: &S, h: usize) -> Option<f64> {
        self.values.get(&(s.clone(), h)).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Backward induction for `V*` and `Q*` over the cone of `(root, horizon)`.
pub fn value_iteration<M: Mdp>(mdp: &M, root: &M::State, horizon: usize) -> Result<ValueTables<M::State, M::Action>> {
    let cone = Cone::build(mdp, root, horizon)?;
    let (values, q) = cone.backup(|row| row.iter().map(|&(_, v)| v).fold(f64::NEG_INFINITY, f64::max));
    Ok(ValueTables {
        root: root.clone(),
        horizon,
        values,
        q,
    })
}

/// Backward induction averaging uniformly over actions instead of maximizing.
pub fn uniform_policy_value<M: Mdp>(mdp: &M, root: &M::State, horizon: usize) -> Result<UniformValueTables<M::State>> {
    let cone = Cone::build(mdp, root, horizon)?;
    let (values, _) = cone.backup(|row| row.iter().map(|&(_, v)| v).sum::<f64>() / row.len() as f64);
    Ok(UniformValueTables { values })
}

/// `V*_h(s) - Q*_h(s, a)`: the loss of taking `a` and then acting optimally.
pub fn simple_regret<S, A>(tables: &ValueTables<S, A>, s: &S, h: usize, a: A) -> Result<f64>
where
    S: Clone + Eq + Ord + std::hash::Hash + std::fmt::Display,
    A: Copy + Eq + Ord + std::fmt::Display,
{
    let v = tables
        .value(s, h)
        .ok_or_else(|| Error::Lookup(format!("no value for ({s}, {h})")))?;
    let q = tables
        .q(s, h, a)
        .ok_or_else(|| Error::Lookup(format!("no action value for ({s}, {h}, {a})")))?;
    Ok(v - q)
}

/// Expected simple regret of recommending an action of `A(s)` uniformly at random.
pub fn uniform_recommendation_regret<S, A>(tables: &ValueTables<S, A>, s: &S, h: usize) -> Result<f64>
where
    S: Clone + Eq + Ord + std::hash::Hash + std::fmt::Display,
    A: Copy + Eq + Ord + std::fmt::Display,
{
    let row = tables
        .q_values(s, h)
        .ok_or_else(|| Error::Lookup(format!("no action values for ({s}, {h})")))?;
    let mut total = 0.0;
    for &(a, _) in row {
        total += simple_regret(tables, s, h, a)?;
    }
    Ok(total / row.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::TabularMdp;

    fn chain() -> TabularMdp {
        // Action 0 pays 1, action 1 pays 0; both stay put.
        TabularMdp::builder(1).horizon(2).edge(0, 0, 0, 1.0).edge(0, 1, 0, 0.0).build().unwrap()
    }

    #[test]
    fn two_action_chain() {
        let t = value_iteration(&chain(), &0, 2).unwrap();
        assert_eq!(t.value(&0, 2), Some(2.0));
        assert_eq!(t.value(&0, 0), Some(0.0));
        assert_eq!(t.q(&0, 2, 1), Some(1.0));
    }

    #[test]
    fn absorbing_zero_reward_is_all_zero() {
        let m = TabularMdp::builder(2).edge(0, 0, 1, 0.0).edge(0, 1, 0, 0.0).edge(1, 0, 1, 0.0).build().unwrap();
        let t = value_iteration(&m, &0, 4).unwrap();
        for (_, _, v, row) in t.entries() {
            assert_eq!(v, 0.0);
            assert!(row.iter().all(|&(_, q)| q == 0.0));
        }
    }

    #[test]
    fn uniform_average_of_two_arms() {
        let u = uniform_policy_value(&chain(), &0, 1).unwrap();
        assert_eq!(u.value(&0, 1), Some(0.5));
        assert_eq!(u.value(&0, 0), Some(0.0));
    }

    #[test]
    fn single_action_uniform_equals_optimal() {
        let m = TabularMdp::builder(2)
            .transition(0, 0, 0, 0.3, 1.0)
            .transition(0, 0, 1, 0.7, -2.0)
            .edge(1, 0, 0, 0.5)
            .build()
            .unwrap();
        let t = value_iteration(&m, &0, 5).unwrap();
        let u = uniform_policy_value(&m, &0, 5).unwrap();
        for (s, h, v, _) in t.entries() {
            assert_eq!(u.value(s, h), Some(v));
        }
    }

    #[test]
    fn regret_of_suboptimal_arm() {
        let t = value_iteration(&chain(), &0, 1).unwrap();
        assert_eq!(simple_regret(&t, &0, 1, 0).unwrap(), 0.0);
        assert_eq!(simple_regret(&t, &0, 1, 1).unwrap(), 1.0);
        assert_eq!(uniform_recommendation_regret(&t, &0, 1).unwrap(), 0.5);
        assert!(matches!(simple_regret(&t, &0, 3, 0), Err(Error::Lookup(_))));
        assert!(matches!(simple_regret(&t, &0, 1, 7), Err(Error::Lookup(_))));
    }

    #[test]
    fn missing_distribution_is_a_capability_error() {
        use crate::domains::{build_sysadmin, NamedTopology, SysAdminConfig, Topology};
        let m = build_sysadmin(SysAdminConfig {
            machines: 14,
            topology: Topology::Named(NamedTopology::Ring),
            failure: 0.1,
            infection: 0.1,
            reboot_success: 0.9,
            running_reward: 1.0,
            horizon: 3,
            explicit: false,
        })
        .unwrap();
        assert!(matches!(value_iteration(&m, &m.initial_state(), 3), Err(Error::Capability(_))));
    }

    #[test]
    fn export_is_sorted_lines() {
        let t = value_iteration(&chain(), &0, 2).unwrap();
        let mut buf = Vec::new();
        t.export(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0\t1\t0\t1\n0\t1\t1\t0\n0\t2\t0\t2\n0\t2\t1\t1\n");
    }
}
