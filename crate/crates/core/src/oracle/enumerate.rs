//! Brute-force enumeration of depth-indexed deterministic policies.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::mdp::Mdp;

use super::Cone;

pub const MAX_ENUMERATED_POLICIES: u64 = 1_000_000;

/// Every deterministic `(state, steps-to-go) -> action` assignment on the
/// reachable cone, with its exact expected return from the root.
///
/// Policy `i` is stored implicitly: its choice at cone entry `k` is digit `k`
/// of `i` written in the mixed radix `|A(s_k)|`.
#[derive(Clone, Debug)]
pub struct PolicyEnumeration<S, A> {
    /// Decision points `(state, steps-to-go)`, `steps-to-go >= 1`.
    pub cone: Vec<(S, usize)>,
    choices: Vec<Vec<A>>,
    /// Exact value of each policy, in enumeration order.
    pub values: Vec<f64>,
}

impl<S: Clone, A: Copy> PolicyEnumeration<S, A> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The actions of policy `index`, aligned with [`Self::cone`].
    pub fn policy(&self, index: usize) -> Vec<A> {
        let mut rest = index;
        self.choices
            .iter()
            .map(|c| {
                let a = c[rest % c.len()];
                rest /= c.len();
                a
            })
            .collect()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<A>, f64)> + '_ {
        (0..self.len()).map(|i| (self.policy(i), self.values[i]))
    }
}

struct Step {
    probability: f64,
    reward: f64,
    /// Cone index of the successor, `None` once no steps remain.
    next: Option<usize>,
}

pub fn enumerate_policies<M: Mdp>(
    mdp: &M,
    root: &M::State,
    horizon: usize,
) -> Result<PolicyEnumeration<M::State, M::Action>> {
    let cone = Cone::build(mdp, root, horizon)?;
    // Entries ordered by increasing steps-to-go, so successors come first.
    let mut entries: Vec<(M::State, usize)> = Vec::new();
    for h in 1..=horizon {
        entries.extend(cone.layers[h].iter().map(|s| (s.clone(), h)));
    }
    let index: HashMap<(M::State, usize), usize> =
        entries.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();

    let mut count: u64 = 1;
    for (s, _) in &entries {
        count = count.saturating_mul(cone.model[s].len() as u64);
        if count > MAX_ENUMERATED_POLICIES {
            return Err(Error::Capability(format!(
                "more than {MAX_ENUMERATED_POLICIES} deterministic policies on a cone of {} decision points",
                entries.len()
            )));
        }
    }

    let choices: Vec<Vec<M::Action>> = entries
        .iter()
        .map(|(s, _)| cone.model[s].iter().map(|(a, _)| *a).collect())
        .collect();
    let steps: Vec<Vec<Vec<Step>>> = entries
        .iter()
        .map(|(s, h)| {
            cone.model[s]
                .iter()
                .map(|(_, dist)| {
                    dist.iter()
                        .map(|t| Step {
                            probability: t.probability,
                            reward: t.reward,
                            next: (*h > 1).then(|| index[&(t.next.clone(), h - 1)]),
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let root_index = index[&(root.clone(), horizon)];

    let mut values = Vec::with_capacity(count as usize);
    let mut digits = vec![0usize; entries.len()];
    let mut v = vec![0.0; entries.len()];
    for _ in 0..count {
        for (k, step_row) in steps.iter().enumerate() {
            v[k] = step_row[digits[k]]
                .iter()
                .map(|st| st.probability * (st.reward + st.next.map_or(0.0, |j| v[j])))
                .sum();
        }
        values.push(v[root_index]);
        // Increment the mixed-radix counter, least significant digit first.
        for (d, c) in digits.iter_mut().zip(&choices) {
            *d += 1;
            if *d < c.len() {
                break;
            }
            *d = 0;
        }
    }

    Ok(PolicyEnumeration {
        cone: entries,
        choices,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::TabularMdp;

    fn two_arms(h: usize) -> TabularMdp {
        TabularMdp::builder(1).horizon(h).edge(0, 0, 0, 1.0).edge(0, 1, 0, 0.0).build().unwrap()
    }

    #[test]
    fn one_step_two_actions() {
        let e = enumerate_policies(&two_arms(1), &0, 1).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e.values, vec![1.0, 0.0]);
    }

    #[test]
    fn depth_indexed_policies_multiply() {
        let e = enumerate_policies(&two_arms(2), &0, 2).unwrap();
        assert_eq!(e.len(), 4);
        let mut v = e.values.clone();
        v.sort_by(f64::total_cmp);
        assert_eq!(v, vec![0.0, 1.0, 1.0, 2.0]);
        assert_eq!(e.policy(3), vec![1, 1]);
    }

    #[test]
    fn cone_too_large() {
        // 3 actions at 13 decision points exceeds the cap.
        let m = TabularMdp::builder(1)
            .edge(0, 0, 0, 0.0)
            .edge(0, 1, 0, 0.0)
            .edge(0, 2, 0, 0.0)
            .build()
            .unwrap();
        assert!(enumerate_policies(&m, &0, 12).is_ok());
        assert!(matches!(enumerate_policies(&m, &0, 13), Err(Error::Capability(_))));
    }
}
