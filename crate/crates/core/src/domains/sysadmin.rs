//! SysAdmin: keep a network of machines running.
//!
//! The state is the set of running machines. Each step pays
//! `running_reward` per running machine, then every machine evolves
//! independently: a rebooted machine comes up with `reboot_success`; a
//! running machine stays up with probability
//! `(1 - failure) * (1 - infection)^k`, `k` being its number of down
//! neighbours; a down machine stays down unless rebooted.

use std::fmt;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::mdp::{Actions, Mdp, Transition};
use crate::random::RandomSource;

/// Largest network whose explicit distribution (2^n outcomes) is offered.
pub const MAX_EXPLICIT_MACHINES: usize = 12;
pub const MAX_MACHINES: usize = 32;

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Topology {
    Named(NamedTopology),
    Edges(Vec<[usize; 2]>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedTopology {
    Ring,
    Star,
    Line,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SysAdminConfig {
    pub machines: usize,
    pub topology: Topology,
    pub failure: f64,
    pub infection: f64,
    pub reboot_success: f64,
    pub running_reward: f64,
    pub horizon: usize,
    /// Whether the explicit distribution is offered (needed by the oracle).
    #[serde(default = "explicit_default")]
    pub explicit: bool,
}

fn explicit_default() -> bool {
    true
}

impl SysAdminConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(format!("sysadmin: {msg}")));
        if self.machines < 2 || self.machines > MAX_MACHINES {
            return fail(format!("{} machines, expected 2..={MAX_MACHINES}", self.machines));
        }
        for (name, p) in [
            ("failure", self.failure),
            ("infection", self.infection),
            ("reboot_success", self.reboot_success),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("{name} probability {p} outside [0, 1]"));
            }
        }
        if let Topology::Edges(edges) = &self.topology {
            if let Some(e) = edges.iter().find(|[a, b]| a == b || *a >= self.machines || *b >= self.machines) {
                return fail(format!("bad edge {e:?}"));
            }
        }
        if self.horizon == 0 {
            return fail("horizon must be at least 1".into());
        }
        Ok(())
    }

    fn neighbours(&self) -> Vec<Vec<usize>> {
        let n = self.machines;
        let edges: Vec<[usize; 2]> = match &self.topology {
            Topology::Named(NamedTopology::Ring) => (0..n).map(|i| [i, (i + 1) % n]).collect(),
            Topology::Named(NamedTopology::Line) => (1..n).map(|i| [i - 1, i]).collect(),
            Topology::Named(NamedTopology::Star) => (1..n).map(|i| [0, i]).collect(),
            Topology::Edges(e) => e.clone(),
        };
        let mut adj = vec![Vec::new(); n];
        for [a, b] in edges {
            if !adj[a].contains(&b) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }
}

/// Bitmask of running machines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Machines(pub u32);

impl Machines {
    pub fn running(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_up(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }
}

impl fmt::Display for Machines {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m{:#x}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SysAction {
    Noop,
    Reboot(u8),
}

impl fmt::Display for SysAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SysAction::Noop => f.write_str("noop"),
            SysAction::Reboot(i) => write!(f, "reboot{i}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SysAdmin {
    config: SysAdminConfig,
    neighbours: Vec<Vec<usize>>,
}

pub fn build_sysadmin(config: SysAdminConfig) -> Result<SysAdmin> {
    config.validate()?;
    if config.explicit && config.machines > MAX_EXPLICIT_MACHINES {
        return Err(Error::Capability(format!(
            "explicit distributions need 2^n outcomes; {} machines exceeds {MAX_EXPLICIT_MACHINES}",
            config.machines
        )));
    }
    let neighbours = config.neighbours();
    Ok(SysAdmin { config, neighbours })
}

impl SysAdmin {
    pub fn config(&self) -> &SysAdminConfig {
        &self.config
    }

    /// Probability that machine `i` runs after `action` in state `s`.
    fn up_probability(&self, s: Machines, action: SysAction, i: usize) -> f64 {
        if action == SysAction::Reboot(i as u8) {
            return self.config.reboot_success;
        }
        if !s.is_up(i) {
            return 0.0;
        }
        let down = self.neighbours[i].iter().filter(|&&j| !s.is_up(j)).count();
        (1.0 - self.config.failure) * (1.0 - self.config.infection).powi(down as i32)
    }

    fn reward(&self, s: Machines) -> f64 {
        f64::from(s.running()) * self.config.running_reward
    }
}

impl Mdp for SysAdmin {
    type State = Machines;
    type Action = SysAction;

    fn initial_state(&self) -> Machines {
        Machines(((1u64 << self.config.machines) - 1) as u32)
    }

    fn horizon(&self) -> usize {
        self.config.horizon
    }

    fn actions(&self, _s: &Machines) -> Actions<SysAction> {
        std::iter::once(SysAction::Noop)
            .chain((0..self.config.machines).map(|i| SysAction::Reboot(i as u8)))
            .collect()
    }

    fn sample(&self, s: &Machines, a: SysAction, rng: &mut RandomSource) -> (Machines, f64) {
        let mut next = 0u32;
        for i in 0..self.config.machines {
            if rng.bernoulli(self.up_probability(*s, a, i)) {
                next |= 1 << i;
            }
        }
        (Machines(next), self.reward(*s))
    }

    fn distribution(&self, s: &Machines, a: SysAction) -> Result<Vec<Transition<Machines>>> {
        if !self.config.explicit {
            return Err(Error::Capability("sysadmin instance built without explicit distributions".into()));
        }
        if !self.is_applicable(s, a) {
            return Err(Error::InapplicableAction {
                state: s.to_string(),
                action: a.to_string(),
            });
        }
        let n = self.config.machines;
        let up: Vec<f64> = (0..n).map(|i| self.up_probability(*s, a, i)).collect();
        let reward = self.reward(*s);
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            let mut p = 1.0;
            for (i, &q) in up.iter().enumerate() {
                p *= if mask >> i & 1 == 1 { q } else { 1.0 - q };
                if p == 0.0 {
                    break;
                }
            }
            if p > 0.0 {
                out.push(Transition::new(Machines(mask), p, reward));
            }
        }
        Ok(out)
    }
}
