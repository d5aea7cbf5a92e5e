//! Grid navigation with hazardous columns.
//!
//! The agent walks a grid toward a goal cell. Entering a cell of column `j`
//! kills the agent with probability `disappearance[j]`; the dead state is
//! absorbing and pays nothing further. Every step taken while alive pays
//! `step_reward`; arriving at the goal additionally pays `goal_reward`, after
//! which the goal cell absorbs with zero reward.

use std::fmt;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::mdp::{Actions, Mdp, Transition};
use crate::random::RandomSource;

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NavigationConfig {
    pub width: usize,
    pub height: usize,
    /// Per-column probability of dying when entering a cell of that column.
    pub disappearance: Vec<f64>,
    pub start: [usize; 2],
    pub goal: [usize; 2],
    pub step_reward: f64,
    pub goal_reward: f64,
    pub horizon: usize,
}

impl NavigationConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(format!("navigation: {msg}")));
        if self.width == 0 || self.height == 0 {
            return fail("empty grid".into());
        }
        if self.width > usize::from(u16::MAX) || self.height > usize::from(u16::MAX) {
            return fail("grid too large".into());
        }
        if self.disappearance.len() != self.width {
            return fail(format!(
                "{} disappearance probabilities for {} columns",
                self.disappearance.len(),
                self.width
            ));
        }
        if let Some(p) = self.disappearance.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return fail(format!("disappearance probability {p} outside [0, 1]"));
        }
        for (name, [x, y]) in [("start", self.start), ("goal", self.goal)] {
            if x >= self.width || y >= self.height {
                return fail(format!("{name} ({x}, {y}) outside the grid"));
            }
        }
        if self.start == self.goal {
            return fail("start equals goal".into());
        }
        if !self.step_reward.is_finite() || !self.goal_reward.is_finite() {
            return fail("rewards must be finite".into());
        }
        if self.horizon == 0 {
            return fail("horizon must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NavState {
    At { x: u16, y: u16 },
    Dead,
}

impl fmt::Display for NavState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NavState::At { x, y } => write!(f, "{x},{y}"),
            NavState::Dead => f.write_str("dead"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NavAction {
    Stay,
    North,
    South,
    East,
    West,
}

impl fmt::Display for NavAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NavAction::Stay => "stay",
            NavAction::North => "north",
            NavAction::South => "south",
            NavAction::East => "east",
            NavAction::West => "west",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Navigation {
    config: NavigationConfig,
}

pub fn build_navigation(config: NavigationConfig) -> Result<Navigation> {
    config.validate()?;
    Ok(Navigation { config })
}

impl Navigation {
    pub fn config(&self) -> &NavigationConfig {
        &self.config
    }

    fn is_absorbing(&self, s: &NavState) -> bool {
        match *s {
            NavState::Dead => true,
            NavState::At { x, y } => [usize::from(x), usize::from(y)] == self.config.goal,
        }
    }

    fn target(&self, x: u16, y: u16, a: NavAction) -> Option<(u16, u16)> {
        let (w, h) = (self.config.width as u16, self.config.height as u16);
        match a {
            NavAction::Stay => Some((x, y)),
            NavAction::North => (y + 1 < h).then(|| (x, y + 1)),
            NavAction::South => y.checked_sub(1).map(|y| (x, y)),
            NavAction::East => (x + 1 < w).then(|| (x + 1, y)),
            NavAction::West => x.checked_sub(1).map(|x| (x, y)),
        }
    }

    /// `(alive successor, death probability, reward if alive)` for a live state.
    fn step(&self, x: u16, y: u16, a: NavAction) -> Option<((u16, u16), f64, f64)> {
        let (nx, ny) = self.target(x, y, a)?;
        let death = match a {
            NavAction::Stay => 0.0,
            _ => self.config.disappearance[usize::from(nx)],
        };
        let arrived = [usize::from(nx), usize::from(ny)] == self.config.goal;
        let reward = self.config.step_reward + if arrived { self.config.goal_reward } else { 0.0 };
        Some(((nx, ny), death, reward))
    }
}

impl Mdp for Navigation {
    type State = NavState;
    type Action = NavAction;

    fn initial_state(&self) -> NavState {
        NavState::At {
            x: self.config.start[0] as u16,
            y: self.config.start[1] as u16,
        }
    }

    fn horizon(&self) -> usize {
        self.config.horizon
    }

    fn actions(&self, s: &NavState) -> Actions<NavAction> {
        match *s {
            _ if self.is_absorbing(s) => Actions::from_slice(&[NavAction::Stay]),
            NavState::At { x, y } => [
                NavAction::Stay,
                NavAction::North,
                NavAction::South,
                NavAction::East,
                NavAction::West,
            ]
            .into_iter()
            .filter(|&a| self.target(x, y, a).is_some())
            .collect(),
            NavState::Dead => unreachable!(),
        }
    }

    fn sample(&self, s: &NavState, a: NavAction, rng: &mut RandomSource) -> (NavState, f64) {
        if self.is_absorbing(s) {
            return (*s, 0.0);
        }
        let NavState::At { x, y } = *s else { unreachable!() };
        let ((nx, ny), death, reward) = self.step(x, y, a).expect("move leaves the grid");
        if rng.bernoulli(death) {
            (NavState::Dead, self.config.step_reward)
        } else {
            (NavState::At { x: nx, y: ny }, reward)
        }
    }

    fn distribution(&self, s: &NavState, a: NavAction) -> Result<Vec<Transition<NavState>>> {
        if self.is_absorbing(s) {
            return Ok(vec![Transition::new(*s, 1.0, 0.0)]);
        }
        let NavState::At { x, y } = *s else { unreachable!() };
        let ((nx, ny), death, reward) = self.step(x, y, a).ok_or_else(|| Error::InapplicableAction {
            state: s.to_string(),
            action: a.to_string(),
        })?;
        let mut out = Vec::with_capacity(2);
        if death < 1.0 {
            out.push(Transition::new(NavState::At { x: nx, y: ny }, 1.0 - death, reward));
        }
        if death > 0.0 {
            out.push(Transition::new(NavState::Dead, death, self.config.step_reward));
        }
        Ok(out)
    }
}
