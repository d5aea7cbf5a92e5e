//! Sailing: steer a boat across a grid to a goal cell under a drifting wind.
//!
//! Movement is deterministic; only the wind is stochastic. The wind direction
//! is the compass direction it blows toward. Each step costs according to the
//! angle between heading and wind, and heading straight into the wind is not
//! allowed. Headings that would leave the grid are not applicable either.

use std::fmt;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::mdp::{Actions, Mdp, Transition};
use crate::random::RandomSource;

pub const WIND_DIRECTIONS: usize = 8;

/// Unit moves for headings N, NE, E, SE, S, SW, W, NW.
const MOVES: [(i32, i32); WIND_DIRECTIONS] = [
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
    (-1, 0),
    (-1, 1),
];

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SailingConfig {
    pub width: usize,
    pub height: usize,
    /// Must be 8.
    pub wind_directions: usize,
    /// Probability that the wind keeps its direction for the next step.
    pub p_stay: f64,
    /// Move cost by angular distance between heading and wind, in 45 degree
    /// units: `[downwind, 45, 90, 135]`.
    pub costs: [f64; 4],
    pub start: [usize; 2],
    pub goal: [usize; 2],
    pub initial_wind: usize,
    pub horizon: usize,
}

impl SailingConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(format!("sailing: {msg}")));
        if self.width < 2 || self.height < 2 {
            return fail(format!("grid {}x{} is smaller than 2x2", self.width, self.height));
        }
        if self.width > usize::from(u16::MAX) || self.height > usize::from(u16::MAX) {
            return fail("grid too large".into());
        }
        if self.wind_directions != WIND_DIRECTIONS {
            return fail(format!("{} wind directions, only 8 supported", self.wind_directions));
        }
        if !(0.0..=1.0).contains(&self.p_stay) {
            return fail(format!("p_stay {} outside [0, 1]", self.p_stay));
        }
        if self.costs.iter().any(|c| c.is_nan() || *c < 0.0) {
            return fail(format!("negative move cost in {:?}", self.costs));
        }
        for (name, [x, y]) in [("start", self.start), ("goal", self.goal)] {
            if x >= self.width || y >= self.height {
                return fail(format!("{name} ({x}, {y}) outside the grid"));
            }
        }
        if self.initial_wind >= WIND_DIRECTIONS {
            return fail(format!("initial wind {} is not a direction", self.initial_wind));
        }
        if self.horizon == 0 {
            return fail("horizon must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SailingState {
    pub x: u16,
    pub y: u16,
    pub wind: u8,
}

impl fmt::Display for SailingState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}/w{}", self.x, self.y, self.wind)
    }
}

/// Compass heading, 0 = north, clockwise in 45 degree steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Heading(pub u8);

impl fmt::Display for Heading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; 8] = ["N", "NE", "E", "SE", "S", "SW", "W", "NW"];
        f.write_str(NAMES[self.0 as usize])
    }
}

#[derive(Clone, Debug)]
pub struct Sailing {
    config: SailingConfig,
}

pub fn build_sailing(config: SailingConfig) -> Result<Sailing> {
    config.validate()?;
    Ok(Sailing { config })
}

/// Angular distance between two compass directions, in 45 degree units (0..=4).
pub fn angle(a: u8, b: u8) -> u8 {
    let d = (a as i32 - b as i32).rem_euclid(WIND_DIRECTIONS as i32) as u8;
    d.min(WIND_DIRECTIONS as u8 - d)
}

impl Sailing {
    pub fn config(&self) -> &SailingConfig {
        &self.config
    }

    pub fn is_goal(&self, s: &SailingState) -> bool {
        [usize::from(s.x), usize::from(s.y)] == self.config.goal
    }

    fn target(&self, s: &SailingState, h: Heading) -> Option<(u16, u16)> {
        let (dx, dy) = MOVES[h.0 as usize];
        let x = i32::from(s.x) + dx;
        let y = i32::from(s.y) + dy;
        let inside = x >= 0 && y >= 0 && (x as usize) < self.config.width && (y as usize) < self.config.height;
        inside.then_some((x as u16, y as u16))
    }

    /// Cost of sailing heading `h` under wind `wind`; `None` when into the wind.
    pub fn move_cost(&self, h: Heading, wind: u8) -> Option<f64> {
        match angle(h.0, wind) {
            4 => None,
            k => Some(self.config.costs[k as usize]),
        }
    }

    fn wind_outcomes(&self, wind: u8) -> [(u8, f64); 3] {
        let p = self.config.p_stay;
        let n = WIND_DIRECTIONS as u8;
        [
            (wind, p),
            ((wind + 1) % n, (1.0 - p) / 2.0),
            ((wind + n - 1) % n, (1.0 - p) / 2.0),
        ]
    }
}

impl Mdp for Sailing {
    type State = SailingState;
    type Action = Heading;

    fn initial_state(&self) -> SailingState {
        SailingState {
            x: self.config.start[0] as u16,
            y: self.config.start[1] as u16,
            wind: self.config.initial_wind as u8,
        }
    }

    fn horizon(&self) -> usize {
        self.config.horizon
    }

    fn actions(&self, s: &SailingState) -> Actions<Heading> {
        (0..WIND_DIRECTIONS as u8)
            .map(Heading)
            .filter(|&h| angle(h.0, s.wind) != 4 && self.target(s, h).is_some())
            .collect()
    }

    fn sample(&self, s: &SailingState, h: Heading, rng: &mut RandomSource) -> (SailingState, f64) {
        if self.is_goal(s) {
            return (*s, 0.0);
        }
        let (x, y) = self.target(s, h).expect("heading leaves the grid");
        let cost = self.move_cost(h, s.wind).expect("heading into the wind");
        let u = rng.unit();
        let p = self.config.p_stay;
        let wind = if u < p {
            s.wind
        } else if u < p + (1.0 - p) / 2.0 {
            (s.wind + 1) % WIND_DIRECTIONS as u8
        } else {
            (s.wind + WIND_DIRECTIONS as u8 - 1) % WIND_DIRECTIONS as u8
        };
        (SailingState { x, y, wind }, -cost)
    }

    fn distribution(&self, s: &SailingState, h: Heading) -> Result<Vec<Transition<SailingState>>> {
        if self.is_goal(s) {
            return Ok(vec![Transition::new(*s, 1.0, 0.0)]);
        }
        let (x, y) = self.target(s, h).ok_or_else(|| Error::InapplicableAction {
            state: s.to_string(),
            action: h.to_string(),
        })?;
        let cost = self.move_cost(h, s.wind).ok_or_else(|| Error::InapplicableAction {
            state: s.to_string(),
            action: h.to_string(),
        })?;
        Ok(self
            .wind_outcomes(s.wind)
            .into_iter()
            .filter(|&(_, p)| p > 0.0)
            .map(|(wind, p)| Transition::new(SailingState { x, y, wind }, p, -cost))
            .collect())
    }
}
