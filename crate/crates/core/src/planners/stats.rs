/// Visit count and incremental mean of the returns observed for one action.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ActionStats {
    pub visits: u64,
    /// Mean return; meaningless while `visits == 0`.
    pub value: f64,
}

impl ActionStats {
    pub fn update(&mut self, reward: f64) {
        self.visits += 1;
        self.value += (reward - self.value) / self.visits as f64;
    }

    /// `None` for an unvisited action.
    pub fn estimate(&self) -> Option<f64> {
        (self.visits > 0).then_some(self.value)
    }
}

/// Running statistics of one sampled policy at a candidate node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolicyStats {
    /// Handle from which the policy's choices are regenerated.
    pub seed: u64,
    pub visits: u64,
    pub mean: f64,
    /// Sample variance of the returns; 0 while `visits <= 1`.
    pub variance: f64,
    pub active: bool,
}

impl PolicyStats {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            visits: 0,
            mean: 0.0,
            variance: 0.0,
            active: true,
        }
    }

    /// One step of the online mean / sample-variance recurrence.
    pub fn update(&mut self, reward: f64) {
        self.visits += 1;
        let n = self.visits as f64;
        let delta = reward - self.mean;
        self.mean += delta / n;
        self.variance = if self.visits < 2 {
            0.0
        } else {
            (self.variance * (n - 2.0) + delta * (reward - self.mean)) / (n - 1.0)
        };
    }

    /// Estimated variance of this policy's mean estimate.
    pub fn mean_variance(&self) -> f64 {
        self.variance / self.visits as f64
    }
}

/// Applies one reward to a copy of `stats`.
pub fn brueic_update_policy(mut stats: PolicyStats, reward: f64) -> PolicyStats {
    stats.update(reward);
    stats
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(stream: &[f64]) -> PolicyStats {
        stream.iter().fold(PolicyStats::new(0), |s, &r| brueic_update_policy(s, r))
    }

    #[test]
    fn single_sample_has_zero_variance() {
        let s = run(&[2.0]);
        assert_eq!((s.visits, s.mean, s.variance), (1, 2.0, 0.0));
    }

    // Two-pass sample variance of [1, 3] is ((1-2)^2 + (3-2)^2) / 1 = 2.
    #[test]
    fn two_samples() {
        let s = run(&[1.0, 3.0]);
        assert_eq!((s.visits, s.mean, s.variance), (2, 2.0, 2.0));
    }

    // Two-pass sample variance of [1, 2, 3] is (1 + 0 + 1) / 2 = 1.
    #[test]
    fn three_samples() {
        let s = run(&[1.0, 2.0, 3.0]);
        assert_eq!((s.visits, s.mean, s.variance), (3, 2.0, 1.0));
    }

    #[test]
    fn action_mean() {
        let mut a = ActionStats::default();
        assert_eq!(a.estimate(), None);
        for r in [4.0, 0.0, 2.0] {
            a.update(r);
        }
        assert_eq!(a.estimate(), Some(2.0));
        assert_eq!(a.visits, 3);
    }
}
