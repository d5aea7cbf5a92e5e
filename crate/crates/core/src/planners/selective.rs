//! Variance-decomposition test deciding when a candidate node converts.
//!
//! A candidate's returns vary for two reasons: different sampled policies
//! have different values, and each policy's outcomes are noisy. Converting
//! pays off once the spread of policy means dominates the noise of the
//! estimates.

use serde::Deserialize;

use super::stats::PolicyStats;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConversionRule {
    /// Convert iff `EV / m < VE`.
    #[default]
    Pooled,
    /// Convert iff `VE > sum_pi (n_pi / m) * (Var_pi / n_pi)`.
    PerPolicy,
}

const ROUNDING_ULPS: f64 = 64.0;

/// Pooled statistics of a candidate's policies and the resulting decision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConversionCheck {
    /// Total samples over all policies.
    pub m: f64,
    /// Sample-weighted mean of the policy means.
    pub ee: f64,
    /// Sample-weighted mean of the policy variances.
    pub ev: f64,
    /// Sample-weighted variance of the policy means.
    pub ve: f64,
    pub convert: bool,
}

/// Evaluates the conversion test over the whole pool, retired policies
/// included. Returns `None` for a pool without samples.
pub fn conversion_check(pool: &[PolicyStats], rule: ConversionRule) -> Option<ConversionCheck> {
    let m: f64 = pool.iter().map(|p| p.visits as f64).sum();
    if m == 0.0 {
        return None;
    }
    let weight = |p: &PolicyStats| p.visits as f64 / m;
    let ee: f64 = pool.iter().map(|p| weight(p) * p.mean).sum();
    let ev: f64 = pool.iter().map(|p| weight(p) * p.variance).sum();
    let mut ve: f64 = pool.iter().map(|p| weight(p) * (p.mean - ee).powi(2)).sum();
    // Means that agree up to accumulated rounding carry no spread.
    let scale = pool.iter().map(|p| p.mean.abs()).fold(1.0, f64::max);
    if ve <= (ROUNDING_ULPS * f64::EPSILON * scale).powi(2) {
        ve = 0.0;
    }
    let convert = match rule {
        ConversionRule::Pooled => ev / m < ve,
        ConversionRule::PerPolicy => {
            let noise: f64 = pool
                .iter()
                .filter(|p| p.visits > 0)
                .map(|p| weight(p) * p.mean_variance())
                .sum();
            ve > noise
        }
    };
    Some(ConversionCheck { m, ee, ev, ve, convert })
}
