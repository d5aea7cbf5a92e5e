//! Monte-Carlo planners for finite-horizon generative MDPs.
//!
//! - [`mdp`]: the generative-model contract and seeded randomness.
//! - [`policy`]: lazily materialized uniformly drawn policies.
//! - [`domains`]: Sailing, Navigation, SysAdmin and tabular MDPs.
//! - [`oracle`]: exact backward induction and simple regret.
//! - [`planners`]: Random, MAB-Uniform, UCT, ε-greedy, BRUE, BRUE_I, BRUE_IC.

pub mod domains;
pub mod error;
pub mod mdp;
pub mod oracle;
pub mod planners;
pub mod policy;
pub mod random;

pub use error::{Error, Result};
pub use mdp::{sample_transition, Actions, Mdp, Transition};
pub use oracle::{simple_regret, uniform_policy_value, value_iteration, UniformValueTables, ValueTables};
pub use planners::{plan, Budget, PlanOutcome, Planner, PlannerConfig};
pub use policy::{execute_policy, generate_random_policy, LazyPolicy};
pub use random::RandomSource;
