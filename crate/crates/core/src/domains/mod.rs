//! Benchmark domains and their config-file schema.
//!
//! An instance file is TOML with a `domain` key selecting the family, plus
//! that family's fields:
//!
//! ```toml
//! domain = "sailing"
//! width = 5
//! height = 5
//! wind_directions = 8
//! p_stay = 0.4
//! costs = [1.0, 2.0, 3.0, 4.0]
//! start = [0, 0]
//! goal = [4, 4]
//! initial_wind = 2
//! horizon = 15
//! ```
//!
//! `navigation`, `sysadmin` and `tabular` files follow the fields of
//! [`NavigationConfig`], [`SysAdminConfig`] and [`TabularConfig`]. Every field
//! is mandatory (except `sysadmin.explicit`, default `true`) so an instance
//! file fully describes the experiment.

pub mod navigation;
pub mod sailing;
pub mod sysadmin;
pub mod tabular;

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::mdp::Mdp;

pub use navigation::{build_navigation, NavAction, NavState, Navigation, NavigationConfig};
pub use sailing::{build_sailing, Heading, Sailing, SailingConfig, SailingState};
pub use sysadmin::{build_sysadmin, Machines, NamedTopology, SysAction, SysAdmin, SysAdminConfig, Topology};
pub use tabular::{TabularConfig, TabularMdp};

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "domain", rename_all = "lowercase")]
pub enum DomainConfig {
    Sailing(SailingConfig),
    Navigation(NavigationConfig),
    Sysadmin(SysAdminConfig),
    Tabular(TabularConfig),
}

impl DomainConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn build(self) -> Result<Domain> {
        Ok(match self {
            DomainConfig::Sailing(c) => Domain::Sailing(build_sailing(c)?),
            DomainConfig::Navigation(c) => Domain::Navigation(build_navigation(c)?),
            DomainConfig::Sysadmin(c) => Domain::SysAdmin(build_sysadmin(c)?),
            DomainConfig::Tabular(c) => Domain::Tabular(TabularMdp::from_config(&c)?),
        })
    }
}

/// A built domain instance of any family.
#[derive(Clone, Debug)]
pub enum Domain {
    Sailing(Sailing),
    Navigation(Navigation),
    SysAdmin(SysAdmin),
    Tabular(TabularMdp),
}

/// Generic code to run against whichever MDP a [`Domain`] holds.
pub trait DomainVisitor {
    type Output;
    fn visit<M: Mdp>(self, mdp: &M) -> Self::Output;
}

impl Domain {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        DomainConfig::load(path)?.build()
    }

    pub fn family(&self) -> &'static str {
        match self {
            Domain::Sailing(_) => "sailing",
            Domain::Navigation(_) => "navigation",
            Domain::SysAdmin(_) => "sysadmin",
            Domain::Tabular(_) => "tabular",
        }
    }

    pub fn visit<V: DomainVisitor>(&self, visitor: V) -> V::Output {
        match self {
            Domain::Sailing(m) => visitor.visit(m),
            Domain::Navigation(m) => visitor.visit(m),
            Domain::SysAdmin(m) => visitor.visit(m),
            Domain::Tabular(m) => visitor.visit(m),
        }
    }
}
