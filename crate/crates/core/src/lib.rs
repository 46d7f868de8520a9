//! Coverage analysis of two-hop cellular networks in which ground base
//! stations backhaul UAV relays.
//!
//! The crate has two independent engines: a semi-analytical one built from
//! closed-form ratio distributions, nearest-neighbour laws and interference
//! Laplace transforms, and a Monte Carlo network simulator that serves as its
//! oracle.

pub mod antenna;
pub mod channel;
pub mod config;
pub mod coverage;
pub mod error;
pub mod laplace;
pub mod quadrature;
pub mod ratio_cdf;
pub mod report;
pub mod runner;
pub mod sim;
pub mod spatial;
pub mod special;
pub mod stats;
pub mod validate;

pub use config::{AntennaModel, Environment, NetworkConfig};
pub use coverage::Protocol;
pub use error::{Error, Result};
pub use spatial::{CondLabel, ServingGeometry};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/configuration.md")]
    mod configuration {}
    #[doc = include_str!("../../../book/src/channel.md")]
    mod channel {}
    #[doc = include_str!("../../../book/src/ratio-distributions.md")]
    mod ratio_distributions {}
    #[doc = include_str!("../../../book/src/spatial.md")]
    mod spatial {}
    #[doc = include_str!("../../../book/src/interference.md")]
    mod interference {}
    #[doc = include_str!("../../../book/src/coverage.md")]
    mod coverage {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/validation.md")]
    mod validation {}
}
