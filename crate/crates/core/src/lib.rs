//! Line-of-sight between ground users and UAVs in a Poisson street city.
//!
//! - [`env`]: the Manhattan Poisson line city, sampling and geometry.
//! - [`analytic`]: static LoS probability for a given first blocking wall.
//! - [`mobility`]: expected LoS time of a user moving through the city.
//! - [`oracle`]: exact LoS on sampled cities and Monte Carlo estimates.
//! - [`assoc`]: user-UAV association policies.
//! - [`experiment`]: configuration, sweeps and validation suites.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod assoc;
pub mod env;
pub mod error;
pub mod experiment;
pub mod mobility;
pub mod oracle;
pub mod quad;
pub mod special;

pub use analytic::{p_los_static, HeightModel};
pub use env::{sample_grid, GridParams, Point2, Region, Uav, UrbanGrid, UserMotion};
pub use error::{Error, Result};
pub use mobility::{expected_los_total, ExpectedLosResult};
pub use oracle::{coverage_time, is_los, los_time, monte_carlo_expected_los, TrialStats};
