//! Downlink coverage probability of a user served by a Poisson field of
//! terrestrial base stations whose antennas have a down-tilted vertical
//! radiation pattern.
//!
//! The crate evaluates the coverage probability two independent ways:
//!
//! * [`analytic::coverage_probability`] — closed-form expression built from
//!   the interference Laplace transform and the nearest-station distance law,
//!   evaluated by adaptive quadrature.
//! * [`montecarlo::estimate_coverage`] — seeded Monte Carlo simulation of the
//!   station field, fading, and SIR.
//!
//! On top of those sit parameter sweeps and a derivative-free search for the
//! coverage-maximizing down-tilt ([`sweep`]).

pub mod antenna;
pub mod analytic;
pub mod error;
pub mod montecarlo;
pub mod quad;
pub mod sweep;
pub mod units;

pub use antenna::{AntennaPattern, GeometryContext, NetworkParams, Scenario};
pub use analytic::{coverage_probability, CoverageResult, Method};
pub use error::Error;
pub use montecarlo::{estimate_coverage, McConfig};
pub use sweep::{optimal_tilt, run_sweep, ScenarioField, SweepMethod, SweepSpec};
