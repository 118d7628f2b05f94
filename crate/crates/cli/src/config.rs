//! Run configuration: human units at the boundary (dBm, dB, degrees,
//! km⁻²), converted exactly once into the linear SI units the engines use.
//!
//! Sources merge in order: built-in defaults, then a flat JSON config file,
//! then command-line flags.

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use aircov_core::{units, AntennaPattern, McConfig, NetworkParams, Scenario};

/// All scenario and simulation settings, in the units a person writes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Station density, stations per km².
    pub lambda_per_km2: f64,
    /// Transmit power, dBm.
    pub tx_power_dbm: f64,
    /// Station height, meters.
    pub bs_height_m: f64,
    /// User height, meters (1.5 for a terrestrial user).
    pub ue_height_m: f64,
    /// Nakagami fading shape, integer >= 1.
    pub fading_m: u32,
    /// Path-loss exponent.
    pub path_loss_alpha: f64,
    /// SIR threshold, dB.
    pub sir_threshold_db: f64,
    /// Antenna down-tilt, degrees.
    pub tilt_deg: f64,
    /// Antenna 3 dB beamwidth, degrees.
    pub beamwidth_deg: f64,
    /// Sidelobe attenuation floor, dB.
    pub floor_db: f64,
    /// Monte Carlo trial count.
    pub trials: u64,
    /// Monte Carlo seed.
    pub seed: u64,
    /// Monte Carlo sampling disk radius, meters.
    pub sim_radius_m: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            lambda_per_km2: 10.0,
            tx_power_dbm: 43.0,
            bs_height_m: 19.0,
            ue_height_m: 100.0,
            fading_m: 2,
            path_loss_alpha: 2.5,
            sir_threshold_db: -10.0,
            tilt_deg: 6.0,
            beamwidth_deg: 10.0,
            floor_db: 20.0,
            trials: 100_000,
            seed: 42,
            sim_radius_m: 5000.0,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("cannot parse config file {}", path.display()))
    }

    /// Build the validated scenario, converting units exactly once.
    pub fn scenario(&self) -> Result<Scenario, aircov_core::Error> {
        let params = NetworkParams {
            lambda_per_m2: units::per_km2_to_per_m2(self.lambda_per_km2),
            tx_power_w: units::dbm_to_watts(self.tx_power_dbm),
            bs_height_m: self.bs_height_m,
            ue_height_m: self.ue_height_m,
            fading_m: self.fading_m,
            path_loss_alpha: self.path_loss_alpha,
            sir_threshold: units::db_to_linear(self.sir_threshold_db),
        };
        let pattern = AntennaPattern {
            tilt_deg: self.tilt_deg,
            beamwidth_deg: self.beamwidth_deg,
            floor_db: self.floor_db,
        };
        Scenario::new(params, pattern)
    }

    pub fn mc_config(&self) -> McConfig {
        McConfig {
            trials: self.trials,
            sim_radius_m: self.sim_radius_m,
            rng_seed: self.seed,
        }
    }

    /// `key=value` lines of the fully resolved configuration, so any output
    /// can be reproduced from its own header.
    pub fn header_lines(&self) -> Vec<String> {
        vec![
            format!("lambda_per_km2={}", self.lambda_per_km2),
            format!("tx_power_dbm={}", self.tx_power_dbm),
            format!("bs_height_m={}", self.bs_height_m),
            format!("ue_height_m={}", self.ue_height_m),
            format!("fading_m={}", self.fading_m),
            format!("path_loss_alpha={}", self.path_loss_alpha),
            format!("sir_threshold_db={}", self.sir_threshold_db),
            format!("tilt_deg={}", self.tilt_deg),
            format!("beamwidth_deg={}", self.beamwidth_deg),
            format!("floor_db={}", self.floor_db),
            format!("trials={}", self.trials),
            format!("seed={}", self.seed),
            format!("sim_radius_m={}", self.sim_radius_m),
        ]
    }
}
