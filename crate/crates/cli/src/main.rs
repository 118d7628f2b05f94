//! `aircov`: downlink coverage probability of aerial and terrestrial users
//! under a Poisson field of down-tilted base stations.

mod commands;
mod config;
mod figures;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use aircov_core::ScenarioField;
use commands::{exit_code_for, MethodArg};
use config::RunConfig;
use output::Format;

#[derive(Parser)]
#[command(
    name = "aircov",
    version,
    about = "Coverage probability of a user served by a Poisson field of down-tilted base stations",
    after_help = "Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 validation mismatch."
)]
struct Cli {
    /// Flat JSON config file; flags override its values, defaults fill the rest.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

/// One flag per scenario field, in human units.
#[derive(Args, Clone, Default)]
struct Overrides {
    /// Station density, per km².
    #[arg(long, global = true, value_name = "PER_KM2")]
    lambda: Option<f64>,
    /// Transmit power, dBm.
    #[arg(long, global = true, value_name = "DBM")]
    tx_power_dbm: Option<f64>,
    /// Station height, meters.
    #[arg(long, global = true, value_name = "M")]
    bs_height: Option<f64>,
    /// User height, meters (1.5 for terrestrial).
    #[arg(long, global = true, value_name = "M")]
    ue_height: Option<f64>,
    /// Nakagami fading shape, integer >= 1.
    #[arg(long, global = true, value_name = "M")]
    fading_m: Option<u32>,
    /// Path-loss exponent (> 2).
    #[arg(long, global = true, value_name = "ALPHA")]
    alpha: Option<f64>,
    /// SIR threshold, dB.
    #[arg(long, global = true, value_name = "DB", allow_hyphen_values = true)]
    sir_threshold_db: Option<f64>,
    /// Antenna down-tilt, degrees.
    #[arg(long, global = true, value_name = "DEG", allow_hyphen_values = true)]
    tilt: Option<f64>,
    /// Antenna 3 dB beamwidth, degrees.
    #[arg(long, global = true, value_name = "DEG")]
    beamwidth: Option<f64>,
    /// Sidelobe attenuation floor, dB.
    #[arg(long, global = true, value_name = "DB")]
    floor_db: Option<f64>,
    /// Monte Carlo trials.
    #[arg(long, global = true, value_name = "N")]
    trials: Option<u64>,
    /// Monte Carlo seed.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Monte Carlo sampling disk radius, meters.
    #[arg(long, global = true, value_name = "M")]
    sim_radius: Option<f64>,
}

impl Overrides {
    fn apply(&self, config: &mut RunConfig) {
        if let Some(v) = self.lambda {
            config.lambda_per_km2 = v;
        }
        if let Some(v) = self.tx_power_dbm {
            config.tx_power_dbm = v;
        }
        if let Some(v) = self.bs_height {
            config.bs_height_m = v;
        }
        if let Some(v) = self.ue_height {
            config.ue_height_m = v;
        }
        if let Some(v) = self.fading_m {
            config.fading_m = v;
        }
        if let Some(v) = self.alpha {
            config.path_loss_alpha = v;
        }
        if let Some(v) = self.sir_threshold_db {
            config.sir_threshold_db = v;
        }
        if let Some(v) = self.tilt {
            config.tilt_deg = v;
        }
        if let Some(v) = self.beamwidth {
            config.beamwidth_deg = v;
        }
        if let Some(v) = self.floor_db {
            config.floor_db = v;
        }
        if let Some(v) = self.trials {
            config.trials = v;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        if let Some(v) = self.sim_radius {
            config.sim_radius_m = v;
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the coverage probability of the configured scenario.
    Coverage {
        #[arg(long, value_enum, default_value_t = MethodArg::Analytic)]
        method: MethodArg,
    },
    /// Cross-check the analytic engine against Monte Carlo over a built-in
    /// altitude x tilt grid (needs >= 10000 trials).
    Validate,
    /// Sweep one scenario field over a grid.
    Sweep {
        /// Field to sweep: ue_height, tilt_deg, beamwidth_deg, floor_db,
        /// or lambda_density (per km²).
        #[arg(long)]
        axis: ScenarioField,
        /// Grid: `lo:step:hi` or `v1,v2,...`.
        #[arg(long)]
        grid: String,
        /// Extra curves: `field=v1,v2,...`.
        #[arg(long)]
        overlay: Option<String>,
        #[arg(long, value_enum, default_value_t = MethodArg::Analytic)]
        method: MethodArg,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
    /// Find the coverage-maximizing down-tilt by grid search plus
    /// golden-section refinement.
    OptimizeTilt {
        /// Lower tilt bound, degrees.
        #[arg(long, default_value_t = 0.0)]
        lo: f64,
        /// Upper tilt bound, degrees.
        #[arg(long, default_value_t = 30.0)]
        hi: f64,
        /// Grid resolution, degrees.
        #[arg(long, default_value_t = 0.5)]
        resolution: f64,
    },
    /// Write one of the built-in figure data files (fig3..fig8).
    Figure {
        name: String,
        /// Output path (defaults to `<name>.<format>`).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    // Figure presets may pin scenario values; explicit flags still win.
    if let Command::Figure { name, .. } = &cli.command {
        if let Some(fig) = figures::preset(name) {
            if let Some(h) = fig.base_ue_height_m {
                config.ue_height_m = h;
            }
        }
    }
    cli.overrides.apply(&mut config);

    match &cli.command {
        Command::Coverage { method } => commands::cmd_coverage(&config, *method),
        Command::Validate => commands::cmd_validate(&config),
        Command::Sweep {
            axis,
            grid,
            overlay,
            method,
            out,
            format,
        } => commands::cmd_sweep(
            &config,
            *axis,
            grid,
            overlay.as_deref(),
            *method,
            out.as_deref(),
            *format,
        ),
        Command::OptimizeTilt { lo, hi, resolution } => {
            commands::cmd_optimize_tilt(&config, *lo, *hi, *resolution)
        }
        Command::Figure { name, out, format } => {
            commands::cmd_figure(&config, name, out.as_deref(), *format)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
