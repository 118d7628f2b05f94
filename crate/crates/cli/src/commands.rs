//! The five subcommands. Each returns the process exit code: 0 success,
//! 2 invalid input, 3 numerical failure, 4 validation mismatch.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Result};
use serde_json::Value;

use aircov_core::analytic::coverage_probability;
use aircov_core::montecarlo::estimate_coverage;
use aircov_core::sweep::{run_sweep, ScenarioField, SweepMethod, SweepRow, SweepSpec};
use aircov_core::units::per_km2_to_per_m2;
use aircov_core::{optimal_tilt, Method};

use crate::config::RunConfig;
use crate::figures::{column_name, preset};
use crate::output::{num, Format, Table};

pub const EXIT_INVALID: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_MISMATCH: u8 = 4;

/// Map engine errors onto exit codes.
pub fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<aircov_core::Error>() {
        Some(aircov_core::Error::QuadratureNonConvergence { .. }) => EXIT_NUMERICAL,
        Some(_) => EXIT_INVALID,
        None => EXIT_INVALID,
    }
}

fn print_header(config: &RunConfig) {
    for line in config.header_lines() {
        println!("# {line}");
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MethodArg {
    Analytic,
    Mc,
    Both,
}

impl MethodArg {
    fn sweep_method(self) -> SweepMethod {
        match self {
            MethodArg::Analytic => SweepMethod::Analytic,
            MethodArg::Mc => SweepMethod::MonteCarlo,
            MethodArg::Both => SweepMethod::Both,
        }
    }
}

pub fn cmd_coverage(config: &RunConfig, method: MethodArg) -> Result<u8> {
    let scenario = config.scenario()?;
    print_header(config);
    if matches!(method, MethodArg::Analytic | MethodArg::Both) {
        let started = Instant::now();
        let result = coverage_probability(&scenario)?;
        print_coverage_line(result.value, result.abs_error_estimate, "analytic", started);
        if result.clamp_warning {
            eprintln!("warning: raw series value fell outside [0, 1] beyond the error estimate");
        }
    }
    if matches!(method, MethodArg::Mc | MethodArg::Both) {
        let started = Instant::now();
        let cfg = config.mc_config().scaled_for(scenario.params());
        let result = estimate_coverage(&scenario, &cfg);
        print_coverage_line(result.value, result.abs_error_estimate, "monte_carlo", started);
    }
    Ok(0)
}

fn print_coverage_line(value: f64, err: f64, method: &str, started: Instant) {
    println!(
        "coverage={value:.6} abs_error={err:.3e} method={method} elapsed_ms={:.1}",
        started.elapsed().as_secs_f64() * 1e3
    );
}

/// Built-in cross-validation grid: altitudes x down-tilts, both engines.
pub fn cmd_validate(config: &RunConfig) -> Result<u8> {
    if config.trials < 10_000 {
        return Err(anyhow!(aircov_core::Error::InvalidScenario {
            field: "trials",
            reason: format!(
                "validation needs at least 10000 trials for a meaningful tolerance, got {}",
                config.trials
            ),
        }));
    }
    let spec = SweepSpec {
        base: config.scenario()?,
        axis: ScenarioField::UeHeight,
        grid: vec![25.0, 40.0, 70.0, 100.0, 150.0, 200.0],
        overlays: [0.0, 6.0, 13.0, 20.0]
            .iter()
            .map(|&t| (ScenarioField::TiltDeg, t))
            .collect(),
        method: SweepMethod::Both,
        mc: config.mc_config(),
    };
    let result = run_sweep(&spec)?;

    print_header(config);
    println!("h_uav_m,tilt_deg,p_cov_analytic,p_cov_mc,abs_diff,tolerance,status");
    let mut all_pass = true;
    for pair in result.rows.chunks(2) {
        let (analytic, mc) = match pair {
            [a, b] if a.method == Method::Analytic => (a, b),
            [b, a] => (a, b),
            _ => unreachable!("both-method sweeps emit row pairs"),
        };
        let a = analytic.outcome.as_ref().map_err(|e| anyhow!(e.clone()))?;
        let m = mc.outcome.as_ref().map_err(|e| anyhow!(e.clone()))?;
        // Wald standard error from the Wilson half-width's sample size.
        let n = config.trials as f64;
        let se = (m.value * (1.0 - m.value) / n).sqrt();
        let tolerance = (3.0 * se).max(0.01);
        let diff = (a.value - m.value).abs();
        let pass = diff <= tolerance;
        all_pass &= pass;
        println!(
            "{},{},{:.6},{:.6},{:.6},{:.6},{}",
            analytic.axis_value,
            analytic.overlay.map(|(_, v)| v).unwrap_or(f64::NAN),
            a.value,
            m.value,
            diff,
            tolerance,
            if pass { "pass" } else { "FAIL" }
        );
    }
    Ok(if all_pass { 0 } else { EXIT_MISMATCH })
}

pub fn cmd_sweep(
    config: &RunConfig,
    axis: ScenarioField,
    grid_spec: &str,
    overlay_spec: Option<&str>,
    method: MethodArg,
    out: Option<&Path>,
    format: Format,
) -> Result<u8> {
    let grid = parse_grid(grid_spec)?
        .into_iter()
        .map(|v| to_core_units(axis, v))
        .collect();
    let overlays = match overlay_spec {
        Some(spec) => parse_overlay(spec)?,
        None => Vec::new(),
    };
    let spec = SweepSpec {
        base: config.scenario()?,
        axis,
        grid,
        overlays,
        method: method.sweep_method(),
        mc: config.mc_config(),
    };
    let result = run_sweep(&spec)?;

    let mut comments = config.header_lines();
    comments.insert(0, format!("sweep axis={}", axis.name()));
    let mut table = Table::new(
        comments,
        vec![
            "axis",
            "axis_value",
            "overlay",
            "overlay_value",
            "method",
            "p_cov",
            "abs_error",
            "runtime_ms",
            "note",
        ],
    );
    for row in &result.rows {
        let (field, value) = row
            .overlay
            .map(|(f, v)| (Value::String(f.name().into()), num(from_core_units(f, v))))
            .unwrap_or((Value::Null, Value::Null));
        let (p, e, note) = match &row.outcome {
            Ok(r) => (num(r.value), num(r.abs_error_estimate), Value::Null),
            Err(err) => (Value::Null, Value::Null, Value::String(err.to_string())),
        };
        table.push(vec![
            Value::String(axis.name().into()),
            num(from_core_units(axis, row.axis_value)),
            field,
            value,
            Value::String(row.method.to_string()),
            p,
            e,
            num(row.runtime_ms),
            note,
        ]);
    }
    table.write(out, format)?;
    Ok(0)
}

pub fn cmd_optimize_tilt(config: &RunConfig, lo: f64, hi: f64, resolution: f64) -> Result<u8> {
    let scenario = config.scenario()?;
    print_header(config);
    let started = Instant::now();
    let (tilt, coverage) = optimal_tilt(&scenario, lo, hi, resolution)?;
    println!(
        "optimal_tilt_deg={tilt:.3} coverage={coverage:.6} range=[{lo},{hi}] \
         resolution={resolution} elapsed_ms={:.1}",
        started.elapsed().as_secs_f64() * 1e3
    );
    Ok(0)
}

pub fn cmd_figure(
    config: &RunConfig,
    name: &str,
    out: Option<&Path>,
    format: Format,
) -> Result<u8> {
    let Some(fig) = preset(name) else {
        return Err(anyhow!(aircov_core::Error::InvalidScenario {
            field: "figure",
            reason: format!("unknown figure '{name}' (expected fig3..fig8)"),
        }));
    };

    let spec = SweepSpec {
        base: config.scenario()?,
        axis: fig.axis,
        grid: fig.grid.iter().map(|&v| to_core_units(fig.axis, v)).collect(),
        overlays: fig
            .overlays
            .iter()
            .map(|&(f, v)| (f, to_core_units(f, v)))
            .collect(),
        method: if fig.both_methods {
            SweepMethod::Both
        } else {
            SweepMethod::Analytic
        },
        mc: config.mc_config(),
    };
    let result = run_sweep(&spec)?;

    let mut comments = vec![
        format!("{}: {}", fig.name, fig.caption),
        format!(
            "grid {}=[{}]",
            column_name(fig.axis),
            fig.grid
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        ),
    ];
    comments.extend(config.header_lines());

    let overlay_field = fig.overlays.first().map(|&(f, _)| f);
    let mut columns = vec![column_name(fig.axis)];
    if let Some(f) = overlay_field {
        columns.push(column_name(f));
    }
    columns.push("p_cov_analytic");
    if fig.both_methods {
        columns.push("p_cov_mc");
        columns.push("mc_halfwidth");
    }
    let mut table = Table::new(comments, columns);

    // Both-method sweeps come back as adjacent (analytic, mc) row pairs.
    let chunk = if fig.both_methods { 2 } else { 1 };
    for pair in result.rows.chunks(chunk) {
        let analytic = pair
            .iter()
            .find(|r| r.method == Method::Analytic)
            .expect("analytic row present");
        let mut row = vec![num(from_core_units(fig.axis, analytic.axis_value))];
        if let Some((f, v)) = analytic.overlay {
            row.push(num(from_core_units(f, v)));
        }
        row.push(outcome_value(analytic));
        if fig.both_methods {
            let mc = pair
                .iter()
                .find(|r| r.method == Method::MonteCarlo)
                .expect("mc row present");
            row.push(outcome_value(mc));
            row.push(match &mc.outcome {
                Ok(r) => num(r.abs_error_estimate),
                Err(_) => Value::Null,
            });
        }
        table.push(row);
    }

    let default_path = default_figure_path(name, format);
    let path = out.unwrap_or(&default_path);
    table.write(Some(path), format)?;
    eprintln!("wrote {}", path.display());
    Ok(0)
}

fn outcome_value(row: &SweepRow) -> Value {
    match &row.outcome {
        Ok(r) => num(r.value),
        Err(_) => Value::Null,
    }
}

fn default_figure_path(name: &str, format: Format) -> PathBuf {
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    PathBuf::from(format!("{name}.{ext}"))
}

/// Station density is configured per km² but computed per m²; every other
/// field is already in its working unit.
fn to_core_units(field: ScenarioField, value: f64) -> f64 {
    match field {
        ScenarioField::LambdaDensity => per_km2_to_per_m2(value),
        _ => value,
    }
}

fn from_core_units(field: ScenarioField, value: f64) -> f64 {
    match field {
        ScenarioField::LambdaDensity => aircov_core::units::per_m2_to_per_km2(value),
        _ => value,
    }
}

/// Grid syntax: `lo:step:hi` or a comma list `1,2,5`.
fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let invalid = |what: &str| {
        anyhow!(aircov_core::Error::InvalidScenario {
            field: "grid",
            reason: format!("{what} in '{spec}' (expected lo:step:hi or v1,v2,...)"),
        })
    };
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(invalid("expected three ':'-separated numbers"));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| invalid("unparseable number"))?;
        let (lo, step, hi) = (nums[0], nums[1], nums[2]);
        // Negated comparison so a NaN step fails too.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(step > 0.0) || hi < lo {
            return Err(invalid("need step > 0 and hi >= lo"));
        }
        let mut grid = Vec::new();
        let mut x = lo;
        while x <= hi + 1e-9 {
            grid.push(x);
            x += step;
        }
        Ok(grid)
    } else {
        let grid: Vec<f64> = spec
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| invalid("unparseable number"))?;
        if grid.is_empty() {
            return Err(invalid("empty grid"));
        }
        Ok(grid)
    }
}

/// Overlay syntax: `field=v1,v2,...`, one curve per value.
fn parse_overlay(spec: &str) -> Result<Vec<(ScenarioField, f64)>> {
    let invalid = |what: String| {
        anyhow!(aircov_core::Error::InvalidScenario {
            field: "overlay",
            reason: format!("{what} in '{spec}' (expected field=v1,v2,...)"),
        })
    };
    let (field_str, values) = spec
        .split_once('=')
        .ok_or_else(|| invalid("missing '='".into()))?;
    let field: ScenarioField = field_str.trim().parse().map_err(invalid)?;
    values
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map(|v| (field, to_core_units(field, v)))
                .map_err(|_| invalid(format!("unparseable number '{v}'")))
        })
        .collect()
}
