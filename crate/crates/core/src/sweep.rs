//! Parameter sweeps and the coverage-maximizing down-tilt search.
//!
//! Sweep points are independent and evaluated in parallel; rows come back
//! in deterministic order (grid-major, overlay-minor, method-innermost)
//! with per-point seeds derived from the base seed, so a sweep is
//! reproducible no matter how it was scheduled.

use rayon::prelude::*;

use crate::analytic::{coverage_probability, CoverageResult, Method};
use crate::antenna::Scenario;
use crate::error::Error;
use crate::montecarlo::{estimate_coverage, McConfig};

/// A scenario parameter that sweeps or overlays can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioField {
    /// User height, meters.
    UeHeight,
    /// Antenna down-tilt, degrees.
    TiltDeg,
    /// Antenna 3 dB beamwidth, degrees.
    BeamwidthDeg,
    /// Sidelobe attenuation floor, dB.
    FloorDb,
    /// Station density, per m².
    LambdaDensity,
}

impl ScenarioField {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioField::UeHeight => "ue_height",
            ScenarioField::TiltDeg => "tilt_deg",
            ScenarioField::BeamwidthDeg => "beamwidth_deg",
            ScenarioField::FloorDb => "floor_db",
            ScenarioField::LambdaDensity => "lambda_density",
        }
    }

    /// Rebuild the scenario with this field set to `value`, re-running
    /// validation.
    pub fn apply(&self, base: &Scenario, value: f64) -> Result<Scenario, Error> {
        let mut params = *base.params();
        let mut pattern = *base.pattern();
        match self {
            ScenarioField::UeHeight => params.ue_height_m = value,
            ScenarioField::TiltDeg => pattern.tilt_deg = value,
            ScenarioField::BeamwidthDeg => pattern.beamwidth_deg = value,
            ScenarioField::FloorDb => pattern.floor_db = value,
            ScenarioField::LambdaDensity => params.lambda_per_m2 = value,
        }
        Scenario::new(params, pattern)
    }
}

impl std::str::FromStr for ScenarioField {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ue_height" => Ok(ScenarioField::UeHeight),
            "tilt_deg" => Ok(ScenarioField::TiltDeg),
            "beamwidth_deg" => Ok(ScenarioField::BeamwidthDeg),
            "floor_db" => Ok(ScenarioField::FloorDb),
            "lambda_density" => Ok(ScenarioField::LambdaDensity),
            other => Err(format!(
                "unknown sweep field '{other}' (expected ue_height, tilt_deg, \
                 beamwidth_deg, floor_db, or lambda_density)"
            )),
        }
    }
}

/// Which engines a sweep runs per point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMethod {
    Analytic,
    MonteCarlo,
    Both,
}

impl SweepMethod {
    fn methods(&self) -> &'static [Method] {
        match self {
            SweepMethod::Analytic => &[Method::Analytic],
            SweepMethod::MonteCarlo => &[Method::MonteCarlo],
            SweepMethod::Both => &[Method::Analytic, Method::MonteCarlo],
        }
    }
}

/// A 1D sweep: one axis over a grid, optional overlay curves, and the
/// evaluation method(s).
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub base: Scenario,
    pub axis: ScenarioField,
    /// Axis values, nonempty and strictly increasing.
    pub grid: Vec<f64>,
    /// Each entry produces one curve with that (field, value) applied on
    /// top of the base scenario. Empty means a single curve.
    pub overlays: Vec<(ScenarioField, f64)>,
    pub method: SweepMethod,
    /// Monte Carlo settings used when the method includes simulation.
    pub mc: McConfig,
}

/// One evaluated sweep point.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub axis_value: f64,
    pub overlay: Option<(ScenarioField, f64)>,
    pub method: Method,
    /// Per-point failures are carried here rather than aborting the sweep.
    pub outcome: Result<CoverageResult, Error>,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// Evaluate every grid x overlay x method combination.
///
/// All scenarios are validated before any evaluation starts, so a bad
/// combination fails fast; numerical failures during evaluation are
/// recorded per row.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, Error> {
    if spec.grid.is_empty() {
        return Err(Error::invalid("grid", "must be nonempty"));
    }
    if spec.grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("grid", "must be strictly increasing"));
    }

    // (axis value, overlay, scenario) per curve point, grid-major.
    let mut points = Vec::new();
    for &axis_value in &spec.grid {
        let on_axis = spec.axis.apply(&spec.base, axis_value)?;
        if spec.overlays.is_empty() {
            points.push((axis_value, None, on_axis));
        } else {
            for &(field, value) in &spec.overlays {
                let scenario = field.apply(&on_axis, value)?;
                points.push((axis_value, Some((field, value)), scenario));
            }
        }
    }

    let methods = spec.method.methods();
    let rows: Vec<SweepRow> = points
        .par_iter()
        .enumerate()
        .flat_map_iter(|(idx, (axis_value, overlay, scenario))| {
            methods.iter().map(move |&method| {
                let started = std::time::Instant::now();
                let outcome = match method {
                    Method::Analytic => coverage_probability(scenario),
                    Method::MonteCarlo => {
                        let cfg = McConfig {
                            rng_seed: point_seed(spec.mc.rng_seed, idx),
                            ..spec.mc
                        }
                        .scaled_for(scenario.params());
                        Ok(estimate_coverage(scenario, &cfg))
                    }
                };
                SweepRow {
                    axis_value: *axis_value,
                    overlay: *overlay,
                    method,
                    outcome,
                    runtime_ms: started.elapsed().as_secs_f64() * 1e3,
                }
            })
        })
        .collect();

    Ok(SweepResult { rows })
}

/// Per-point seed derivation (splitmix-style) so sweep points draw
/// independent streams while staying reproducible from one base seed.
fn point_seed(base: u64, index: usize) -> u64 {
    let mut z = base ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Coverage-maximizing down-tilt over `[lo, hi]` degrees: a grid pass at
/// `resolution` followed by golden-section refinement inside the best
/// bracket. Ties resolve to the smallest tilt, so a flat objective returns
/// `lo`. Deterministic.
pub fn optimal_tilt(
    scenario: &Scenario,
    lo: f64,
    hi: f64,
    resolution: f64,
) -> Result<(f64, f64), Error> {
    // Negated comparisons so NaN bounds fail validation too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(lo < hi) {
        return Err(Error::invalid("tilt_range", "lower bound must be below upper"));
    }
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(resolution > 0.0) {
        return Err(Error::invalid("resolution", "must be positive"));
    }

    let eval = |tilt: f64| -> Result<f64, Error> {
        let sc = ScenarioField::TiltDeg.apply(scenario, tilt)?;
        Ok(coverage_probability(&sc)?.value)
    };

    // Grid pass; strict improvement keeps the smallest maximizer.
    let mut grid = Vec::new();
    let mut t = lo;
    while t < hi - 1e-12 {
        grid.push(t);
        t += resolution;
    }
    grid.push(hi);

    let mut best_tilt = grid[0];
    let mut best_cov = eval(grid[0])?;
    let mut best_idx = 0usize;
    for (i, &tilt) in grid.iter().enumerate().skip(1) {
        let cov = eval(tilt)?;
        if cov > best_cov {
            best_cov = cov;
            best_tilt = tilt;
            best_idx = i;
        }
    }

    // Golden-section refinement inside the bracket around the best grid
    // point.
    let mut a = grid[best_idx.saturating_sub(1)];
    let mut b = grid[(best_idx + 1).min(grid.len() - 1)];
    const INV_PHI: f64 = 0.618_033_988_749_895;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    let consider = |tilt: f64, cov: f64, best_tilt: &mut f64, best_cov: &mut f64| {
        if cov > *best_cov || (cov == *best_cov && tilt < *best_tilt) {
            *best_cov = cov;
            *best_tilt = tilt;
        }
    };
    consider(x1, f1, &mut best_tilt, &mut best_cov);
    consider(x2, f2, &mut best_tilt, &mut best_cov);
    while b - a > 1e-3 {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1)?;
            consider(x1, f1, &mut best_tilt, &mut best_cov);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2)?;
            consider(x2, f2, &mut best_tilt, &mut best_cov);
        }
    }

    Ok((best_tilt, best_cov))
}
