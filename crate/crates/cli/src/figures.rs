//! Built-in figure presets: named sweep configurations whose grids are
//! data, documented in the output header and overridable through the
//! normal scenario flags.

use aircov_core::ScenarioField;

/// A named sweep preset producing one data file.
pub struct FigurePreset {
    pub name: &'static str,
    /// One-line description, written into the output header.
    pub caption: &'static str,
    pub axis: ScenarioField,
    /// Axis grid in CLI units (km⁻² for density).
    pub grid: Vec<f64>,
    /// Overlay curves in CLI units.
    pub overlays: Vec<(ScenarioField, f64)>,
    /// Run the Monte Carlo engine next to the analytic one.
    pub both_methods: bool,
    /// Config values the preset pins before command-line flags apply.
    pub base_ue_height_m: Option<f64>,
}

fn range(lo: f64, step: f64, hi: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut x = lo;
    while x <= hi + 1e-9 {
        grid.push(x);
        x += step;
    }
    grid
}

pub fn preset(name: &str) -> Option<FigurePreset> {
    let preset = match name {
        "fig3" => FigurePreset {
            name: "fig3",
            caption: "coverage probability versus user altitude, per down-tilt; analytic and Monte Carlo",
            axis: ScenarioField::UeHeight,
            grid: range(20.0, 10.0, 200.0),
            overlays: [0.0, 6.0, 13.0]
                .iter()
                .map(|&t| (ScenarioField::TiltDeg, t))
                .collect(),
            both_methods: true,
            base_ue_height_m: None,
        },
        "fig4" => FigurePreset {
            name: "fig4",
            caption: "coverage probability versus down-tilt for terrestrial (1.5 m) and aerial users",
            axis: ScenarioField::TiltDeg,
            grid: range(0.0, 1.0, 30.0),
            overlays: [1.5, 40.0, 70.0, 100.0]
                .iter()
                .map(|&h| (ScenarioField::UeHeight, h))
                .collect(),
            both_methods: false,
            base_ue_height_m: None,
        },
        "fig5" => FigurePreset {
            name: "fig5",
            caption: "coverage probability versus down-tilt under different sidelobe attenuation floors",
            axis: ScenarioField::TiltDeg,
            grid: range(0.0, 1.0, 30.0),
            overlays: [10.0, 20.0, 30.0]
                .iter()
                .map(|&a| (ScenarioField::FloorDb, a))
                .collect(),
            both_methods: false,
            base_ue_height_m: None,
        },
        "fig6" => FigurePreset {
            name: "fig6",
            caption: "coverage probability versus 3 dB beamwidth for terrestrial and aerial users",
            axis: ScenarioField::BeamwidthDeg,
            grid: range(10.0, 2.0, 40.0),
            overlays: [1.5, 40.0, 70.0, 100.0]
                .iter()
                .map(|&h| (ScenarioField::UeHeight, h))
                .collect(),
            both_methods: false,
            base_ue_height_m: None,
        },
        "fig7" => FigurePreset {
            name: "fig7",
            caption: "coverage probability versus station density, per down-tilt",
            axis: ScenarioField::LambdaDensity,
            grid: vec![1.0, 2.0, 5.0, 10.0, 20.0, 50.0],
            overlays: [0.0, 6.0, 13.0]
                .iter()
                .map(|&t| (ScenarioField::TiltDeg, t))
                .collect(),
            both_methods: false,
            base_ue_height_m: None,
        },
        "fig8" => FigurePreset {
            name: "fig8",
            caption: "coverage probability versus down-tilt for a 40 m user under different densities",
            axis: ScenarioField::TiltDeg,
            grid: range(0.0, 1.0, 30.0),
            overlays: [5.0, 10.0, 20.0]
                .iter()
                .map(|&l| (ScenarioField::LambdaDensity, l))
                .collect(),
            both_methods: false,
            base_ue_height_m: Some(40.0),
        },
        _ => return None,
    };
    Some(preset)
}

/// Output column name for a swept or overlaid field.
pub fn column_name(field: ScenarioField) -> &'static str {
    match field {
        ScenarioField::UeHeight => "h_uav_m",
        ScenarioField::TiltDeg => "tilt_deg",
        ScenarioField::BeamwidthDeg => "beamwidth_deg",
        ScenarioField::FloorDb => "floor_db",
        ScenarioField::LambdaDensity => "lambda_per_km2",
    }
}
