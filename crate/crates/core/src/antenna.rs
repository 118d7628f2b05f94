//! Scenario parameters, the vertical antenna gain pattern, and the geometry
//! linking elevation angles to 3D distances.
//!
//! Angles are kept in degrees throughout: the gain exponent is a ratio of
//! two angles, so any single unit works, and degrees match how tilt and
//! beamwidth are configured. Trigonometric calls convert internally.
//!
//! Sign convention: the elevation angle from a base station toward the user
//! is negative when the user is above the station (aerial user) and positive
//! when below (terrestrial user). A user directly above a station sits at
//! -90°; the angle tends to 0° as the horizontal distance grows.

use crate::error::Error;

const LN10_OVER_10: f64 = std::f64::consts::LN_10 / 10.0;

/// Scenario constants: station field, radio link, and user placement.
///
/// All values are linear SI units (watts, meters, stations per m², linear
/// SIR threshold). Conversions from dBm / dB / km⁻² belong to the caller's
/// configuration layer, not here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    /// Base station density, per square meter.
    pub lambda_per_m2: f64,
    /// Transmit power, watts.
    pub tx_power_w: f64,
    /// Base station height, meters.
    pub bs_height_m: f64,
    /// User height, meters (1.5 for a terrestrial user).
    pub ue_height_m: f64,
    /// Nakagami fading shape parameter, integer >= 1.
    pub fading_m: u32,
    /// Path-loss exponent, > 2.
    pub path_loss_alpha: f64,
    /// Linear SIR threshold.
    pub sir_threshold: f64,
}

impl NetworkParams {
    // Negated comparisons so NaN fails validation too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.lambda_per_m2 > 0.0) || !self.lambda_per_m2.is_finite() {
            return Err(Error::invalid(
                "lambda_density",
                format!("must be a positive finite density, got {}", self.lambda_per_m2),
            ));
        }
        if !(self.tx_power_w > 0.0) || !self.tx_power_w.is_finite() {
            return Err(Error::invalid(
                "tx_power",
                format!("must be positive, got {} W", self.tx_power_w),
            ));
        }
        if !(self.bs_height_m > 0.0) || !self.bs_height_m.is_finite() {
            return Err(Error::invalid(
                "bs_height",
                format!("must be positive, got {} m", self.bs_height_m),
            ));
        }
        if !(self.ue_height_m > 0.0) || !self.ue_height_m.is_finite() {
            return Err(Error::invalid(
                "ue_height",
                format!("must be positive, got {} m", self.ue_height_m),
            ));
        }
        if self.ue_height_m == self.bs_height_m {
            return Err(Error::invalid(
                "ue_height",
                format!(
                    "must differ from bs_height ({} m): equal heights make the \
                     elevation geometry degenerate",
                    self.bs_height_m
                ),
            ));
        }
        if self.fading_m < 1 {
            return Err(Error::invalid("fading_m", "must be an integer >= 1"));
        }
        if !(self.path_loss_alpha > 2.0) || !self.path_loss_alpha.is_finite() {
            return Err(Error::invalid(
                "path_loss_alpha",
                format!(
                    "must be > 2 for the interference integral to converge, got {}",
                    self.path_loss_alpha
                ),
            ));
        }
        if !(self.sir_threshold > 0.0) || !self.sir_threshold.is_finite() {
            return Err(Error::invalid(
                "sir_threshold",
                format!("must be positive in linear scale, got {}", self.sir_threshold),
            ));
        }
        Ok(())
    }

    /// Signed height difference ue_height - bs_height, meters.
    pub fn height_diff_m(&self) -> f64 {
        self.ue_height_m - self.bs_height_m
    }
}

impl Default for NetworkParams {
    /// Baseline configuration: 10 stations/km², 43 dBm transmit power,
    /// 19 m stations, a 100 m aerial user, Nakagami m = 2, path-loss
    /// exponent 2.5, and a -10 dB SIR threshold.
    fn default() -> Self {
        NetworkParams {
            lambda_per_m2: 1e-5,
            tx_power_w: 10f64.powf(1.3),
            bs_height_m: 19.0,
            ue_height_m: 100.0,
            fading_m: 2,
            path_loss_alpha: 2.5,
            sir_threshold: 0.1,
        }
    }
}

/// Vertical antenna pattern: boresight down-tilt, 3 dB beamwidth, and the
/// sidelobe attenuation floor.
///
/// Gain in dB at elevation `theta` is `-min(12 ((theta - tilt)/beamwidth)^2,
/// floor_db)`: 0 dB at boresight, quadratic fall-off, clamped at
/// `-floor_db`. The clamp engages outside `[theta1, theta2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaPattern {
    /// Down-tilt of the boresight below horizontal, degrees.
    pub tilt_deg: f64,
    /// 3 dB beamwidth, degrees, > 0.
    pub beamwidth_deg: f64,
    /// Maximum vertical attenuation, dB, > 0 (20 dB is typical).
    pub floor_db: f64,
}

impl AntennaPattern {
    // Negated comparisons so NaN fails validation too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.beamwidth_deg > 0.0) || !self.beamwidth_deg.is_finite() {
            return Err(Error::invalid(
                "beamwidth_deg",
                format!("must be positive, got {}", self.beamwidth_deg),
            ));
        }
        if !(self.floor_db > 0.0) || !self.floor_db.is_finite() {
            return Err(Error::invalid(
                "floor_db",
                format!("must be positive, got {}", self.floor_db),
            ));
        }
        if !self.tilt_deg.is_finite() {
            return Err(Error::invalid("tilt_deg", "must be finite"));
        }
        Ok(())
    }

    /// Half-width of the quadratic region: sqrt(floor_db / 12) * beamwidth.
    pub fn half_width_deg(&self) -> f64 {
        (self.floor_db / 12.0).sqrt() * self.beamwidth_deg
    }

    /// Lower elevation at which the gain first reaches the floor.
    pub fn theta1_deg(&self) -> f64 {
        self.tilt_deg - self.half_width_deg()
    }

    /// Upper elevation at which the gain reaches the floor again.
    pub fn theta2_deg(&self) -> f64 {
        self.tilt_deg + self.half_width_deg()
    }

    /// Vertical gain in dB at elevation `theta_deg` (expected in [-90, 90]).
    pub fn gain_db(&self, theta_deg: f64) -> f64 {
        debug_assert!((-90.0..=90.0).contains(&theta_deg));
        let ratio = (theta_deg - self.tilt_deg) / self.beamwidth_deg;
        -(12.0 * ratio * ratio).min(self.floor_db)
    }

    /// Vertical gain as a linear power ratio in (0, 1].
    pub fn gain_linear(&self, theta_deg: f64) -> f64 {
        (self.gain_db(theta_deg) * LN10_OVER_10).exp()
    }

    /// The attenuation floor as a linear power ratio.
    pub fn floor_linear(&self) -> f64 {
        (-self.floor_db * LN10_OVER_10).exp()
    }
}

impl Default for AntennaPattern {
    /// Baseline pattern: 6° down-tilt, 10° beamwidth, 20 dB floor.
    fn default() -> Self {
        AntennaPattern {
            tilt_deg: 6.0,
            beamwidth_deg: 10.0,
            floor_db: 20.0,
        }
    }
}

/// Elevation angle, in degrees, from a base station toward a user at signed
/// height difference `h_d_m` and 3D distance `r_m`.
///
/// Negative for aerial users (h_d > 0), positive for terrestrial users.
/// Fails when `r_m` is smaller than the height difference, which no real
/// placement can produce.
pub fn elevation_angle_deg(h_d_m: f64, r_m: f64) -> Result<f64, Error> {
    let r_min = h_d_m.abs();
    if r_m < r_min || r_m <= 0.0 {
        return Err(Error::InfeasibleDistance { r: r_m, r_min });
    }
    Ok(-(h_d_m / r_m).asin().to_degrees())
}

/// Geometry derived from the user/station height difference and a pattern:
/// the feasible distance range and where the elevation crosses the lower
/// floor breakpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryContext {
    /// Signed height difference ue_height - bs_height, meters.
    pub h_d_m: f64,
    /// Minimum feasible 3D distance |h_d|, meters.
    pub r_min_m: f64,
    /// Distance at which the elevation crosses theta1, when that crossing
    /// exists in the feasible range.
    pub r1_m: Option<f64>,
}

impl GeometryContext {
    pub fn new(params: &NetworkParams, pattern: &AntennaPattern) -> Self {
        let h_d_m = params.height_diff_m();
        GeometryContext {
            h_d_m,
            r_min_m: h_d_m.abs(),
            r1_m: crossing_distance(pattern.theta1_deg(), h_d_m),
        }
    }
}

/// Distance at which the elevation angle equals `theta_deg`, if that angle
/// is attainable for the given height difference.
fn crossing_distance(theta_deg: f64, h_d_m: f64) -> Option<f64> {
    let attainable = if h_d_m > 0.0 {
        // Aerial: elevation sweeps (-90°, 0°) as r grows from |h_d|.
        theta_deg > -90.0 && theta_deg < 0.0
    } else {
        // Terrestrial: elevation sweeps (90°, 0°).
        theta_deg > 0.0 && theta_deg < 90.0
    };
    attainable.then(|| h_d_m.abs() / theta_deg.abs().to_radians().sin())
}

/// Sorted 3D distances in `[r_min, inf)` at which the elevation angle
/// crosses either floor breakpoint of the pattern. The gain's derivative is
/// discontinuous at these distances, so integrals split there.
pub fn distance_breakpoints(pattern: &AntennaPattern, h_d_m: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = [pattern.theta1_deg(), pattern.theta2_deg()]
        .iter()
        .filter_map(|&theta| crossing_distance(theta, h_d_m))
        .collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts
}

/// A validated scenario: network parameters plus antenna pattern, with the
/// derived geometry cached. Immutable after construction; all methods are
/// pure, so values can be shared freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    params: NetworkParams,
    pattern: AntennaPattern,
    geometry: GeometryContext,
    breakpoints: Vec<f64>,
}

impl Scenario {
    pub fn new(params: NetworkParams, pattern: AntennaPattern) -> Result<Self, Error> {
        params.validate()?;
        pattern.validate()?;
        let geometry = GeometryContext::new(&params, &pattern);
        let breakpoints = distance_breakpoints(&pattern, geometry.h_d_m);
        Ok(Scenario {
            params,
            pattern,
            geometry,
            breakpoints,
        })
    }

    /// Baseline scenario built from the type defaults.
    pub fn baseline() -> Self {
        Scenario::new(NetworkParams::default(), AntennaPattern::default())
            .expect("default parameters are valid")
    }

    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    pub fn pattern(&self) -> &AntennaPattern {
        &self.pattern
    }

    pub fn geometry(&self) -> &GeometryContext {
        &self.geometry
    }

    /// Distances where the gain switches between floor and quadratic form.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Elevation angle toward a station at 3D distance `r_m`.
    pub fn elevation_at_distance(&self, r_m: f64) -> Result<f64, Error> {
        elevation_angle_deg(self.geometry.h_d_m, r_m)
    }

    /// Linear vertical gain toward a station at 3D distance `r_m`.
    pub fn gain_at_distance(&self, r_m: f64) -> Result<f64, Error> {
        Ok(self.pattern.gain_linear(self.elevation_at_distance(r_m)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn baseline_pattern() -> AntennaPattern {
        AntennaPattern::default()
    }

    #[test]
    fn elevation_straight_above_and_symmetry() {
        // UAV directly above a station: -90°.
        assert!((elevation_angle_deg(21.0, 21.0).unwrap() + 90.0).abs() < 1e-12);
        // Terrestrial user at twice the height gap: arcsin(1/2) = 30°.
        assert!((elevation_angle_deg(-17.5, 35.0).unwrap() - 30.0).abs() < 1e-12);
    }

    #[test]
    fn elevation_matches_lower_breakpoint_distance() {
        // At the breakpoint distance of the baseline pattern the elevation
        // equals theta1 = 6 - sqrt(20/12)*10 = -6.90994...°; the crossing
        // sits at 21 / sin(-theta1) = 174.547 m for a 21 m height gap.
        let theta1 = baseline_pattern().theta1_deg();
        assert!((theta1 - -6.909_944_487_358_056).abs() < 1e-12);
        let r1 = 21.0 / (-theta1).to_radians().sin();
        assert!((r1 - 174.550).abs() < 1e-3, "r1 {r1}");
        let got = elevation_angle_deg(21.0, r1).unwrap();
        assert!((got - theta1).abs() < 1e-9, "got {got}");
    }

    #[test]
    fn elevation_rejects_infeasible_distance() {
        let err = elevation_angle_deg(21.0, 20.9).unwrap_err();
        assert!(matches!(err, Error::InfeasibleDistance { .. }));
    }

    #[test]
    fn gain_boresight_halfpower_and_floor_edge() {
        let p = baseline_pattern();
        assert_eq!(p.gain_db(p.tilt_deg), 0.0);
        // Half-power beamwidth definition: 12 * (1/2)^2 = 3 dB.
        assert!((p.gain_db(p.tilt_deg + p.beamwidth_deg / 2.0) + 3.0).abs() < 1e-12);
        assert!((p.gain_db(p.tilt_deg - p.beamwidth_deg / 2.0) + 3.0).abs() < 1e-12);
        // theta1 is exactly on the floor boundary.
        assert!((p.gain_db(-6.909_944_487_358_056) + 20.0).abs() < 1e-9);
    }

    #[test]
    fn gain_at_distance_floor_continuity_and_tail() {
        let params = NetworkParams {
            ue_height_m: 40.0,
            ..NetworkParams::default()
        };
        let sc = Scenario::new(params, baseline_pattern()).unwrap();
        // Continuous across the breakpoint, equal to the floor there.
        let r1 = sc.geometry().r1_m.unwrap();
        assert!((sc.gain_at_distance(r1).unwrap() - 0.01).abs() < 1e-6);
        // Far away the elevation tends to 0° and the exponent to
        // -1.2 * (tilt/beamwidth)^2.
        let far = sc.gain_at_distance(1e8).unwrap();
        assert!((far - 10f64.powf(-1.2 * 0.36)).abs() < 1e-5, "far {far}");
    }

    #[test]
    fn constant_floor_when_lower_breakpoint_above_horizon() {
        // theta1 = 30 - 12.9 = 17.09° >= 0: an aerial user only ever sees
        // the floor.
        let pattern = AntennaPattern {
            tilt_deg: 30.0,
            ..baseline_pattern()
        };
        let params = NetworkParams {
            ue_height_m: 40.0,
            ..NetworkParams::default()
        };
        let sc = Scenario::new(params, pattern).unwrap();
        assert!(sc.breakpoints().is_empty());
        for r in [21.0, 50.0, 350.0, 1e5] {
            assert!((sc.gain_at_distance(r).unwrap() - 0.01).abs() < 1e-15);
        }
    }

    #[test]
    fn breakpoints_aerial_baseline() {
        let pts = distance_breakpoints(&baseline_pattern(), 21.0);
        assert_eq!(pts.len(), 1);
        assert!((pts[0] - 174.550).abs() < 0.01, "r1 = {}", pts[0]);
        // Definition check: the elevation there is exactly theta1.
        let theta = elevation_angle_deg(21.0, pts[0]).unwrap();
        assert!((theta - baseline_pattern().theta1_deg()).abs() < 1e-9);
    }

    #[test]
    fn breakpoints_terrestrial_crosses_upper_only() {
        // Terrestrial user: elevation falls from 90° to 0°, crossing
        // theta2 = 18.91°; theta1 < 0 is unattainable.
        let pts = distance_breakpoints(&baseline_pattern(), -17.5);
        assert_eq!(pts.len(), 1);
        let expected = 17.5 / baseline_pattern().theta2_deg().to_radians().sin();
        assert!((pts[0] - expected).abs() < 1e-9);
        assert!((pts[0] - 54.0).abs() < 0.1, "got {}", pts[0]);
    }

    #[test]
    fn breakpoints_terrestrial_two_crossings_at_large_tilt() {
        // Once tilt exceeds the half-width, theta1 > 0 becomes attainable
        // for a terrestrial user: floor, mainlobe, floor again.
        let pattern = AntennaPattern {
            tilt_deg: 14.0,
            ..baseline_pattern()
        };
        let pts = distance_breakpoints(&pattern, -17.5);
        assert_eq!(pts.len(), 2);
        assert!(pts[0] < pts[1]);
    }

    #[test]
    fn params_validation_messages_name_fields() {
        let bad = NetworkParams {
            path_loss_alpha: 1.5,
            ..NetworkParams::default()
        };
        let msg = bad.validate().unwrap_err().to_string();
        assert!(msg.contains("path_loss_alpha"), "{msg}");
        assert!(msg.contains("> 2"), "{msg}");

        let equal_heights = NetworkParams {
            ue_height_m: 19.0,
            ..NetworkParams::default()
        };
        assert!(equal_heights.validate().is_err());
    }

    proptest! {
        // Gain is symmetric about the tilt and confined to [-floor, 0] dB.
        #[test]
        fn gain_symmetry_and_range(
            tilt in -30.0f64..30.0,
            bw in 1.0f64..60.0,
            floor in 1.0f64..40.0,
            delta in 0.0f64..60.0,
        ) {
            let p = AntennaPattern { tilt_deg: tilt, beamwidth_deg: bw, floor_db: floor };
            let up = p.gain_db(tilt + delta);
            let down = p.gain_db(tilt - delta);
            prop_assert!((up - down).abs() <= 1e-12 * up.abs().max(1.0));
            prop_assert!(up <= 0.0 && up >= -floor);
            let lin = p.gain_linear(tilt + delta);
            prop_assert!(lin > 0.0 && lin <= 1.0);
            prop_assert!(lin >= p.floor_linear() * (1.0 - 1e-12));
        }

        // The distance parametrization agrees with the angle parametrization
        // for both aerial and terrestrial users.
        #[test]
        fn distance_and_angle_forms_agree(
            h_d in prop_oneof![2.0f64..200.0, -40.0f64..-1.0],
            extra in 1e-6f64..1e4,
            tilt in 0.0f64..30.0,
        ) {
            let p = AntennaPattern { tilt_deg: tilt, ..AntennaPattern::default() };
            let params = NetworkParams {
                ue_height_m: 19.0 + h_d,
                ..NetworkParams::default()
            };
            prop_assume!(params.validate().is_ok());
            let sc = Scenario::new(params, p).unwrap();
            let r = sc.geometry().r_min_m + extra;
            let via_r = sc.gain_at_distance(r).unwrap();
            let theta = elevation_angle_deg(h_d, r).unwrap();
            let via_theta = p.gain_linear(theta);
            prop_assert!((via_r - via_theta).abs() <= 1e-12 * via_theta.max(1e-300));
        }

        // Gain is continuous across the breakpoint distances.
        #[test]
        fn gain_continuous_at_breakpoints(
            h_d in prop_oneof![2.0f64..200.0, -40.0f64..-1.0],
            tilt in 0.0f64..30.0,
        ) {
            let p = AntennaPattern { tilt_deg: tilt, ..AntennaPattern::default() };
            for bp in distance_breakpoints(&p, h_d) {
                let eps = bp * 1e-9;
                let params = NetworkParams { ue_height_m: 19.0 + h_d, ..NetworkParams::default() };
                prop_assume!(params.validate().is_ok());
                let sc = Scenario::new(params, p).unwrap();
                let lo = sc.gain_at_distance((bp - eps).max(sc.geometry().r_min_m)).unwrap();
                let hi = sc.gain_at_distance(bp + eps).unwrap();
                prop_assert!((lo - hi).abs() < 1e-6, "jump at {bp}: {lo} vs {hi}");
            }
        }

        // For an aerial user the elevation increases monotonically with
        // distance, from -90° toward 0°.
        #[test]
        fn aerial_elevation_monotone(
            h_d in 1.0f64..200.0,
            r_lo in 0.0f64..1e4,
            gap in 1e-3f64..1e4,
        ) {
            let a = h_d + r_lo;
            let b = a + gap;
            let th_a = elevation_angle_deg(h_d, a).unwrap();
            let th_b = elevation_angle_deg(h_d, b).unwrap();
            prop_assert!(th_b > th_a);
            prop_assert!((-90.0..0.0).contains(&th_a));
        }
    }
}
