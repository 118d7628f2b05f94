//! Cross-checks between the closed-form engine and the simulation oracle.
//! The two paths share no interference math: one integrates the Laplace
//! exponent, the other counts SIR outcomes over sampled station fields.

use aircov_core::analytic::{coverage_probability, LaplaceExponent};
use aircov_core::antenna::{AntennaPattern, NetworkParams, Scenario};
use aircov_core::montecarlo::{
    estimate_coverage_run, estimate_laplace_functional, McConfig,
};

fn scenario(ue_height: f64, tilt: f64) -> Scenario {
    Scenario::new(
        NetworkParams {
            ue_height_m: ue_height,
            ..NetworkParams::default()
        },
        AntennaPattern {
            tilt_deg: tilt,
            ..AntennaPattern::default()
        },
    )
    .unwrap()
}

#[test]
fn laplace_transform_matches_functional_estimate() {
    let sc = scenario(100.0, 6.0);
    let exp = LaplaceExponent::new(&sc, 200.0).unwrap();
    let cfg = McConfig {
        trials: 20_000,
        sim_radius_m: 10_000.0,
        rng_seed: 42,
    };
    for s in [1e4, 1e5, 5e5] {
        let analytic = exp.transform(s).unwrap();
        let mc = estimate_laplace_functional(&sc, 200.0, s, &cfg);
        let diff = (analytic - mc.value).abs();
        assert!(
            diff <= 3.0 * mc.std_error,
            "s = {s}: analytic {analytic} vs mc {} +- {}",
            mc.value,
            mc.std_error
        );
    }
}

#[test]
fn laplace_transform_deep_saturation_agrees_at_zero() {
    // At enormous s both routes underflow to zero; they must agree there
    // too rather than one of them blowing up.
    let sc = scenario(100.0, 6.0);
    let exp = LaplaceExponent::new(&sc, 200.0).unwrap();
    let cfg = McConfig {
        trials: 2_000,
        ..McConfig::default()
    };
    let analytic = exp.transform(1e9).unwrap();
    let mc = estimate_laplace_functional(&sc, 200.0, 1e9, &cfg);
    assert!((analytic - mc.value).abs() <= 3.0 * mc.std_error + 1e-12);
    assert!((0.0..1e-9).contains(&analytic));
}

#[test]
fn coverage_matches_simulation_at_spot_checks() {
    let cfg = McConfig {
        trials: 20_000,
        ..McConfig::default()
    };
    for (h, tilt) in [(100.0, 6.0), (40.0, 13.0), (1.5, 6.0)] {
        let sc = scenario(h, tilt);
        let analytic = coverage_probability(&sc).unwrap().value;
        let run = estimate_coverage_run(&sc, &cfg);
        let tol = (3.0 * run.standard_error()).max(0.01);
        assert!(
            (analytic - run.estimate()).abs() <= tol,
            "h = {h}, tilt = {tilt}: analytic {analytic} vs mc {} (tol {tol})",
            run.estimate()
        );
    }
}

#[test]
fn sparse_network_agreement_with_scaled_disk() {
    // Four orders of magnitude below the baseline density (0.001 stations
    // per km²) the disk must be widened for the serving station to exist
    // inside it at all.
    let sc = Scenario::new(
        NetworkParams {
            lambda_per_m2: 1e-9,
            ..NetworkParams::default()
        },
        AntennaPattern::default(),
    )
    .unwrap();
    let cfg = McConfig {
        trials: 20_000,
        ..McConfig::default()
    }
    .scaled_for(sc.params());
    assert!(cfg.sim_radius_m > 5000.0);
    let analytic = coverage_probability(&sc).unwrap().value;
    let run = estimate_coverage_run(&sc, &cfg);
    let tol = (3.0 * run.standard_error()).max(0.01);
    assert!(
        (analytic - run.estimate()).abs() <= tol,
        "analytic {analytic} vs mc {}",
        run.estimate()
    );
}
