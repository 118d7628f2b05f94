//! Closed-form coverage probability.
//!
//! Conditioned on the serving distance `r`, the Nakagami-m CCDF of the
//! fading gain turns coverage into a finite series over `k = 0..m` in
//! derivatives of the interference Laplace transform, and averaging over
//! the nearest-station distance density `f` gives
//!
//! ```text
//! P_cov = sum_k 1/k! * Int (-s*(r))^k  d^k L_I/ds^k |_{s = s*(r)}  f(r) dr
//! ```
//!
//! with the evaluation point `s*(r) = m beta r^alpha / (P_T G(r))`. The
//! transform is an exponential of an integral over the interferer field
//! (exclusion zone at the serving distance); its derivatives follow from
//! differentiating that exponent under the integral sign plus the Leibniz
//! recurrence for derivatives of `exp(-eta)`.
//!
//! Every term of the series is nonnegative: `(-1)^k L^(k) >= 0` because a
//! Laplace transform is completely monotone. The per-term values are kept
//! in [`CoverageResult::series_terms`] as diagnostics.

use std::cell::Cell;
use std::f64::consts::PI;

use crate::antenna::Scenario;
use crate::error::Error;
use crate::quad::{self, QuadConfig};

/// Which engine produced a coverage number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    MonteCarlo,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Analytic => write!(f, "analytic"),
            Method::MonteCarlo => write!(f, "monte_carlo"),
        }
    }
}

/// A coverage probability with its numerical pedigree.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageResult {
    /// Coverage probability, clamped to [0, 1].
    pub value: f64,
    /// Quadrature error bound (analytic) or 95% confidence half-width
    /// (Monte Carlo).
    pub abs_error_estimate: f64,
    pub method: Method,
    /// Per-k contributions of the coverage series (analytic only).
    pub series_terms: Vec<f64>,
    /// Set when the raw series value fell outside [0, 1] by more than the
    /// error estimate before clamping.
    pub clamp_warning: bool,
}

/// Distribution of the 3D distance from the user to its nearest station:
/// density `2 pi lambda r exp(-lambda pi (r^2 - h_d^2))` on `r >= |h_d|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearestDistanceLaw {
    pub lambda_per_m2: f64,
    pub h_d_abs_m: f64,
}

impl NearestDistanceLaw {
    pub fn new(lambda_per_m2: f64, h_d_abs_m: f64) -> Self {
        NearestDistanceLaw {
            lambda_per_m2,
            h_d_abs_m,
        }
    }

    pub fn for_scenario(scenario: &Scenario) -> Self {
        NearestDistanceLaw::new(
            scenario.params().lambda_per_m2,
            scenario.geometry().r_min_m,
        )
    }

    /// Probability density at distance `r_m` (zero below the support edge).
    pub fn pdf(&self, r_m: f64) -> f64 {
        if r_m < self.h_d_abs_m {
            return 0.0;
        }
        let lp = self.lambda_per_m2 * PI;
        2.0 * lp * r_m * (-lp * (r_m * r_m - self.h_d_abs_m * self.h_d_abs_m)).exp()
    }

    /// Cumulative distribution at distance `r_m`.
    pub fn cdf(&self, r_m: f64) -> f64 {
        if r_m < self.h_d_abs_m {
            return 0.0;
        }
        let lp = self.lambda_per_m2 * PI;
        -(-lp * (r_m * r_m - self.h_d_abs_m * self.h_d_abs_m)).exp_m1()
    }

    /// Distance below which a fraction `p` of the mass lies.
    pub fn quantile(&self, p: f64) -> f64 {
        debug_assert!((0.0..1.0).contains(&p));
        let lp = self.lambda_per_m2 * PI;
        (self.h_d_abs_m * self.h_d_abs_m - (1.0 - p).ln() / lp).sqrt()
    }

    /// Radius beyond which at most `tail_mass` probability remains; used to
    /// truncate the outer coverage integral with a provable tail bound.
    pub fn truncation_radius(&self, tail_mass: f64) -> f64 {
        let lp = self.lambda_per_m2 * PI;
        (self.h_d_abs_m * self.h_d_abs_m + (1.0 / tail_mass).ln() / lp).sqrt()
    }
}

/// The exponent `eta(s)` of the interference Laplace transform
/// `L_I(s) = exp(-eta(s))` for a given serving distance (interferers are
/// excluded inside it), together with its derivatives in `s`.
#[derive(Debug, Clone)]
pub struct LaplaceExponent<'a> {
    scenario: &'a Scenario,
    serving_distance_m: f64,
    quad_cfg: QuadConfig,
}

impl<'a> LaplaceExponent<'a> {
    pub fn new(scenario: &'a Scenario, serving_distance_m: f64) -> Result<Self, Error> {
        let r_min = scenario.geometry().r_min_m;
        if serving_distance_m < r_min {
            return Err(Error::InfeasibleDistance {
                r: serving_distance_m,
                r_min,
            });
        }
        Ok(LaplaceExponent {
            scenario,
            serving_distance_m,
            quad_cfg: QuadConfig::default(),
        })
    }

    pub fn serving_distance_m(&self) -> f64 {
        self.serving_distance_m
    }

    /// Received power (up to fading) from an interferer at 3D distance
    /// `t_m`: `P_T G(t) t^-alpha`.
    fn interference_power(&self, t_m: f64) -> f64 {
        let params = self.scenario.params();
        let h_d = self.scenario.geometry().h_d_m;
        let theta = -(h_d / t_m).asin().to_degrees();
        let gain = self.scenario.pattern().gain_linear(theta);
        params.tx_power_w * gain * t_m.powf(-params.path_loss_alpha)
    }

    /// Tail-substitution exponent: the exponent integrand decays like
    /// `t^(1 - alpha)`, so this keeps the mapped endpoint smooth.
    fn tail_power(&self) -> i32 {
        quad::power_for_decay(self.scenario.params().path_loss_alpha - 1.0)
    }

    /// Split points for the tail integral: gain breakpoints plus the knees
    /// where `s * c(t)` passes the fading parameter, bracketed with the
    /// extreme gains. Kinks and knees become cell boundaries so the
    /// adaptive rule cannot step over them.
    fn tail_splits(&self, s: f64) -> Vec<f64> {
        let mut splits: Vec<f64> = self.scenario.breakpoints().to_vec();
        if s > 0.0 {
            let params = self.scenario.params();
            let m = params.fading_m as f64;
            let inv_alpha = 1.0 / params.path_loss_alpha;
            for gain in [self.scenario.pattern().floor_linear(), 1.0] {
                let knee = (s * params.tx_power_w * gain / m).powf(inv_alpha);
                if knee.is_finite() && knee > 0.0 {
                    splits.push(knee);
                }
            }
        }
        splits
    }

    /// `eta(s) = 2 pi lambda Int_r^inf (1 - (m / (m + s c(t)))^m) t dt`.
    ///
    /// Nonnegative and nondecreasing in `s >= 0`, with `eta(0) = 0` exactly.
    pub fn eta(&self, s: f64) -> Result<f64, Error> {
        debug_assert!(s >= 0.0);
        if s == 0.0 {
            return Ok(0.0);
        }
        let m = self.scenario.params().fading_m as f64;
        let q = quad::integrate_tail(
            |t| {
                let x = s * self.interference_power(t) / m;
                // 1 - (1 + x)^-m, written to survive tiny x.
                let one_minus_pow = -(-m * x.ln_1p()).exp_m1();
                one_minus_pow * t
            },
            self.serving_distance_m,
            self.tail_power(),
            &self.tail_splits(s),
            &self.quad_cfg,
        )?;
        Ok(2.0 * PI * self.scenario.params().lambda_per_m2 * q.value)
    }

    /// j-th derivative of `eta` at `s`, for `j >= 1`:
    ///
    /// ```text
    /// eta^(j)(s) = (-1)^(j+1) (m)_j 2 pi lambda
    ///              Int_r^inf (m/(m+sc))^m (c/(m+sc))^j t dt
    /// ```
    ///
    /// with `(m)_j` the rising factorial. Signs alternate starting positive:
    /// the integrand itself is positive.
    pub fn eta_derivative(&self, s: f64, j: u32) -> Result<f64, Error> {
        debug_assert!(j >= 1);
        debug_assert!(s >= 0.0);
        let m = self.scenario.params().fading_m as f64;
        let q = quad::integrate_tail(
            |t| {
                let c = self.interference_power(t);
                let denom = m + s * c;
                let pow_m = (-m * (s * c / m).ln_1p()).exp();
                pow_m * (c / denom).powi(j as i32) * t
            },
            self.serving_distance_m,
            self.tail_power(),
            &self.tail_splits(s),
            &self.quad_cfg,
        )?;
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        Ok(sign
            * rising_factorial(m, j)
            * 2.0
            * PI
            * self.scenario.params().lambda_per_m2
            * q.value)
    }

    /// The Laplace transform itself, `exp(-eta(s))`, in (0, 1].
    pub fn transform(&self, s: f64) -> Result<f64, Error> {
        Ok((-self.eta(s)?).exp())
    }

    /// k-th derivative of the transform via the Leibniz recurrence
    /// `L^(k) = -sum_j C(k-1, j) eta^(k-j) L^(j)`, `L^(0) = exp(-eta)`.
    ///
    /// Satisfies `(-1)^k L^(k) >= 0` (complete monotonicity).
    pub fn transform_derivative(&self, s: f64, k: u32) -> Result<f64, Error> {
        let mut derivs = vec![self.transform(s)?];
        if k == 0 {
            return Ok(derivs[0]);
        }
        let eta_derivs: Vec<f64> = (1..=k)
            .map(|j| self.eta_derivative(s, j))
            .collect::<Result<_, _>>()?;
        for kk in 1..=k as usize {
            let mut acc = 0.0;
            for (j, l_j) in derivs.iter().enumerate() {
                acc += binomial(kk - 1, j) * eta_derivs[kk - j - 1] * l_j;
            }
            derivs.push(-acc);
        }
        Ok(derivs[k as usize])
    }
}

fn rising_factorial(m: f64, j: u32) -> f64 {
    (0..j).map(|i| m + i as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut num = 1.0;
    for i in 0..k {
        num = num * (n - i) as f64 / (i + 1) as f64;
    }
    num
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Evaluation point of the transform derivative inside the coverage series:
/// `s*(r) = m beta r^alpha / (P_T G(r))`.
fn series_eval_point(scenario: &Scenario, r: f64, gain: f64) -> f64 {
    let p = scenario.params();
    p.fading_m as f64 * p.sir_threshold * r.powf(p.path_loss_alpha) / (p.tx_power_w * gain)
}

/// Closed-form coverage probability of the scenario's user.
///
/// The outer integral over the serving distance runs from the minimum
/// feasible distance out to where the nearest-distance law retains less
/// than 1e-12 of its mass, split at every antenna breakpoint and at a few
/// quantiles of the law so the adaptive rule starts on the support.
pub fn coverage_probability(scenario: &Scenario) -> Result<CoverageResult, Error> {
    let params = scenario.params();
    params.validate()?;
    let law = NearestDistanceLaw::for_scenario(scenario);
    let r_min = scenario.geometry().r_min_m;
    let r_max = law.truncation_radius(1e-12);

    let mut splits: Vec<f64> = scenario.breakpoints().to_vec();
    for p in [0.05, 0.25, 0.5, 0.75, 0.95] {
        splits.push(law.quantile(p));
    }

    let cfg = QuadConfig::default();
    let m = params.fading_m;
    let mut series_terms = Vec::with_capacity(m as usize);
    let mut abs_error = 0.0;

    for k in 0..m {
        let inner_failure: Cell<Option<Error>> = Cell::new(None);
        let integrand = |r: f64| {
            let h_d = scenario.geometry().h_d_m;
            let theta = -(h_d / r).asin().to_degrees();
            let gain = scenario.pattern().gain_linear(theta);
            let s_star = series_eval_point(scenario, r, gain);
            let exponent = LaplaceExponent {
                scenario,
                serving_distance_m: r,
                quad_cfg: cfg,
            };
            match exponent.transform_derivative(s_star, k) {
                // The k-th term of the conditional-coverage series is
                // (s*)^k / k! * E[I^k exp(-s* I)] with
                // E[I^k exp(-s* I)] = (-1)^k L^(k)(s*), so the whole
                // integrand collapses to (-s*)^k / k! * L^(k) * f(r).
                Ok(l_k) => (-s_star).powi(k as i32) / factorial(k) * l_k * law.pdf(r),
                Err(e) => {
                    inner_failure.set(Some(e));
                    0.0
                }
            }
        };
        let q = quad::integrate_split(integrand, r_min, r_max, &splits, &cfg)?;
        if let Some(e) = inner_failure.take() {
            return Err(e);
        }
        series_terms.push(q.value);
        abs_error += q.abs_error;
    }

    let raw: f64 = series_terms.iter().sum();
    let clamp_warning = raw < -abs_error || raw > 1.0 + abs_error;
    Ok(CoverageResult {
        value: raw.clamp(0.0, 1.0),
        abs_error_estimate: abs_error,
        method: Method::Analytic,
        series_terms,
        clamp_warning,
    })
}
