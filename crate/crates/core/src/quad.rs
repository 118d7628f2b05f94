//! Globally adaptive Gauss-Kronrod quadrature.
//!
//! A 21-point Kronrod rule with its embedded 10-point Gauss rule scores each
//! cell; the cell with the largest error estimate is bisected until the
//! summed estimate meets the tolerance. Semi-infinite integrals over
//! `[a, inf)` are mapped onto `[0, 1)` with `t = a / (1 - u)`, which turns
//! the power-law tails that appear in interference integrals into endpoint
//! behavior the bisection resolves.
//!
//! Integrands with derivative kinks (the antenna gain switching between
//! floor and quadratic form) should pass the kink locations as split points
//! so they become cell boundaries.

use std::collections::BinaryHeap;

use crate::error::Error;

/// Result of an adaptive integration: the value and the error estimate the
/// subdivision achieved.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
}

/// Tolerances and subdivision budget.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_cells: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-9,
            rel_tol: 1e-7,
            max_cells: 4096,
        }
    }
}

// 21-point Kronrod abscissae (positive half), 10-point Gauss weights, and
// 21-point Kronrod weights, as tabulated for QUADPACK's QK21.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// QUADPACK's error rescaling: sharpen the raw |Kronrod - Gauss| difference
/// using the integral of |f - mean| and guard against underflow.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One 21-point Kronrod pass over `[a, b]`; returns the value and the
/// rescaled error estimate.
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut res_gauss = 0.0;
    let mut res_kronrod = f_center * WGK[10];
    let mut res_abs = res_kronrod.abs();
    let mut fv1 = [0.0f64; 10];
    let mut fv2 = [0.0f64; 10];

    for j in 0..10 {
        let x = half * XGK[j];
        let v1 = f(center - x);
        let v2 = f(center + x);
        fv1[j] = v1;
        fv2[j] = v2;
        let sum = v1 + v2;
        res_kronrod += WGK[j] * sum;
        res_abs += WGK[j] * (v1.abs() + v2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * sum;
        }
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = ((res_kronrod - res_gauss) * half).abs();
    (
        res_kronrod * half,
        rescale_error(err, res_abs * half.abs(), res_asc * half.abs()),
    )
}

#[derive(Debug)]
struct Cell {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    segments: &[(f64, f64)],
    cfg: &QuadConfig,
) -> Result<Quadrature, Error> {
    let mut heap = BinaryHeap::new();
    let mut total_value = 0.0;
    let mut total_error = 0.0;
    // Error mass of cells too narrow to bisect further.
    let mut frozen_error = 0.0;
    let mut frozen_value = 0.0;
    let mut cells = 0usize;

    for &(a, b) in segments {
        if a == b {
            continue;
        }
        let (value, error) = gk21(f, a, b);
        total_value += value;
        total_error += error;
        cells += 1;
        heap.push(Cell { a, b, value, error });
    }

    let tolerance_met =
        |err: f64, val: f64| err <= cfg.abs_tol.max(cfg.rel_tol * val.abs());

    while !tolerance_met(total_error + frozen_error, total_value + frozen_value) {
        let worst = match heap.pop() {
            Some(c) => c,
            // Everything left is frozen; report what was achieved.
            None => {
                return Err(Error::QuadratureNonConvergence {
                    achieved: frozen_error,
                    requested_abs: cfg.abs_tol,
                    requested_rel: cfg.rel_tol,
                })
            }
        };
        let mid = 0.5 * (worst.a + worst.b);
        if cells >= cfg.max_cells {
            // worst's error is still part of total_error here.
            return Err(Error::QuadratureNonConvergence {
                achieved: total_error + frozen_error,
                requested_abs: cfg.abs_tol,
                requested_rel: cfg.rel_tol,
            });
        }
        total_value -= worst.value;
        total_error -= worst.error;
        if mid <= worst.a || mid >= worst.b {
            // Bisection has hit the floating-point grid.
            frozen_value += worst.value;
            frozen_error += worst.error;
            continue;
        }
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk21(f, a, b);
            total_value += value;
            total_error += error;
            heap.push(Cell { a, b, value, error });
        }
        cells += 1;
    }

    Ok(Quadrature {
        value: total_value + frozen_value,
        abs_error: total_error + frozen_error,
    })
}

/// Integrate `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<Quadrature, Error> {
    integrate_split(f, a, b, &[], cfg)
}

/// Integrate `f` over `[a, b]`, forcing cell boundaries at every interior
/// split point (points outside `(a, b)` are ignored).
pub fn integrate_split<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    splits: &[f64],
    cfg: &QuadConfig,
) -> Result<Quadrature, Error> {
    let segments = segments_between(a, b, splits);
    adaptive(&f, &segments, cfg)
}

/// Integrate `f` over `[a, inf)` with `a > 0`, forcing cell boundaries at
/// every split point beyond `a`.
///
/// Uses the substitution `t = a (1 - u)^-power`, mapping the tail onto
/// `[0, 1)`. For an integrand decaying like `t^-q` the mapped integrand
/// behaves like `(1 - u)^(power (q - 1) - 1)` at the far endpoint, so pick
/// `power > 1 / (q - 1)` to keep it bounded there (larger is smoother).
pub fn integrate_tail<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    power: i32,
    splits: &[f64],
    cfg: &QuadConfig,
) -> Result<Quadrature, Error> {
    assert!(a > 0.0, "tail integral needs a positive lower limit");
    assert!(power >= 1);
    let g = move |u: f64| {
        let w = 1.0 - u;
        if w <= 0.0 {
            return 0.0;
        }
        let t = a * w.powi(-power);
        if !t.is_finite() {
            return 0.0;
        }
        // dt/du = power * t / w
        f(t) * power as f64 * t / w
    };
    let u_splits: Vec<f64> = splits
        .iter()
        .filter(|&&t| t > a && t.is_finite())
        .map(|&t| 1.0 - (a / t).powf(1.0 / power as f64))
        .collect();
    let segments = segments_between(0.0, 1.0, &u_splits);
    adaptive(&g, &segments, cfg)
}

/// Tail-substitution exponent for an integrand decaying like `t^-decay`:
/// the smallest power keeping the mapped endpoint C¹, see
/// [`integrate_tail`].
pub fn power_for_decay(decay: f64) -> i32 {
    assert!(decay > 1.0, "tail integrand must decay faster than 1/t");
    (2.0 / (decay - 1.0)).ceil().max(1.0) as i32 + 1
}

fn segments_between(a: f64, b: f64, splits: &[f64]) -> Vec<(f64, f64)> {
    let mut pts: Vec<f64> = splits.iter().copied().filter(|&p| p > a && p < b).collect();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    let mut segments = Vec::with_capacity(pts.len() + 1);
    let mut lo = a;
    for p in pts {
        segments.push((lo, p));
        lo = p;
    }
    segments.push((lo, b));
    segments
}
