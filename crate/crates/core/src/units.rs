//! Conversions between the human-facing units (dBm, dB, degrees, km⁻²) and
//! the linear SI units used by every computation in this crate.
//!
//! Conversions are meant to happen exactly once, at the configuration
//! boundary; nothing inside the engines ever touches a dB value.

/// dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Watts to dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// dB to linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Linear power ratio to dB.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Station density per km² to per m² (dividing by the exact 1e6 keeps
/// round decimal densities bit-identical to their per-m² literals).
pub fn per_km2_to_per_m2(per_km2: f64) -> f64 {
    per_km2 / 1e6
}

/// Station density per m² to per km².
pub fn per_m2_to_per_km2(per_m2: f64) -> f64 {
    per_m2 * 1e6
}
