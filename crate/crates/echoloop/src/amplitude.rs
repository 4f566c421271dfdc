//! Complex-amplitude conventions shared across the crate.
//!
//! Amplitudes are `num_complex::Complex64` throughout; only their moduli
//! enter probabilities, while phases matter to the advanced-wave ledger.
//! On the wire they always appear as `{ "re": .., "im": .. }` objects.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Absolute tolerance for amplitude, weight, and normalization checks.
pub const TOLERANCE: f64 = 1e-12;

/// Squared modulus, the statistical weight an amplitude carries.
pub fn weight(value: Complex64) -> f64 {
    value.norm_sqr()
}

/// Serde adapter rendering a complex amplitude as `{ "re": .., "im": .. }`.
///
/// Use with `#[serde(with = "crate::amplitude::rect")]`.
pub mod rect {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Rect {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(value: &Complex64, serializer: S) -> Result<S::Ok, S::Error> {
        Rect { re: value.re, im: value.im }.serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Complex64, D::Error> {
        let r = Rect::deserialize(deserializer)?;
        Ok(Complex64::new(r.re, r.im))
    }
}
