//! Shared report plumbing: floats are rounded to 12 significant digits
//! before serialization so that identical reruns produce byte-identical
//! output regardless of how the last bits of a residual wiggle across
//! platforms.

use serde::Serializer;

/// Rounds to 12 significant digits.
pub fn round_sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}")
        .parse()
        .expect("formatted float reparses")
}

/// Fixed-significance display for CSV cells.
pub fn fmt_sig12(x: f64) -> String {
    format!("{}", round_sig12(x))
}

/// `serialize_with` hook applying [`round_sig12`].
pub fn ser_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig12(*x))
}
