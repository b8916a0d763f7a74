//! Shared text formatting for the CSV/JSON interchange formats.

/// Formats a double with 17 significant digits, enough to round-trip exactly.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}
