//! Text-table formatting shared by the CSV writers.
//!
//! All real values are written with 17 significant digits (enough to
//! round-trip an `f64` exactly); NaN is spelled `NA`.

/// Formats a real value for a CSV cell.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        "NA".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Parses a CSV cell written by [`fmt_real`]; `NA` maps back to NaN.
pub fn parse_real(cell: &str) -> Option<f64> {
    let cell = cell.trim();
    if cell == "NA" {
        return Some(f64::NAN);
    }
    cell.parse().ok()
}
