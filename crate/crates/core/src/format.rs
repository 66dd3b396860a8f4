//! Locale-independent numeric formatting at a fixed number of significant digits.

/// Significant digits used by every numeric output of the crate.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats `x` with [`SIGNIFICANT_DIGITS`] significant digits.
///
/// Plain decimal notation for moderate magnitudes, scientific otherwise.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
    }
}

/// Rounds `x` to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_sig(0.154483), "0.154483000000");
        assert_eq!(fmt_sig(4.0), "4.00000000000");
        assert_eq!(fmt_sig(0.015625), "0.0156250000000");
        assert_eq!(fmt_sig(-2.5), "-2.50000000000");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.5e-9), "1.50000000000e-9");
    }

    #[test]
    fn rounding_is_idempotent() {
        let x = std::f64::consts::PI / 7.0;
        let r = round_sig(x);
        assert_eq!(round_sig(r), r);
        assert!((r - x).abs() < 1e-12);
        assert_eq!(fmt_sig(r), fmt_sig(x));
    }
}
