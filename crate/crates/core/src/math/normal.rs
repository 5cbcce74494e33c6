use libm::erfc;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reference_points() {
        assert_eq!(norm_cdf(0.0), 0.5);
        assert_abs_diff_eq!(norm_cdf(0.5), 0.691_462_461_274_013_1, epsilon = 1e-15);
        assert_abs_diff_eq!(norm_cdf(-1.96), 0.024_997_895_148_220_43, epsilon = 1e-15);
        assert_abs_diff_eq!(norm_cdf(1.0) + norm_cdf(-1.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn far_tail_is_relative_accurate() {
        // Phi(-10) = 7.619853024160527e-24
        let v = norm_cdf(-10.0);
        assert!(((v - 7.619_853_024_160_527e-24) / v).abs() < 1e-12);
    }
}
