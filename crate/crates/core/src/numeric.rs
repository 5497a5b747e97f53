//! Numerically stable scalar helpers for logit-scale arithmetic.
//!
//! Naive `1/(1+exp(-z))` overflows for `z < -745` and loses precision long
//! before that; every probability in this crate goes through the branch-free
//! forms below so predictors of any magnitude stay finite.

/// Logistic function `1 / (1 + exp(-z))`, stable for large `|z|`.
pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(z))` without overflow.
pub fn log1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// `log(logistic(z))`, i.e. a log-probability directly from a logit.
pub fn log_logistic(z: f64) -> f64 {
    -log1p_exp(-z)
}

/// Inverse of [`logistic`]: `log(p / (1 - p))`.
pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logistic_is_stable_at_extremes() {
        assert_eq!(logistic(800.0), 1.0);
        assert_eq!(logistic(-800.0), 0.0);
        assert!((logistic(0.0) - 0.5).abs() < 1e-16);
    }

    #[test]
    fn log1p_exp_matches_naive_in_safe_range() {
        for z in [-30.0f64, -2.5, 0.0, 1.0, 20.0] {
            let naive = (1.0 + z.exp()).ln();
            assert!((log1p_exp(z) - naive).abs() < 1e-12, "z={z}");
        }
        // linear regime: log(1+e^z) ~ z for large z
        assert!((log1p_exp(1000.0) - 1000.0).abs() < 1e-12);
    }

    #[test]
    fn logit_roundtrip() {
        for z in [-7.0, -0.3, 0.0, 2.0, 11.0] {
            assert!((logit(logistic(z)) - z).abs() < 1e-9, "z={z}");
        }
    }
}
