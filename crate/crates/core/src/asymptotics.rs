//! Large-n scaling laws for the averaged coincidence probability and the
//! grouped-channel bound.
//!
//! With k = m/n, the four regimes (all logs natural):
//!
//!   entire matrix (k = 1):  eps = ln(t/4),
//!                           ln P ~ n eps + (1/2) ln(4 pi n)
//!   Gaussian limit (k >> 1): eps = ln(t/(k + 1/2)) - 1,
//!                           ln P ~ n eps + (1/2) ln(2 pi n)
//!   general sub-matrix:     eps = ln t + k ln k - (1+k) ln(1+k),
//!                           ln P ~ n eps + (1/2) ln(2 pi n (1 + 1/k))
//!   grouped bound:          lam = ln t + 2k ln k - (k-1) ln(k-1)
//!                                 - (k+1) ln(k+1),
//!                           ln R ~ n lam + (1/2) ln((k+1)/(k-1))
//!
//! At k = 1 the (k-1) ln(k-1) term is taken at its limit 0; the grouped
//! subleading correction diverges there and is an out-of-domain error.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Which asymptotic regime to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingRegime {
    /// n = m: the permanent of the whole transmission matrix.
    EntireMatrix,
    /// k >> 1: sub-unitary blocks behave like complex Gaussian matrices.
    GaussianLimit,
    /// Any k >= 1.
    GeneralSubmatrix,
    /// Grouped-channel bound R rather than the single coincidence P.
    GroupedBound,
}

impl ScalingRegime {
    pub const ALL: [ScalingRegime; 4] = [
        ScalingRegime::EntireMatrix,
        ScalingRegime::GaussianLimit,
        ScalingRegime::GeneralSubmatrix,
        ScalingRegime::GroupedBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScalingRegime::EntireMatrix => "entire",
            ScalingRegime::GaussianLimit => "gaussian",
            ScalingRegime::GeneralSubmatrix => "general",
            ScalingRegime::GroupedBound => "grouped",
        }
    }
}

fn check_k_t(k: f64, t: f64) -> Result<()> {
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "channel occupation ratio k must be >= 1, got {k}"
        )));
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "transmission must be in (0, 1], got {t}"
        )));
    }
    Ok(())
}

/// x ln x with the limit value 0 at x = 0.
fn x_ln_x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Per-photon scaling exponent for the regime. k may be any real >= 1
/// (it need not come from an integer (n, m) pair).
pub fn scaling_exponent(regime: ScalingRegime, k: f64, t: f64) -> Result<f64> {
    check_k_t(k, t)?;
    Ok(match regime {
        // Entire matrix is general at k = 1; routing through the same
        // expression keeps the reduction identity exact.
        ScalingRegime::EntireMatrix => scaling_exponent(ScalingRegime::GeneralSubmatrix, 1.0, t)?,
        ScalingRegime::GaussianLimit => (t / (k + 0.5)).ln() - 1.0,
        ScalingRegime::GeneralSubmatrix => t.ln() + x_ln_x(k) - x_ln_x(1.0 + k),
        ScalingRegime::GroupedBound => {
            t.ln() + 2.0 * x_ln_x(k) - x_ln_x(k - 1.0) - x_ln_x(k + 1.0)
        }
    })
}

/// Asymptotic approximation to ln P(n|m) (or ln R(n|m) for the grouped
/// bound), including the subleading half-log correction.
pub fn asymptotic_log_probability(
    regime: ScalingRegime,
    n: u64,
    m: u64,
    t: f64,
) -> Result<f64> {
    if n == 0 || m < n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= n <= m, got n={n}, m={m}"
        )));
    }
    let nf = n as f64;
    let k = m as f64 / nf;
    match regime {
        ScalingRegime::EntireMatrix => {
            // Same expression as general at k = 1, so the two agree exactly.
            asymptotic_log_probability(ScalingRegime::GeneralSubmatrix, n, n, t)
        }
        ScalingRegime::GaussianLimit => {
            let eps = scaling_exponent(regime, k, t)?;
            Ok(nf * eps + 0.5 * (2.0 * PI * nf).ln())
        }
        ScalingRegime::GeneralSubmatrix => {
            let eps = scaling_exponent(regime, k, t)?;
            Ok(nf * eps + 0.5 * (2.0 * PI * nf * (1.0 + 1.0 / k)).ln())
        }
        ScalingRegime::GroupedBound => {
            if m == n {
                return Err(Error::Domain(
                    "grouped-bound correction diverges at k = 1 (m = n)".into(),
                ));
            }
            let lam = scaling_exponent(regime, k, t)?;
            Ok(nf * lam + 0.5 * ((k + 1.0) / (k - 1.0)).ln())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{coincidence_probability, log_binomial};

    #[test]
    fn entire_matrix_exponent_is_ln_quarter() {
        let eps = scaling_exponent(ScalingRegime::EntireMatrix, 1.0, 1.0).unwrap();
        assert!((eps - 0.25f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn general_at_k_one_equals_entire_exactly() {
        for t in [0.3, 0.9, 1.0] {
            let a = scaling_exponent(ScalingRegime::EntireMatrix, 1.0, t).unwrap();
            let b = scaling_exponent(ScalingRegime::GeneralSubmatrix, 1.0, t).unwrap();
            assert_eq!(a, b);
            for n in [5u64, 50, 500] {
                let la = asymptotic_log_probability(ScalingRegime::EntireMatrix, n, n, t).unwrap();
                let lb =
                    asymptotic_log_probability(ScalingRegime::GeneralSubmatrix, n, n, t).unwrap();
                assert_eq!(la, lb);
            }
        }
    }

    #[test]
    fn grouped_exponent_at_k_two() {
        // lam = 4 ln 2 - 3 ln 3 at k = 2, t = 1.
        let lam = scaling_exponent(ScalingRegime::GroupedBound, 2.0, 1.0).unwrap();
        let expect = 4.0 * 2.0f64.ln() - 3.0 * 3.0f64.ln();
        assert!((lam - expect).abs() < 1e-14);
        assert!((lam + 0.5232).abs() < 1e-4);
    }

    #[test]
    fn exponent_guards() {
        assert!(scaling_exponent(ScalingRegime::GeneralSubmatrix, 0.5, 1.0).is_err());
        assert!(scaling_exponent(ScalingRegime::GeneralSubmatrix, 2.0, 0.0).is_err());
    }

    #[test]
    fn grouped_subleading_diverges_at_k_one() {
        assert!(matches!(
            asymptotic_log_probability(ScalingRegime::GroupedBound, 10, 10, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn entire_matrix_matches_exact_at_n_50() {
        let asym = asymptotic_log_probability(ScalingRegime::EntireMatrix, 50, 50, 1.0).unwrap();
        let expect = 50.0 * 0.25f64.ln() + 0.5 * (200.0 * PI).ln();
        assert!((asym - expect).abs() < 1e-12);
        let exact = coincidence_probability(50, 50, 1.0).unwrap().ln();
        assert!((asym - exact).abs() / exact.abs() < 0.01);
    }

    #[test]
    fn general_matches_exact_at_n_100_k_2() {
        let asym =
            asymptotic_log_probability(ScalingRegime::GeneralSubmatrix, 100, 200, 1.0).unwrap();
        let exact = coincidence_probability(100, 200, 1.0).unwrap().ln();
        assert!((asym - exact).abs() / exact.abs() < 0.005, "{asym} vs {exact}");
    }

    #[test]
    fn convergence_error_shrinks_with_n() {
        for k in [1u64, 2, 4, 6] {
            let mut prev = f64::INFINITY;
            for n in (10..=200u64).step_by(10) {
                let m = k * n;
                let asym =
                    asymptotic_log_probability(ScalingRegime::GeneralSubmatrix, n, m, 1.0).unwrap();
                let exact = coincidence_probability(n, m, 1.0).unwrap().ln();
                let err = (asym - exact).abs();
                assert!(err <= prev + 1e-12, "k={k}, n={n}");
                if n == 20 {
                    assert!(err < 0.02 * exact.abs(), "k={k}");
                }
                prev = err;
            }
        }
    }

    #[test]
    fn grouped_gain_matches_binomial_growth_rate() {
        // lam - eps = k ln k - (k-1) ln(k-1) = lim ln C(kn, n) / n.
        for k in [2u64, 4, 6] {
            let kf = k as f64;
            let gain = scaling_exponent(ScalingRegime::GroupedBound, kf, 1.0).unwrap()
                - scaling_exponent(ScalingRegime::GeneralSubmatrix, kf, 1.0).unwrap();
            let closed = x_ln_x(kf) - x_ln_x(kf - 1.0);
            assert!((gain - closed).abs() < 1e-12);
            let n = 1000u64;
            let numeric = log_binomial(k * n, n).unwrap() / n as f64;
            assert!((gain - numeric).abs() / numeric < 0.01, "k={k}");
        }
    }

    #[test]
    fn general_approaches_gaussian_at_large_k() {
        let k = 1e3;
        let d = scaling_exponent(ScalingRegime::GeneralSubmatrix, k, 1.0).unwrap()
            - scaling_exponent(ScalingRegime::GaussianLimit, k, 1.0).unwrap();
        assert!(d.abs() < 1e-3, "delta = {d}");
    }

    #[test]
    fn grouped_exponent_large_k_limit() {
        // lam -> ln t - 1/k.
        for t in [0.5, 1.0] {
            let k = 10.0;
            let lam = scaling_exponent(ScalingRegime::GroupedBound, k, t).unwrap();
            assert!((lam - (t.ln() - 1.0 / k)).abs() < 1e-2);
        }
    }
}
