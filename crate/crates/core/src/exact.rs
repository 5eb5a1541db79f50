//! Closed-form ensemble averages.
//!
//! Everything probability-like lives in the natural-log domain: the grouped
//! figures reach below 1e-130, far outside double range. `LogNonNegative`
//! carries ln(v) with -inf as the exact-zero sentinel.
//!
//! The three closed forms implemented here, for an n-photon input, m modes,
//! and intensity transmission t:
//!
//!   P(n|m) = t^n (m-1)! n! / (m-1+n)!        coincidence probability
//!   R(n|m) = C(m, n) * P(n|m)                grouped-channel bound
//!   <p(x) p(y)*> = m!(m-1)! sum_j t^j (x y*)^(m-j) / ((m-j)!(m-1+j)!)
//!
//! plus the averaged characteristic function and the photon-number
//! generating function with pluggable input moments.

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// A non-negative real stored as its natural logarithm, with a distinguished
/// exact zero (ln = -inf).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNonNegative {
    ln: f64,
}

impl LogNonNegative {
    pub fn zero() -> Self {
        Self {
            ln: f64::NEG_INFINITY,
        }
    }

    pub fn from_ln(ln: f64) -> Result<Self> {
        if ln.is_nan() || ln == f64::INFINITY {
            return Err(Error::InvalidArgument(format!("bad log value {ln}")));
        }
        Ok(Self { ln })
    }

    pub fn from_value(v: f64) -> Result<Self> {
        if v.is_nan() || v < 0.0 || v == f64::INFINITY {
            return Err(Error::InvalidArgument(format!(
                "expected a finite non-negative value, got {v}"
            )));
        }
        Ok(Self { ln: v.ln() })
    }

    pub fn is_zero(self) -> bool {
        self.ln == f64::NEG_INFINITY
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    pub fn log10(self) -> f64 {
        self.ln / std::f64::consts::LN_10
    }

    /// The plain-domain value; underflows to 0 below about 1e-308.
    pub fn value(self) -> f64 {
        self.ln.exp()
    }
}

/// ln(n!), exact integer product for n <= 20, log-gamma above.
pub fn ln_factorial(n: u64) -> f64 {
    if n <= 20 {
        ((1..=n).product::<u64>() as f64).ln()
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// ln C(a, b). For a <= 60 the binomial is built exactly in integer
/// arithmetic (C(60, 30) fits comfortably in u128); above that, log-gamma.
pub fn log_binomial(a: u64, b: u64) -> Result<f64> {
    if b > a {
        return Err(Error::InvalidArgument(format!(
            "binomial C({a}, {b}) requires b <= a"
        )));
    }
    let b = b.min(a - b);
    if a <= 60 {
        let mut c: u128 = 1;
        for i in 1..=b {
            c = c * (a - b + i) as u128 / i as u128;
        }
        Ok((c as f64).ln())
    } else {
        Ok(ln_gamma(a as f64 + 1.0) - ln_gamma(b as f64 + 1.0) - ln_gamma((a - b) as f64 + 1.0))
    }
}

/// Normally-ordered input photon-number moments, entry j holding <:N^j:>.
/// `exact_cutoff` marks that every moment beyond the stored list is zero,
/// which turns the series below into exact finite sums.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    moments: Vec<f64>,
    exact_cutoff: bool,
}

impl MomentSequence {
    pub fn new(moments: Vec<f64>, exact_cutoff: bool) -> Result<Self> {
        if moments.is_empty() || (moments[0] - 1.0).abs() > 1e-14 {
            return Err(Error::InvalidArgument(
                "moments[0] must be 1 (state normalization)".into(),
            ));
        }
        if moments.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument(
                "moments must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            moments,
            exact_cutoff,
        })
    }

    /// <:N^j:>, or None if j lies beyond the stored list and no cutoff
    /// applies.
    pub fn moment(&self, j: usize) -> Option<f64> {
        match self.moments.get(j) {
            Some(&v) => Some(v),
            None if self.exact_cutoff => Some(0.0),
            None => None,
        }
    }

    pub fn len(&self) -> usize {
        self.moments.len()
    }

    pub fn is_empty(&self) -> bool {
        false // moments[0] always present
    }

    pub fn has_exact_cutoff(&self) -> bool {
        self.exact_cutoff
    }
}

/// Moments of an n-photon Fock input: <:N^j:> = n!/(n-j)! for j <= n, zero
/// beyond. The cutoff at j = n makes every series exact.
pub fn fock_moments(n: u64) -> Result<MomentSequence> {
    if n > 170 {
        // n!/(n-j)! at j = n is n!, past double range beyond 170.
        return Err(Error::SizeLimit {
            what: "Fock photon number",
            got: n as usize,
            limit: 170,
        });
    }
    let mut moments = Vec::with_capacity(n as usize + 1);
    let mut falling = 1.0f64;
    moments.push(1.0);
    for j in 1..=n {
        falling *= (n - j + 1) as f64;
        moments.push(falling);
    }
    MomentSequence::new(moments, true)
}

/// Coherent-state moments <:N^j:> = mean^j up to `j_max`.
/// Extension preset: only the Fock case carries a closed-form coincidence
/// probability here.
pub fn coherent_moments(mean: f64, j_max: usize) -> Result<MomentSequence> {
    if !(mean >= 0.0 && mean.is_finite()) {
        return Err(Error::InvalidArgument("mean must be non-negative".into()));
    }
    MomentSequence::new((0..=j_max).map(|j| mean.powi(j as i32)).collect(), false)
}

/// Thermal-state moments <:N^j:> = j! * mean^j up to `j_max`. Extension
/// preset, same caveat as `coherent_moments`.
pub fn thermal_moments(mean: f64, j_max: usize) -> Result<MomentSequence> {
    if !(mean >= 0.0 && mean.is_finite()) {
        return Err(Error::InvalidArgument("mean must be non-negative".into()));
    }
    MomentSequence::new(
        (0..=j_max)
            .map(|j| ln_factorial(j as u64).exp() * mean.powi(j as i32))
            .collect(),
        false,
    )
}

fn check_n_m_t(n: u64, m: u64, t: f64) -> Result<()> {
    if n == 0 || n > m {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= n <= m, got n={n}, m={m}"
        )));
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "transmission must be in (0, 1], got {t}"
        )));
    }
    Ok(())
}

/// Unitary-averaged coincidence probability
/// P(n|m) = t^n * (m-1)! n! / (m-1+n)! = t^n / C(m+n-1, n).
pub fn coincidence_probability(n: u64, m: u64, t: f64) -> Result<LogNonNegative> {
    check_n_m_t(n, m, t)?;
    let ln = n as f64 * t.ln() - log_binomial(m + n - 1, n)?;
    LogNonNegative::from_ln(ln)
}

/// Grouped-channel bound R(n|m) = C(m, n) * P(n|m): the total count rate
/// summed over all C(m, n) output channel subsets.
pub fn grouped_bound(n: u64, m: u64, t: f64) -> Result<LogNonNegative> {
    check_n_m_t(n, m, t)?;
    let ln = log_binomial(m, n)? + coincidence_probability(n, m, t)?.ln();
    LogNonNegative::from_ln(ln)
}

/// Unitary average of permanental-polynomial products,
/// <p(x) p(y)*> = m!(m-1)! sum_{j=0}^m t^j (x y*)^(m-j) / ((m-j)!(m-1+j)!).
///
/// Terms are accumulated after scaling by the largest log-magnitude;
/// m!(m-1)! alone overflows doubles near m = 85.
pub fn averaged_permanental_product(
    x: Complex64,
    y: Complex64,
    m: u64,
    t: f64,
) -> Result<Complex64> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "transmission must be in (0, 1], got {t}"
        )));
    }
    let w = x * y.conj();
    let ln_prefactor = ln_factorial(m) + ln_factorial(m - 1);
    let mut terms: Vec<(f64, f64)> = Vec::with_capacity(m as usize + 1); // (ln magnitude, phase angle)
    for j in 0..=m {
        let power = (m - j) as f64;
        if w.norm() == 0.0 && j != m {
            continue; // (xy*)^(m-j) = 0
        }
        let ln_w_part = if j == m { 0.0 } else { power * w.norm().ln() };
        let ln_mag = ln_prefactor + j as f64 * t.ln() + ln_w_part
            - ln_factorial(m - j)
            - ln_factorial(m - 1 + j);
        terms.push((ln_mag, power * w.arg()));
    }
    let ln_max = terms
        .iter()
        .map(|(l, _)| *l)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut acc = Complex64::new(0.0, 0.0);
    for (ln_mag, angle) in terms {
        acc += Complex64::from_polar((ln_mag - ln_max).exp(), angle);
    }
    Ok(acc * ln_max.exp())
}

/// Value of a truncated series. `truncation_bound` is the magnitude of the
/// last evaluated term, `None` when the sum was exact (moment cutoff).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub truncation_bound: Option<f64>,
}

/// Sum sign_j * exp(ln_mag_j) over supplied terms, scaled by the largest
/// magnitude. Returns an error when the tail is still growing at the cutoff.
fn sum_scaled_terms(terms: &[(f64, f64)], exact: bool) -> Result<SeriesValue> {
    let ln_max = terms
        .iter()
        .map(|(l, _)| *l)
        .fold(f64::NEG_INFINITY, f64::max);
    if ln_max == f64::NEG_INFINITY {
        return Ok(SeriesValue {
            value: 0.0,
            truncation_bound: if exact { None } else { Some(0.0) },
        });
    }
    let scaled: f64 = terms
        .iter()
        .map(|(ln_mag, sign)| sign * (ln_mag - ln_max).exp())
        .sum();
    let value = scaled * ln_max.exp();
    let last = terms.last().unwrap().0;
    if exact {
        return Ok(SeriesValue {
            value,
            truncation_bound: None,
        });
    }
    if terms.len() >= 2 {
        let prev = terms[terms.len() - 2].0;
        if last > prev && last > ln_max - 30.0 {
            return Err(Error::SeriesDivergence {
                terms: terms.len(),
                last_term: last.exp(),
            });
        }
    }
    Ok(SeriesValue {
        value,
        truncation_bound: Some((last - ln_max).exp() * ln_max.exp()),
    })
}

/// Averaged normally-ordered characteristic function,
/// chi = (m-1)! sum_j (-t |xi|^2)^j <:N^j:> / (j! (m-1+j)!).
///
/// Exact when `moments` carries a cutoff; otherwise truncated at `j_max`
/// with the last term magnitude reported as the truncation bound.
pub fn averaged_characteristic(
    xi_norm_sq: f64,
    m: u64,
    t: f64,
    moments: &MomentSequence,
    j_max: usize,
) -> Result<SeriesValue> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    if !(xi_norm_sq >= 0.0 && xi_norm_sq.is_finite()) {
        return Err(Error::InvalidArgument(
            "|xi|^2 must be finite and non-negative".into(),
        ));
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "transmission must be in (0, 1], got {t}"
        )));
    }
    let exact = moments.has_exact_cutoff();
    let upper = if exact {
        moments.len() - 1
    } else {
        if j_max >= moments.len() {
            return Err(Error::InvalidArgument(format!(
                "jMax = {j_max} but only {} moments supplied without cutoff",
                moments.len()
            )));
        }
        j_max
    };
    let ln_arg = (t * xi_norm_sq).ln(); // -inf at xi = 0: only j = 0 survives
    let mut terms = Vec::with_capacity(upper + 1);
    for j in 0..=upper {
        let mu = moments.moment(j).expect("within bounds by construction");
        if mu == 0.0 {
            continue;
        }
        if j > 0 && ln_arg == f64::NEG_INFINITY {
            continue;
        }
        let ln_mag = ln_factorial(m - 1) + j as f64 * if j == 0 { 0.0 } else { ln_arg } + mu.ln()
            - ln_factorial(j as u64)
            - ln_factorial(m - 1 + j as u64);
        let sign = if j % 2 == 1 { -1.0 } else { 1.0 };
        terms.push((ln_mag, sign));
    }
    sum_scaled_terms(&terms, exact)
}

/// Complete homogeneous symmetric polynomials h_0..h_max of the given
/// variables, by the Newton-type recurrence j h_j = sum_i p_i h_{j-i}
/// with power sums p_i.
fn complete_homogeneous(vars: &[f64], max: usize) -> Vec<f64> {
    let mut power_sums = vec![0.0; max + 1];
    for (i, p) in power_sums.iter_mut().enumerate().skip(1) {
        *p = vars.iter().map(|v| v.powi(i as i32)).sum();
    }
    let mut h = vec![0.0; max + 1];
    h[0] = 1.0;
    for j in 1..=max {
        let mut s = 0.0;
        for i in 1..=j {
            s += power_sums[i] * h[j - i];
        }
        h[j] = s / j as f64;
    }
    h
}

/// Photon-number generating function
/// G(gamma) = (m-1)! sum_j (-t)^j <:N^j:> / (m-1+j)! * h_j(gamma),
/// with h_j the complete homogeneous symmetric polynomial in the m
/// variables gamma.
pub fn generating_function(
    gamma: &[f64],
    t: f64,
    moments: &MomentSequence,
    j_max: usize,
) -> Result<SeriesValue> {
    if gamma.is_empty() {
        return Err(Error::InvalidArgument("need at least one mode".into()));
    }
    if gamma.iter().any(|g| !g.is_finite()) {
        return Err(Error::InvalidArgument("gamma entries must be finite".into()));
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "transmission must be in (0, 1], got {t}"
        )));
    }
    let m = gamma.len() as u64;
    let exact = moments.has_exact_cutoff();
    let upper = if exact {
        moments.len() - 1
    } else {
        if j_max >= moments.len() {
            return Err(Error::InvalidArgument(format!(
                "jMax = {j_max} but only {} moments supplied without cutoff",
                moments.len()
            )));
        }
        j_max
    };
    let h = complete_homogeneous(gamma, upper);
    let mut terms = Vec::with_capacity(upper + 1);
    for (j, &hj) in h.iter().enumerate() {
        let mu = moments.moment(j).expect("within bounds by construction");
        if mu == 0.0 || hj == 0.0 {
            continue;
        }
        let ln_mag = ln_factorial(m - 1) + (j as f64) * t.ln() + mu.ln() + hj.abs().ln()
            - ln_factorial(m - 1 + j as u64);
        let parity = if j % 2 == 1 { -1.0 } else { 1.0 };
        terms.push((ln_mag, parity * hj.signum()));
    }
    sum_scaled_terms(&terms, exact)
}
