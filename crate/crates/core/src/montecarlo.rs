//! Brute-force unitary-ensemble averaging.
//!
//! Sample i always uses RNG sub-stream (base stream + i), so results are
//! identical for any worker count at a fixed seed; parallelism only changes
//! who computes which sample. Error bars come from the paper-style
//! sub-ensemble scheme: the S values are split into floor(sqrt(S))
//! contiguous blocks of equal size (remainder samples are dropped from the
//! error estimate but counted in metadata), and the standard error of the
//! mean is the block-mean standard deviation over sqrt(#blocks).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::haar::{sample_cue, RngSeed};
use crate::matrix::{
    eval_permanental_polynomial, permanent_ryser, permanental_polynomial_coeffs, submatrix,
    SubmatrixSpec,
};

const ENSEMBLE_RYSER_LIMIT: usize = 25;
const PRODUCT_MODE_LIMIT: usize = 8;

/// Parameters of one ensemble run. `workers = 0` leaves threading to the
/// global rayon pool.
#[derive(Debug, Clone)]
pub struct EnsembleConfig {
    pub n: usize,
    pub m: usize,
    pub t: f64,
    pub samples: usize,
    pub seed: RngSeed,
    pub workers: usize,
}

impl EnsembleConfig {
    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > self.m {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= n <= m, got n={}, m={}",
                self.n, self.m
            )));
        }
        if !(self.t > 0.0 && self.t <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "transmission must be in (0, 1], got {}",
                self.t
            )));
        }
        if self.samples < 4 {
            return Err(Error::InvalidArgument(format!(
                "need at least 4 samples, got {}",
                self.samples
            )));
        }
        Ok(())
    }
}

/// Mean, sub-ensemble standard error, and bookkeeping for a real-valued
/// ensemble average.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub sub_ensembles: usize,
    /// Remainder samples dropped from the error-bar computation.
    pub discarded: usize,
    pub ln_mean: f64,
}

/// Complex-mean variant with per-component error bars.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexEnsembleEstimate {
    pub mean: Complex64,
    pub std_error_re: f64,
    pub std_error_im: f64,
    pub samples: usize,
    pub sub_ensembles: usize,
    pub discarded: usize,
}

/// Pairwise (cascade) summation; alternating-magnitude inputs keep their
/// accuracy better than a running sum.
fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

fn batch_means(values: &[f64]) -> (f64, f64, usize, usize) {
    let s = values.len();
    let blocks = (s as f64).sqrt().floor() as usize;
    let block_size = s / blocks;
    let used = blocks * block_size;
    let discarded = s - used;
    let means: Vec<f64> = (0..blocks)
        .map(|b| pairwise_sum(&values[b * block_size..(b + 1) * block_size]) / block_size as f64)
        .collect();
    let grand = pairwise_sum(&means) / blocks as f64;
    let var = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (blocks - 1) as f64;
    let std_error = (var / blocks as f64).sqrt();
    (grand, std_error, blocks, discarded)
}

fn run_samples<T, F>(workers: usize, samples: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    let compute = || (0..samples).into_par_iter().map(&f).collect();
    if workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(compute)
    } else {
        compute()
    }
}

/// Monte-Carlo estimate of P(n|m) = <|perm(T_{n|m})|^2> using the leading
/// n x n block of T = sqrt(t) U.
pub fn estimate_coincidence(config: &EnsembleConfig) -> Result<EnsembleEstimate> {
    let spec = SubmatrixSpec::leading(config.n)?;
    estimate_coincidence_with_submatrix(config, &spec)
}

/// Same estimate over an arbitrary n x n sub-matrix. All sub-matrices share
/// the same ensemble average; this entry point exists to check exactly that.
pub fn estimate_coincidence_with_submatrix(
    config: &EnsembleConfig,
    spec: &SubmatrixSpec,
) -> Result<EnsembleEstimate> {
    config.validate()?;
    if config.n > ENSEMBLE_RYSER_LIMIT {
        return Err(Error::SizeLimit {
            what: "ensemble sub-matrix order",
            got: config.n,
            limit: ENSEMBLE_RYSER_LIMIT,
        });
    }
    if spec.order() != config.n {
        return Err(Error::InvalidArgument(format!(
            "sub-matrix order {} does not match n = {}",
            spec.order(),
            config.n
        )));
    }
    let sqrt_t = config.t.sqrt();
    let values = run_samples(config.workers, config.samples, |i| {
        let seed = config.seed.with_stream(config.seed.stream.wrapping_add(i as u64));
        let u = sample_cue(config.m, seed)?;
        let block = submatrix(&u, spec)?.scaled(sqrt_t);
        Ok(permanent_ryser(&block)?.norm_sqr())
    })?;
    let (mean, std_error, sub_ensembles, discarded) = batch_means(&values);
    Ok(EnsembleEstimate {
        mean,
        std_error,
        samples: config.samples,
        sub_ensembles,
        discarded,
        ln_mean: mean.ln(),
    })
}

/// Monte-Carlo mean of p(x) p(y)* with p the permanental polynomial of
/// T = sqrt(t) U. Validates the closed-form product average.
pub fn estimate_permanental_product(
    x: Complex64,
    y: Complex64,
    m: usize,
    t: f64,
    samples: usize,
    seed: RngSeed,
) -> Result<ComplexEnsembleEstimate> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    if m > PRODUCT_MODE_LIMIT {
        return Err(Error::SizeLimit {
            what: "permanental-product mode count",
            got: m,
            limit: PRODUCT_MODE_LIMIT,
        });
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "transmission must be in (0, 1], got {t}"
        )));
    }
    if samples < 4 {
        return Err(Error::InvalidArgument(format!(
            "need at least 4 samples, got {samples}"
        )));
    }
    let sqrt_t = t.sqrt();
    let values = run_samples(0, samples, |i| {
        let u = sample_cue(m, seed.with_stream(seed.stream.wrapping_add(i as u64)))?;
        let coeffs = permanental_polynomial_coeffs(&u.scaled(sqrt_t))?;
        let px = eval_permanental_polynomial(&coeffs, x);
        let py = eval_permanental_polynomial(&coeffs, y);
        Ok(px * py.conj())
    })?;
    let re: Vec<f64> = values.iter().map(|z| z.re).collect();
    let im: Vec<f64> = values.iter().map(|z| z.im).collect();
    let (mean_re, err_re, blocks, discarded) = batch_means(&re);
    let (mean_im, err_im, _, _) = batch_means(&im);
    Ok(ComplexEnsembleEstimate {
        mean: Complex64::new(mean_re, mean_im),
        std_error_re: err_re,
        std_error_im: err_im,
        samples,
        sub_ensembles: blocks,
        discarded,
    })
}

/// Relative deviation of an estimate from a log-domain exact value, plus the
/// matching relative error bar: (mean/exact - 1, sigma/exact).
pub fn relative_error(estimate: &EnsembleEstimate, exact_ln: f64) -> Result<(f64, f64)> {
    if estimate.mean.is_nan() || estimate.mean <= 0.0 {
        return Err(Error::Domain(format!(
            "relative error undefined for mean {}",
            estimate.mean
        )));
    }
    // Ratio through logs so that exact values far below double range still
    // divide cleanly.
    let ratio = (estimate.ln_mean - exact_ln).exp();
    let rel_sigma = estimate.std_error / estimate.mean * ratio;
    Ok((ratio - 1.0, rel_sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::coincidence_probability;

    fn config(n: usize, m: usize, t: f64, samples: usize, seed: u64) -> EnsembleConfig {
        EnsembleConfig {
            n,
            m,
            t,
            samples,
            seed: RngSeed::new(seed, 0),
            workers: 0,
        }
    }

    #[test]
    fn single_photon_mean_is_one_over_m() {
        let est = estimate_coincidence(&config(1, 4, 1.0, 20_000, 2)).unwrap();
        assert!(
            (est.mean - 0.25).abs() < 4.0 * est.std_error,
            "mean={}, sigma={}",
            est.mean,
            est.std_error
        );
    }

    #[test]
    fn small_scale_estimates_match_exact() {
        for (n, m, t) in [(2usize, 4usize, 1.0), (2, 4, 0.5), (3, 6, 1.0), (2, 2, 1.0)] {
            let est = estimate_coincidence(&config(n, m, t, 20_000, 5)).unwrap();
            let exact = coincidence_probability(n as u64, m as u64, t).unwrap().value();
            assert!(
                (est.mean - exact).abs() < 4.0 * est.std_error,
                "n={n}, m={m}, t={t}: mean={}, exact={exact}, sigma={}",
                est.mean,
                est.std_error
            );
        }
    }

    #[test]
    fn sub_ensemble_bookkeeping() {
        let est = estimate_coincidence(&config(1, 2, 1.0, 1000, 1)).unwrap();
        // floor(sqrt(1000)) = 31 blocks of 32, 8 discarded.
        assert_eq!(est.sub_ensembles, 31);
        assert_eq!(est.discarded, 1000 - 31 * 32);
        assert_eq!(est.samples, 1000);
        assert!(est.std_error > 0.0);
        assert!((est.ln_mean - est.mean.ln()).abs() < 1e-15);
    }

    #[test]
    fn worker_count_does_not_change_result() {
        let mut base = config(2, 4, 1.0, 2000, 9);
        let a = estimate_coincidence(&base).unwrap();
        base.workers = 1;
        let b = estimate_coincidence(&base).unwrap();
        base.workers = 3;
        let c = estimate_coincidence(&base).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn other_submatrix_agrees_with_leading_block() {
        let cfg = config(2, 5, 1.0, 20_000, 11);
        let leading = estimate_coincidence(&cfg).unwrap();
        let spec = SubmatrixSpec::new(vec![1, 4], vec![0, 3]).unwrap();
        let other = estimate_coincidence_with_submatrix(&cfg, &spec).unwrap();
        let sigma = (leading.std_error.powi(2) + other.std_error.powi(2)).sqrt();
        assert!(
            (leading.mean - other.mean).abs() < 4.0 * sigma,
            "{} vs {}",
            leading.mean,
            other.mean
        );
    }

    #[test]
    fn sigma_scales_as_inverse_sqrt_samples() {
        let small = estimate_coincidence(&config(2, 4, 1.0, 2500, 21)).unwrap();
        let large = estimate_coincidence(&config(2, 4, 1.0, 40_000, 22)).unwrap();
        let ratio = small.std_error / large.std_error;
        assert!((ratio - 4.0).abs() < 1.2, "ratio = {ratio}");
    }

    #[test]
    fn guards() {
        assert!(estimate_coincidence(&config(3, 2, 1.0, 100, 0)).is_err());
        assert!(estimate_coincidence(&config(1, 2, 1.0, 3, 0)).is_err());
        assert!(estimate_coincidence(&config(26, 52, 1.0, 100, 0)).is_err());
        assert!(estimate_permanental_product(
            Complex64::ZERO,
            Complex64::ZERO,
            9,
            1.0,
            100,
            RngSeed::new(0, 0)
        )
        .is_err());
    }

    #[test]
    fn product_estimate_single_mode() {
        // m = 1, x = y = 1, t = 1: analytic average is 2.
        let one = Complex64::new(1.0, 0.0);
        let est = estimate_permanental_product(one, one, 1, 1.0, 20_000, RngSeed::new(3, 0))
            .unwrap();
        assert!(
            (est.mean.re - 2.0).abs() < 3.0 * est.std_error_re,
            "mean={}",
            est.mean
        );
        assert!(est.mean.im.abs() < 4.0 * est.std_error_im.max(1e-3));
    }

    #[test]
    fn product_estimate_at_origin_matches_p_m_given_m() {
        // m = 3, x = y = 0: |b_3|^2 = |perm(T)|^2, average 3! 2! / 5! = 0.1.
        let est = estimate_permanental_product(
            Complex64::ZERO,
            Complex64::ZERO,
            3,
            1.0,
            20_000,
            RngSeed::new(4, 0),
        )
        .unwrap();
        assert!(
            (est.mean.re - 0.1).abs() < 3.0 * est.std_error_re,
            "mean={}",
            est.mean
        );
    }

    #[test]
    fn product_estimate_matches_closed_form_lossy() {
        let x = Complex64::new(2.0, 0.0);
        let y = Complex64::new(3.0, 0.0);
        let est =
            estimate_permanental_product(x, y, 2, 0.5, 40_000, RngSeed::new(6, 0)).unwrap();
        let exact = crate::exact::averaged_permanental_product(x, y, 2, 0.5).unwrap();
        assert!(
            (est.mean.re - exact.re).abs() < 3.0 * est.std_error_re,
            "{} vs {exact}",
            est.mean
        );
        assert!((est.mean.im - exact.im).abs() < 3.0 * est.std_error_im.max(1e-3));
    }

    #[test]
    fn relative_error_definitions() {
        let est = EnsembleEstimate {
            mean: 1.01,
            std_error: 0.01,
            samples: 100,
            sub_ensembles: 10,
            discarded: 0,
            ln_mean: 1.01f64.ln(),
        };
        let (rel, sig) = relative_error(&est, 0.0).unwrap();
        assert!((rel - 0.01).abs() < 1e-12);
        assert!((sig - 0.0101).abs() < 1e-4);

        let exact = EnsembleEstimate {
            mean: 0.5,
            std_error: 0.0,
            samples: 100,
            sub_ensembles: 10,
            discarded: 0,
            ln_mean: 0.5f64.ln(),
        };
        let (rel, _) = relative_error(&exact, 0.5f64.ln()).unwrap();
        assert_eq!(rel, 0.0);

        let zero = EnsembleEstimate {
            mean: 0.0,
            std_error: 0.0,
            samples: 100,
            sub_ensembles: 10,
            discarded: 0,
            ln_mean: f64::NEG_INFINITY,
        };
        assert!(relative_error(&zero, 0.0).is_err());
    }
}
