//! Reproducible sampling from the circular unitary ensemble.
//!
//! A Ginibre matrix (i.i.d. standard complex Gaussians) is QR-factorized and
//! Q is multiplied on the right by diag(r_ii / |r_ii|). Without that phase
//! correction the QR convention biases the distribution; with it the result
//! is exactly Haar.
//!
//! Reproducibility contract: a matrix is fully determined by
//! (m, seed, stream). Concurrent sampling uses disjoint stream indices, one
//! per sample, so results do not depend on worker count. Bit-exactness
//! across platforms is not promised; the statistical tests are the
//! portability contract.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

const MAX_MODES: usize = 4096;

/// Seed plus sub-stream selector. The pair fully determines a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Same seed, different sub-stream.
    pub fn with_stream(self, stream: u64) -> Self {
        Self { stream, ..self }
    }

    pub(crate) fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Draw an m x m unitary with Haar measure.
pub fn sample_cue(m: usize, seed: RngSeed) -> Result<ComplexMatrix> {
    if m == 0 {
        return Err(Error::InvalidArgument("mode count must be positive".into()));
    }
    if m > MAX_MODES {
        return Err(Error::SizeLimit {
            what: "CUE mode count",
            got: m,
            limit: MAX_MODES,
        });
    }
    let mut rng = seed.rng();
    let ginibre = DMatrix::from_fn(m, m, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = ginibre.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..m {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..m {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_fn(m, m, |i, j| q[(i, j)])
}

/// Max-entry deviation of U†U from the identity.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    let m = u.rows();
    let mut worst = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let mut dot = Complex64::new(0.0, 0.0);
            for k in 0..m {
                dot += u.get(k, i).conj() * u.get(k, j);
            }
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// A unitary network combined with a scalar intensity transmission t,
/// so that the amplitude transmission matrix is sqrt(t) * U.
#[derive(Debug, Clone)]
pub struct LossyNetwork {
    unitary: ComplexMatrix,
    transmission: f64,
}

impl LossyNetwork {
    pub fn new(unitary: ComplexMatrix, transmission: f64) -> Result<Self> {
        if !unitary.is_square() {
            return Err(Error::NonSquare {
                rows: unitary.rows(),
                cols: unitary.cols(),
            });
        }
        if !(transmission > 0.0 && transmission <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "transmission must be in (0, 1], got {transmission}"
            )));
        }
        let residual = unitarity_residual(&unitary);
        if residual > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "matrix is not unitary: max residual {residual:e}"
            )));
        }
        Ok(Self {
            unitary,
            transmission,
        })
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn transmission(&self) -> f64 {
        self.transmission
    }
}

/// The amplitude transmission matrix sqrt(t) * U.
pub fn transmission_matrix(net: &LossyNetwork) -> ComplexMatrix {
    net.unitary.scaled(net.transmission.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{permanent_ryser, submatrix, SubmatrixSpec};

    #[test]
    fn single_mode_is_unit_modulus() {
        for s in 0..50 {
            let u = sample_cue(1, RngSeed::new(42, s)).unwrap();
            assert!((u.get(0, 0).norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sampled_matrices_are_unitary() {
        for (m, s) in [(2, 0), (5, 1), (8, 2), (16, 3)] {
            let u = sample_cue(m, RngSeed::new(7, s)).unwrap();
            assert!(unitarity_residual(&u) < 1e-12, "m={m}");
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let seed = RngSeed::new(123, 45);
        let a = sample_cue(6, seed).unwrap();
        let b = sample_cue(6, seed).unwrap();
        assert_eq!(a, b);
        let c = sample_cue(6, seed.with_stream(46)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_modes_rejected() {
        assert!(sample_cue(0, RngSeed::new(0, 0)).is_err());
    }

    #[test]
    fn first_moment_of_entry_modulus() {
        // <|U_00|^2> = 1/m over the ensemble; 20k samples at m=4.
        let m = 4;
        let samples = 20_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for i in 0..samples {
            let u = sample_cue(m, RngSeed::new(99, i)).unwrap();
            let v = u.get(0, 0).norm_sqr();
            sum += v;
            sumsq += v * v;
        }
        let n = samples as f64;
        let mean = sum / n;
        let sigma = ((sumsq / n - mean * mean) / n).sqrt();
        assert!(
            (mean - 0.25).abs() < 4.0 * sigma,
            "mean={mean}, sigma={sigma}"
        );
    }

    #[test]
    fn lossless_network_returns_unitary_unchanged() {
        let u = sample_cue(3, RngSeed::new(5, 0)).unwrap();
        let net = LossyNetwork::new(u.clone(), 1.0).unwrap();
        assert_eq!(transmission_matrix(&net), u);
    }

    #[test]
    fn quarter_transmission_scales_entries() {
        let net = LossyNetwork::new(ComplexMatrix::identity(2), 0.25).unwrap();
        let t = transmission_matrix(&net);
        assert!((t.get(0, 0) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((t.get(1, 1) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!(t.get(0, 1).norm() < 1e-15);
    }

    #[test]
    fn transmission_scales_subpermanent_as_t_to_half_n() {
        let u = sample_cue(5, RngSeed::new(8, 1)).unwrap();
        let t = 0.36;
        let net = LossyNetwork::new(u.clone(), t).unwrap();
        let spec = SubmatrixSpec::leading(3).unwrap();
        let p_lossy = permanent_ryser(&submatrix(&transmission_matrix(&net), &spec).unwrap())
            .unwrap();
        let p_unit = permanent_ryser(&submatrix(&u, &spec).unwrap()).unwrap();
        let expect = p_unit * t.powf(1.5);
        assert!((p_lossy - expect).norm() / expect.norm() < 1e-12);
    }

    #[test]
    fn network_validation() {
        let u = sample_cue(2, RngSeed::new(1, 0)).unwrap();
        assert!(LossyNetwork::new(u.clone(), 0.0).is_err());
        assert!(LossyNetwork::new(u.clone(), 1.5).is_err());
        let not_unitary = u.scaled(0.9);
        assert!(LossyNetwork::new(not_unitary, 1.0).is_err());
    }
}
