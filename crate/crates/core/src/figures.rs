//! Data generators behind the `figure` CLI command.
//!
//! Figure 1: exact log10 P(n|kn) vs n for k in {1, 2, 4, 6}, t = 1.
//! Figure 2: Monte-Carlo relative error and error bars vs n at k = 2.
//! Figure 3: exact log10 R(n|kn) vs n for k in {2..6}, t = 1.
//!
//! Probabilities are emitted in log10 to match the plotted scales; figure 2
//! values are plain relative numbers.

use crate::error::Result;
use crate::exact::{coincidence_probability, grouped_bound};
use crate::haar::RngSeed;
use crate::montecarlo::{estimate_coincidence, relative_error, EnsembleConfig};
use crate::output::{OutputRecord, Quantity};

pub const FIGURE_CSV_HEADER: &str = "n,k,t,quantity,value";

/// Desk-scale defaults for figure 2. The paper-scale run (n up to 25,
/// S = 40000) is reachable by overriding them.
pub const FIG2_DEFAULT_N_MAX: u64 = 14;
pub const FIG2_DEFAULT_SAMPLES: usize = 10_000;

pub fn figure1(n_max: u64) -> Result<Vec<OutputRecord>> {
    let mut records = Vec::new();
    for k in [1u64, 2, 4, 6] {
        for n in 1..=n_max {
            let p = coincidence_probability(n, k * n, 1.0)?;
            records.push(
                OutputRecord::new(n, k * n, 1.0, Quantity::ExactP, p.log10())
                    .with_extra("log", "10"),
            );
        }
    }
    Ok(records)
}

pub fn figure2(
    n_max: u64,
    samples: usize,
    seed: RngSeed,
    workers: usize,
) -> Result<Vec<OutputRecord>> {
    let mut records = Vec::new();
    for n in 2..=n_max {
        let m = 2 * n;
        let config = EnsembleConfig {
            n: n as usize,
            m: m as usize,
            t: 1.0,
            samples,
            // Disjoint stream block per point so points are independent.
            seed: seed.with_stream(seed.stream.wrapping_add(n.wrapping_mul(1 << 32))),
            workers,
        };
        let estimate = estimate_coincidence(&config)?;
        let exact = coincidence_probability(n, m, 1.0)?;
        let (rel, sigma) = relative_error(&estimate, exact.ln())?;
        for (quantity, value) in [(Quantity::RelErr, rel), (Quantity::McSigma, sigma)] {
            records.push(
                OutputRecord::new(n, m, 1.0, quantity, value)
                    .with_extra("S", samples)
                    .with_extra("seed", seed.seed)
                    .with_extra("subEnsembles", estimate.sub_ensembles)
                    .with_extra("discarded", estimate.discarded),
            );
        }
    }
    Ok(records)
}

pub fn figure3(n_max: u64) -> Result<Vec<OutputRecord>> {
    let mut records = Vec::new();
    for k in 2u64..=6 {
        for n in 1..=n_max {
            let r = grouped_bound(n, k * n, 1.0)?;
            records.push(
                OutputRecord::new(n, k * n, 1.0, Quantity::ExactR, r.log10())
                    .with_extra("log", "10"),
            );
        }
    }
    Ok(records)
}

/// The figure CSV layout: n, k, t, quantity, value.
pub fn render_figure_csv(records: &[OutputRecord]) -> String {
    let mut out = String::from(FIGURE_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n, r.k, r.t, r.quantity, r.value
        ));
    }
    out
}
