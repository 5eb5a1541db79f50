//! Command-line front end: exact averages, asymptotics, Monte-Carlo
//! sampling, and figure data generation.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use permscale::asymptotics::{asymptotic_log_probability, ScalingRegime};
use permscale::exact::{coincidence_probability, grouped_bound};
use permscale::figures;
use permscale::haar::RngSeed;
use permscale::montecarlo::{estimate_coincidence, relative_error, EnsembleConfig};
use permscale::output::{render, Format, OutputRecord, Quantity};
use permscale::Error;

const LN_10: f64 = std::f64::consts::LN_10;

#[derive(Parser)]
#[command(
    name = "permscale",
    about = "Unitary-averaged permanent statistics for lossy photonic networks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FormatArg {
    /// Output format: csv or json-lines
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Exact coincidence probability P and grouped bound R (log domain)
    Exact {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        /// Intensity transmission in (0, 1]
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Print log10 instead of natural log
        #[arg(long)]
        base10: bool,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Asymptotic scaling-law approximation to ln P (or ln R for grouped)
    Asym {
        /// Regime: entire, gaussian, general, or grouped
        #[arg(long)]
        regime: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long)]
        base10: bool,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Monte-Carlo estimate of P over a CUE ensemble
    Sample {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Ensemble size
        #[arg(long = "S")]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// RNG sub-stream base
        #[arg(long, default_value_t = 0)]
        stream: u64,
        /// Worker thread count hint; 0 = automatic
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Emit data for one of the three figures as CSV
    Figure {
        /// Which figure: 1, 2, or 3
        which: u8,
        /// Largest n (defaults: 100 for figures 1 and 3, 14 for figure 2)
        #[arg(long)]
        n_max: Option<u64>,
        /// Ensemble size for figure 2
        #[arg(long = "S")]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<String>,
    },
}

fn parse_regime(name: &str) -> Result<ScalingRegime, Error> {
    ScalingRegime::ALL
        .into_iter()
        .find(|r| r.name() == name)
        .ok_or_else(|| {
            Error::InvalidArgument(format!(
                "unknown regime {name:?} (expected entire, gaussian, general, or grouped)"
            ))
        })
}

fn log_display(ln: f64, base10: bool) -> (f64, &'static str) {
    if base10 {
        (ln / LN_10, "10")
    } else {
        (ln, "e")
    }
}

fn run(cli: Cli) -> Result<String, Error> {
    match cli.command {
        Command::Exact {
            n,
            m,
            t,
            base10,
            format,
        } => {
            let format: Format = format.format.parse()?;
            let p = coincidence_probability(n, m, t)?;
            let r = grouped_bound(n, m, t)?;
            let (pv, base) = log_display(p.ln(), base10);
            let (rv, _) = log_display(r.ln(), base10);
            let records = vec![
                OutputRecord::new(n, m, t, Quantity::ExactP, pv).with_extra("log", base),
                OutputRecord::new(n, m, t, Quantity::ExactR, rv).with_extra("log", base),
            ];
            Ok(render(&records, format))
        }
        Command::Asym {
            regime,
            n,
            m,
            t,
            base10,
            format,
        } => {
            let format: Format = format.format.parse()?;
            let regime = parse_regime(&regime)?;
            let ln = asymptotic_log_probability(regime, n, m, t)?;
            let (value, base) = log_display(ln, base10);
            let quantity = if regime == ScalingRegime::GroupedBound {
                Quantity::AsymR
            } else {
                Quantity::AsymP
            };
            let records = vec![OutputRecord::new(n, m, t, quantity, value)
                .with_extra("log", base)
                .with_extra("regime", regime.name())];
            Ok(render(&records, format))
        }
        Command::Sample {
            n,
            m,
            t,
            samples,
            seed,
            stream,
            workers,
            format,
        } => {
            let format: Format = format.format.parse()?;
            let config = EnsembleConfig {
                n: n as usize,
                m: m as usize,
                t,
                samples,
                seed: RngSeed::new(seed, stream),
                workers,
            };
            let estimate = estimate_coincidence(&config)?;
            let exact = coincidence_probability(n, m, t)?;
            let (rel, rel_sigma) = relative_error(&estimate, exact.ln())?;
            let meta = |r: OutputRecord| {
                r.with_extra("S", samples)
                    .with_extra("seed", seed)
                    .with_extra("stream", stream)
                    .with_extra("subEnsembles", estimate.sub_ensembles)
                    .with_extra("discarded", estimate.discarded)
            };
            let records = vec![
                meta(OutputRecord::new(n, m, t, Quantity::McMean, estimate.mean)),
                meta(OutputRecord::new(
                    n,
                    m,
                    t,
                    Quantity::McSigma,
                    estimate.std_error,
                )),
                meta(OutputRecord::new(n, m, t, Quantity::RelErr, rel))
                    .with_extra("relSigma", rel_sigma),
            ];
            Ok(render(&records, format))
        }
        Command::Figure {
            which,
            n_max,
            samples,
            seed,
            workers,
            out,
        } => {
            let records = match which {
                1 => figures::figure1(n_max.unwrap_or(100))?,
                2 => figures::figure2(
                    n_max.unwrap_or(figures::FIG2_DEFAULT_N_MAX),
                    samples.unwrap_or(figures::FIG2_DEFAULT_SAMPLES),
                    RngSeed::new(seed, 0),
                    workers,
                )?,
                3 => figures::figure3(n_max.unwrap_or(100))?,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "figure must be 1, 2, or 3, got {other}"
                    )))
                }
            };
            let csv = figures::render_figure_csv(&records);
            if let Some(path) = out {
                fs::write(&path, &csv)
                    .map_err(|e| Error::InvalidArgument(format!("writing {path}: {e}")))?;
                Ok(format!("wrote {} records to {path}\n", records.len()))
            } else {
                Ok(csv)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse(); // usage errors exit 2 via clap
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(3)
        }
    }
}
