//! `rayprod`: moments, distribution fits, outage curves and Monte-Carlo runs
//! for products of complex Gaussian MIMO channels.

mod commands;
mod reproduce;
mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand};

use rayprod_core::outage::Link;
use rayprod_core::{ChannelConfig, Error};

use commands::{ModelArgs, OutageTarget, RateArgs, SimArgs, SnrArgs};
use table::Format;

const REPRODUCE_HELP: &str = "\
Emits one long-format table per figure with columns
  fig2, fig3: curve_id, capacity_nats_per_s_per_hz, outage_probability
  fig4:       curve_id, snr_db, outage_capacity_nats_per_s_per_hz
(bits instead of nats with --bits).

curve_id prefixes: model_* are Gamma-Laguerre curves, mc_* Monte-Carlo
overlays from --samples seeded draws, rayleigh_* the single-matrix reference.
fig2 uses the stand-in family (K1, K2) in {(6,8), (15,20), (30,40)} at
--snr-db (default 0 dB); fig3 uses 0 and 5 dB unless --snr-db is given;
fig4 sweeps 0..40 dB at 5% outage.";

#[derive(Debug, Parser)]
#[command(
    name = "rayprod",
    version,
    about = "Outage analysis of OSTBCs over multi-cluster scattering MIMO channels"
)]
struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Write the result here instead of stdout (the binary sample file for `simulate`)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Moments E[X^m], m = 1..q, by every available method
    Moments {
        #[arg(long, value_parser = commands::dims_arg)]
        dims: ChannelConfig,
        #[arg(long, default_value_t = 6)]
        q: usize,
    },
    /// Fit the Gamma-Laguerre model and print it as JSON
    Fit {
        #[arg(long, value_parser = commands::dims_arg)]
        dims: ChannelConfig,
        #[arg(long, default_value_t = 6)]
        q: usize,
        /// Fail instead of falling back to leading-order moments
        #[arg(long)]
        exact_only: bool,
    },
    /// Evaluate the approximate CDF of X, optionally against simulation
    Cdf {
        #[command(flatten)]
        model: ModelArgs,
        /// Evaluation grid start:stop:count (default: 0 to mean + 8 std)
        #[arg(long)]
        x_grid: Option<String>,
        /// Overlay the empirical CDF of simulated draws
        #[arg(long)]
        simulate: bool,
        /// Overlay draws from a file written by `simulate` instead of simulating
        #[arg(long)]
        sample_file: Option<PathBuf>,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Outage probability over rates (--z-grid) or outage capacity over SNR (--pout)
    #[command(group(ArgGroup::new("target").required(true).args(["z_grid", "pout"])))]
    Outage {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        snr: SnrArgs,
        #[command(flatten)]
        rate: RateArgs,
        /// Rate grid start:stop:count, in the output capacity unit
        #[arg(long)]
        z_grid: Option<String>,
        /// Target outage probability
        #[arg(long)]
        pout: Option<f64>,
        /// Report capacities in bits/s/Hz instead of nats/s/Hz
        #[arg(long)]
        bits: bool,
    },
    /// Simulate X, print summary statistics and optionally save the draws
    Simulate {
        #[arg(long, value_parser = commands::dims_arg)]
        dims: ChannelConfig,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Curve data for the outage figures
    #[command(after_long_help = REPRODUCE_HELP)]
    Reproduce {
        #[arg(value_enum)]
        figure: reproduce::Figure,
        #[command(flatten)]
        sim: SimArgs,
        /// Transmit SNR in dB (fig2, fig3)
        #[arg(long, allow_negative_numbers = true)]
        snr_db: Option<f64>,
        /// Report capacities in bits/s/Hz instead of nats/s/Hz
        #[arg(long)]
        bits: bool,
    },
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let out = cli.out.as_ref();
    let table = match cli.command {
        Command::Moments { dims, q } => commands::moments(&dims, q)?,
        Command::Fit { dims, q, exact_only } => {
            let model = commands::fit_model(&dims, q, commands::policy(exact_only))?;
            let mut json = model.to_json();
            json.push('\n');
            return emit(&json, out);
        }
        Command::Cdf {
            model,
            x_grid,
            simulate,
            sample_file,
            sim,
        } => {
            let fitted = model.load()?;
            let overlay = if simulate || sample_file.is_some() {
                Some(commands::load_or_simulate(
                    fitted.config(),
                    &sim,
                    sample_file.as_deref(),
                )?)
            } else {
                None
            };
            commands::cdf(&fitted, x_grid.as_deref(), overlay.as_ref())?
        }
        Command::Outage {
            model,
            snr,
            rate,
            z_grid,
            pout,
            bits,
        } => {
            let fitted = model.load()?;
            let link = Link::new(fitted.config().clone(), rate.scheme(fitted.config())?)?;
            let target = OutageTarget {
                z_grid: z_grid.as_deref(),
                pout,
                bits,
            };
            commands::outage(&fitted, &link, &snr.grid()?, target)?
        }
        Command::Simulate { dims, sim } => {
            let samples = rayprod_core::montecarlo::sample_frobenius(&dims, sim.samples, sim.seed)?;
            if let Some(path) = out {
                samples
                    .write(path)
                    .with_context(|| format!("writing samples {}", path.display()))?;
            }
            let summary = commands::simulate(&samples)?;
            return emit(&summary.render(cli.format), None);
        }
        Command::Reproduce {
            figure,
            sim,
            snr_db,
            bits,
        } => {
            if let Some(db) = snr_db {
                if !db.is_finite() {
                    bail!(Error::Parameter(format!("SNR {db} dB is not finite")));
                }
            }
            let opts = reproduce::Options {
                sim: &sim,
                snr_db,
                bits,
            };
            reproduce::run(figure, &opts)?
        }
    };
    emit(&table.render(cli.format), out)
}

/// 2 for invalid input, 3 for exceeded resource guards, 4 for numerical
/// failures, 1 for anything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    let core = err.chain().find_map(|e| e.downcast_ref::<Error>());
    match core {
        Some(Error::Parameter(_) | Error::Domain(_) | Error::Format(_)) => 2,
        Some(Error::Resource(_)) => 3,
        Some(Error::Numeric(_) | Error::Fit(_)) => 4,
        Some(Error::Io(_)) | None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
