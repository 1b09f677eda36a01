use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;

use rayprod_core::cdf::GammaLaguerreModel;
use rayprod_core::interface::{parse_dims, parse_grid, parse_rate};
use rayprod_core::moments::{
    closed_form_moment, exact_moment, leading_order_moment, mgf_moment, moment_set, MomentPolicy,
};
use rayprod_core::montecarlo::{sample_frobenius, Ecdf, SampleSet};
use rayprod_core::outage::{db_to_linear, ostbc_catalog, Link, OstbcScheme};
use rayprod_core::{ChannelConfig, Error};

use crate::table::{Cell, Table};

pub fn dims_arg(text: &str) -> std::result::Result<ChannelConfig, String> {
    parse_dims(text).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Channel dimensions K0,K1,...,Kn from transmitter to receiver
    #[arg(long, value_parser = dims_arg)]
    pub dims: Option<ChannelConfig>,
    /// Number of matched moments
    #[arg(long, default_value_t = 6)]
    pub q: usize,
    /// Use a model saved by `rayprod fit` instead of fitting one
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Fail instead of falling back to leading-order moments
    #[arg(long)]
    pub exact_only: bool,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// Number of Monte-Carlo channel realizations
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    /// Seed of the Monte-Carlo streams
    #[arg(long, env = "RAYPROD_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SnrArgs {
    /// Transmit SNR in dB
    #[arg(long, allow_negative_numbers = true, conflicts_with = "snr_grid")]
    pub snr_db: Option<f64>,
    /// SNR grid in dB as start:stop:count
    #[arg(long)]
    pub snr_grid: Option<String>,
}

impl SnrArgs {
    pub fn grid(&self) -> Result<Vec<f64>> {
        match (&self.snr_grid, self.snr_db) {
            (Some(grid), _) => Ok(parse_grid(grid)?),
            (None, Some(db)) if db.is_finite() => Ok(vec![db]),
            (None, Some(db)) => Err(Error::Parameter(format!("SNR {db} dB is not finite")).into()),
            (None, None) => Ok(vec![0.0]),
        }
    }
}

#[derive(Debug, Args)]
pub struct RateArgs {
    /// Explicit code rate S/T
    #[arg(long, conflicts_with = "auto_rate")]
    pub rate: Option<String>,
    /// Pick the built-in code for the transmit antenna count (the default)
    #[arg(long)]
    pub auto_rate: bool,
}

impl RateArgs {
    pub fn scheme(&self, config: &ChannelConfig) -> Result<OstbcScheme> {
        match &self.rate {
            Some(text) => {
                let (s, t) = parse_rate(text)?;
                Ok(OstbcScheme::new(s, t, config.tx_antennas())?)
            }
            None => Ok(ostbc_catalog(config.tx_antennas())?),
        }
    }
}

pub fn policy(exact_only: bool) -> MomentPolicy {
    if exact_only {
        MomentPolicy::ExactOnly
    } else {
        MomentPolicy::ExactPreferred
    }
}

pub fn fit_model(config: &ChannelConfig, q: usize, policy: MomentPolicy) -> Result<GammaLaguerreModel> {
    let set = moment_set(config, q, policy)?;
    if !set.is_exact() {
        eprintln!("warning: moments above order 3 of {config} use the leading-order approximation");
    }
    let model = GammaLaguerreModel::fit(&set)?;
    for note in model.diagnostics() {
        eprintln!("warning: {config}: {note}");
    }
    Ok(model)
}

impl ModelArgs {
    pub fn load(&self) -> Result<GammaLaguerreModel> {
        match &self.model {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading model {}", path.display()))?;
                let model = GammaLaguerreModel::from_json(&text)
                    .with_context(|| format!("loading model {}", path.display()))?;
                if let Some(dims) = &self.dims {
                    if dims != model.config() {
                        bail!(Error::Parameter(format!(
                            "--dims {dims} disagrees with the model's dims {}",
                            model.config()
                        )));
                    }
                }
                Ok(model)
            }
            None => {
                let dims = self
                    .dims
                    .as_ref()
                    .ok_or_else(|| Error::Parameter("either --dims or --model is required".into()))?;
                fit_model(dims, self.q, policy(self.exact_only))
            }
        }
    }
}

pub fn moments(dims: &ChannelConfig, q: usize) -> Result<Table> {
    if q == 0 {
        bail!(Error::Parameter("q must be at least 1".into()));
    }
    let mut table = Table::new(&[
        "m",
        "exact_partition",
        "closed_form",
        "mgf_series",
        "leading_order",
    ]);
    for m in 1..=q as u32 {
        let exact = exact_moment(dims, m);
        if let Err(e) = &exact {
            eprintln!("note: exact moment m={m} unavailable ({e}); leading_order is the fallback");
        }
        let closed = if m <= 3 {
            closed_form_moment(dims, m).ok()
        } else {
            None
        };
        let mgf = mgf_moment(dims, m).ok();
        table.push(vec![
            u64::from(m).into(),
            exact.ok().into(),
            closed.into(),
            mgf.into(),
            leading_order_moment(dims, m).into(),
        ]);
    }
    Ok(table)
}

pub fn load_or_simulate(
    config: &ChannelConfig,
    sim: &SimArgs,
    sample_file: Option<&Path>,
) -> Result<SampleSet> {
    match sample_file {
        Some(path) => SampleSet::read(config.clone(), path)
            .with_context(|| format!("reading samples {}", path.display())),
        None => Ok(sample_frobenius(config, sim.samples, sim.seed)?),
    }
}

pub fn cdf(model: &GammaLaguerreModel, x_grid: Option<&str>, overlay: Option<&SampleSet>) -> Result<Table> {
    let grid = match x_grid {
        Some(text) => parse_grid(text)?,
        None => {
            let top = model.mean() + 8.0 * model.std_dev();
            (0..=200).map(|k| top * k as f64 / 200.0).collect()
        }
    };
    let mut columns = vec![
        "channel_energy",
        "raw_cdf_probability",
        "regularized_cdf_probability",
    ];
    let ecdf = overlay.map(|s| Ecdf::new(&s.values)).transpose()?;
    if ecdf.is_some() {
        columns.push("ecdf_probability");
    }
    let mut table = Table::new(&columns);
    for x in grid {
        let v = model.cdf(x)?;
        let mut row: Vec<Cell> = vec![x.into(), v.raw.into(), v.regularized.into()];
        if let Some(e) = &ecdf {
            row.push(e.eval(x).into());
        }
        table.push(row);
    }
    Ok(table)
}

pub fn capacity_column(bits: bool) -> &'static str {
    if bits {
        "capacity_bits_per_s_per_hz"
    } else {
        "capacity_nats_per_s_per_hz"
    }
}

pub fn capacity_unit_scale(bits: bool) -> f64 {
    if bits {
        1.0 / std::f64::consts::LN_2
    } else {
        1.0
    }
}

pub struct OutageTarget<'a> {
    pub z_grid: Option<&'a str>,
    pub pout: Option<f64>,
    pub bits: bool,
}

pub fn outage(
    model: &GammaLaguerreModel,
    link: &Link,
    snr_grid: &[f64],
    target: OutageTarget<'_>,
) -> Result<Table> {
    let unit = capacity_unit_scale(target.bits);
    match (target.z_grid, target.pout) {
        (Some(grid), None) => {
            let rates = parse_grid(grid)?;
            if rates.iter().any(|&z| z < 0.0) {
                bail!(Error::Parameter("rates must be nonnegative".into()));
            }
            let mut table = Table::new(&["curve_id", capacity_column(target.bits), "outage_probability"]);
            for &db in snr_grid {
                let gamma = db_to_linear(db);
                for &z in &rates {
                    let p = link.outage_probability(model, gamma, z / unit)?;
                    table.push(vec![format!("model_snr_{db:?}db").into(), z.into(), p.into()]);
                }
            }
            Ok(table)
        }
        (None, Some(p)) => {
            let outage_column = format!("outage_{}", capacity_column(target.bits));
            let mut table = Table::new(&["curve_id", "snr_db", &outage_column]);
            for &db in snr_grid {
                let c = link.outage_capacity(model, db_to_linear(db), p)?;
                table.push(vec![
                    format!("model_pout_{p:?}").into(),
                    db.into(),
                    (c * unit).into(),
                ]);
            }
            Ok(table)
        }
        _ => bail!(Error::Parameter(
            "exactly one of --z-grid and --pout is required".into()
        )),
    }
}

pub fn simulate(samples: &SampleSet) -> Result<Table> {
    let mut table = Table::new(&["statistic", "sample_value", "analytic_value"]);
    table.push(vec![
        "count".into(),
        (samples.count() as u64).into(),
        Cell::empty(),
    ]);
    table.push(vec!["seed".into(), samples.seed.into(), Cell::empty()]);
    for m in 1..=4u32 {
        let analytic = exact_moment(&samples.config, m).ok();
        table.push(vec![
            format!("moment_{m}").into(),
            samples.moment(m as i32).into(),
            analytic.into(),
        ]);
        table.push(vec![
            format!("moment_{m}_std_error").into(),
            samples.moment_std_error(m as i32).into(),
            Cell::empty(),
        ]);
    }
    for p in [0.01, 0.05, 0.5, 0.95, 0.99] {
        table.push(vec![
            format!("quantile_{p:?}").into(),
            samples.quantile(p)?.into(),
            Cell::empty(),
        ]);
    }
    Ok(table)
}
