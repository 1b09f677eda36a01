//! Curve bundles for the three outage figures, as long-format tables.

use anyhow::Result;
use clap::ValueEnum;

use rayprod_core::cdf::GammaLaguerreModel;
use rayprod_core::moments::MomentPolicy;
use rayprod_core::montecarlo::{sample_frobenius, Ecdf};
use rayprod_core::outage::{db_to_linear, ostbc_catalog, Link};
use rayprod_core::ChannelConfig;

use crate::commands::{capacity_column, capacity_unit_scale, fit_model, SimArgs};
use crate::table::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// Outage probability vs rate on [2, K1, K2, 4], q = 2 and q = 6
    Fig2,
    /// Outage probability vs rate for 1 to 4 layers between 4x4 antennas
    Fig3,
    /// 5% outage capacity vs SNR on [K0, 7, 8, 4], K0 = 2, 4, 8
    Fig4,
}

/// Scatterer pairs (K1, K2) with K2 / K1 = 4/3 used for the first figure.
pub const FIG2_SCATTERERS: [(u32, u32); 3] = [(6, 8), (15, 20), (30, 40)];
const RATE_POINTS: usize = 201;

pub struct Options<'a> {
    pub sim: &'a SimArgs,
    pub snr_db: Option<f64>,
    pub bits: bool,
}

fn dims(d: &[u32]) -> ChannelConfig {
    ChannelConfig::new(d.to_vec()).expect("built-in dims are valid")
}

fn label(config: &ChannelConfig) -> String {
    let parts: Vec<String> = config.dims().iter().map(u32::to_string).collect();
    parts.join("x")
}

/// Outage-probability curves of several links on a shared rate grid.
struct RateSweep {
    table: Table,
    rates: Vec<f64>,
    unit: f64,
}

impl RateSweep {
    /// The grid ends a little past the largest 99.9% outage capacity of the given curves.
    fn new(curves: &[(&Link, &GammaLaguerreModel, f64)], bits: bool) -> Result<Self> {
        let mut top = 0.0_f64;
        for (link, model, gamma) in curves {
            top = top.max(link.outage_capacity(model, *gamma, 0.999)?);
        }
        let top = 1.05 * top;
        let rates = (0..RATE_POINTS)
            .map(|k| top * k as f64 / (RATE_POINTS - 1) as f64)
            .collect();
        Ok(RateSweep {
            table: Table::new(&["curve_id", capacity_column(bits), "outage_probability"]),
            rates,
            unit: capacity_unit_scale(bits),
        })
    }

    fn model(&mut self, id: &str, link: &Link, model: &GammaLaguerreModel, gamma: f64) -> Result<()> {
        for &z in &self.rates {
            let p = link.outage_probability(model, gamma, z)?;
            self.table.push(vec![id.into(), (z * self.unit).into(), p.into()]);
        }
        Ok(())
    }

    fn simulated(&mut self, id: &str, link: &Link, ecdf: &Ecdf, gamma: f64) -> Result<()> {
        let config = link.config();
        let scale = link.scheme().rate() * f64::from(config.tx_antennas()) * config.normalization() / gamma;
        for &z in &self.rates {
            let threshold = scale * (z / link.scheme().rate()).exp_m1();
            self.table.push(vec![
                id.into(),
                (z * self.unit).into(),
                ecdf.eval(threshold).into(),
            ]);
        }
        Ok(())
    }
}

pub fn run(figure: Figure, opts: &Options<'_>) -> Result<Table> {
    match figure {
        Figure::Fig2 => fig2(opts),
        Figure::Fig3 => fig3(opts),
        Figure::Fig4 => fig4(opts),
    }
}

fn fig2(opts: &Options<'_>) -> Result<Table> {
    eprintln!("note: fig2 uses the stand-in scatterer family (6,8), (15,20), (30,40) with K2/K1 = 4/3");
    let gamma = db_to_linear(opts.snr_db.unwrap_or(0.0));
    let reference = dims(&[2, 4]);
    let reference_model = fit_model(&reference, 6, MomentPolicy::ExactPreferred)?;
    let reference_link = Link::with_catalog_code(reference.clone())?;

    struct Member {
        tag: String,
        link: Link,
        q2: GammaLaguerreModel,
        q6: GammaLaguerreModel,
    }
    let members = FIG2_SCATTERERS
        .iter()
        .map(|&(k1, k2)| {
            let config = dims(&[2, k1, k2, 4]);
            Ok(Member {
                tag: format!("K1_{k1}_K2_{k2}"),
                q2: fit_model(&config, 2, MomentPolicy::ExactPreferred)?,
                q6: fit_model(&config, 6, MomentPolicy::ExactPreferred)?,
                link: Link::with_catalog_code(config)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut extent: Vec<(&Link, &GammaLaguerreModel, f64)> =
        members.iter().map(|m| (&m.link, &m.q6, gamma)).collect();
    extent.push((&reference_link, &reference_model, gamma));
    let mut sweep = RateSweep::new(&extent, opts.bits)?;

    sweep.model(
        &format!("rayleigh_{}", label(&reference)),
        &reference_link,
        &reference_model,
        gamma,
    )?;
    for m in &members {
        sweep.model(&format!("model_q2_{}", m.tag), &m.link, &m.q2, gamma)?;
        sweep.model(&format!("model_q6_{}", m.tag), &m.link, &m.q6, gamma)?;
        let samples = sample_frobenius(m.link.config(), opts.sim.samples, opts.sim.seed)?;
        sweep.simulated(
            &format!("mc_{}", m.tag),
            &m.link,
            &Ecdf::new(&samples.values)?,
            gamma,
        )?;
    }
    Ok(sweep.table)
}

fn fig3(opts: &Options<'_>) -> Result<Table> {
    let family = [&[4u32, 4][..], &[4, 8, 4], &[4, 8, 8, 4], &[4, 8, 8, 8, 4]];
    let snrs: Vec<f64> = match opts.snr_db {
        Some(db) => vec![db],
        None => vec![0.0, 5.0],
    };
    let members = family
        .iter()
        .map(|d| {
            let config = dims(d);
            let model = fit_model(&config, 6, MomentPolicy::ExactPreferred)?;
            Ok((Link::with_catalog_code(config)?, model))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut extent = Vec::new();
    for (link, model) in &members {
        for &db in &snrs {
            extent.push((link, model, db_to_linear(db)));
        }
    }
    let mut sweep = RateSweep::new(&extent, opts.bits)?;
    for (link, model) in &members {
        let n = link.config().n();
        let samples = sample_frobenius(link.config(), opts.sim.samples, opts.sim.seed)?;
        let ecdf = Ecdf::new(&samples.values)?;
        for &db in &snrs {
            let gamma = db_to_linear(db);
            sweep.model(&format!("model_n{n}_{db:?}db"), link, model, gamma)?;
            sweep.simulated(&format!("mc_n{n}_{db:?}db"), link, &ecdf, gamma)?;
        }
    }
    Ok(sweep.table)
}

fn fig4(opts: &Options<'_>) -> Result<Table> {
    const TARGET: f64 = 0.05;
    let unit = capacity_unit_scale(opts.bits);
    let column = format!("outage_{}", capacity_column(opts.bits));
    let mut table = Table::new(&["curve_id", "snr_db", &column]);
    let snrs: Vec<f64> = (0..=40).map(f64::from).collect();
    for k0 in [2u32, 4, 8] {
        let scheme = ostbc_catalog(k0)?;
        let tag = format!("K0_{k0}_R_{:?}", scheme.rate());
        let config = dims(&[k0, 7, 8, 4]);
        let model = fit_model(&config, 6, MomentPolicy::ExactPreferred)?;
        let link = Link::new(config.clone(), scheme)?;
        let reference = dims(&[k0, 4]);
        let reference_model = fit_model(&reference, 6, MomentPolicy::ExactPreferred)?;
        let reference_link = Link::new(reference, scheme)?;
        let samples = sample_frobenius(&config, opts.sim.samples, opts.sim.seed)?;
        let quantile = samples.quantile(TARGET)?;
        let snr_scale = scheme.rate() * f64::from(k0) * config.normalization();

        for &db in &snrs {
            let c = link.outage_capacity(&model, db_to_linear(db), TARGET)?;
            table.push(vec![format!("model_{tag}").into(), db.into(), (c * unit).into()]);
        }
        for &db in &snrs {
            let c = scheme.rate() * (db_to_linear(db) / snr_scale * quantile).ln_1p();
            table.push(vec![format!("mc_{tag}").into(), db.into(), (c * unit).into()]);
        }
        for &db in &snrs {
            let c = reference_link.outage_capacity(&reference_model, db_to_linear(db), TARGET)?;
            table.push(vec![
                format!("rayleigh_{tag}").into(),
                db.into(),
                (c * unit).into(),
            ]);
        }
    }
    Ok(table)
}
