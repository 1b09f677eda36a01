//! Outage probability and outage capacity of orthogonal space-time block
//! codes over multi-cluster scattering MIMO channels.
//!
//! The end-to-end channel is the product `P = H_n ... H_1` of independent
//! matrices with i.i.d. standard complex Gaussian entries. Everything of
//! interest depends on `X = ||P||_F^2`; this crate computes its moments
//! exactly, fits a Gamma-Laguerre approximation to its distribution, maps
//! that onto outage quantities and checks all of it against a seeded
//! Monte-Carlo simulator.
//!
//! ```
//! use rayprod_core::{cdf::GammaLaguerreModel, moments, ChannelConfig};
//!
//! let config = ChannelConfig::new(vec![2, 3]).unwrap();
//! let set = moments::moment_set(&config, 6, moments::MomentPolicy::default()).unwrap();
//! let model = GammaLaguerreModel::fit(&set).unwrap();
//! assert!((model.alpha() - 6.0).abs() < 1e-9);
//! ```

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cdf;
pub mod config;
pub mod error;
pub mod interface;
pub mod moments;
pub mod montecarlo;
pub mod outage;
pub mod special;

mod series;
mod summation;

pub use config::ChannelConfig;
pub use error::{Error, Result};
