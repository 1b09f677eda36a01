//! Seeded Monte-Carlo simulation of the product channel.
//!
//! Every channel realization `i` draws from its own ChaCha8 stream, keyed by
//! the user seed and stream id `i`, so results do not depend on how the work
//! is split across threads. Standard normals come from the ziggurat sampler
//! of `rand_distr`; a complex entry is `(g1 + i g2) / sqrt(2)`.

mod ecdf;
mod file;
mod matrix;
mod rayleigh;
mod sampler;
mod variance;

pub use ecdf::{kolmogorov_p_value, Ecdf};
pub use file::{decode_samples, encode_samples, SAMPLE_FILE_MAGIC, SAMPLE_FILE_VERSION};
pub use rayleigh::{cluster_family, rayleigh_limit_distance, KsEstimator};
pub use sampler::{sample_frobenius, SampleSet};
pub use variance::{closed_form_variance, variance_recursion, VarianceStep};
