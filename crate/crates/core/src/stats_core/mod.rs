//! Special functions, moment arithmetic and seeded sampling.

mod binomial;
mod distribution;
mod moments;
mod normal;
mod rng;
mod sampling;
pub mod special;

pub use binomial::{ln_factorial, log_binomial};
pub use distribution::{DistributionKind, DistributionSpec, EntrySampler};
pub use moments::{estimate_moments, MomentSet, MomentStandardErrors};
pub use normal::{
    normal_cdf, normal_log_cdf, normal_log_sf, normal_pdf, std_normal_cdf, std_normal_log_cdf,
    std_normal_log_pdf, std_normal_log_sf, std_normal_pdf,
};
pub use rng::RandomSeed;
pub use sampling::{sample_matrix, sample_values};
pub use special::{erf, erfc, log_erfc};
