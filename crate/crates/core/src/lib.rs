//! Consistency of average embeddings for item recommendation.
//!
//! Averaging item embeddings is a common way to represent users, playlists or
//! other higher-level concepts. This crate measures how well such an average
//! stays close to the items it was built from, using three independent routes:
//!
//! * [`analytic`]: closed-form expressions derived under i.i.d. entry
//!   assumptions and a central-limit approximation of inner products;
//! * [`evaluator`]: exact top-k retrieval and Monte Carlo estimation of the
//!   expected precision over random item subsets;
//! * [`datasets`]: loading, centering and diagnosing real embedding matrices.
//!
//! [`stats_core`] holds the special functions, moment arithmetic and seeded
//! sampling that the other modules build on.

pub mod analytic;
pub mod cli;
pub mod datasets;
pub mod error;
pub mod evaluator;
pub mod matrix;
pub mod stats_core;

pub use error::{Error, Result};
pub use matrix::EmbeddingMatrix;
