//! Exact top-k retrieval, precision of subset centroids, and Monte Carlo
//! consistency over any embedding matrix.

mod curve;
pub mod knn;
mod monte_carlo;
mod precision;
mod similarity;

pub use crate::matrix::{EmbeddingMatrix, MatrixOrigin};
pub use curve::{ConsistencyCurve, Provenance};
pub use knn::{all_scores, top_k, top_k_serial};
pub use monte_carlo::{consistency_curve_mc, consistency_exhaustive, consistency_mc, McEstimate};
pub use precision::{centroid, precision_hits, precision_k, SubsetSample};
pub use similarity::{all_pair_similarities, pairwise_similarity_stats, similarity_sample, SimilarityStats};
