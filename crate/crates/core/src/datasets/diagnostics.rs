use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::matrix::EmbeddingMatrix;
use crate::stats_core::{estimate_moments, MomentSet, RandomSeed};
use crate::{Error, Result};

/// Dimensions up to this count get every pair checked for correlation.
pub const ALL_PAIRS_MAX_DIM: usize = 256;
pub const DEFAULT_CORRELATION_SAMPLE: usize = 32_768;

/// How far a matrix is from i.i.d. entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub n_items: usize,
    pub dim: usize,
    /// `None` where the dimension has zero variance.
    pub per_dimension_moments: Vec<Option<MomentSet>>,
    pub degenerate_dimensions: Vec<usize>,
    pub pooled_moments: MomentSet,
    pub max_abs_offdiag_correlation: f64,
    pub correlation_pairs: usize,
    pub mean_vector_norm: f64,
    pub centered: bool,
}

pub fn diagnostics(
    m: &EmbeddingMatrix,
    correlation_sample: usize,
    seed: RandomSeed,
) -> Result<DiagnosticsReport> {
    let n = m.n_items();
    let d = m.dim();
    if n < 4 {
        return Err(Error::InvalidParameter(format!(
            "diagnostics need at least 4 items, got {n}"
        )));
    }
    let columns: Vec<Vec<f64>> = (0..d).into_par_iter().map(|j| m.column(j)).collect();
    let per_dimension_moments: Vec<Option<MomentSet>> = columns
        .par_iter()
        .map(|c| match estimate_moments(c) {
            Ok(ms) => Ok(Some(ms)),
            Err(Error::Degenerate(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let degenerate_dimensions: Vec<usize> = per_dimension_moments
        .iter()
        .enumerate()
        .filter_map(|(j, ms)| ms.is_none().then_some(j))
        .collect();
    let all: Vec<f64> = m.data().iter().map(|&v| v as f64).collect();
    let pooled_moments = estimate_moments(&all)?;

    let means: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().sum::<f64>() / n as f64)
        .collect();
    let mean_vector_norm = means.iter().map(|m| m * m).sum::<f64>().sqrt();
    let tol = 1e-6 * pooled_moments.sd();
    let centered = means.iter().all(|mu| mu.abs() <= tol);

    // standardized columns; degenerate ones are left out of the search
    let z: Vec<Option<Vec<f64>>> = columns
        .par_iter()
        .zip(&per_dimension_moments)
        .map(|(c, ms)| {
            ms.map(|ms| {
                let s = ms.sd() * (n as f64).sqrt();
                c.iter().map(|x| (x - ms.mean()) / s).collect()
            })
        })
        .collect();
    let pairs: Vec<(usize, usize)> = if d <= ALL_PAIRS_MAX_DIM {
        (0..d)
            .flat_map(|a| ((a + 1)..d).map(move |b| (a, b)))
            .collect()
    } else {
        let mut rng = seed.rng();
        (0..correlation_sample)
            .map(|_| {
                let a = rng.random_range(0..d);
                let mut b = rng.random_range(0..d - 1);
                if b >= a {
                    b += 1;
                }
                (a, b)
            })
            .collect()
    };
    let max_abs_offdiag_correlation = pairs
        .par_iter()
        .filter_map(|&(a, b)| match (&z[a], &z[b]) {
            (Some(x), Some(y)) => {
                let r: f64 = x.iter().zip(y).map(|(p, q)| p * q).sum();
                Some(r.abs().min(1.0))
            }
            _ => None,
        })
        .reduce(|| 0.0, f64::max);

    Ok(DiagnosticsReport {
        n_items: n,
        dim: d,
        per_dimension_moments,
        degenerate_dimensions,
        pooled_moments,
        max_abs_offdiag_correlation,
        correlation_pairs: pairs.len(),
        mean_vector_norm,
        centered,
    })
}
