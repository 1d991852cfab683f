use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::knn::dot;
use crate::matrix::EmbeddingMatrix;
use crate::stats_core::RandomSeed;
use crate::{Error, Result};

const PAIRS_PER_STREAM: usize = 4096;

fn row_f64(m: &EmbeddingMatrix, i: usize) -> Vec<f64> {
    m.row(i).iter().map(|&v| v as f64).collect()
}

/// Inner products of `pairs` uniformly drawn index pairs with i ≠ j.
pub fn similarity_sample(m: &EmbeddingMatrix, pairs: usize, seed: RandomSeed) -> Result<Vec<f64>> {
    let n = m.n_items();
    if n < 2 {
        return Err(Error::Domain("similarity sampling needs at least 2 items".into()));
    }
    let mut out = vec![0.0; pairs];
    out.par_chunks_mut(PAIRS_PER_STREAM)
        .enumerate()
        .for_each(|(block, chunk)| {
            let mut rng = seed.derive(block as u64).rng();
            for o in chunk.iter_mut() {
                let i = rng.random_range(0..n);
                let mut j = rng.random_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                *o = dot(m.row(j), &row_f64(m, i));
            }
        });
    Ok(out)
}

/// Every s(X_i, X_j) for i < j, row-major over i.
pub fn all_pair_similarities(m: &EmbeddingMatrix) -> Vec<f64> {
    let n = m.n_items();
    (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let q = row_f64(m, i);
            ((i + 1)..n).map(move |j| dot(m.row(j), &q)).collect::<Vec<_>>()
        })
        .collect()
}

/// Mean and population variance of all pairwise similarities, with
/// delete-one-item jackknife standard errors. Pairs sharing an item are
/// correlated whenever entries have non-zero mean, so the naive
/// `sd/√pairs` would understate the uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityStats {
    pub pairs: usize,
    pub mean: f64,
    pub variance: f64,
    pub mean_stderr: f64,
    pub variance_stderr: f64,
}

pub fn pairwise_similarity_stats(m: &EmbeddingMatrix) -> Result<SimilarityStats> {
    let n = m.n_items();
    if n < 3 {
        return Err(Error::Domain("jackknife over items needs at least 3 items".into()));
    }
    // per-item sums of s and s² over its n − 1 partners
    let rows: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let q = row_f64(m, i);
            let (mut s1, mut s2) = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let s = dot(m.row(j), &q);
                    s1 += s;
                    s2 += s * s;
                }
            }
            (s1, s2)
        })
        .collect();
    // each pair appears in two rows
    let total1: f64 = rows.iter().map(|r| r.0).sum::<f64>() / 2.0;
    let total2: f64 = rows.iter().map(|r| r.1).sum::<f64>() / 2.0;
    let p = (n * (n - 1) / 2) as f64;
    let mean = total1 / p;
    let variance = total2 / p - mean * mean;
    let p_loo = p - (n - 1) as f64;
    let loo: Vec<(f64, f64)> = rows
        .iter()
        .map(|&(r1, r2)| {
            let mu = (total1 - r1) / p_loo;
            (mu, (total2 - r2) / p_loo - mu * mu)
        })
        .collect();
    let nf = n as f64;
    let jack = |pick: fn(&(f64, f64)) -> f64| {
        let avg = loo.iter().map(pick).sum::<f64>() / nf;
        ((nf - 1.0) / nf * loo.iter().map(|v| (pick(v) - avg).powi(2)).sum::<f64>()).sqrt()
    };
    Ok(SimilarityStats {
        pairs: p as usize,
        mean,
        variance,
        mean_stderr: jack(|v| v.0),
        variance_stderr: jack(|v| v.1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats_core::{sample_matrix, DistributionSpec};

    #[test]
    fn zero_matrix_gives_zero_similarities() {
        let m = EmbeddingMatrix::new(10, 4, vec![0.0; 40]).unwrap();
        assert!(similarity_sample(&m, 100, RandomSeed::new(1)).unwrap().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn needs_two_items() {
        let m = EmbeddingMatrix::new(1, 4, vec![0.0; 4]).unwrap();
        assert!(similarity_sample(&m, 1, RandomSeed::new(1)).is_err());
    }

    #[test]
    fn all_pairs_count_and_stats_agree() {
        let m = sample_matrix(&DistributionSpec::normal(0.5, 1.0).unwrap(), 40, 8, RandomSeed::new(6)).unwrap();
        let all = all_pair_similarities(&m);
        assert_eq!(all.len(), 40 * 39 / 2);
        let stats = pairwise_similarity_stats(&m).unwrap();
        let mean = all.iter().sum::<f64>() / all.len() as f64;
        let var = all.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / all.len() as f64;
        assert!((stats.mean - mean).abs() < 1e-12);
        assert!((stats.variance - var).abs() < 1e-9);
        assert!(stats.mean_stderr > 0.0 && stats.variance_stderr > 0.0);
    }

    #[test]
    fn sample_deterministic() {
        let m = sample_matrix(&DistributionSpec::standard_normal(), 100, 8, RandomSeed::new(6)).unwrap();
        let a = similarity_sample(&m, 10_000, RandomSeed::new(3)).unwrap();
        let b = similarity_sample(&m, 10_000, RandomSeed::new(3)).unwrap();
        assert_eq!(a, b);
    }
}
