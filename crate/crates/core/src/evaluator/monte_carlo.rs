use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::curve::{ConsistencyCurve, Provenance};
use super::precision::{precision_hits_serial, SubsetSample};
use crate::matrix::{EmbeddingMatrix, MatrixOrigin};
use crate::stats_core::RandomSeed;
use crate::{Error, Result};

/// Monte Carlo estimate of Consistency_k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub score: f64,
    pub stderr: f64,
    pub trials: usize,
}

/// Mean precision over `trials` uniform k-subsets.
///
/// Trial `t` draws its subset from `seed.derive(t)`. Precision is a count of
/// hits over k, so the sums are kept as integers and the estimate does not
/// depend on how trials are scheduled across threads.
pub fn consistency_mc(
    m: &EmbeddingMatrix,
    k: usize,
    trials: usize,
    seed: RandomSeed,
) -> Result<McEstimate> {
    if k == 0 || k > m.n_items() {
        return Err(Error::Domain(format!(
            "k must lie in 1..={}, got {k}",
            m.n_items()
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let (hits, hits_sq) = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed.derive(t as u64).rng();
            let subset = SubsetSample::sample(m.n_items(), k, &mut rng)?;
            let h = precision_hits_serial(m, &subset)? as u128;
            Ok((h, h * h))
        })
        .try_reduce(|| (0u128, 0u128), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    let n = trials as f64;
    let kf = k as f64;
    let score = hits as f64 / (n * kf);
    let stderr = if trials > 1 {
        // Σ(h − h̄)² = Σh² − (Σh)²/n, exact in integers up to the final division
        let ss = hits_sq as f64 - (hits as f64) * (hits as f64) / n;
        (ss.max(0.0) / (n - 1.0)).sqrt() / kf / n.sqrt()
    } else {
        0.0
    };
    Ok(McEstimate {
        score: score.clamp(0.0, 1.0),
        stderr,
        trials,
    })
}

/// [`consistency_mc`] for each k, using sub-stream `seed.derive(k)`.
pub fn consistency_curve_mc(
    m: &EmbeddingMatrix,
    k_values: &[usize],
    trials: usize,
    seed: RandomSeed,
) -> Result<ConsistencyCurve> {
    let estimates = k_values
        .iter()
        .map(|&k| consistency_mc(m, k, trials, seed.derive(k as u64)))
        .collect::<Result<Vec<_>>>()?;
    let (provenance, label) = match m.origin() {
        MatrixOrigin::Synthetic { spec, .. } => (
            Provenance::Simulated,
            format!("simulated {spec} N={} d={}", m.n_items(), m.dim()),
        ),
        MatrixOrigin::File { path } => (
            Provenance::Empirical,
            format!("empirical {path} N={} d={}", m.n_items(), m.dim()),
        ),
        MatrixOrigin::InMemory => (
            Provenance::Empirical,
            format!("empirical N={} d={}", m.n_items(), m.dim()),
        ),
    };
    ConsistencyCurve::new(
        label,
        provenance,
        k_values.to_vec(),
        estimates.iter().map(|e| e.score).collect(),
        estimates.iter().map(|e| e.stderr).collect(),
        trials,
        Some(seed),
    )
}

/// Consistency_k as the exact average of precision over every k-subset.
/// Only feasible for tiny catalogs; used as an oracle.
pub fn consistency_exhaustive(m: &EmbeddingMatrix, k: usize) -> Result<f64> {
    let n = m.n_items();
    if k == 0 || k > n {
        return Err(Error::Domain(format!("k must lie in 1..={n}, got {k}")));
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let (mut hits, mut count) = (0u64, 0u64);
    loop {
        let s = SubsetSample::new(idx.clone(), n)?;
        hits += precision_hits_serial(m, &s)? as u64;
        count += 1;
        // next combination in lexicographic order
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    Ok(hits as f64 / (count as f64 * k as f64))
}
