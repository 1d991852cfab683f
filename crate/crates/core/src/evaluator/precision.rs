use std::collections::HashMap;

use rand::Rng;

use super::knn::{top_k, top_k_serial};
use crate::matrix::EmbeddingMatrix;
use crate::{Error, Result};

/// A k-subset of catalog items, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSample {
    indices: Vec<usize>,
}

impl SubsetSample {
    pub fn new(mut indices: Vec<usize>, n_items: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidParameter("subset must not be empty".into()));
        }
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(format!("duplicate subset index {}", w[0])));
        }
        if let Some(&last) = indices.last() {
            if last >= n_items {
                return Err(Error::Domain(format!(
                    "subset index {last} out of range for {n_items} items"
                )));
            }
        }
        Ok(Self { indices })
    }

    /// Uniform k-subset of `0..n` by partial Fisher–Yates. Displaced slots
    /// are tracked sparsely, so cost is O(k) regardless of `n`.
    pub fn sample<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::Domain(format!("cannot draw {k} of {n} items")));
        }
        let mut moved: HashMap<usize, usize> = HashMap::with_capacity(2 * k);
        let mut picked = Vec::with_capacity(k);
        for i in 0..k {
            let j = rng.random_range(i..n);
            let at_i = moved.get(&i).copied().unwrap_or(i);
            let at_j = moved.get(&j).copied().unwrap_or(j);
            moved.insert(j, at_i);
            picked.push(at_j);
        }
        picked.sort_unstable();
        Ok(Self { indices: picked })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }
}

/// Arithmetic mean of the subset's rows.
pub fn centroid(m: &EmbeddingMatrix, s: &SubsetSample) -> Result<Vec<f64>> {
    if s.is_empty() {
        return Err(Error::InvalidParameter("centroid of an empty subset".into()));
    }
    if let Some(&last) = s.indices().last() {
        if last >= m.n_items() {
            return Err(Error::Domain(format!(
                "subset index {last} out of range for {} items",
                m.n_items()
            )));
        }
    }
    let mut acc = vec![0.0f64; m.dim()];
    for &i in s.indices() {
        for (a, &v) in acc.iter_mut().zip(m.row(i)) {
            *a += v as f64;
        }
    }
    let k = s.len() as f64;
    acc.iter_mut().for_each(|a| *a /= k);
    Ok(acc)
}

/// Number of subset members among the top-|s| neighbors of its centroid.
/// The whole catalog, members included, is searched.
pub fn precision_hits(m: &EmbeddingMatrix, s: &SubsetSample) -> Result<usize> {
    let c = centroid(m, s)?;
    let top = top_k(&c, m, s.len())?;
    Ok(top.iter().filter(|&&i| s.contains(i)).count())
}

pub(crate) fn precision_hits_serial(m: &EmbeddingMatrix, s: &SubsetSample) -> Result<usize> {
    let c = centroid(m, s)?;
    let top = top_k_serial(&c, m, s.len())?;
    Ok(top.iter().filter(|&&i| s.contains(i)).count())
}

/// |top_k(centroid) ∩ subset| / k.
pub fn precision_k(m: &EmbeddingMatrix, s: &SubsetSample) -> Result<f64> {
    Ok(precision_hits(m, s)? as f64 / s.len() as f64)
}
