//! Row-major embedding storage shared by every engine.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::stats_core::{DistributionSpec, RandomSeed};
use crate::{Error, Result};

/// Where a matrix came from; decides whether Monte Carlo curves over it are
/// labelled simulated or empirical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatrixOrigin {
    Synthetic { spec: DistributionSpec, seed: RandomSeed },
    File { path: String },
    InMemory,
}

/// N items × d dimensions, single precision, row-major.
///
/// Immutable once built; share it across threads by reference.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    n_items: usize,
    dim: usize,
    data: Vec<f32>,
    item_ids: Option<Vec<String>>,
    origin: MatrixOrigin,
}

impl EmbeddingMatrix {
    pub fn new(n_items: usize, dim: usize, data: Vec<f32>) -> Result<Self> {
        if n_items == 0 || dim == 0 {
            return Err(Error::InvalidParameter(format!(
                "embedding matrix needs at least one item and one dimension, got {n_items}x{dim}"
            )));
        }
        let expected = n_items.checked_mul(dim).ok_or_else(|| {
            Error::InvalidParameter(format!("matrix size {n_items}x{dim} overflows"))
        })?;
        if data.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / dim,
                column: pos % dim,
            });
        }
        Ok(Self {
            n_items,
            dim,
            data,
            item_ids: None,
            origin: MatrixOrigin::InMemory,
        })
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows<R: AsRef<[f32]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::RaggedRow {
                    row: i,
                    expected: dim,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), dim, data)
    }

    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.n_items {
            return Err(Error::DimensionMismatch {
                expected: self.n_items,
                found: ids.len(),
            });
        }
        let mut seen = HashSet::with_capacity(ids.len());
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::InvalidParameter(format!("duplicate item id {id:?}")));
            }
        }
        self.item_ids = Some(ids);
        Ok(self)
    }

    pub fn with_origin(mut self, origin: MatrixOrigin) -> Self {
        self.origin = origin;
        self
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn item_ids(&self) -> Option<&[String]> {
        self.item_ids.as_deref()
    }

    pub fn origin(&self) -> &MatrixOrigin {
        &self.origin
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f32> {
        self.data.chunks_exact(self.dim)
    }

    /// Values of one dimension across all items.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j] as f64).collect()
    }

    pub(crate) fn from_parts_unchecked(
        n_items: usize,
        dim: usize,
        data: Vec<f32>,
        item_ids: Option<Vec<String>>,
        origin: MatrixOrigin,
    ) -> Self {
        debug_assert_eq!(data.len(), n_items * dim);
        Self {
            n_items,
            dim,
            data,
            item_ids,
            origin,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_length_and_non_finite() {
        assert!(EmbeddingMatrix::new(2, 2, vec![0.0; 3]).is_err());
        let err = EmbeddingMatrix::new(2, 2, vec![0.0, 1.0, f32::NAN, 0.0]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { row: 1, column: 0 }));
    }

    #[test]
    fn ids_must_be_unique() {
        let m = EmbeddingMatrix::new(2, 1, vec![1.0, 2.0]).unwrap();
        assert!(m.clone().with_ids(vec!["a".into(), "a".into()]).is_err());
        assert!(m.clone().with_ids(vec!["a".into()]).is_err());
        assert!(m.with_ids(vec!["a".into(), "b".into()]).is_ok());
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = EmbeddingMatrix::from_rows(&[vec![1.0f32, 2.0], vec![3.0]]).unwrap_err();
        assert!(matches!(err, Error::RaggedRow { row: 1, .. }));
    }
}
