use rayon::prelude::*;

use crate::matrix::EmbeddingMatrix;
use crate::stats_core::{sample_matrix, DistributionSpec, RandomSeed};
use crate::Result;

/// Per-dimension means, accumulated in f64 relative to the first row so a
/// constant dimension yields its value exactly.
pub fn column_means(m: &EmbeddingMatrix) -> Vec<f64> {
    let first = m.row(0);
    let mut acc = vec![0.0f64; m.dim()];
    for row in m.rows().skip(1) {
        for ((a, &v), &f) in acc.iter_mut().zip(row).zip(first) {
            *a += v as f64 - f as f64;
        }
    }
    let n = m.n_items() as f64;
    acc.iter()
        .zip(first)
        .map(|(a, &f)| f as f64 + a / n)
        .collect()
}

/// Subtracts each dimension's mean across items. Ids and origin are kept.
pub fn center(m: &EmbeddingMatrix) -> EmbeddingMatrix {
    let means = column_means(m);
    let d = m.dim();
    let mut data = m.data().to_vec();
    data.par_chunks_mut(d).for_each(|row| {
        for (v, mu) in row.iter_mut().zip(&means) {
            *v = (*v as f64 - mu) as f32;
        }
    });
    EmbeddingMatrix::from_parts_unchecked(
        m.n_items(),
        d,
        data,
        m.item_ids().map(<[String]>::to_vec),
        m.origin().clone(),
    )
}

/// Synthetic matrix with entries drawn i.i.d. from `spec`. The origin
/// records `(spec, seed)` so the draw can be repeated.
pub fn synth(spec: &DistributionSpec, n: usize, d: usize, seed: RandomSeed) -> Result<EmbeddingMatrix> {
    sample_matrix(spec, n, d, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::MatrixOrigin;

    #[test]
    fn hand_example() {
        let m = EmbeddingMatrix::from_rows(&[[1.0f32, 3.0], [3.0, 5.0]]).unwrap();
        assert_eq!(center(&m).data(), &[-1.0, -1.0, 1.0, 1.0]);
    }

    #[test]
    fn constant_matrix_becomes_zero() {
        let m = EmbeddingMatrix::new(7, 3, vec![0.1; 21]).unwrap();
        assert!(center(&m).data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn centered_means_vanish_and_centering_is_idempotent() {
        let spec = DistributionSpec::normal(3.0, 2.0).unwrap();
        let m = synth(&spec, 500, 6, RandomSeed::new(5)).unwrap();
        let c = center(&m);
        for mu in column_means(&c) {
            assert!(mu.abs() <= 1e-6 * 2.0);
        }
        let cc = center(&c);
        for (a, b) in cc.data().iter().zip(c.data()) {
            assert!((a - b).abs() <= 1e-6);
        }
    }

    #[test]
    fn commutes_with_row_permutation() {
        let m = synth(&DistributionSpec::standard_normal(), 64, 4, RandomSeed::new(2)).unwrap();
        let perm: Vec<usize> = (0..64).rev().collect();
        let permute = |x: &EmbeddingMatrix| {
            let rows: Vec<Vec<f32>> = perm.iter().map(|&i| x.row(i).to_vec()).collect();
            EmbeddingMatrix::from_rows(&rows).unwrap()
        };
        let a = center(&permute(&m));
        let b = permute(&center(&m));
        for (x, y) in a.data().iter().zip(b.data()) {
            assert!((x - y).abs() <= 1e-6);
        }
    }

    #[test]
    fn synth_records_provenance() {
        let spec = DistributionSpec::uniform(-1.0, 1.0).unwrap();
        let m = synth(&spec, 10, 2, RandomSeed::new(77)).unwrap();
        assert_eq!(
            m.origin(),
            &MatrixOrigin::Synthetic { spec, seed: RandomSeed::new(77) }
        );
    }
}
