use rand::distr::Distribution;
use rayon::prelude::*;

use super::{DistributionSpec, RandomSeed};
use crate::matrix::{EmbeddingMatrix, MatrixOrigin};
use crate::{Error, Result};

/// Rows generated from one derived sub-stream.
const ROWS_PER_STREAM: usize = 256;

/// Draws an `n × d` matrix of i.i.d. entries from `spec`.
///
/// Row block `b` always comes from `seed.derive(b)`, so the result is
/// bit-identical whatever the thread count.
pub fn sample_matrix(
    spec: &DistributionSpec,
    n: usize,
    d: usize,
    seed: RandomSeed,
) -> Result<EmbeddingMatrix> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidParameter(format!(
            "sample_matrix needs n >= 1 and d >= 1, got {n}x{d}"
        )));
    }
    let total = n
        .checked_mul(d)
        .ok_or_else(|| Error::InvalidParameter(format!("matrix size {n}x{d} overflows")))?;
    let sampler = spec.sampler();
    let mut data = vec![0f32; total];
    data.par_chunks_mut(ROWS_PER_STREAM * d)
        .enumerate()
        .for_each(|(block, chunk)| {
            let mut rng = seed.derive(block as u64).rng();
            for v in chunk.iter_mut() {
                *v = sampler.sample(&mut rng) as f32;
            }
        });
    Ok(EmbeddingMatrix::from_parts_unchecked(
        n,
        d,
        data,
        None,
        MatrixOrigin::Synthetic { spec: *spec, seed },
    ))
}

/// Draws `count` i.i.d. values in double precision from one stream.
pub fn sample_values(spec: &DistributionSpec, count: usize, seed: RandomSeed) -> Vec<f64> {
    let sampler = spec.sampler();
    let mut rng = seed.rng();
    (0..count).map(|_| sampler.sample(&mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rademacher_support() {
        let m = sample_matrix(&DistributionSpec::rademacher(), 300, 17, RandomSeed::new(1)).unwrap();
        assert!(m.data().iter().all(|&v| v == 1.0 || v == -1.0));
    }

    #[test]
    fn reproducible_bitwise() {
        let spec = DistributionSpec::standard_normal();
        let a = sample_matrix(&spec, 1000, 13, RandomSeed::new(5)).unwrap();
        let b = sample_matrix(&spec, 1000, 13, RandomSeed::new(5)).unwrap();
        assert_eq!(a, b);
        let c = sample_matrix(&spec, 1000, 13, RandomSeed::with_stream(5, 1)).unwrap();
        assert_ne!(a.data(), c.data());
    }

    #[test]
    fn independent_of_thread_count() {
        let spec = DistributionSpec::beta(2.0, 2.0).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let one = pool.install(|| sample_matrix(&spec, 2000, 9, RandomSeed::new(3)).unwrap());
        let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let four = pool4.install(|| sample_matrix(&spec, 2000, 9, RandomSeed::new(3)).unwrap());
        assert_eq!(one, four);
    }

    #[test]
    fn normal_mean_law_of_large_numbers() {
        let m = sample_matrix(&DistributionSpec::standard_normal(), 1000, 128, RandomSeed::new(11))
            .unwrap();
        let n = m.data().len() as f64;
        let mean = m.data().iter().map(|&v| v as f64).sum::<f64>() / n;
        assert!(mean.abs() < 5.0 / n.sqrt());
    }

    #[test]
    fn rejects_empty_shape() {
        let spec = DistributionSpec::standard_normal();
        assert!(sample_matrix(&spec, 0, 3, RandomSeed::new(0)).is_err());
        assert!(sample_matrix(&spec, 3, 0, RandomSeed::new(0)).is_err());
    }
}
