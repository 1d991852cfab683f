//! Exact inner-product top-k over an [`EmbeddingMatrix`].
//!
//! Scores are accumulated in f64 from f32 storage. Rows are scanned in
//! blocks; each block scores into a small buffer and offers candidates to a
//! bounded heap, so memory stays O(k + block) regardless of catalog size.
//! Ties are broken by ascending item index, which makes the selected set a
//! pure function of the data and the query.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::matrix::EmbeddingMatrix;
use crate::{Error, Result};

/// Rows scored per buffer fill.
const SCORE_BLOCK: usize = 1024;
/// Rows handed to one parallel task.
const PARALLEL_BLOCK: usize = 64 * 1024;

const LANES: usize = 8;
/// How far ahead of the current row the AVX2 kernel prefetches.
const PREFETCH_FLOATS: usize = 1024;

#[inline(always)]
fn dot_lanes(row: &[f32], query: &[f64]) -> f64 {
    let mut acc = [0.0f64; LANES];
    let mut r = row.chunks_exact(LANES);
    let mut q = query.chunks_exact(LANES);
    for (rc, qc) in (&mut r).zip(&mut q) {
        for l in 0..LANES {
            acc[l] += rc[l] as f64 * qc[l];
        }
    }
    for (l, (a, b)) in r.remainder().iter().zip(q.remainder()).enumerate() {
        acc[l] += *a as f64 * *b;
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7]))
}

/// Four rows at once: independent accumulator chains hide add latency.
/// Each row still sees exactly the operation order of [`dot_lanes`].
#[inline(always)]
fn dot4_lanes(rows: [&[f32]; 4], query: &[f64]) -> [f64; 4] {
    let mut acc = [[0.0f64; LANES]; 4];
    let full = query.len() / LANES * LANES;
    let mut j = 0;
    while j < full {
        let qc = &query[j..j + LANES];
        for (a, row) in acc.iter_mut().zip(&rows) {
            let rc = &row[j..j + LANES];
            for l in 0..LANES {
                a[l] += rc[l] as f64 * qc[l];
            }
        }
        j += LANES;
    }
    for (a, row) in acc.iter_mut().zip(&rows) {
        for (l, (x, q)) in row[full..].iter().zip(&query[full..]).enumerate() {
            a[l] += *x as f64 * *q;
        }
    }
    acc.map(|a| ((a[0] + a[4]) + (a[1] + a[5])) + ((a[2] + a[6]) + (a[3] + a[7])))
}

#[inline(always)]
fn score_rows_generic(rows: &[f32], dim: usize, query: &[f64], out: &mut [f64]) {
    let mut quads = rows.chunks_exact(4 * dim);
    let mut outs = out.chunks_exact_mut(4);
    for (block, o) in (&mut quads).zip(&mut outs) {
        let (r0, rest) = block.split_at(dim);
        let (r1, rest) = rest.split_at(dim);
        let (r2, r3) = rest.split_at(dim);
        o.copy_from_slice(&dot4_lanes([r0, r1, r2, r3], query));
    }
    for (o, row) in outs.into_remainder().iter_mut().zip(quads.remainder().chunks_exact(dim)) {
        *o = dot_lanes(row, query);
    }
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn score_rows_avx2(rows: &[f32], dim: usize, query: &[f64], out: &mut [f64]) {
    use std::arch::x86_64::*;

    // Lanes 0..4 live in `lo`, 4..8 in `hi`; separate mul and add (no FMA)
    // keep the rounding identical to `dot_lanes`.
    #[inline(always)]
    unsafe fn finish(lo: __m256d, hi: __m256d) -> f64 {
        let mut a = [0.0f64; LANES];
        _mm256_storeu_pd(a.as_mut_ptr(), lo);
        _mm256_storeu_pd(a.as_mut_ptr().wrapping_add(4), hi);
        ((a[0] + a[4]) + (a[1] + a[5])) + ((a[2] + a[6]) + (a[3] + a[7]))
    }

    let full = dim / LANES * LANES;
    if full != dim {
        return score_rows_generic(rows, dim, query, out);
    }
    let mut quads = rows.chunks_exact(4 * dim);
    let mut outs = out.chunks_exact_mut(4);
    // Iterators only in the hot loop: no index arithmetic to check.
    for (block, o) in (&mut quads).zip(&mut outs) {
        let (r0, rest) = block.split_at(dim);
        let (r1, rest) = rest.split_at(dim);
        let (r2, r3) = rest.split_at(dim);
        let mut lo = [_mm256_setzero_pd(); 4];
        let mut hi = [_mm256_setzero_pd(); 4];
        let chunks = query
            .chunks_exact(LANES)
            .zip(r0.chunks_exact(LANES))
            .zip(r1.chunks_exact(LANES))
            .zip(r2.chunks_exact(LANES))
            .zip(r3.chunks_exact(LANES));
        for ((((qc, c0), c1), c2), c3) in chunks {
            let qlo = _mm256_loadu_pd(qc.as_ptr());
            let qhi = _mm256_loadu_pd(qc.as_ptr().wrapping_add(4));
            for ((l, h), c) in lo.iter_mut().zip(hi.iter_mut()).zip([c0, c1, c2, c3]) {
                let x = c.as_ptr();
                _mm_prefetch::<_MM_HINT_T0>(x.wrapping_add(PREFETCH_FLOATS) as *const i8);
                let xlo = _mm256_cvtps_pd(_mm_loadu_ps(x));
                let xhi = _mm256_cvtps_pd(_mm_loadu_ps(x.wrapping_add(4)));
                *l = _mm256_add_pd(*l, _mm256_mul_pd(xlo, qlo));
                *h = _mm256_add_pd(*h, _mm256_mul_pd(xhi, qhi));
            }
        }
        for ((o, l), h) in o.iter_mut().zip(lo).zip(hi) {
            *o = finish(l, h);
        }
    }
    for (o, row) in outs.into_remainder().iter_mut().zip(quads.remainder().chunks_exact(dim)) {
        *o = dot_lanes(row, query);
    }
}

fn score_rows_portable(rows: &[f32], dim: usize, query: &[f64], out: &mut [f64]) {
    score_rows_generic(rows, dim, query, out)
}

/// Scores a contiguous run of rows. The lane-wise summation order is the same
/// on every path, so results are bit-identical with or without AVX2.
fn score_rows(rows: &[f32], dim: usize, query: &[f64], out: &mut [f64]) {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("avx2") {
            // SAFETY: the feature was detected at runtime.
            unsafe { score_rows_avx2(rows, dim, query, out) };
            return;
        }
    }
    score_rows_portable(rows, dim, query, out)
}

/// Inner product of an f32 row with an f64 query, accumulated in f64.
pub fn dot(row: &[f32], query: &[f64]) -> f64 {
    dot_lanes(row, query)
}

/// A scored item. Ordered so that the *worse* candidate compares greater,
/// which puts the weakest kept item at the top of a max-heap.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    score: f64,
    index: usize,
}

impl Candidate {
    #[inline]
    fn beats(&self, other: &Candidate) -> bool {
        match self.score.total_cmp(&other.score) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => self.index < other.index,
        }
    }
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .score
            .total_cmp(&self.score)
            .then(self.index.cmp(&other.index))
    }
}

struct TopK {
    k: usize,
    heap: BinaryHeap<Candidate>,
}

impl TopK {
    fn new(k: usize) -> Self {
        Self {
            k,
            heap: BinaryHeap::with_capacity(k + 1),
        }
    }

    #[inline]
    fn offer(&mut self, c: Candidate) {
        if self.heap.len() < self.k {
            self.heap.push(c);
        } else if let Some(mut worst) = self.heap.peek_mut() {
            if c.beats(&worst) {
                *worst = c;
            }
        }
    }

    /// Score a kept item must beat to enter, once full.
    #[inline]
    fn threshold(&self) -> f64 {
        if self.heap.len() < self.k {
            f64::NEG_INFINITY
        } else {
            self.heap.peek().map_or(f64::NEG_INFINITY, |c| c.score)
        }
    }

    fn merge(mut self, other: TopK) -> TopK {
        for c in other.heap {
            self.offer(c);
        }
        self
    }

    fn into_sorted(self) -> Vec<Candidate> {
        // ascending by Ord = best first
        self.heap.into_sorted_vec()
    }
}

fn scan(m: &EmbeddingMatrix, query: &[f64], k: usize, start: usize, end: usize) -> TopK {
    let dim = m.dim();
    let mut top = TopK::new(k);
    let mut buf = [0.0f64; SCORE_BLOCK];
    let mut row = start;
    while row < end {
        let stop = (row + SCORE_BLOCK).min(end);
        let scores = &mut buf[..stop - row];
        score_rows(&m.data()[row * dim..stop * dim], dim, query, scores);
        let mut threshold = top.threshold();
        for (off, &score) in scores.iter().enumerate() {
            // equal scores still need the index comparison
            if score >= threshold {
                top.offer(Candidate {
                    score,
                    index: row + off,
                });
                threshold = top.threshold();
            }
        }
        row = stop;
    }
    top
}

fn check(query: &[f64], m: &EmbeddingMatrix, k: usize) -> Result<()> {
    if query.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: query.len(),
        });
    }
    if k == 0 || k > m.n_items() {
        return Err(Error::Domain(format!(
            "k must lie in 1..={}, got {k}",
            m.n_items()
        )));
    }
    Ok(())
}

/// Indices of the `k` items with the largest inner product with `query`,
/// best first; ties go to the lower index. Single-threaded.
pub fn top_k_serial(query: &[f64], m: &EmbeddingMatrix, k: usize) -> Result<Vec<usize>> {
    check(query, m, k)?;
    Ok(scan(m, query, k, 0, m.n_items())
        .into_sorted()
        .into_iter()
        .map(|c| c.index)
        .collect())
}

/// Same result as [`top_k_serial`], with catalog blocks scanned in parallel.
pub fn top_k(query: &[f64], m: &EmbeddingMatrix, k: usize) -> Result<Vec<usize>> {
    check(query, m, k)?;
    let n = m.n_items();
    if n <= PARALLEL_BLOCK {
        return top_k_serial(query, m, k);
    }
    let blocks = n.div_ceil(PARALLEL_BLOCK);
    let merged = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * PARALLEL_BLOCK;
            scan(m, query, k, start, (start + PARALLEL_BLOCK).min(n))
        })
        .reduce(|| TopK::new(k), TopK::merge);
    Ok(merged.into_sorted().into_iter().map(|c| c.index).collect())
}

/// Every inner product of `query` with the catalog, in item order.
pub fn all_scores(query: &[f64], m: &EmbeddingMatrix) -> Result<Vec<f64>> {
    if query.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: query.len(),
        });
    }
    let mut out = vec![0.0; m.n_items()];
    score_rows(m.data(), m.dim(), query, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats_core::{sample_matrix, sample_values, DistributionSpec, RandomSeed};

    fn naive(query: &[f64], m: &EmbeddingMatrix, k: usize) -> Vec<usize> {
        let mut scored: Vec<(f64, usize)> = (0..m.n_items())
            .map(|i| {
                let s: f64 = m.row(i).iter().zip(query).map(|(a, b)| *a as f64 * b).sum();
                (s, i)
            })
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        scored.truncate(k);
        scored.into_iter().map(|(_, i)| i).collect()
    }

    #[test]
    fn all_items_when_k_is_n() {
        let m = sample_matrix(&DistributionSpec::standard_normal(), 30, 5, RandomSeed::new(2)).unwrap();
        let q = vec![0.1, -0.2, 0.3, 0.0, 1.0];
        let mut got = top_k(&q, &m, 30).unwrap();
        got.sort_unstable();
        assert_eq!(got, (0..30).collect::<Vec<_>>());
    }

    #[test]
    fn axis_query_picks_axis() {
        let n = 6;
        let rows: Vec<Vec<f32>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let m = EmbeddingMatrix::from_rows(&rows).unwrap();
        let mut q = vec![0.0; n];
        q[3] = 1.0;
        assert_eq!(top_k(&q, &m, 1).unwrap(), vec![3]);
    }

    #[test]
    fn ties_go_to_lower_index() {
        let m = EmbeddingMatrix::from_rows(&[[1.0f32], [2.0], [2.0], [1.0], [2.0]]).unwrap();
        assert_eq!(top_k(&[1.0], &m, 2).unwrap(), vec![1, 2]);
        assert_eq!(top_k(&[1.0], &m, 4).unwrap(), vec![1, 2, 4, 0]);
        assert_eq!(top_k(&[-1.0], &m, 2).unwrap(), vec![0, 3]);
    }

    #[test]
    fn matches_naive_sort() {
        let m = sample_matrix(&DistributionSpec::standard_normal(), 50, 8, RandomSeed::new(9)).unwrap();
        for t in 0..20u64 {
            let q: Vec<f64> = m.row(t as usize).iter().map(|&v| v as f64 * 0.5 + t as f64 * 0.01).collect();
            for k in [1, 3, 10, 50] {
                assert_eq!(top_k(&q, &m, k).unwrap(), naive(&q, &m, k));
            }
        }
    }

    #[test]
    fn parallel_equals_serial_on_large_catalog() {
        let m = sample_matrix(&DistributionSpec::rademacher(), 200_000, 4, RandomSeed::new(4)).unwrap();
        // Rademacher rows collide constantly, so this exercises tie handling
        let q = vec![1.0, 1.0, -1.0, 0.5];
        assert_eq!(top_k(&q, &m, 40).unwrap(), top_k_serial(&q, &m, 40).unwrap());
        assert_eq!(top_k(&q, &m, 40).unwrap(), naive(&q, &m, 40));
    }

    #[test]
    fn every_kernel_scores_bit_identically() {
        for d in [8usize, 16, 128, 13, 3] {
            let m = sample_matrix(&DistributionSpec::standard_normal(), 23, d, RandomSeed::new(d as u64)).unwrap();
            let q = sample_values(&DistributionSpec::standard_normal(), d, RandomSeed::new(99));
            let single: Vec<u64> = m.rows().map(|r| dot(r, &q).to_bits()).collect();
            let mut generic = vec![0.0; 23];
            score_rows_portable(m.data(), d, &q, &mut generic);
            let mut dispatched = vec![0.0; 23];
            score_rows(m.data(), d, &q, &mut dispatched);
            assert_eq!(generic.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), single);
            assert_eq!(dispatched.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), single);
        }
    }

    #[test]
    fn errors() {
        let m = EmbeddingMatrix::from_rows(&[[1.0f32, 0.0]]).unwrap();
        assert!(matches!(top_k(&[1.0], &m, 1), Err(Error::DimensionMismatch { .. })));
        assert!(top_k(&[1.0, 0.0], &m, 0).is_err());
        assert!(top_k(&[1.0, 0.0], &m, 2).is_err());
    }

    #[test]
    fn odd_dimension_tail() {
        let m = sample_matrix(&DistributionSpec::standard_normal(), 40, 13, RandomSeed::new(1)).unwrap();
        let q: Vec<f64> = (0..13).map(|i| i as f64 - 6.0).collect();
        let s = all_scores(&q, &m).unwrap();
        for i in 0..40 {
            let want: f64 = m.row(i).iter().zip(&q).map(|(a, b)| *a as f64 * b).sum();
            assert!((s[i] - want).abs() < 1e-12);
        }
    }
}
