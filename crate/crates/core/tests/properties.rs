use proptest::prelude::*;

use avgemb::analytic::{prob_in_beats_out, prob_in_beats_out_from_diff, prob_out_beats_in};
use avgemb::evaluator::{centroid, precision_k, top_k, top_k_serial, SubsetSample};
use avgemb::stats_core::{erf, erfc, MomentSet};
use avgemb::EmbeddingMatrix;

fn matrix(n: usize, d: usize) -> impl Strategy<Value = EmbeddingMatrix> {
    prop::collection::vec(-4.0f32..4.0, n * d).prop_map(move |v| EmbeddingMatrix::new(n, d, v).unwrap())
}

fn naive_top_k(q: &[f64], m: &EmbeddingMatrix, k: usize) -> Vec<usize> {
    let mut s: Vec<(f64, usize)> = m
        .rows()
        .enumerate()
        .map(|(i, r)| (r.iter().zip(q).map(|(&a, b)| a as f64 * b).sum(), i))
        .collect();
    s.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    s.truncate(k);
    s.into_iter().map(|x| x.1).collect()
}

fn feasible() -> impl Strategy<Value = MomentSet> {
    (-2.0f64..2.0, 0.05f64..4.0, -3.0f64..3.0, 0.0f64..10.0)
        .prop_map(|(m, v, g, e)| MomentSet::new(m, v, g, g * g + 1.0 + e).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn top_k_agrees_with_sorting(
        (m, k) in (1usize..60, 1usize..12).prop_flat_map(|(n, d)| (matrix(n, d), 1..=n)),
        seed in any::<u64>(),
    ) {
        let q: Vec<f64> = (0..m.dim()).map(|j| ((seed >> (j % 60)) & 0xff) as f64 / 32.0 - 4.0).collect();
        let expect = naive_top_k(&q, &m, k);
        prop_assert_eq!(top_k_serial(&q, &m, k).unwrap(), expect.clone());
        prop_assert_eq!(top_k(&q, &m, k).unwrap(), expect);
    }

    #[test]
    fn precision_is_invariant_to_positive_scaling(
        m in matrix(30, 6),
        picks in prop::collection::btree_set(0usize..30, 1..8),
        scale in prop::sample::select(vec![0.25f32, 0.5, 2.0, 4.0]),
    ) {
        // powers of two keep every product exact
        let scaled = EmbeddingMatrix::new(30, 6, m.data().iter().map(|v| v * scale).collect()).unwrap();
        let s = SubsetSample::new(picks.into_iter().collect(), 30).unwrap();
        prop_assert_eq!(precision_k(&m, &s).unwrap(), precision_k(&scaled, &s).unwrap());
    }

    #[test]
    fn centroid_ignores_subset_order(m in matrix(20, 5), mut picks in prop::collection::vec(0usize..20, 1..6)) {
        picks.sort_unstable();
        picks.dedup();
        let forward = SubsetSample::new(picks.clone(), 20).unwrap();
        picks.reverse();
        let backward = SubsetSample::new(picks, 20).unwrap();
        prop_assert_eq!(centroid(&m, &forward).unwrap(), centroid(&m, &backward).unwrap());
    }

    #[test]
    fn crossing_probability_is_a_probability(m in feasible(), k in 2usize..2000, d in 1usize..2000) {
        let p = prob_in_beats_out(&m, k, d).unwrap();
        let q = prob_out_beats_in(&m, k, d).unwrap();
        prop_assert!(p > 0.5 && p <= 1.0);
        prop_assert!((0.0..0.5).contains(&q));
        prop_assert!((p + q - 1.0).abs() < 1e-15);
        let via_diff = prob_in_beats_out_from_diff(&m, k, d).unwrap();
        prop_assert!((via_diff - p).abs() < 1e-12, "{} vs {}", via_diff, p);
    }

    #[test]
    fn erf_and_erfc_are_complementary(x in -6.0f64..6.0) {
        prop_assert!((erf(x) + erfc(x) - 1.0).abs() < 4e-16);
        prop_assert!((erf(-x) + erf(x)).abs() < 1e-16);
    }
}
