use avgemb::datasets::{diagnostics, synth};
use avgemb::stats_core::{DistributionSpec, MomentStandardErrors, RandomSeed};

#[test]
fn diagnostics_recover_every_builtin_distribution() {
    let n = 20_000;
    let specs = [
        DistributionSpec::standard_normal(),
        DistributionSpec::shifted_normal(0.5, 1.0).unwrap(),
        DistributionSpec::uniform(-1.0, 1.0).unwrap(),
        DistributionSpec::uniform(0.0, 1.0).unwrap(),
        DistributionSpec::rademacher(),
        DistributionSpec::beta(2.0, 2.0).unwrap(),
        DistributionSpec::beta(2.0, 5.0).unwrap(),
    ];
    for (si, spec) in specs.iter().enumerate() {
        let m = synth(spec, n, 6, RandomSeed::new(100 + si as u64)).unwrap();
        let r = diagnostics(&m, 0, RandomSeed::new(0)).unwrap();
        let truth = spec.moments();
        let higher = [5, 6, 7, 8].map(|k| spec.standardized_central_moment(k));
        let se = MomentStandardErrors::delta_method(truth, higher, n);
        // Rademacher kurtosis has zero first-order variance: with sample mean
        // a it equals about 1 + 4a², so allow 4·25/n for |a| up to 5/√n.
        let slack = 100.0 / n as f64;
        for (j, est) in r.per_dimension_moments.iter().enumerate() {
            let est = est.expect("no degenerate dimension");
            let checks = [
                ("mean", est.mean(), truth.mean(), se.mean),
                ("variance", est.variance(), truth.variance(), se.variance),
                ("skewness", est.skewness(), truth.skewness(), se.skewness),
                ("kurtosis", est.kurtosis(), truth.kurtosis(), se.kurtosis),
            ];
            for (name, got, want, s) in checks {
                assert!(
                    (got - want).abs() <= 5.0 * s + slack,
                    "{spec} dim {j} {name}: {got} vs {want} (se {s})"
                );
            }
        }
        assert!(r.max_abs_offdiag_correlation <= 5.0 / (n as f64).sqrt(), "{spec}");
    }
}
