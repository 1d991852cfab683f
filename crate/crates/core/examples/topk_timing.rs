//! Times exact top-k queries: `topk_timing [N] [d] [queries]`.

use std::time::Instant;

use avgemb::evaluator::{top_k, top_k_serial};
use avgemb::stats_core::{sample_matrix, sample_values, DistributionSpec, RandomSeed};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(Ok(2_000_000), |s| s.parse())?;
    let d: usize = args.next().map_or(Ok(128), |s| s.parse())?;
    let queries: usize = args.next().map_or(Ok(10), |s| s.parse())?;
    let spec = DistributionSpec::standard_normal();
    let m = sample_matrix(&spec, n, d, RandomSeed::new(1))?;
    for q in 0..queries {
        let z = sample_values(&spec, d, RandomSeed::new(2).derive(q as u64));
        let t = Instant::now();
        let a = top_k_serial(&z, &m, 50)?;
        let serial = t.elapsed();
        let t = Instant::now();
        let b = top_k(&z, &m, 50)?;
        let parallel = t.elapsed();
        assert_eq!(a, b);
        println!("query {q}: serial {serial:?} parallel {parallel:?}");
    }
    Ok(())
}
