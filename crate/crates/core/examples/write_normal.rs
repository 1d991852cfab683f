//! Writes a standard normal EMB1 file: `write_normal <path> <N> <d> [seed]`.

use std::path::Path;

use avgemb::datasets::{synth, write_embeddings, EmbeddingFormat};
use avgemb::stats_core::{DistributionSpec, RandomSeed};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().collect();
    if args.len() < 4 {
        eprintln!("usage: write_normal <path> <N> <d> [seed]");
        std::process::exit(2);
    }
    let n: usize = args[2].parse()?;
    let d: usize = args[3].parse()?;
    let seed: u64 = args.get(4).map_or(Ok(0), |s| s.parse())?;
    let m = synth(&DistributionSpec::standard_normal(), n, d, RandomSeed::new(seed))?;
    let path = Path::new(&args[1]);
    write_embeddings(&m, path, EmbeddingFormat::from_path(path))?;
    Ok(())
}
