//! Command-line front end. Each subcommand builds a [`RunReport`] and the
//! report is then rendered to JSON, CSV and SVG.

mod commands;
pub mod output;
pub mod render;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analytic::QuadratureConfig;
use crate::datasets::{EmbeddingFormat, DEFAULT_CORRELATION_SAMPLE};
use crate::stats_core::DistributionSpec;
use crate::{Error, Result};

pub use report::{CurveDelta, RunReport, SimilarityHistogram, StageTiming, REPORT_VERSION};

#[derive(Debug, Clone, Parser)]
#[command(name = "avgemb", version, about = "How well does the average of item embeddings retrieve its own items?")]
pub struct Cli {
    /// Root seed; every random stream of the run is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "AVGEMB_THREADS")]
    pub threads: Option<usize>,

    /// Output directory. Without it the JSON report goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, value_delimiter = ',', default_values_t = [OutputFormat::Json, OutputFormat::Csv, OutputFormat::Svg])]
    pub format: Vec<OutputFormat>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Closed-form consistency curve for zero-mean i.i.d. entries.
    Analytic(AnalyticArgs),
    /// Monte Carlo consistency on a synthetic matrix.
    Simulate(SimulateArgs),
    /// Monte Carlo consistency on an embedding file.
    Empirical(EmpiricalArgs),
    /// Pairwise similarity histograms against their normal approximation.
    Histogram(HistogramArgs),
    /// Merge curves from earlier reports and report per-k gaps.
    Compare(CompareArgs),
}

/// Subset sizes: a comma list of values and inclusive ranges, e.g.
/// `2..50` or `2,5,10..12`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KGrid(pub Vec<usize>);

impl std::str::FromStr for KGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad k grid {s:?}; use e.g. 2..50 or 2,5,10"));
        let mut ks = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.split_once("..") {
                Some((a, b)) => {
                    let a: usize = a.trim().parse().map_err(|_| bad())?;
                    let b: usize = b.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
                    if a > b {
                        return Err(bad());
                    }
                    ks.extend(a..=b);
                }
                None => ks.push(part.parse().map_err(|_| bad())?),
            }
        }
        if ks.is_empty() {
            return Err(bad());
        }
        ks.sort_unstable();
        ks.dedup();
        Ok(Self(ks))
    }
}

#[derive(Debug, Clone, Args)]
pub struct QuadArgs {
    /// Relative tolerance of each p⁺ integral.
    #[arg(long, default_value_t = QuadratureConfig::default().rel_tol)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = QuadratureConfig::default().abs_tol)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = QuadratureConfig::default().max_depth)]
    pub max_depth: u32,
    /// Integration half-width in in-subset standard deviations.
    #[arg(long, default_value_t = QuadratureConfig::default().half_width_sds)]
    pub half_width: f64,
}

impl QuadArgs {
    pub fn config(&self) -> QuadratureConfig {
        QuadratureConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_depth: self.max_depth,
            half_width_sds: self.half_width,
            ..QuadratureConfig::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct AnalyticArgs {
    /// Entry distribution, e.g. normal, uniform(-1,1), rademacher.
    #[arg(long, default_value = "normal")]
    pub dist: DistributionSpec,
    /// Override the distribution's mean.
    #[arg(long, allow_negative_numbers = true)]
    pub mean: Option<f64>,
    #[arg(long)]
    pub variance: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub skewness: Option<f64>,
    /// Plain kurtosis (3 for a normal).
    #[arg(long)]
    pub kurtosis: Option<f64>,
    #[arg(long = "d", default_value_t = 128)]
    pub d: usize,
    #[arg(long = "N", visible_alias = "items", default_value_t = 1000)]
    pub n: usize,
    #[arg(long = "k", default_value = "2..50")]
    pub k: KGrid,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value = "normal")]
    pub dist: DistributionSpec,
    #[arg(long = "d", default_value_t = 128)]
    pub d: usize,
    #[arg(long = "N", visible_alias = "items", default_value_t = 1000)]
    pub n: usize,
    #[arg(long = "k", default_value = "2..50")]
    pub k: KGrid,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Also compute the analytic curve and per-k differences.
    #[arg(long)]
    pub with_analytic: bool,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EmpiricalArgs {
    /// EMB1 or csv embedding file.
    pub path: PathBuf,
    /// File format; guessed from the extension when omitted.
    #[arg(long)]
    pub input_format: Option<EmbeddingFormat>,
    /// Skip the first csv line.
    #[arg(long)]
    pub csv_header: bool,
    #[arg(long = "k", default_value = "2..50")]
    pub k: KGrid,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Subtract per-dimension means before evaluating (the default).
    #[arg(long, overrides_with = "no_center")]
    pub center: bool,
    #[arg(long, overrides_with = "center")]
    pub no_center: bool,
    /// Add a standard normal matrix of the same shape as a baseline.
    #[arg(long)]
    pub baseline_normal: bool,
    /// Dimension pairs sampled for the correlation check when d > 256.
    #[arg(long, default_value_t = DEFAULT_CORRELATION_SAMPLE)]
    pub correlation_sample: usize,
}

impl EmpiricalArgs {
    pub fn centering(&self) -> bool {
        !self.no_center
    }
}

#[derive(Debug, Clone, Args)]
pub struct HistogramArgs {
    /// Entry distribution; repeat for several rows of panels.
    #[arg(long = "dist", default_value = "normal(0.5,1)")]
    pub dists: Vec<DistributionSpec>,
    #[arg(long = "d", value_delimiter = ',', default_values_t = [2usize, 10, 32, 64, 128])]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub vectors: usize,
    #[arg(long, default_value_t = 40)]
    pub bins: usize,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// report.json files or directories containing one.
    #[arg(required = true)]
    pub reports: Vec<PathBuf>,
}

/// What a finished command produced.
#[derive(Debug)]
pub struct Outcome {
    pub report: RunReport,
    pub written: Vec<PathBuf>,
}

/// Runs the command inside a pool of the requested size without writing
/// anything.
pub fn run(cli: &Cli) -> Result<RunReport> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Error::InvalidParameter("--threads must be >= 1".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start thread pool: {e}")))?;
    pool.install(|| commands::dispatch(cli))
}

/// Runs the command and writes the requested outputs under `--out`.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let report = run(cli)?;
    let written = match &cli.out {
        Some(dir) => output::write_outputs(&report, dir, &cli.format)?,
        None => Vec::new(),
    };
    Ok(Outcome { report, written })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_grid_parsing() {
        assert_eq!("2..5".parse::<KGrid>().unwrap().0, vec![2, 3, 4, 5]);
        assert_eq!("10, 2,5..6,5".parse::<KGrid>().unwrap().0, vec![2, 5, 6, 10]);
        assert_eq!("2..=3".parse::<KGrid>().unwrap().0, vec![2, 3]);
        assert!("5..2".parse::<KGrid>().is_err());
        assert!("".parse::<KGrid>().is_err());
        assert!("a".parse::<KGrid>().is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_typical_invocations() {
        let c = Cli::try_parse_from(["avgemb", "analytic", "--dist", "normal", "--d", "128", "--N", "1000", "--k", "2..50"]).unwrap();
        match c.command {
            Command::Analytic(a) => {
                assert_eq!((a.d, a.n, a.k.0.len()), (128, 1000, 49));
            }
            _ => panic!(),
        }
        let c = Cli::try_parse_from(["avgemb", "--format", "csv,json", "histogram", "--d", "2,10"]).unwrap();
        assert_eq!(c.format, vec![OutputFormat::Csv, OutputFormat::Json]);
        let c = Cli::try_parse_from(["avgemb", "empirical", "x.emb", "--no-center"]).unwrap();
        match c.command {
            Command::Empirical(e) => assert!(!e.centering()),
            _ => panic!(),
        }
    }
}
