use std::time::Instant;

use super::report::{RunReport, SimilarityHistogram, StageTiming};
use super::{AnalyticArgs, Cli, Command, CompareArgs, EmpiricalArgs, HistogramArgs, SimulateArgs};
use crate::analytic::order_stats::CENTERED_TOLERANCE;
use crate::analytic::{self, inner_product_moments, QuadratureConfig};
use crate::datasets::{self, CsvOptions, EmbeddingFormat};
use crate::evaluator::{self, all_pair_similarities, pairwise_similarity_stats, ConsistencyCurve};
use crate::stats_core::{DistributionSpec, MomentSet, RandomSeed};
use crate::{Error, Result};

// Sub-streams of the root seed.
const STREAM_MATRIX: u64 = 0;
const STREAM_TRIALS: u64 = 1;
const STREAM_BASELINE_MATRIX: u64 = 2;
const STREAM_BASELINE_TRIALS: u64 = 3;
const STREAM_DIAGNOSTICS: u64 = 4;
const STREAM_HISTOGRAM: u64 = 5;

struct Stopwatch<'a> {
    report: &'a mut RunReport,
}

impl Stopwatch<'_> {
    fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t0 = Instant::now();
        let out = f()?;
        self.report.timing.push(StageTiming {
            stage: name.to_string(),
            seconds: t0.elapsed().as_secs_f64(),
        });
        Ok(out)
    }
}

pub(super) fn dispatch(cli: &Cli) -> Result<RunReport> {
    let root = RandomSeed::new(cli.seed);
    let mut report = match &cli.command {
        Command::Analytic(a) => analytic_cmd(a)?,
        Command::Simulate(a) => simulate_cmd(a, root)?,
        Command::Empirical(a) => empirical_cmd(a, root)?,
        Command::Histogram(a) => histogram_cmd(a, root)?,
        Command::Compare(a) => compare_cmd(a)?,
    };
    report.param("seed", cli.seed);
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(report)
}

fn quad_params(report: &mut RunReport, q: &QuadratureConfig) {
    report.param("quadrature", q);
}

fn zero_mean_moments(m: &MomentSet, what: &str) -> Result<()> {
    if m.mean().abs() > CENTERED_TOLERANCE * m.sd() {
        return Err(Error::Domain(format!(
            "the analytic consistency formula only holds for zero-mean entries, \
             but {what} has mean {}; center the data or pick a zero-mean distribution",
            m.mean()
        )));
    }
    Ok(())
}

fn analytic_moments(a: &AnalyticArgs) -> Result<MomentSet> {
    let base = a.dist.moments();
    MomentSet::new(
        a.mean.unwrap_or(base.mean()),
        a.variance.unwrap_or(base.variance()),
        a.skewness.unwrap_or(base.skewness()),
        a.kurtosis.unwrap_or(base.kurtosis()),
    )
}

fn analytic_cmd(a: &AnalyticArgs) -> Result<RunReport> {
    let mut report = RunReport::new("analytic");
    let moments = analytic_moments(a)?;
    let what = if a.mean.is_some() { "the requested moments".to_string() } else { a.dist.to_string() };
    zero_mean_moments(&moments, &what)?;
    let quad = a.quad.config();
    quad.validate()?;
    report.param("dist", a.dist.to_string());
    report.param("moments", moments);
    report.param("d", a.d);
    report.param("N", a.n);
    report.param("k", &a.k.0);
    quad_params(&mut report, &quad);
    let (mut curve, breakdowns) = Stopwatch { report: &mut report }
        .stage("analytic", || analytic::consistency_curve(&moments, &a.k.0, a.n, a.d, &quad))?;
    curve.label = format!("analytic {} N={} d={}", a.dist, a.n, a.d);
    report.curves.push(curve);
    report.breakdowns = breakdowns;
    Ok(report)
}

fn simulate_cmd(a: &SimulateArgs, root: RandomSeed) -> Result<RunReport> {
    let mut report = RunReport::new("simulate");
    let quad = a.quad.config();
    report.param("dist", a.dist.to_string());
    report.param("d", a.d);
    report.param("N", a.n);
    report.param("k", &a.k.0);
    report.param("trials", a.trials);
    report.param("with_analytic", a.with_analytic);
    if a.with_analytic {
        zero_mean_moments(a.dist.moments(), &a.dist.to_string())?;
        quad.validate()?;
        quad_params(&mut report, &quad);
    }
    if a.trials == 1 {
        report.warnings.push("trials = 1: standard errors are reported as 0".into());
    }
    let mut sw = Stopwatch { report: &mut report };
    let m = sw.stage("sample", || {
        datasets::synth(&a.dist, a.n, a.d, root.derive(STREAM_MATRIX))
    })?;
    let simulated = sw.stage("simulate", || {
        evaluator::consistency_curve_mc(&m, &a.k.0, a.trials, root.derive(STREAM_TRIALS))
    })?;
    if a.with_analytic {
        let (mut curve, breakdowns) = sw.stage("analytic", || {
            analytic::consistency_curve(a.dist.moments(), &a.k.0, a.n, a.d, &quad)
        })?;
        curve.label = format!("analytic {} N={} d={}", a.dist, a.n, a.d);
        report.curves.push(curve);
        report.breakdowns = breakdowns;
    }
    report.curves.push(simulated);
    report.compute_deltas()?;
    Ok(report)
}

fn empirical_cmd(a: &EmpiricalArgs, root: RandomSeed) -> Result<RunReport> {
    let mut report = RunReport::new("empirical");
    let format = a.input_format.unwrap_or_else(|| EmbeddingFormat::from_path(&a.path));
    report.param("path", a.path.display().to_string());
    report.param("input_format", format);
    report.param("csv_header", a.csv_header);
    report.param("k", &a.k.0);
    report.param("trials", a.trials);
    report.param("center", a.centering());
    report.param("baseline_normal", a.baseline_normal);
    report.param("correlation_sample", a.correlation_sample);
    if a.trials == 1 {
        report.warnings.push("trials = 1: standard errors are reported as 0".into());
    }
    let mut sw = Stopwatch { report: &mut report };
    let raw = sw.stage("load", || {
        datasets::load_embeddings_with(&a.path, format, CsvOptions { header: a.csv_header })
    })?;
    if let Some(&k) = a.k.0.iter().find(|&&k| k > raw.n_items()) {
        return Err(Error::Domain(format!(
            "k = {k} exceeds the {} items in {}",
            raw.n_items(),
            a.path.display()
        )));
    }
    let m = if a.centering() {
        sw.stage("center", || Ok(datasets::center(&raw)))?
    } else {
        raw
    };
    let diag = sw.stage("diagnostics", || {
        datasets::diagnostics(&m, a.correlation_sample, root.derive(STREAM_DIAGNOSTICS))
    })?;
    let mut curve = sw.stage("empirical", || {
        evaluator::consistency_curve_mc(&m, &a.k.0, a.trials, root.derive(STREAM_TRIALS))
    })?;
    if a.centering() {
        curve.label = format!("{} (centered)", curve.label);
    }
    let baseline = if a.baseline_normal {
        let spec = DistributionSpec::standard_normal();
        let b = sw.stage("baseline_sample", || {
            datasets::synth(&spec, m.n_items(), m.dim(), root.derive(STREAM_BASELINE_MATRIX))
        })?;
        let mut c = sw.stage("baseline", || {
            evaluator::consistency_curve_mc(&b, &a.k.0, a.trials, root.derive(STREAM_BASELINE_TRIALS))
        })?;
        c.label = format!("baseline {spec} N={} d={}", b.n_items(), b.dim());
        Some(c)
    } else {
        None
    };
    report.param("N", m.n_items());
    report.param("d", m.dim());
    if !diag.centered && !a.centering() {
        report
            .warnings
            .push("embeddings are not centered; the zero-mean analytic regime does not apply".into());
    }
    if !diag.degenerate_dimensions.is_empty() {
        report.warnings.push(format!(
            "{} dimension(s) have zero variance",
            diag.degenerate_dimensions.len()
        ));
    }
    report.diagnostics = Some(diag);
    report.curves.push(curve);
    report.curves.extend(baseline);
    report.compute_deltas()?;
    Ok(report)
}

fn histogram(spec: &DistributionSpec, d: usize, n: usize, bins: usize, seed: RandomSeed) -> Result<SimilarityHistogram> {
    let m = datasets::synth(spec, n, d, seed)?;
    let sims = all_pair_similarities(&m);
    let empirical = pairwise_similarity_stats(&m)?;
    let overlay = inner_product_moments(spec.moments(), spec.moments(), d)?;
    let lo = sims.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = sims.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        hi = lo + 1.0;
    }
    let width = (hi - lo) / bins as f64;
    let bin_edges: Vec<f64> = (0..=bins).map(|i| lo + width * i as f64).collect();
    let mut counts = vec![0u64; bins];
    for s in sims {
        let b = (((s - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    Ok(SimilarityHistogram {
        distribution: spec.to_string(),
        dim: d,
        n_vectors: n,
        bin_edges,
        counts,
        overlay,
        empirical,
    })
}

fn histogram_cmd(a: &HistogramArgs, root: RandomSeed) -> Result<RunReport> {
    let mut report = RunReport::new("histogram");
    if a.bins == 0 {
        return Err(Error::InvalidParameter("--bins must be >= 1".into()));
    }
    if a.dims.contains(&0) {
        return Err(Error::InvalidParameter("dimensions must be >= 1".into()));
    }
    report.param("dists", a.dists.iter().map(ToString::to_string).collect::<Vec<_>>());
    report.param("d", &a.dims);
    report.param("vectors", a.vectors);
    report.param("bins", a.bins);
    let mut sw = Stopwatch { report: &mut report };
    let hists = sw.stage("histograms", || {
        let mut out = Vec::new();
        for (di, spec) in a.dists.iter().enumerate() {
            for &d in &a.dims {
                let seed = root.derive(STREAM_HISTOGRAM).derive(di as u64).derive(d as u64);
                out.push(histogram(spec, d, a.vectors, a.bins, seed)?);
            }
        }
        Ok(out)
    })?;
    report.histograms = hists;
    Ok(report)
}

fn compare_cmd(a: &CompareArgs) -> Result<RunReport> {
    let mut report = RunReport::new("compare");
    report.param(
        "reports",
        a.reports.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    );
    let mut curves: Vec<ConsistencyCurve> = Vec::new();
    for p in &a.reports {
        let r = RunReport::load(p)?;
        curves.extend(r.curves);
    }
    if curves.is_empty() {
        return Err(Error::Report("the given reports contain no curves".into()));
    }
    report.curves = curves;
    report.compute_deltas()?;
    Ok(report)
}
