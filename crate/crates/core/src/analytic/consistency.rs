//! Expected precision of the centroid of a random k-subset, from the
//! order statistics of member and non-member similarities.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::order_stats::{f_in_order_density, f_out_order_cdf, InOutParams};
use super::quadrature::{adaptive_simpson, QuadratureConfig};
use crate::evaluator::{ConsistencyCurve, Provenance};
use crate::stats_core::MomentSet;
use crate::{Error, Result};

/// Per-rank pieces of one analytic consistency value.
///
/// `p_plus[i-1]` is P(precision ≥ i/k), `p_exact[i-1]` is P(precision = i/k).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PPlusBreakdown {
    pub k: usize,
    pub n_catalog: usize,
    pub d: usize,
    pub p_plus: Vec<f64>,
    pub p_exact: Vec<f64>,
    pub error_estimates: Vec<f64>,
    pub score: f64,
}

fn check_sizes(k: usize, n_catalog: usize, d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension d must be >= 1".into()));
    }
    if k < 2 || 2 * k > n_catalog {
        return Err(Error::Domain(format!(
            "analytic consistency needs 2 <= k <= N/2, got k={k}, N={n_catalog}"
        )));
    }
    Ok(())
}

/// P(i-th best member similarity beats the (k−i+1)-th best non-member).
pub fn p_plus(i: usize, params: &InOutParams, quad: &QuadratureConfig) -> Result<(f64, f64)> {
    let f_in = f_in_order_density(i, params)?;
    let f_out = f_out_order_cdf(i, params)?;
    let half = quad.half_width_sds * params.sigma_in;
    let r = adaptive_simpson(
        |x| {
            let dens = f_in.log_density(x);
            if dens < -745.0 {
                0.0
            } else {
                dens.exp() * f_out.cdf(x)
            }
        },
        params.mu_in - half,
        params.mu_in + half,
        quad,
    )?;
    Ok((r.value.clamp(0.0, 1.0), r.error_estimate))
}

pub fn consistency_breakdown(
    m: &MomentSet,
    k: usize,
    n_catalog: usize,
    d: usize,
    quad: &QuadratureConfig,
) -> Result<PPlusBreakdown> {
    check_sizes(k, n_catalog, d)?;
    quad.validate()?;
    let params = InOutParams::new(m, k, n_catalog, d)?;
    let pieces = (1..=k)
        .into_par_iter()
        .map(|i| p_plus(i, &params, quad))
        .collect::<Result<Vec<_>>>()?;
    let (p_plus, error_estimates): (Vec<f64>, Vec<f64>) = pieces.into_iter().unzip();
    let p_exact = (0..k)
        .map(|i| p_plus[i] - p_plus.get(i + 1).copied().unwrap_or(0.0))
        .collect();
    let score = (p_plus.iter().sum::<f64>() / k as f64).clamp(0.0, 1.0);
    Ok(PPlusBreakdown {
        k,
        n_catalog,
        d,
        p_plus,
        p_exact,
        error_estimates,
        score,
    })
}

/// Consistency_k for a catalog of `n_catalog` items with centered i.i.d.
/// entries of moments `m`.
pub fn consistency_analytic(
    m: &MomentSet,
    k: usize,
    n_catalog: usize,
    d: usize,
    quad: &QuadratureConfig,
) -> Result<f64> {
    Ok(consistency_breakdown(m, k, n_catalog, d, quad)?.score)
}

pub fn consistency_curve(
    m: &MomentSet,
    k_values: &[usize],
    n_catalog: usize,
    d: usize,
    quad: &QuadratureConfig,
) -> Result<(ConsistencyCurve, Vec<PPlusBreakdown>)> {
    let breakdowns = k_values
        .iter()
        .map(|&k| consistency_breakdown(m, k, n_catalog, d, quad))
        .collect::<Result<Vec<_>>>()?;
    let curve = ConsistencyCurve::new(
        format!("analytic N={n_catalog} d={d}"),
        Provenance::Analytic,
        k_values.to_vec(),
        breakdowns.iter().map(|b| b.score).collect(),
        vec![0.0; k_values.len()],
        0,
        None,
    )?;
    Ok((curve, breakdowns))
}
