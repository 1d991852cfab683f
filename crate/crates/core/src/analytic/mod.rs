//! Closed-form consistency under i.i.d. entry assumptions.
//!
//! Inner products of vectors with i.i.d. entries are approximated as normal
//! ([`similarity`]); member and non-member similarities to a subset centroid
//! then give both the pairwise crossing probability and, through order
//! statistics ([`order_stats`]), the expected precision of the centroid
//! ([`consistency`]).

pub mod consistency;
pub mod order_stats;
pub mod quadrature;
pub mod similarity;

pub use consistency::{consistency_analytic, consistency_breakdown, consistency_curve, p_plus, PPlusBreakdown};
pub use order_stats::{f_in_order_density, f_out_order_cdf, InOutParams, NormalOrderStatistic};
pub use quadrature::{adaptive_simpson, Integral, QuadratureConfig};
pub use similarity::{
    cov_xx_xy, cov_xy_xz, inner_product_moments, inner_self_moments, prob_in_beats_out,
    prob_in_beats_out_from_diff, prob_out_beats_in, s_diff_params, s_in_params, s_out_params,
    NormalApprox,
};
