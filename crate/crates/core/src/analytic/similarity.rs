//! Normal approximations of inner-product similarities between vectors with
//! i.i.d. entries, and the in-subset vs. out-of-subset crossing probability.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::stats_core::{erf, erfc, MomentSet};
use crate::{Error, Result};

/// Mean and variance of a normally approximated similarity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalApprox {
    mean: f64,
    variance: f64,
}

impl NormalApprox {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if !mean.is_finite() || !variance.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "non-finite normal approximation ({mean}, {variance})"
            )));
        }
        if variance <= 0.0 {
            return Err(Error::Degenerate(format!(
                "similarity has variance {variance}; it is a point mass at {mean}"
            )));
        }
        Ok(Self { mean, variance })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }
}

fn check_dim(d: usize) -> Result<f64> {
    if d == 0 {
        Err(Error::InvalidParameter("dimension d must be >= 1".into()))
    } else {
        Ok(d as f64)
    }
}

fn check_k(k: usize) -> Result<f64> {
    if k < 2 {
        Err(Error::InvalidParameter(format!("subset size k must be >= 2, got {k}")))
    } else {
        Ok(k as f64)
    }
}

/// s(X, Y) for independent X and Y.
pub fn inner_product_moments(mx: &MomentSet, my: &MomentSet, d: usize) -> Result<NormalApprox> {
    let d = check_dim(d)?;
    let (ux, uy) = (mx.mean(), my.mean());
    NormalApprox::new(
        d * ux * uy,
        d * (mx.second_raw() * my.second_raw() - ux * ux * uy * uy),
    )
}

/// s(X, X) = ‖X‖². A Rademacher vector has constant norm, which is reported
/// as a degenerate error.
pub fn inner_self_moments(mx: &MomentSet, d: usize) -> Result<NormalApprox> {
    let d = check_dim(d)?;
    let (u, s2, g, kurt) = (mx.mean(), mx.variance(), mx.skewness(), mx.kurtosis());
    let s = s2.sqrt();
    let variance = d * (4.0 * u * u * s2 + 4.0 * u * g * s2 * s + (kurt - 1.0) * s2 * s2);
    NormalApprox::new(d * mx.second_raw(), variance)
}

/// Cov(s(X,Y), s(X,Z)) for independent X, Y, Z.
pub fn cov_xy_xz(mx: &MomentSet, my: &MomentSet, mz: &MomentSet, d: usize) -> Result<f64> {
    Ok(check_dim(d)? * mx.variance() * my.mean() * mz.mean())
}

/// Cov(s(X,X), s(X,Y)) for independent X, Y.
pub fn cov_xx_xy(mx: &MomentSet, my: &MomentSet, d: usize) -> Result<f64> {
    let s2 = mx.variance();
    let s = s2.sqrt();
    Ok(check_dim(d)? * my.mean() * (mx.skewness() * s2 * s + 2.0 * mx.mean() * s2))
}

/// Similarity of a non-member to the centroid of a k-subset.
pub fn s_out_params(m: &MomentSet, k: usize, d: usize) -> Result<NormalApprox> {
    let (d, k) = (check_dim(d)?, check_k(k)?);
    let (u, s2) = (m.mean(), m.variance());
    NormalApprox::new(d * u * u, d * (s2 * s2 + (k + 1.0) * s2 * u * u) / k)
}

/// Similarity of a member to the centroid of its own k-subset.
pub fn s_in_params(m: &MomentSet, k: usize, d: usize) -> Result<NormalApprox> {
    let (d, k) = (check_dim(d)?, check_k(k)?);
    let (u, s2, g, kurt) = (m.mean(), m.variance(), m.skewness(), m.kurtosis());
    let s = s2.sqrt();
    NormalApprox::new(
        d * (u * u + s2 / k),
        d * (k * (k + 3.0) * u * u * s2 + 4.0 * u * g * s2 * s + (kurt + k - 2.0) * s2 * s2)
            / (k * k),
    )
}

/// Member similarity minus non-member similarity.
pub fn s_diff_params(m: &MomentSet, k: usize, d: usize) -> Result<NormalApprox> {
    let (d, k) = (check_dim(d)?, check_k(k)?);
    let (u, s2, g, kurt) = (m.mean(), m.variance(), m.skewness(), m.kurtosis());
    let s = s2.sqrt();
    NormalApprox::new(
        d * s2 / k,
        d * ((2.0 * (k - 1.0) + kurt) * s2 * s2 + 2.0 * k * g * u * s2 * s + 2.0 * k * k * s2 * u * u)
            / (k * k),
    )
}

/// Argument of erf in the crossing probability, `√(dσ² / 2D)` with
/// `D = (2(k−1)+κ)σ² + 2kγμσ + 2k²μ²`.
fn crossing_argument(m: &MomentSet, k: usize, d: usize) -> Result<f64> {
    let (d, k) = (check_dim(d)?, check_k(k)?);
    let (u, s2, g, kurt) = (m.mean(), m.variance(), m.skewness(), m.kurtosis());
    let s = s2.sqrt();
    let denom = (2.0 * (k - 1.0) + kurt) * s2 + 2.0 * k * g * u * s + 2.0 * k * k * u * u;
    if !(denom > 0.0) || !(s2 > 0.0) {
        return Err(Error::Domain(format!(
            "crossing probability undefined: variance {s2}, denominator {denom}"
        )));
    }
    Ok((d * s2 / (2.0 * denom)).sqrt())
}

/// P(s(u_in, μ_U) > s(u_out, μ_U)) under the normal approximations.
///
/// Mathematically in (0.5, 1); in double precision it rounds to 1 once the
/// tail drops below 2⁻⁵³. Use [`prob_out_beats_in`] to observe the tail.
pub fn prob_in_beats_out(m: &MomentSet, k: usize, d: usize) -> Result<f64> {
    Ok(0.5 * (1.0 + erf(crossing_argument(m, k, d)?)))
}

/// Complement `1 − prob_in_beats_out`, computed as `½ erfc(·)` so it keeps
/// full relative precision in the tail.
pub fn prob_out_beats_in(m: &MomentSet, k: usize, d: usize) -> Result<f64> {
    Ok(0.5 * erfc(crossing_argument(m, k, d)?))
}

/// Same probability from the s_diff approximation, `Φ(E/√Var)`.
pub fn prob_in_beats_out_from_diff(m: &MomentSet, k: usize, d: usize) -> Result<f64> {
    let diff = s_diff_params(m, k, d)?;
    Ok(0.5 * erfc(-diff.mean() / diff.sd() * FRAC_1_SQRT_2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats_core::DistributionSpec;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    fn normal(mean: f64, sd: f64) -> MomentSet {
        *DistributionSpec::normal(mean, sd).unwrap().moments()
    }

    #[test]
    fn centered_unit_inner_product() {
        let m = normal(0.0, 1.0);
        let p = inner_product_moments(&m, &m, 128).unwrap();
        assert_eq!((p.mean(), p.variance()), (0.0, 128.0));
    }

    #[test]
    fn shifted_normal_inner_product() {
        let m = normal(0.5, 1.0);
        let p = inner_product_moments(&m, &m, 128).unwrap();
        assert_eq!(p.mean(), 32.0);
        assert_eq!(p.variance(), 192.0);
    }

    #[test]
    fn scalar_product_expansion() {
        // d = 1: E[XY] = μxμy, Var = E[X²]E[Y²] − μx²μy²
        let mx = MomentSet::new(1.5, 2.0, 0.3, 4.0).unwrap();
        let my = MomentSet::new(-0.7, 0.4, -1.0, 5.0).unwrap();
        let p = inner_product_moments(&mx, &my, 1).unwrap();
        assert!(close(p.mean(), 1.5 * -0.7, 1e-15));
        assert!(close(p.variance(), (2.0 + 2.25) * (0.4 + 0.49) - 2.25 * 0.49, 1e-15));
    }

    #[test]
    fn self_similarity_normal_and_uniform() {
        let p = inner_self_moments(&normal(0.0, 1.0), 128).unwrap();
        assert_eq!((p.mean(), p.variance()), (128.0, 256.0));
        let u = DistributionSpec::uniform(-1.0, 1.0).unwrap();
        let p = inner_self_moments(u.moments(), 128).unwrap();
        assert!(close(p.mean(), 128.0 / 3.0, 1e-15));
        assert!(close(p.variance(), 512.0 / 45.0, 1e-14));
    }

    #[test]
    fn rademacher_norm_is_degenerate() {
        let r = DistributionSpec::rademacher();
        assert!(matches!(inner_self_moments(r.moments(), 128), Err(Error::Degenerate(_))));
    }

    #[test]
    fn covariances() {
        let centered = normal(0.0, 1.0);
        let shifted = normal(0.5, 1.0);
        assert_eq!(cov_xy_xz(&shifted, &centered, &shifted, 128).unwrap(), 0.0);
        assert_eq!(cov_xx_xy(&shifted, &centered, 128).unwrap(), 0.0);
        assert_eq!(cov_xy_xz(&shifted, &shifted, &shifted, 128).unwrap(), 32.0);
        let skewed = MomentSet::new(0.3, 2.0, 0.8, 4.0).unwrap();
        let a = cov_xx_xy(&skewed, &shifted, 64).unwrap();
        let b = cov_xx_xy(&skewed, &shifted, 128).unwrap();
        assert!(close(b, 2.0 * a, 1e-15));
        let a = cov_xy_xz(&skewed, &shifted, &skewed, 64).unwrap();
        let b = cov_xy_xz(&skewed, &shifted, &skewed, 128).unwrap();
        assert!(close(b, 2.0 * a, 1e-15));
    }

    #[test]
    fn centered_normal_subset_similarities() {
        let (d, m) = (128.0, normal(0.0, 1.0));
        for k in [2usize, 5, 20, 50] {
            let kf = k as f64;
            let out = s_out_params(&m, k, 128).unwrap();
            let inn = s_in_params(&m, k, 128).unwrap();
            let diff = s_diff_params(&m, k, 128).unwrap();
            assert!(close(out.mean(), 0.0, 1e-15) && close(out.variance(), d / kf, 1e-14));
            assert!(close(inn.mean(), d / kf, 1e-14));
            assert!(close(inn.variance(), d * (kf + 1.0) / (kf * kf), 1e-14));
            assert!(close(diff.mean(), d / kf, 1e-14));
            assert!(close(diff.variance(), d * (2.0 * kf + 1.0) / (kf * kf), 1e-14));
        }
    }

    #[test]
    fn diff_mean_is_in_minus_out() {
        for (u, s2, g, kurt) in [(0.4, 1.3, 0.5, 3.2), (-1.1, 0.2, -0.9, 2.0), (0.0, 5.0, 0.0, 1.0)] {
            let m = MomentSet::new(u, s2, g, kurt).unwrap();
            for k in [2, 7, 33] {
                let diff = s_diff_params(&m, k, 97).unwrap().mean();
                let gap = s_in_params(&m, k, 97).unwrap().mean() - s_out_params(&m, k, 97).unwrap().mean();
                assert!((diff - gap).abs() <= 1e-12 * diff.abs().max(1.0));
            }
        }
    }

    #[test]
    fn crossing_probability_reference() {
        let m = normal(0.0, 1.0);
        let p = prob_in_beats_out(&m, 2, 128).unwrap();
        let want = 0.5 * (1.0 + erf((128.0f64 / 10.0).sqrt()));
        assert_eq!(p, want);
        // 30-digit evaluation: 0.999999789980301198899
        assert!((p - 0.999_999_789_980_301_2).abs() < 1e-15);
        assert!((prob_out_beats_in(&m, 2, 128).unwrap() - (1.0 - p)).abs() < 1e-15);
        assert!((prob_in_beats_out_from_diff(&m, 2, 128).unwrap() - p).abs() < 1e-15);
    }

    #[test]
    fn crossing_probability_tends_to_half_for_large_k() {
        let m = normal(0.0, 1.0);
        let p = prob_in_beats_out(&m, 10_000_000, 128).unwrap();
        assert!((p - 0.501_009_251_907_041_3).abs() < 1e-15);
        let p = prob_in_beats_out(&m, 1_000_000_000_000, 128).unwrap();
        assert!(p > 0.5 && p - 0.5 < 1e-5);
    }

    #[test]
    fn small_k_rejected() {
        assert!(s_in_params(&normal(0.0, 1.0), 1, 128).is_err());
        assert!(prob_in_beats_out(&normal(0.0, 1.0), 1, 128).is_err());
    }
}
