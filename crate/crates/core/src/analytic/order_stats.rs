//! Order statistics of i.i.d. normal samples, evaluated in log space.

use serde::{Deserialize, Serialize};

use crate::stats_core::{log_binomial, std_normal_log_cdf, std_normal_log_pdf, MomentSet};
use crate::{Error, Result};

/// Normal parameters of member and non-member similarities for a catalog of
/// `n_catalog` items with centered i.i.d. entries, subsets of size `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InOutParams {
    pub mu_in: f64,
    pub sigma_in: f64,
    pub sigma_out: f64,
    pub k: usize,
    pub n_catalog: usize,
    pub d: usize,
}

/// Largest |mean| / sd accepted as a centered distribution.
pub const CENTERED_TOLERANCE: f64 = 1e-9;

impl InOutParams {
    pub fn new(m: &MomentSet, k: usize, n_catalog: usize, d: usize) -> Result<Self> {
        if m.mean().abs() > CENTERED_TOLERANCE * m.sd().max(f64::MIN_POSITIVE) {
            return Err(Error::Domain(format!(
                "order-statistic consistency requires centered entries (mean 0), got mean {}",
                m.mean()
            )));
        }
        if d == 0 {
            return Err(Error::InvalidParameter("dimension d must be >= 1".into()));
        }
        if k < 2 || k >= n_catalog {
            return Err(Error::Domain(format!(
                "need 2 <= k < N, got k={k}, N={n_catalog}"
            )));
        }
        let (s2, kurt) = (m.variance(), m.kurtosis());
        let (kf, df) = (k as f64, d as f64);
        if !(s2 > 0.0) || !(kurt + kf - 2.0 > 0.0) {
            return Err(Error::Degenerate(format!(
                "member similarity has zero spread (variance {s2}, kurtosis {kurt}, k {k})"
            )));
        }
        Ok(Self {
            mu_in: df * s2 / kf,
            sigma_in: s2 * (df * (kurt + kf - 2.0)).sqrt() / kf,
            sigma_out: s2 * (df / kf).sqrt(),
            k,
            n_catalog,
            d,
        })
    }
}

/// The `rank`-th largest of `count` i.i.d. N(mean, sd²) draws.
#[derive(Debug, Clone)]
pub struct NormalOrderStatistic {
    count: u64,
    rank: u64,
    mean: f64,
    sd: f64,
    log_density_coef: f64,
    /// ln C(count, j) for j = count − rank + 1 ..= count.
    log_cdf_coefs: Vec<f64>,
}

impl NormalOrderStatistic {
    /// `rank` counts from the top: 1 is the maximum. `rank = count + 1` is
    /// accepted for the CDF (the statistic does not exist and every x lies
    /// above it), but has no density.
    pub fn new(count: u64, rank: u64, mean: f64, sd: f64) -> Result<Self> {
        if count == 0 || rank == 0 || rank > count + 1 {
            return Err(Error::Domain(format!(
                "order statistic rank {rank} out of range for {count} draws"
            )));
        }
        if !(sd > 0.0) || !sd.is_finite() || !mean.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "order statistic needs finite mean and positive sd, got ({mean}, {sd})"
            )));
        }
        let log_density_coef = if rank <= count {
            (count as f64).ln() + log_binomial(count - 1, rank - 1)? - sd.ln()
        } else {
            f64::NEG_INFINITY
        };
        let first = count + 1 - rank;
        let log_cdf_coefs = (first..=count)
            .map(|j| log_binomial(count, j))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            count,
            rank,
            mean,
            sd,
            log_density_coef,
            log_cdf_coefs,
        })
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn rank(&self) -> u64 {
        self.rank
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sd(&self) -> f64 {
        self.sd
    }

    /// ln of the density: `count·C(count−1, rank−1)·Φ^{count−rank}·(1−Φ)^{rank−1}·φ / sd`.
    pub fn log_density(&self, x: f64) -> f64 {
        if self.rank > self.count {
            return f64::NEG_INFINITY;
        }
        let z = (x - self.mean) / self.sd;
        let below = (self.count - self.rank) as f64;
        let above = (self.rank - 1) as f64;
        let mut acc = self.log_density_coef + std_normal_log_pdf(z);
        if below > 0.0 {
            acc += below * std_normal_log_cdf(z);
        }
        if above > 0.0 {
            acc += above * std_normal_log_cdf(-z);
        }
        acc
    }

    pub fn density(&self, x: f64) -> f64 {
        self.log_density(x).exp()
    }

    /// P(statistic ≤ x) = Σ_j C(count, j) Φ^j (1−Φ)^{count−j} over
    /// j ≥ count − rank + 1, summed with a max shift.
    ///
    /// Above ½ the complement `P(at least rank draws above x)` is summed as a
    /// series instead; a direct sum near 1 carries a few ulps of noise, more
    /// than the CDF changes between nearby points.
    pub fn cdf(&self, x: f64) -> f64 {
        let z = (x - self.mean) / self.sd;
        let (lp, lq) = (std_normal_log_cdf(z), std_normal_log_cdf(-z));
        if self.rank <= self.count && (self.count as f64).ln() + lq < -std::f64::consts::LN_2 {
            return 1.0 - self.upper_tail(lp, lq);
        }
        let first = self.count + 1 - self.rank;
        let mut peak = f64::NEG_INFINITY;
        let mut terms = [0.0f64; 64];
        let mut spill = Vec::new();
        let len = self.log_cdf_coefs.len();
        let buf: &mut [f64] = if len <= terms.len() {
            &mut terms[..len]
        } else {
            spill.resize(len, 0.0);
            &mut spill
        };
        for (t, (slot, &coef)) in buf.iter_mut().zip(&self.log_cdf_coefs).enumerate() {
            let j = first + t as u64;
            let mut v = coef;
            if j > 0 {
                v += j as f64 * lp;
            }
            if j < self.count {
                v += (self.count - j) as f64 * lq;
            }
            *slot = v;
            peak = peak.max(v);
        }
        if peak == f64::NEG_INFINITY {
            return 0.0;
        }
        let sum: f64 = buf.iter().map(|v| (v - peak).exp()).sum();
        let direct = (peak + sum.ln()).exp().min(1.0);
        if direct > 0.5 && self.rank <= self.count {
            1.0 - self.upper_tail(lp, lq)
        } else {
            direct
        }
    }

    /// Σ_{a ≥ rank} C(count, a) q^a p^{count−a}, with ln p = `lp`, ln q = `lq`.
    /// Only called where this is below ½, so the terms peak near `rank` and
    /// the loop stops soon after.
    fn upper_tail(&self, lp: f64, lq: f64) -> f64 {
        let n = self.count;
        let r = self.rank;
        // ln C(n, r) = ln C(n, n − r); the stored coefficients start at n − r + 1
        let lead_coef = if r == n {
            0.0
        } else {
            self.log_cdf_coefs.first().copied().unwrap_or(0.0)
                + ((n - r + 1) as f64 / r as f64).ln()
        };
        let lead = lead_coef + r as f64 * lq + (n - r) as f64 * lp;
        if lead < -745.0 {
            return 0.0;
        }
        let ratio = (lq - lp).exp();
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut a = r;
        while a < n {
            term *= (n - a) as f64 / (a + 1) as f64 * ratio;
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
            a += 1;
        }
        lead.exp() * sum
    }
}

/// Density of the i-th highest member similarity (i = 1 is the best match).
pub fn f_in_order_density(i: usize, p: &InOutParams) -> Result<NormalOrderStatistic> {
    if i == 0 || i > p.k {
        return Err(Error::Domain(format!("rank i={i} outside 1..={}", p.k)));
    }
    NormalOrderStatistic::new(p.k as u64, i as u64, p.mu_in, p.sigma_in)
}

/// CDF of the (k − i + 1)-th highest non-member similarity.
pub fn f_out_order_cdf(i: usize, p: &InOutParams) -> Result<NormalOrderStatistic> {
    if i == 0 || i > p.k {
        return Err(Error::Domain(format!("rank i={i} outside 1..={}", p.k)));
    }
    if p.n_catalog + i < 2 * p.k {
        return Err(Error::Domain(format!(
            "N - 2k + i must be >= 0, got N={}, k={}, i={i}",
            p.n_catalog, p.k
        )));
    }
    NormalOrderStatistic::new((p.n_catalog - p.k) as u64, (p.k - i + 1) as u64, 0.0, p.sigma_out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::quadrature::{adaptive_simpson, QuadratureConfig};
    use crate::stats_core::{normal_cdf, normal_pdf, DistributionSpec};

    fn params(k: usize, n: usize) -> InOutParams {
        InOutParams::new(DistributionSpec::standard_normal().moments(), k, n, 128).unwrap()
    }

    #[test]
    fn params_formulas() {
        let p = params(5, 1000);
        assert!((p.mu_in - 128.0 / 5.0).abs() < 1e-13);
        assert!((p.sigma_in - (128.0f64 * 6.0).sqrt() / 5.0).abs() < 1e-13);
        assert!((p.sigma_out - (128.0f64 / 5.0).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn rejects_uncentered_and_bad_sizes() {
        let shifted = DistributionSpec::normal(0.5, 1.0).unwrap();
        assert!(InOutParams::new(shifted.moments(), 5, 1000, 128).is_err());
        let m = DistributionSpec::standard_normal();
        assert!(InOutParams::new(m.moments(), 1, 1000, 128).is_err());
        assert!(InOutParams::new(m.moments(), 1000, 1000, 128).is_err());
    }

    #[test]
    fn single_draw_is_plain_normal() {
        let s = NormalOrderStatistic::new(1, 1, 2.0, 0.7).unwrap();
        for x in [-1.0, 1.5, 2.0, 3.3] {
            assert!((s.density(x) - normal_pdf(x, 2.0, 0.7).unwrap()).abs() < 1e-15);
            assert!((s.cdf(x) - normal_cdf(x, 2.0, 0.7).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn densities_integrate_to_one() {
        let cfg = QuadratureConfig::default();
        for k in [2usize, 3, 7, 20, 50] {
            let p = params(k, 1000);
            for i in 1..=k {
                let f = f_in_order_density(i, &p).unwrap();
                let half = cfg.half_width_sds * p.sigma_in;
                let mass = adaptive_simpson(|x| f.density(x), p.mu_in - half, p.mu_in + half, &cfg)
                    .unwrap()
                    .value;
                assert!((mass - 1.0).abs() < 1e-6, "k={k} i={i}: {mass}");
            }
        }
    }

    #[test]
    fn max_of_two_matches_closed_form_cdf() {
        // max of two i.i.d. normals has CDF Φ²
        let s = NormalOrderStatistic::new(2, 1, 0.0, 1.0).unwrap();
        for x in [-2.0, -0.3, 0.0, 1.1, 3.0] {
            let phi = normal_cdf(x, 0.0, 1.0).unwrap();
            assert!((s.cdf(x) - phi * phi).abs() < 1e-15);
            // and density 2Φφ
            assert!((s.density(x) - 2.0 * phi * normal_pdf(x, 0.0, 1.0).unwrap()).abs() < 1e-15);
        }
        // min of two: 1 − (1−Φ)²
        let s = NormalOrderStatistic::new(2, 2, 0.0, 1.0).unwrap();
        let phi = normal_cdf(0.4, 0.0, 1.0).unwrap();
        assert!((s.cdf(0.4) - (1.0 - (1.0 - phi).powi(2))).abs() < 1e-15);
    }

    #[test]
    fn cdf_limits_and_monotone() {
        let p = params(10, 1000);
        for i in [1, 5, 10] {
            let cdf = f_out_order_cdf(i, &p).unwrap();
            assert_eq!(cdf.cdf(1e6), 1.0);
            assert_eq!(cdf.cdf(-1e6), 0.0);
            let mut prev = 0.0;
            let mut x = -20.0;
            while x < 30.0 {
                let v = cdf.cdf(x);
                assert!(v >= prev && (0.0..=1.0).contains(&v), "i={i} x={x} {v} < {prev}");
                prev = v;
                x += 0.01;
            }
        }
    }

    #[test]
    fn cdf_monotone_on_fine_grid_near_one() {
        let p = params(50, 1000);
        for i in [1, 25, 50] {
            let cdf = f_out_order_cdf(i, &p).unwrap();
            let mut prev = 0.0;
            for j in 0..=20_000 {
                let x = p.sigma_out * (-10.0 + j as f64 * 0.001);
                let v = cdf.cdf(x);
                assert!(v >= prev, "i={i} x={x} {v} < {prev}");
                prev = v;
            }
        }
    }

    #[test]
    fn cdf_matches_direct_binomial_sum() {
        let (n, r) = (50u64, 5u64);
        let s = NormalOrderStatistic::new(n, r, 0.3, 1.7).unwrap();
        let mut x = -3.0;
        while x < 12.0 {
            let p = normal_cdf(x, 0.3, 1.7).unwrap();
            let mut direct = 0.0;
            for j in (n - r + 1)..=n {
                direct += crate::stats_core::log_binomial(n, j).unwrap().exp()
                    * p.powi(j as i32)
                    * (1.0 - p).powi((n - j) as i32);
            }
            assert!((s.cdf(x) - direct).abs() < 1e-13, "x={x}: {} vs {direct}", s.cdf(x));
            x += 0.05;
        }
    }

    #[test]
    fn rank_beyond_count_is_certain() {
        let s = NormalOrderStatistic::new(3, 4, 0.0, 1.0).unwrap();
        assert!((s.cdf(-5.0) - 1.0).abs() < 1e-14);
        assert_eq!(s.density(0.0), 0.0);
    }

    #[test]
    fn out_cdf_domain() {
        let p = params(10, 15);
        assert!(f_out_order_cdf(4, &p).is_err());
        assert!(f_out_order_cdf(5, &p).is_ok());
        assert!(f_in_order_density(0, &p).is_err());
        assert!(f_in_order_density(11, &p).is_err());
    }
}
