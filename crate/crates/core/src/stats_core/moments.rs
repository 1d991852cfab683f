use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Mean, variance, skewness and plain (non-excess) kurtosis of a scalar
/// distribution. A Normal has kurtosis 3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    mean: f64,
    variance: f64,
    skewness: f64,
    kurtosis: f64,
}

impl MomentSet {
    /// Rejects negative variance and moment combinations no distribution can
    /// realize (kurtosis < skewness² + 1). A small relative slack absorbs
    /// rounding in moments computed from parameters.
    pub fn new(mean: f64, variance: f64, skewness: f64, kurtosis: f64) -> Result<Self> {
        if ![mean, variance, skewness, kurtosis].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "moments must be finite: ({mean}, {variance}, {skewness}, {kurtosis})"
            )));
        }
        if variance < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "variance must be non-negative, got {variance}"
            )));
        }
        let floor = skewness * skewness + 1.0;
        if kurtosis < floor - 1e-12 * floor {
            return Err(Error::InvalidParameter(format!(
                "infeasible moments: kurtosis {kurtosis} < skewness^2 + 1 = {floor}"
            )));
        }
        Ok(Self {
            mean,
            variance,
            skewness,
            kurtosis,
        })
    }

    /// Moments of a centered distribution with unit variance.
    pub fn standardized(skewness: f64, kurtosis: f64) -> Result<Self> {
        Self::new(0.0, 1.0, skewness, kurtosis)
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

    pub fn skewness(&self) -> f64 {
        self.skewness
    }

    pub fn kurtosis(&self) -> f64 {
        self.kurtosis
    }

    /// Raw second moment E[X²].
    pub fn second_raw(&self) -> f64 {
        self.variance + self.mean * self.mean
    }
}

/// Population-normalized moments of a sample: `m_r = (1/n) Σ (x − x̄)^r`,
/// skewness `m₃ / m₂^{3/2}`, kurtosis `m₄ / m₂²`.
pub fn estimate_moments(values: &[f64]) -> Result<MomentSet> {
    if values.len() < 4 {
        return Err(Error::InvalidParameter(format!(
            "moment estimation needs at least 4 values, got {}",
            values.len()
        )));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in values {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if m2 <= f64::EPSILON * f64::EPSILON * mean.abs().max(f64::MIN_POSITIVE).powi(2) || m2 == 0.0 {
        return Err(Error::Degenerate("sample has zero variance".into()));
    }
    // Sample moments always satisfy m₄m₂ ≥ m₃² + m₂³; clamp the last ulp.
    let skewness = m3 / m2.powf(1.5);
    let kurtosis = (m4 / (m2 * m2)).max(skewness * skewness + 1.0);
    MomentSet::new(mean, m2, skewness, kurtosis)
}

/// Leading-order standard errors of the population moment estimators.
#[derive(Debug, Clone, Copy)]
pub struct MomentStandardErrors {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

impl MomentStandardErrors {
    /// Delta-method standard errors. `higher` holds standardized central
    /// moments μ₅..μ₈ divided by σ⁵..σ⁸.
    pub fn delta_method(m: &MomentSet, higher: [f64; 4], n: usize) -> Self {
        let n = n as f64;
        let s2 = m.variance();
        let (g, k) = (m.skewness(), m.kurtosis());
        let [m5, m6, _m7, m8] = higher;
        let var_mean = s2 / n;
        let var_var = s2 * s2 * (k - 1.0) / n;
        // Standardized-moment delta method with m1=0, m2=1, m3=g, m4=k.
        let var_skew = (m6 - 3.0 * g * m5 - 6.0 * k + 2.25 * g * g * k + 8.75 * g * g + 9.0)
            .max(0.0)
            / n;
        let var_kurt = (m8 - 4.0 * k * m6 - 8.0 * g * m5 + 4.0 * k.powi(3) - k * k + 16.0 * k * g * g
            + 16.0 * g * g)
            .max(0.0)
            / n;
        Self {
            mean: var_mean.sqrt(),
            variance: var_var.sqrt(),
            skewness: var_skew.sqrt(),
            kurtosis: var_kurt.sqrt(),
        }
    }
}
