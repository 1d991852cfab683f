use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Beta, Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use super::MomentSet;
use crate::{Error, Result};

/// A samplable scalar distribution for embedding entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionKind {
    Normal { mean: f64, sd: f64 },
    Uniform { lo: f64, hi: f64 },
    Rademacher,
    Beta { alpha: f64, beta: f64 },
    ShiftedNormal { mean: f64, sd: f64 },
}

/// A distribution kind paired with its analytic moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    kind: DistributionKind,
    moments: MomentSet,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")))
    }
}

impl DistributionSpec {
    pub fn new(kind: DistributionKind) -> Result<Self> {
        match kind {
            DistributionKind::Normal { mean, sd } | DistributionKind::ShiftedNormal { mean, sd } => {
                finite("mean", mean)?;
                positive("sd", sd)?;
            }
            DistributionKind::Uniform { lo, hi } => {
                finite("lo", lo)?;
                finite("hi", hi)?;
                if hi <= lo {
                    return Err(Error::InvalidParameter(format!(
                        "uniform bounds need lo < hi, got [{lo}, {hi}]"
                    )));
                }
            }
            DistributionKind::Rademacher => {}
            DistributionKind::Beta { alpha, beta } => {
                positive("alpha", alpha)?;
                positive("beta", beta)?;
            }
        }
        let moments = MomentSet::new(
            kind_mean(&kind),
            kind_variance(&kind),
            standardized_central_moment(&kind, 3),
            standardized_central_moment(&kind, 4),
        )?;
        Ok(Self { kind, moments })
    }

    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        Self::new(DistributionKind::Normal { mean, sd })
    }

    pub fn shifted_normal(mean: f64, sd: f64) -> Result<Self> {
        Self::new(DistributionKind::ShiftedNormal { mean, sd })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::new(DistributionKind::Uniform { lo, hi })
    }

    pub fn rademacher() -> Self {
        Self::new(DistributionKind::Rademacher).expect("rademacher has fixed valid moments")
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(DistributionKind::Beta { alpha, beta })
    }

    pub fn standard_normal() -> Self {
        Self::normal(0.0, 1.0).expect("valid parameters")
    }

    pub fn kind(&self) -> &DistributionKind {
        &self.kind
    }

    pub fn moments(&self) -> &MomentSet {
        &self.moments
    }

    /// E[((X − μ)/σ)^r].
    pub fn standardized_central_moment(&self, r: u32) -> f64 {
        standardized_central_moment(&self.kind, r)
    }

    pub fn sampler(&self) -> EntrySampler {
        match self.kind {
            DistributionKind::Normal { mean, sd } | DistributionKind::ShiftedNormal { mean, sd } => {
                EntrySampler::Normal(Normal::new(mean, sd).expect("validated"))
            }
            DistributionKind::Uniform { lo, hi } => {
                EntrySampler::Uniform(Uniform::new(lo, hi).expect("validated"))
            }
            DistributionKind::Rademacher => EntrySampler::Rademacher,
            DistributionKind::Beta { alpha, beta } => {
                EntrySampler::Beta(Beta::new(alpha, beta).expect("validated"))
            }
        }
    }
}

/// Prepared sampler for one distribution.
#[derive(Debug, Clone, Copy)]
pub enum EntrySampler {
    Normal(Normal<f64>),
    Uniform(Uniform<f64>),
    Rademacher,
    Beta(Beta<f64>),
}

impl Distribution<f64> for EntrySampler {
    #[inline]
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            EntrySampler::Normal(d) => d.sample(rng),
            EntrySampler::Uniform(d) => d.sample(rng),
            EntrySampler::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            EntrySampler::Beta(d) => d.sample(rng),
        }
    }
}

fn kind_mean(kind: &DistributionKind) -> f64 {
    match *kind {
        DistributionKind::Normal { mean, .. } | DistributionKind::ShiftedNormal { mean, .. } => mean,
        DistributionKind::Uniform { lo, hi } => 0.5 * (lo + hi),
        DistributionKind::Rademacher => 0.0,
        DistributionKind::Beta { alpha, beta } => alpha / (alpha + beta),
    }
}

fn kind_variance(kind: &DistributionKind) -> f64 {
    match *kind {
        DistributionKind::Normal { sd, .. } | DistributionKind::ShiftedNormal { sd, .. } => sd * sd,
        DistributionKind::Uniform { lo, hi } => (hi - lo) * (hi - lo) / 12.0,
        DistributionKind::Rademacher => 1.0,
        DistributionKind::Beta { alpha, beta } => {
            let s = alpha + beta;
            alpha * beta / (s * s * (s + 1.0))
        }
    }
}

fn double_factorial_odd(r: u32) -> f64 {
    // (r − 1)!! for even r
    (1..r).step_by(2).map(f64::from).product()
}

fn standardized_central_moment(kind: &DistributionKind, r: u32) -> f64 {
    match *kind {
        DistributionKind::Normal { .. } | DistributionKind::ShiftedNormal { .. } => {
            if r % 2 == 1 {
                0.0
            } else {
                double_factorial_odd(r)
            }
        }
        DistributionKind::Uniform { .. } => {
            if r % 2 == 1 {
                0.0
            } else {
                3f64.powf(r as f64 / 2.0) / (r as f64 + 1.0)
            }
        }
        DistributionKind::Rademacher => {
            if r % 2 == 1 {
                0.0
            } else {
                1.0
            }
        }
        DistributionKind::Beta { alpha, beta } => {
            let mean = kind_mean(kind);
            let sd = kind_variance(kind).sqrt();
            // raw moments E[X^j] = Π_{i<j} (α+i)/(α+β+i)
            let mut raw = vec![1.0; r as usize + 1];
            for j in 1..=r as usize {
                let i = (j - 1) as f64;
                raw[j] = raw[j - 1] * (alpha + i) / (alpha + beta + i);
            }
            let mut central = 0.0;
            let mut binom = 1.0;
            for j in 0..=r as usize {
                central += binom * raw[j] * (-mean).powi((r as usize - j) as i32);
                binom = binom * (r as usize - j) as f64 / (j + 1) as f64;
            }
            central / sd.powi(r as i32)
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            DistributionKind::Normal { mean, sd } => write!(f, "normal({mean},{sd})"),
            DistributionKind::ShiftedNormal { mean, sd } => write!(f, "shifted-normal({mean},{sd})"),
            DistributionKind::Uniform { lo, hi } => write!(f, "uniform({lo},{hi})"),
            DistributionKind::Rademacher => write!(f, "rademacher"),
            DistributionKind::Beta { alpha, beta } => write!(f, "beta({alpha},{beta})"),
        }
    }
}

/// Parses `normal`, `normal(0.5,1)`, `uniform(-1,1)`, `beta(2,2)`,
/// `rademacher`, `shifted-normal(0.5,1)`. Bare names take the defaults
/// N(0,1), U(−1,1) and Beta(2,2).
impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (name, args) = match s.find('(') {
            Some(open) => {
                let close = s.rfind(')').filter(|&c| c > open).ok_or_else(|| {
                    Error::InvalidParameter(format!("unbalanced parentheses in {s:?}"))
                })?;
                let args = s[open + 1..close]
                    .split(',')
                    .map(|a| {
                        a.trim().parse::<f64>().map_err(|_| {
                            Error::InvalidParameter(format!("bad distribution argument {a:?}"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                (s[..open].trim().to_string(), args)
            }
            None => (s.clone(), Vec::new()),
        };
        let two = |default: (f64, f64)| -> Result<(f64, f64)> {
            match args.as_slice() {
                [] => Ok(default),
                [a, b] => Ok((*a, *b)),
                _ => Err(Error::InvalidParameter(format!(
                    "{name} takes two parameters, got {}",
                    args.len()
                ))),
            }
        };
        match name.as_str() {
            "normal" | "gaussian" => {
                let (m, sd) = two((0.0, 1.0))?;
                Self::normal(m, sd)
            }
            "shifted-normal" | "shifted_normal" => {
                let (m, sd) = two((0.5, 1.0))?;
                Self::shifted_normal(m, sd)
            }
            "uniform" => {
                let (lo, hi) = two((-1.0, 1.0))?;
                Self::uniform(lo, hi)
            }
            "beta" => {
                let (a, b) = two((2.0, 2.0))?;
                Self::beta(a, b)
            }
            "rademacher" if args.is_empty() => Ok(Self::rademacher()),
            _ => Err(Error::InvalidParameter(format!("unknown distribution {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_moments_of_named_distributions() {
        let r = DistributionSpec::rademacher();
        assert_eq!(*r.moments(), MomentSet::new(0.0, 1.0, 0.0, 1.0).unwrap());

        let n = DistributionSpec::standard_normal();
        assert_eq!(n.moments().kurtosis(), 3.0);

        let u = DistributionSpec::uniform(-1.0, 1.0).unwrap();
        assert_eq!(u.moments().mean(), 0.0);
        assert!((u.moments().variance() - 1.0 / 3.0).abs() < 1e-15);
        assert!((u.moments().kurtosis() - 9.0 / 5.0).abs() < 1e-14);

        let b = DistributionSpec::beta(2.0, 2.0).unwrap();
        assert!((b.moments().mean() - 0.5).abs() < 1e-15);
        assert!((b.moments().variance() - 0.05).abs() < 1e-15);
        assert!(b.moments().skewness().abs() < 1e-12);
        assert!((b.moments().kurtosis() - 15.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn skewed_beta_matches_closed_form() {
        let (a, b) = (2.0f64, 5.0f64);
        let spec = DistributionSpec::beta(a, b).unwrap();
        let skew = 2.0 * (b - a) * (a + b + 1.0).sqrt() / ((a + b + 2.0) * (a * b).sqrt());
        let excess = 6.0 * ((a - b).powi(2) * (a + b + 1.0) - a * b * (a + b + 2.0))
            / (a * b * (a + b + 2.0) * (a + b + 3.0));
        assert!((spec.moments().skewness() - skew).abs() < 1e-12);
        assert!((spec.moments().kurtosis() - (3.0 + excess)).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DistributionSpec::normal(0.0, 0.0).is_err());
        assert!(DistributionSpec::uniform(1.0, 1.0).is_err());
        assert!(DistributionSpec::beta(-1.0, 2.0).is_err());
    }

    #[test]
    fn parses_names() {
        let cases = [
            ("normal", DistributionSpec::standard_normal()),
            ("Normal(0.5, 1)", DistributionSpec::normal(0.5, 1.0).unwrap()),
            ("uniform(0,1)", DistributionSpec::uniform(0.0, 1.0).unwrap()),
            ("beta(2,2)", DistributionSpec::beta(2.0, 2.0).unwrap()),
            ("rademacher", DistributionSpec::rademacher()),
        ];
        for (text, want) in cases {
            assert_eq!(text.parse::<DistributionSpec>().unwrap(), want);
        }
        assert!("cauchy".parse::<DistributionSpec>().is_err());
        assert!("normal(1)".parse::<DistributionSpec>().is_err());
    }
}
