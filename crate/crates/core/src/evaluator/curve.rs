use serde::{Deserialize, Serialize};

use crate::stats_core::RandomSeed;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Analytic,
    Simulated,
    Empirical,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Analytic => "analytic",
            Provenance::Simulated => "simulated",
            Provenance::Empirical => "empirical",
        }
    }
}

/// Consistency scores over a grid of subset sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyCurve {
    pub label: String,
    pub provenance: Provenance,
    pub k_values: Vec<usize>,
    pub scores: Vec<f64>,
    /// Standard error per k; zero for analytic curves.
    pub stderr: Vec<f64>,
    pub trials: usize,
    pub seed: Option<RandomSeed>,
}

impl ConsistencyCurve {
    pub fn new(
        label: impl Into<String>,
        provenance: Provenance,
        k_values: Vec<usize>,
        scores: Vec<f64>,
        stderr: Vec<f64>,
        trials: usize,
        seed: Option<RandomSeed>,
    ) -> Result<Self> {
        if k_values.len() != scores.len() || scores.len() != stderr.len() {
            return Err(Error::InvalidParameter(format!(
                "curve columns differ in length: {} k, {} scores, {} stderr",
                k_values.len(),
                scores.len(),
                stderr.len()
            )));
        }
        if let Some(s) = scores.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            return Err(Error::InvalidParameter(format!("score {s} outside [0, 1]")));
        }
        if let Some(e) = stderr.iter().find(|e| !(**e >= 0.0)) {
            return Err(Error::InvalidParameter(format!("negative standard error {e}")));
        }
        Ok(Self {
            label: label.into(),
            provenance,
            k_values,
            scores,
            stderr,
            trials,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.k_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_values.is_empty()
    }

    pub fn score_at(&self, k: usize) -> Option<f64> {
        self.k_values.iter().position(|&v| v == k).map(|i| self.scores[i])
    }

    pub fn max_score(&self) -> f64 {
        self.scores.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}
