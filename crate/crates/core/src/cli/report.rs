use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analytic::{NormalApprox, PPlusBreakdown};
use crate::datasets::DiagnosticsReport;
use crate::evaluator::{ConsistencyCurve, SimilarityStats};
use crate::{Error, Result};

/// Bumped whenever a field changes meaning or is removed.
pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

/// Binned pairwise similarities for one distribution and dimension, with
/// the normal approximation they are compared against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityHistogram {
    pub distribution: String,
    pub dim: usize,
    pub n_vectors: usize,
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub overlay: NormalApprox,
    pub empirical: SimilarityStats,
}

impl SimilarityHistogram {
    pub fn pairs(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Overlay expected count for a bin of the given width centred at `x`.
    pub fn overlay_count(&self, x: f64) -> f64 {
        let w = self.bin_edges[1] - self.bin_edges[0];
        let z = (x - self.overlay.mean()) / self.overlay.sd();
        self.pairs() as f64 * w * crate::stats_core::std_normal_pdf(z) / self.overlay.sd()
    }
}

/// Per-k differences of one curve against a reference curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveDelta {
    pub reference: String,
    pub label: String,
    pub k_values: Vec<usize>,
    /// `label − reference` at each k.
    pub deltas: Vec<f64>,
    pub max_abs_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub report_version: u32,
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    #[serde(default)]
    pub curves: Vec<ConsistencyCurve>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub breakdowns: Vec<PPlusBreakdown>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub deltas: Vec<CurveDelta>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub histograms: Vec<SimilarityHistogram>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<DiagnosticsReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default)]
    pub timing: Vec<StageTiming>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self {
            report_version: REPORT_VERSION,
            command: command.to_string(),
            parameters: BTreeMap::new(),
            curves: Vec::new(),
            breakdowns: Vec::new(),
            deltas: Vec::new(),
            max_gap: None,
            histograms: Vec::new(),
            diagnostics: None,
            warnings: Vec::new(),
            timing: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("parameter values serialize");
        self.parameters.insert(key.to_string(), v);
    }

    /// Fills `deltas` and `max_gap` against the first curve.
    pub fn compute_deltas(&mut self) -> Result<()> {
        self.deltas = curve_deltas(&self.curves)?;
        self.max_gap = self
            .deltas
            .iter()
            .map(|d| d.max_abs_delta)
            .reduce(f64::max);
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Reads `report.json`, or `<dir>/report.json` when given a directory.
    pub fn load(path: &Path) -> Result<Self> {
        let file = if path.is_dir() {
            path.join("report.json")
        } else {
            path.to_path_buf()
        };
        let text = std::fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
        let report: Self = serde_json::from_str(&text)
            .map_err(|e| Error::Report(format!("{}: {e}", file.display())))?;
        if report.report_version != REPORT_VERSION {
            return Err(Error::Report(format!(
                "{}: report_version {} is not supported (expected {REPORT_VERSION})",
                file.display(),
                report.report_version
            )));
        }
        Ok(report)
    }
}

/// Differences of every curve after the first against the first. All
/// curves must share one k grid.
pub fn curve_deltas(curves: &[ConsistencyCurve]) -> Result<Vec<CurveDelta>> {
    let Some((reference, rest)) = curves.split_first() else {
        return Ok(Vec::new());
    };
    rest.iter()
        .map(|c| {
            if c.k_values != reference.k_values {
                return Err(Error::KGridMismatch {
                    left: reference.k_values.clone(),
                    right: c.k_values.clone(),
                });
            }
            let deltas: Vec<f64> = c
                .scores
                .iter()
                .zip(&reference.scores)
                .map(|(a, b)| a - b)
                .collect();
            Ok(CurveDelta {
                reference: reference.label.clone(),
                label: c.label.clone(),
                k_values: c.k_values.clone(),
                max_abs_delta: deltas.iter().fold(0.0, |m, d| m.max(d.abs())),
                deltas,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::Provenance;

    fn curve(label: &str, k: Vec<usize>, s: Vec<f64>) -> ConsistencyCurve {
        let n = k.len();
        ConsistencyCurve::new(label, Provenance::Analytic, k, s, vec![0.0; n], 0, None).unwrap()
    }

    #[test]
    fn deltas_against_first_curve() {
        let mut r = RunReport::new("compare");
        r.curves = vec![
            curve("a", vec![2, 5], vec![0.9, 0.5]),
            curve("b", vec![2, 5], vec![0.8, 0.52]),
        ];
        r.compute_deltas().unwrap();
        assert_eq!(r.deltas.len(), 1);
        assert!((r.max_gap.unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn mismatched_grids_name_both() {
        let e = curve_deltas(&[curve("a", vec![2, 5], vec![0.9, 0.5]), curve("b", vec![3], vec![0.1])])
            .unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("[2, 5]") && msg.contains("[3]"), "{msg}");
    }

    #[test]
    fn json_round_trip() {
        let mut r = RunReport::new("analytic");
        r.param("seed", 7u64);
        r.curves.push(curve("a", vec![2], vec![0.99]));
        let back: RunReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
