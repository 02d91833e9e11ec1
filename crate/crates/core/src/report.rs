//! Serialisable shapes of every output file.
//!
//! Complex numbers are written as `[re, im]`, rationals as `"p/q"` strings.
//! Each document carries the library version and the resolved run
//! configuration; trajectory files carry them in a leading header line.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::continuation::{PermutationResult, TrajectoryStep};
use crate::monodromy::BranchCandidate;
use crate::perturbation::{RadiusEstimate, SeriesJson};
use crate::VERSION;

pub type Pair = [f64; 2];

pub fn pair(z: Complex<f64>) -> Pair {
    [z.re, z.im]
}

pub fn unpair(p: Pair) -> Complex<f64> {
    Complex::new(p[0], p[1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub config: serde_json::Value,
}

impl Provenance {
    pub fn new(config: serde_json::Value) -> Self {
        Self {
            version: VERSION.to_string(),
            config,
        }
    }
}

/// Exact series export.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesDocument {
    #[serde(flatten)]
    pub series: SeriesJson,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub radius: Option<RadiusEstimate>,
    #[serde(flatten)]
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusRow {
    pub m: usize,
    pub k_max: usize,
    pub k_min: usize,
    pub arithmetic: String,
    /// `None` when the order is too low for a fit.
    pub estimate: Option<RadiusEstimate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusReport {
    pub n: u32,
    pub rows: Vec<RadiusRow>,
    #[serde(flatten)]
    pub provenance: Provenance,
}

/// One scan candidate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateJson {
    pub q: Pair,
    pub t0: Pair,
    pub m: i64,
    pub residual: f64,
    pub class: String,
}

impl From<&BranchCandidate> for CandidateJson {
    fn from(c: &BranchCandidate) -> Self {
        Self {
            q: pair(c.point.q),
            t0: pair(c.point.t0),
            m: c.point.m,
            residual: c.residual(),
            class: c.classification.label().to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub candidates: Vec<CandidateJson>,
    pub grid_points: usize,
    pub failed_points: usize,
    #[serde(flatten)]
    pub provenance: Provenance,
}

/// One line of a trajectory file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub s: f64,
    pub q: Pair,
    #[serde(rename = "E")]
    pub e: Pair,
    pub t0: Pair,
    pub m: i64,
}

impl From<&TrajectoryStep> for TrajectoryRecord {
    fn from(s: &TrajectoryStep) -> Self {
        Self {
            s: s.s,
            q: pair(s.point.q),
            e: pair(s.point.e),
            t0: pair(s.point.t0),
            m: s.point.m,
        }
    }
}

/// Serialise a trajectory as JSON lines: a provenance header, then one
/// [`TrajectoryRecord`] per step.
pub fn trajectory_lines<'a>(
    provenance: &Provenance,
    steps: impl IntoIterator<Item = &'a TrajectoryStep>,
) -> serde_json::Result<String> {
    let mut out = serde_json::to_string(&serde_json::json!({ "header": provenance }))?;
    out.push('\n');
    for s in steps {
        out.push_str(&serde_json::to_string(&TrajectoryRecord::from(s))?);
        out.push('\n');
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PermutationReport {
    pub anchor: Pair,
    pub parity: String,
    pub radius: f64,
    pub perm: Vec<[usize; 2]>,
    #[serde(flatten)]
    pub provenance: Provenance,
}

impl PermutationReport {
    pub fn new(r: &PermutationResult, provenance: Provenance) -> Self {
        Self {
            anchor: pair(r.anchor),
            parity: if r.periodic { "even" } else { "odd" }.to_string(),
            radius: r.radius,
            perm: r.perm.iter().map(|&(a, b)| [a, b]).collect(),
            provenance,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trajectory_record_uses_upper_case_energy() {
        let r = TrajectoryRecord {
            s: 0.5,
            q: [0.1, 0.2],
            e: [1.0, -1.0],
            t0: [0.3, 0.0],
            m: -2,
        };
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["E"], serde_json::json!([1.0, -1.0]));
        assert_eq!(v["m"], -2);
    }

    #[test]
    fn provenance_is_flattened() {
        let rep = PermutationReport {
            anchor: [0.1, 0.2],
            parity: "even".into(),
            radius: 0.02,
            perm: vec![[0, 2], [2, 0]],
            provenance: Provenance::new(serde_json::json!({"a": 1})),
        };
        let v = serde_json::to_value(&rep).unwrap();
        assert_eq!(v["version"], VERSION);
        assert_eq!(v["config"]["a"], 1);
        assert_eq!(v["perm"], serde_json::json!([[0, 2], [2, 0]]));
    }
}
