//! Run configuration: one JSON document with a block per subcommand.
//!
//! Every field has a default, so `{}` is a valid config. Command-line
//! flags are applied on top of the file before validation.

use lame_core::continuation::{Controls, PathSpec, PermutationOptions};
use lame_core::monodromy::{ScanOptions, ScanRegion};
use lame_core::perturbation::DEFAULT_K_MIN;
use lame_core::reference;
use lame_core::C64;
use serde::{Deserialize, Serialize};

pub type Pair = [f64; 2];

fn c(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Lame parameter; scan and continuation require `n = 1`.
    pub n: u32,
    pub series: SeriesConfig,
    pub radius: RadiusConfig,
    pub scan: ScanConfig,
    #[serde(rename = "continue")]
    pub continuation: ContinueConfig,
    pub wp_eval: WpEvalConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 1,
            series: SeriesConfig::default(),
            radius: RadiusConfig::default(),
            scan: ScanConfig::default(),
            continuation: ContinueConfig::default(),
            wp_eval: WpEvalConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeriesConfig {
    pub m: Vec<usize>,
    pub k_max: usize,
    pub k_min: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            m: (0..=5).collect(),
            k_max: 20,
            k_min: DEFAULT_K_MIN,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Arithmetic {
    Exact,
    Double,
    DoubleDouble,
}

impl Arithmetic {
    pub fn name(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Double => "double",
            Self::DoubleDouble => "double-double",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadiusConfig {
    pub m: Vec<usize>,
    pub k_max: usize,
    pub k_min: usize,
    pub arithmetic: Arithmetic,
}

impl Default for RadiusConfig {
    fn default() -> Self {
        Self {
            m: vec![0, 2, 4, 1, 3, 5],
            k_max: 200,
            k_min: DEFAULT_K_MIN,
            arithmetic: Arithmetic::DoubleDouble,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub re: Pair,
    pub im: Pair,
    pub max_modulus: f64,
    pub grid: [usize; 2],
    pub m_range: [i64; 2],
    pub truncation: Option<usize>,
    pub tol_branch: f64,
    pub tol_class: f64,
    pub dedup: f64,
    pub near_integer: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        let r = ScanRegion::quarter_disk(0.904);
        let o = ScanOptions::default();
        Self {
            re: [r.re.0, r.re.1],
            im: [r.im.0, r.im.1],
            max_modulus: r.max_modulus,
            grid: [o.nx, o.ny],
            m_range: [o.m_range.0, o.m_range.1],
            truncation: o.truncation,
            tol_branch: o.tol_branch,
            tol_class: o.tol_class,
            dedup: o.dedup,
            near_integer: o.near_integer,
        }
    }
}

impl ScanConfig {
    pub fn region(&self) -> ScanRegion {
        ScanRegion {
            re: (self.re[0], self.re[1]),
            im: (self.im[0], self.im[1]),
            max_modulus: self.max_modulus,
        }
    }

    pub fn options(&self) -> ScanOptions {
        ScanOptions {
            nx: self.grid[0],
            ny: self.grid[1],
            m_range: (self.m_range[0], self.m_range[1]),
            truncation: self.truncation,
            tol_branch: self.tol_branch,
            tol_class: self.tol_class,
            dedup: self.dedup,
            near_integer: self.near_integer,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum PathConfig {
    Polyline { points: Vec<Pair>, steps: usize },
    Cycle { anchor: Pair, radius: f64, steps: usize },
}

impl PathConfig {
    pub fn spec(&self) -> PathSpec {
        match self {
            Self::Polyline { points, steps } => PathSpec::Polyline {
                points: points.iter().copied().map(c).collect(),
                steps: *steps,
            },
            Self::Cycle {
                anchor,
                radius,
                steps,
            } => PathSpec::Cycle {
                anchor: c(*anchor),
                radius: *radius,
                steps: *steps,
            },
        }
    }
}

/// Continue `E_m` from the series value at `q_start` to the start of
/// `path`, then along it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackConfig {
    pub m: usize,
    #[serde(default = "default_q_start")]
    pub q_start: f64,
    pub path: PathConfig,
}

fn default_q_start() -> f64 {
    0.2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorConfig {
    pub q: Pair,
    pub indices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContinueConfig {
    pub tracks: Vec<TrackConfig>,
    pub anchors: Vec<AnchorConfig>,
    pub radius: f64,
    pub cycle_steps: usize,
    pub q_base: f64,
    pub k_max: usize,
    pub match_tol: f64,
    pub truncation: Option<usize>,
    pub max_halvings: u32,
    pub newton_tol: f64,
    pub step_jump_max: f64,
    pub branch_guard: f64,
    pub residual_tol: f64,
}

impl Default for ContinueConfig {
    fn default() -> Self {
        let o = PermutationOptions::default();
        let c = o.controls;
        Self {
            tracks: Vec::new(),
            anchors: reference::PERMUTATIONS
                .iter()
                .map(|(a, perm)| AnchorConfig {
                    q: [a.0, a.1],
                    indices: perm.iter().map(|p| p.0).collect(),
                })
                .collect(),
            radius: o.radius,
            cycle_steps: o.cycle_steps,
            q_base: o.q_base,
            k_max: o.k_max,
            match_tol: o.match_tol,
            truncation: c.truncation,
            max_halvings: c.max_halvings,
            newton_tol: c.newton_tol,
            step_jump_max: c.step_jump_max,
            branch_guard: c.branch_guard,
            residual_tol: c.residual_tol,
        }
    }
}

impl ContinueConfig {
    pub fn controls(&self) -> Controls {
        Controls {
            truncation: self.truncation,
            max_halvings: self.max_halvings,
            newton_tol: self.newton_tol,
            step_jump_max: self.step_jump_max,
            branch_guard: self.branch_guard,
            residual_tol: self.residual_tol,
        }
    }

    pub fn permutation_options(&self) -> PermutationOptions {
        PermutationOptions {
            q_base: self.q_base,
            radius: self.radius,
            cycle_steps: self.cycle_steps,
            k_max: self.k_max,
            match_tol: self.match_tol,
            controls: self.controls(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WpEvalConfig {
    pub q: Pair,
    pub x: Vec<Pair>,
    pub truncation: Option<usize>,
    /// Tolerance of the printed identity checks.
    pub tol: f64,
}

impl Default for WpEvalConfig {
    fn default() -> Self {
        Self {
            q: [0.25, 0.25],
            x: vec![[0.31, 0.05], [0.1, 0.2]],
            truncation: None,
            tol: 1e-10,
        }
    }
}

/// Command-line overrides, applied in the order `--slow`, then the
/// explicit flags.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub k_max: Option<usize>,
    pub truncation: Option<usize>,
    pub tol: Option<f64>,
    pub slow: bool,
}

pub const SLOW_K_MAX: usize = 110;
pub const SLOW_TRUNCATION: usize = 300;

impl RunConfig {
    pub fn apply(&mut self, o: Overrides) {
        let k_max = o.k_max.or(o.slow.then_some(SLOW_K_MAX));
        let trunc = o.truncation.or(o.slow.then_some(SLOW_TRUNCATION));
        if let Some(k) = k_max {
            self.series.k_max = k;
            self.radius.k_max = k;
        }
        if let Some(k) = trunc {
            self.scan.truncation = Some(k);
            self.continuation.truncation = Some(k);
            self.wp_eval.truncation = Some(k);
        }
        if let Some(t) = o.tol {
            self.scan.tol_branch = t;
            self.continuation.residual_tol = t;
            self.wp_eval.tol = t;
        }
    }

    /// Field-level problems, empty when the config is usable.
    pub fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        let mut check = |ok: bool, field: &str, msg: &str| {
            if !ok {
                errs.push(format!("{field}: {msg}"));
            }
        };
        let pos = |x: f64| x.is_finite() && x > 0.0;
        let in_disk = |p: Pair| p[0].is_finite() && p[1].is_finite() && c(p).norm() < 1.0;

        check(self.n >= 1, "n", "must be at least 1");

        check(!self.series.m.is_empty(), "series.m", "must list at least one index");
        check(self.series.k_min >= 1, "series.k_min", "must be at least 1");
        check(!self.radius.m.is_empty(), "radius.m", "must list at least one index");
        check(self.radius.k_min >= 1, "radius.k_min", "must be at least 1");
        check(
            self.radius.k_max >= self.radius.k_min + 10,
            "radius.k_max",
            "must be at least radius.k_min + 10",
        );

        let s = &self.scan;
        check(s.re[0] < s.re[1], "scan.re", "needs min < max");
        check(s.im[0] < s.im[1], "scan.im", "needs min < max");
        check(
            pos(s.max_modulus) && s.max_modulus < 0.97,
            "scan.max_modulus",
            "must lie in (0, 0.97)",
        );
        check(s.grid[0] > 0 && s.grid[1] > 0, "scan.grid", "must be positive");
        check(s.m_range[0] <= s.m_range[1], "scan.m_range", "needs min <= max");
        check(s.truncation != Some(0), "scan.truncation", "must be positive");
        check(pos(s.tol_branch), "scan.tol_branch", "must be positive");
        check(pos(s.tol_class), "scan.tol_class", "must be positive");
        check(pos(s.dedup), "scan.dedup", "must be positive");
        check(
            s.near_integer > 0.0 && s.near_integer <= 0.5,
            "scan.near_integer",
            "must lie in (0, 0.5]",
        );

        let k = &self.continuation;
        for (i, t) in k.tracks.iter().enumerate() {
            check(
                t.q_start > 0.0 && t.q_start <= 0.3,
                &format!("continue.tracks[{i}].q_start"),
                "must lie in (0, 0.3]",
            );
            let field = format!("continue.tracks[{i}].path");
            match &t.path {
                PathConfig::Polyline { points, steps } => {
                    check(!points.is_empty(), &field, "needs at least one point");
                    check(*steps > 0, &field, "needs a positive step count");
                    check(points.iter().all(|p| in_disk(*p)), &field, "points must lie in |q| < 1");
                }
                PathConfig::Cycle {
                    anchor,
                    radius,
                    steps,
                } => {
                    check(pos(*radius), &field, "radius must be positive");
                    check(*steps >= 4, &field, "needs at least 4 steps");
                    check(
                        c(*anchor).norm() + radius < 1.0,
                        &field,
                        "cycle must lie in |q| < 1",
                    );
                }
            }
        }
        for (i, a) in k.anchors.iter().enumerate() {
            let field = format!("continue.anchors[{i}]");
            check(
                in_disk(a.q) && c(a.q).norm() + k.radius < 1.0,
                &format!("{field}.q"),
                "cycle must lie in |q| < 1",
            );
            check(!a.indices.is_empty(), &format!("{field}.indices"), "must be non-empty");
            check(
                a.indices.iter().all(|m| m % 2 == a.indices[0] % 2),
                &format!("{field}.indices"),
                "must share one parity",
            );
        }
        check(pos(k.radius), "continue.radius", "must be positive");
        check(k.cycle_steps >= 4, "continue.cycle_steps", "must be at least 4");
        check(
            k.q_base > 0.0 && k.q_base <= 0.3,
            "continue.q_base",
            "must lie in (0, 0.3]",
        );
        check(k.k_max >= 1, "continue.k_max", "must be at least 1");
        check(pos(k.match_tol), "continue.match_tol", "must be positive");
        check(k.truncation != Some(0), "continue.truncation", "must be positive");
        check(pos(k.newton_tol), "continue.newton_tol", "must be positive");
        check(pos(k.step_jump_max), "continue.step_jump_max", "must be positive");
        check(pos(k.branch_guard), "continue.branch_guard", "must be positive");
        check(pos(k.residual_tol), "continue.residual_tol", "must be positive");

        let w = &self.wp_eval;
        check(in_disk(w.q), "wp_eval.q", "must lie in |q| < 1");
        check(w.x.iter().all(|x| x[0].is_finite() && x[1].is_finite()), "wp_eval.x", "must be finite");
        check(w.truncation != Some(0), "wp_eval.truncation", "must be positive");
        check(pos(w.tol), "wp_eval.tol", "must be positive");
        errs
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_default() {
        let c: RunConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(c, RunConfig::default());
        assert!(c.validate().is_empty());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"series": {"kmax": 3}}"#).is_err());
    }

    #[test]
    fn round_trip() {
        let c = RunConfig::default();
        let back: RunConfig = serde_json::from_value(c.to_value()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn slow_then_explicit() {
        let mut c = RunConfig::default();
        c.apply(Overrides {
            slow: true,
            k_max: Some(30),
            ..Default::default()
        });
        assert_eq!(c.series.k_max, 30);
        assert_eq!(c.scan.truncation, Some(SLOW_TRUNCATION));
    }

    #[test]
    fn field_level_messages() {
        let mut c = RunConfig::default();
        c.scan.tol_branch = -1.0;
        c.wp_eval.q = [1.0, 0.5];
        let errs = c.validate();
        assert!(errs.iter().any(|e| e.starts_with("scan.tol_branch")));
        assert!(errs.iter().any(|e| e.starts_with("wp_eval.q")));
    }
}
