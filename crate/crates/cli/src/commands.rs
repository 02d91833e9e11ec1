use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use lame_core::continuation::{
    continue_along, init_state, monodromy_permutation, PathSpec, PermutationResult, Trajectory,
};
use lame_core::elliptic::QContext;
use lame_core::monodromy::{branch_scan, exponent, ScanResult};
use lame_core::perturbation::{
    estimate_radius, expand_exact, expand_with, format_rational, parse_rational, Normalization,
    RadiusEstimate,
};
use lame_core::reference;
use lame_core::report::{
    trajectory_lines, CandidateJson, PermutationReport, Provenance, RadiusReport, RadiusRow,
    ScanReport, SeriesDocument,
};
use lame_core::trig_basis::ModelParams;
use lame_core::{RationalSeries, C64};
use rayon::prelude::*;
use serde::Serialize;
use twofloat::TwoFloat;

use crate::config::{Arithmetic, RunConfig};

/// Why a command stopped; mapped to the process exit code.
#[derive(Debug)]
pub enum Failure {
    Config(Vec<String>),
    Numerical(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
            Self::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(errs) => {
                writeln!(f, "invalid configuration:")?;
                for e in errs {
                    writeln!(f, "  {e}")?;
                }
                Ok(())
            }
            Self::Numerical(m) => write!(f, "numerical failure: {m}"),
            Self::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<lame_core::Error> for Failure {
    fn from(e: lame_core::Error) -> Self {
        match e {
            lame_core::Error::InvalidParameter(m) => Self::Config(vec![m]),
            e => Self::Numerical(e.to_string()),
        }
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;

/// Output directory plus the provenance stamped on every file.
pub struct Run {
    pub config: RunConfig,
    pub out: PathBuf,
}

impl Run {
    fn provenance(&self) -> Provenance {
        Provenance::new(self.config.to_value())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn write(&self, name: &str, contents: &str) -> Outcome<()> {
        write_file(&self.path(name), contents)
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Outcome<()> {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
        s.push('\n');
        self.write(name, &s)
    }

    fn need_n1(&self, what: &str) -> Outcome<()> {
        if self.config.n == 1 {
            Ok(())
        } else {
            Err(Failure::Config(vec![format!(
                "n: {what} is implemented for n = 1 only (got {})",
                self.config.n
            )]))
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Outcome<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn fmt_c(z: C64) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}

// ---------------------------------------------------------------- series

pub struct SeriesRow {
    pub series: RationalSeries,
    pub radius: Option<RadiusEstimate>,
}

pub fn series(run: &Run) -> Outcome<Vec<SeriesRow>> {
    let cfg = &run.config.series;
    let params = ModelParams::new(run.config.n)?;
    let rows = cfg
        .m
        .par_iter()
        .map(|&m| -> Outcome<SeriesRow> {
            let series = expand_exact(m, cfg.k_max, params)?;
            let radius = if series.order() >= cfg.k_min + 10 {
                Some(estimate_radius(&series, cfg.k_min)?)
            } else {
                None
            };
            Ok(SeriesRow { series, radius })
        })
        .collect::<Outcome<Vec<_>>>()?;

    let prov = run.provenance();
    for row in &rows {
        let m = row.series.m();
        let doc = SeriesDocument {
            series: row.series.to_json(),
            radius: row.radius,
            provenance: prov.clone(),
        };
        run.write_json(&format!("series_m{m}.json"), &doc)?;
        run.write(&format!("series_m{m}.csv"), &row.series.to_csv())?;
    }
    run.write("table1.txt", &series_table(run.config.n, &rows))?;
    Ok(rows)
}

fn series_table(n: u32, rows: &[SeriesRow]) -> String {
    let mut out = format!("n = {n}; E_m(q) = pi^2 (sum_k c_k q^(2k)); last column: inferred radius\n");
    for row in rows {
        let mut terms = Vec::new();
        for (k, c) in row.series.coeffs().iter().enumerate() {
            let c = format_rational(c);
            let c = c.strip_suffix("/1").unwrap_or(&c).to_string();
            terms.push(match k {
                0 => c,
                1 => format!("{c} q^2"),
                _ => format!("{c} q^{}", 2 * k),
            });
        }
        let radius = row
            .radius
            .map_or("n/a".to_string(), |r| format!("{:.3}", r.radius));
        let _ = writeln!(
            out,
            "E_{}(q) | pi^2 ({} + ...) | {radius}",
            row.series.m(),
            terms.join(" + ")
        );
    }
    out
}

// ---------------------------------------------------------------- radius

pub fn radius(run: &Run) -> Outcome<RadiusReport> {
    let cfg = &run.config.radius;
    let params = ModelParams::new(run.config.n)?;
    let rows = cfg
        .m
        .par_iter()
        .map(|&m| -> Outcome<RadiusRow> {
            let norm = Normalization::Intermediate;
            let estimate = match cfg.arithmetic {
                Arithmetic::Exact => estimate_radius(&expand_exact(m, cfg.k_max, params)?, cfg.k_min)?,
                Arithmetic::Double => estimate_radius(&expand_with::<f64>(m, cfg.k_max, params, norm)?.0, cfg.k_min)?,
                Arithmetic::DoubleDouble => {
                    estimate_radius(&expand_with::<TwoFloat>(m, cfg.k_max, params, norm)?.0, cfg.k_min)?
                }
            };
            Ok(RadiusRow {
                m,
                k_max: cfg.k_max,
                k_min: cfg.k_min,
                arithmetic: cfg.arithmetic.name().to_string(),
                estimate: Some(estimate),
            })
        })
        .collect::<Outcome<Vec<_>>>()?;
    let report = RadiusReport {
        n: run.config.n,
        rows,
        provenance: run.provenance(),
    };
    run.write_json("radius.json", &report)?;
    let mut txt = format!(
        "n = {}; fit over k = {}..{} in {} arithmetic\n m   radius   tail\n",
        report.n,
        cfg.k_min,
        cfg.k_max,
        cfg.arithmetic.name()
    );
    for r in &report.rows {
        if let Some(e) = r.estimate {
            let _ = writeln!(txt, "{:>2}   {:.4}   {:.4}", r.m, e.radius, e.tail_radius);
        }
    }
    run.write("radius.txt", &txt)?;
    Ok(report)
}

// ---------------------------------------------------------------- scan

pub fn scan(run: &Run) -> Outcome<ScanResult> {
    run.need_n1("the branch scan")?;
    let cfg = &run.config.scan;
    let result = branch_scan(cfg.region(), cfg.options())?;
    for f in &result.failures {
        log::debug!("grid point {} failed: {}", fmt_c(f.q), f.reason);
    }
    let report = ScanReport {
        candidates: result.candidates.iter().map(CandidateJson::from).collect(),
        grid_points: result.grid_points,
        failed_points: result.failures.len(),
        provenance: run.provenance(),
    };
    run.write_json("scan.json", &report)?;
    run.write("scan.txt", &scan_table(&result))?;
    Ok(result)
}

fn scan_table(r: &ScanResult) -> String {
    let mut out = format!(
        "{} candidates from {} grid points ({} failed)\n",
        r.candidates.len(),
        r.grid_points,
        r.failures.len()
    );
    for (title, periodic) in [("periodic (even m)", true), ("anti-periodic (odd m)", false)] {
        let _ = writeln!(out, "\n{title}\n  {:<22} {:<24} {:>3}  {:>9}  class", "q", "t0", "m", "residual");
        for c in r.candidates.iter().filter(|c| c.point.is_periodic() == periodic) {
            let _ = writeln!(
                out,
                "  {:<22} {:<24} {:>3}  {:>9.2e}  {}",
                fmt_c(c.point.q),
                fmt_c(c.point.t0),
                c.point.m,
                c.residual(),
                c.classification.label()
            );
        }
    }
    out
}

// ---------------------------------------------------------------- continue

pub struct ContinueOutput {
    pub tracks: Vec<Trajectory>,
    pub permutations: Vec<PermutationResult>,
}

pub fn track(run: &Run, index: usize) -> Outcome<Trajectory> {
    let cfg = &run.config.continuation;
    let t = &cfg.tracks[index];
    let controls = cfg.controls();
    let params = ModelParams::new(1)?;
    let (series, _) = expand_with::<f64>(t.m, cfg.k_max, params, Normalization::Intermediate)?;
    let mut state = init_state(t.m, t.q_start, &series, &controls)?;
    let path = t.path.spec();
    let start = path
        .start()
        .ok_or_else(|| Failure::Config(vec![format!("continue.tracks[{index}].path: empty")]))?;
    let q0 = C64::new(t.q_start, 0.0);
    if (start - q0).norm() > 0.0 {
        state = *continue_along(state, &PathSpec::line(q0, start, 200), &controls)
            .map_err(|e| stalled(format!("track {index} (E_{}) approach", t.m), e))?
            .last();
    }
    continue_along(state, &path, &controls).map_err(|e| stalled(format!("track {index} (E_{})", t.m), e))
}

fn stalled(what: String, e: lame_core::Error) -> Failure {
    match Failure::from(e) {
        Failure::Numerical(m) => Failure::Numerical(format!("{what}: {m}")),
        other => other,
    }
}

pub fn continuation(run: &Run) -> Outcome<ContinueOutput> {
    run.need_n1("continuation")?;
    let cfg = &run.config.continuation;
    let prov = run.provenance();
    let mut summary = String::new();

    let tracks = (0..cfg.tracks.len())
        .into_par_iter()
        .map(|i| track(run, i))
        .collect::<Outcome<Vec<_>>>()?;
    for (i, traj) in tracks.iter().enumerate() {
        let lines = trajectory_lines(&prov, &traj.steps).map_err(|e| Failure::Io(e.to_string()))?;
        run.write(&format!("track_{i}.jsonl"), &lines)?;
        let (a, b) = (traj.first(), traj.last());
        let _ = writeln!(
            summary,
            "track {i}: E_{} from q = {} (E = {}, m = {}) to q = {} (E = {}, m = {}), {} steps",
            cfg.tracks[i].m,
            fmt_c(a.q),
            fmt_c(a.e),
            a.m,
            fmt_c(b.q),
            fmt_c(b.e),
            b.m,
            traj.steps.len()
        );
    }

    let opts = cfg.permutation_options();
    let permutations = cfg
        .anchors
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            monodromy_permutation(C64::new(a.q[0], a.q[1]), &a.indices, &opts)
                .map_err(|e| stalled(format!("anchor {i} ({})", fmt_c(C64::new(a.q[0], a.q[1]))), e))
        })
        .collect::<Outcome<Vec<_>>>()?;
    for (i, p) in permutations.iter().enumerate() {
        run.write_json(&format!("perm_{i}.json"), &PermutationReport::new(p, prov.clone()))?;
        for (traj, (m, _)) in p.cycles.iter().zip(&p.perm) {
            let lines = trajectory_lines(&prov, &traj.steps).map_err(|e| Failure::Io(e.to_string()))?;
            run.write(&format!("perm_{i}_m{m}.jsonl"), &lines)?;
        }
        let _ = writeln!(summary, "a = {}: {}", fmt_c(p.anchor), perm_text(&p.perm));
    }
    run.write("continue.txt", &summary)?;
    Ok(ContinueOutput { tracks, permutations })
}

fn perm_text(perm: &[(usize, usize)]) -> String {
    perm.iter()
        .map(|(a, b)| format!("E_{a} => E_{b}"))
        .collect::<Vec<_>>()
        .join(", ")
}

// ---------------------------------------------------------------- wp-eval

/// Prints values and identity checks; returns whether every check passed.
pub fn wp_eval(run: &Run) -> Outcome<(String, bool)> {
    let cfg = &run.config.wp_eval;
    let q = C64::new(cfg.q[0], cfg.q[1]);
    let ctx = match cfg.truncation {
        Some(k) => QContext::new(q, k)?,
        None => QContext::with_auto_truncation(q)?,
    };
    let k = ctx.constants()?;
    let mut out = String::new();
    let _ = writeln!(out, "q      = {}   (K = {})", fmt_c(q), ctx.truncation());
    let _ = writeln!(out, "eta_1  = {}", fmt_c(k.eta1));
    let _ = writeln!(out, "eta_3  = {}", fmt_c(k.eta3));
    for (i, e) in k.e_all().iter().enumerate() {
        let _ = writeln!(out, "e_{}    = {}", i + 1, fmt_c(*e));
    }
    let mut checks: Vec<(String, f64)> = Vec::new();
    let [e1, e2, e3] = k.e_all();
    checks.push((
        "e_1 + e_2 + e_3 = 0".into(),
        (e1 + e2 + e3).norm() / (1.0 + e1.norm() + e2.norm() + e3.norm()),
    ));
    if let Some(tau) = ctx.tau() {
        // zeta(tau/2) from the series itself, not from the quasi-period bookkeeping
        let eta3 = ctx.eval_unreduced(tau * 0.5)?.zeta;
        let lhs = k.eta1 * tau - eta3;
        let pi_i = C64::new(0.0, std::f64::consts::PI);
        checks.push((
            "eta_1 tau - eta_3 = pi i".into(),
            (lhs - pi_i).norm() / (1.0 + (k.eta1 * tau).norm()),
        ));
    }
    for x in &cfg.x {
        let x = C64::new(x[0], x[1]);
        let v = ctx.eval(x)?;
        let _ = writeln!(
            out,
            "x = {}: wp = {}, wp' = {}, zeta = {}, exponent = {}",
            fmt_c(x),
            fmt_c(v.wp),
            fmt_c(v.wp_prime),
            fmt_c(v.zeta),
            fmt_c(exponent(&ctx, x)?)
        );
        let rhs = (v.wp - e1) * (v.wp - e2) * (v.wp - e3) * 4.0;
        let lhs = v.wp_prime * v.wp_prime;
        checks.push((
            format!("wp'^2 = 4 prod (wp - e_i) at x = {}", fmt_c(x)),
            (lhs - rhs).norm() / (1.0 + lhs.norm()),
        ));
    }
    let mut ok = true;
    for (name, err) in &checks {
        let pass = *err <= cfg.tol;
        ok &= pass;
        let _ = writeln!(
            out,
            "{} {name} (relative error {err:.1e}, tol {:.0e})",
            if pass { "PASS" } else { "FAIL" },
            cfg.tol
        );
    }
    Ok((out, ok))
}

// ---------------------------------------------------------------- reproduce-paper

struct Checklist {
    text: String,
    failed: usize,
}

impl Checklist {
    fn new() -> Self {
        Self {
            text: String::new(),
            failed: 0,
        }
    }

    fn check(&mut self, pass: bool, what: String) {
        if !pass {
            self.failed += 1;
        }
        let _ = writeln!(self.text, "{} {what}", if pass { "PASS" } else { "FAIL" });
    }

    fn note(&mut self, what: String) {
        let _ = writeln!(self.text, "NOTE {what}");
    }

    fn section(&mut self, title: &str) {
        let _ = writeln!(self.text, "\n== {title}");
    }
}

/// Rebuild the tables of the reference listing into `out/` and compare.
/// Returns the summary and the number of failed comparisons.
pub fn reproduce(run: &Run) -> Outcome<(String, usize)> {
    run.need_n1("the reproduction")?;
    let mut list = Checklist::new();

    list.section("series");
    let mut with_rows = run.config.clone();
    let mut ms: Vec<usize> = reference::SERIES.iter().map(|r| r.0).collect();
    ms.extend([5]);
    ms.sort_unstable();
    with_rows.series.m = ms;
    with_rows.series.k_max = with_rows
        .series
        .k_max
        .max(reference::SERIES.iter().map(|r| r.1.len()).max().unwrap_or(1));
    let sub = Run {
        config: with_rows,
        out: run.out.join("series"),
    };
    let rows = series(&sub)?;
    for (m, printed) in reference::SERIES {
        let label = reference::series_label(*m);
        let s = &rows.iter().find(|r| r.series.m() == *m).expect("row computed").series;
        let mut bad = Vec::new();
        for (k, p) in printed.iter().enumerate() {
            let got = &s.coeffs()[k];
            if *p == reference::E0_Q12 && *m == 0 {
                let want = parse_rational(p).expect("valid literal");
                list.note(format!(
                    "E_0 q^12: computed {}, listed {p}: {}",
                    format_rational(got),
                    if *got == want { "match" } else { "mismatch" }
                ));
                continue;
            }
            if *got != parse_rational(p).expect("valid literal") {
                bad.push(k);
            }
        }
        let row = if label == *m {
            format!("E_{m}")
        } else {
            format!("E_{label} (computed as m = {m})")
        };
        list.check(bad.is_empty(), format!("{row}: {} listed coefficients, mismatches at k = {bad:?}", printed.len()));
    }

    list.section("radius");
    let radius = radius(&Run {
        config: run.config.clone(),
        out: run.out.join("radius"),
    })?;
    for (m, want) in reference::RADII {
        match radius.rows.iter().find(|r| r.m == *m).and_then(|r| r.estimate) {
            Some(e) => list.check(
                (e.radius - want).abs() <= 0.02,
                format!("E_{m}: radius {:.4} (tail {:.4}) vs {want}", e.radius, e.tail_radius),
            ),
            None => list.check(false, format!("E_{m}: no radius estimate")),
        }
    }
    for (q, modulus, ms) in reference::NEAREST_BRANCHES {
        for m in ms.iter() {
            if let Some(e) = radius.rows.iter().find(|r| r.m == *m).and_then(|r| r.estimate) {
                list.check(
                    (e.radius - modulus).abs() <= 0.02,
                    format!("|{}| = {modulus} vs radius of E_{m} {:.4}", fmt_c(reference::c(*q)), e.radius),
                );
            }
        }
    }

    list.section("branch points");
    let scan = scan(&Run {
        config: run.config.clone(),
        out: run.out.join("scan"),
    })?;
    let listed: Vec<(C64, bool)> = reference::PERIODIC_POINTS
        .iter()
        .map(|p| (reference::c(*p), true))
        .chain(reference::ANTIPERIODIC_POINTS.iter().map(|p| (reference::c(*p), false)))
        .collect();
    for (q, periodic) in &listed {
        let hit = scan
            .candidates
            .iter()
            .filter(|c| c.point.is_periodic() == *periodic)
            .map(|c| (c.point.q - q).norm())
            .fold(f64::INFINITY, f64::min);
        list.check(
            hit <= 1e-4,
            format!(
                "{} ({}): nearest candidate at distance {hit:.1e}",
                fmt_c(*q),
                if *periodic { "periodic" } else { "anti-periodic" }
            ),
        );
    }
    let extra: Vec<_> = scan
        .candidates
        .iter()
        .filter(|c| listed.iter().all(|(q, _)| (c.point.q - q).norm() > 1e-3))
        .collect();
    list.check(extra.is_empty(), format!("{} unlisted candidates", extra.len()));
    for c in extra {
        list.note(format!("unlisted candidate {} m = {} ({})", fmt_c(c.point.q), c.point.m, c.classification.label()));
    }

    list.section("coincidences");
    for (q, i) in reference::COINCIDENCES {
        let q = reference::c(*q);
        let class = scan
            .candidates
            .iter()
            .filter(|c| (c.point.q - q).norm() <= 1e-4)
            .map(|c| c.classification.label())
            .next()
            .unwrap_or("missing");
        list.check(class == format!("e{i}"), format!("{}: class {class}, listed e{i}", fmt_c(q)));
    }

    list.section("permutations");
    let mut perm_cfg = run.config.clone();
    perm_cfg.continuation.tracks.clear();
    perm_cfg.continuation.anchors = crate::config::ContinueConfig::default().anchors;
    let cont = continuation(&Run {
        config: perm_cfg,
        out: run.out.join("continue"),
    })?;
    for ((a, want), got) in reference::PERMUTATIONS.iter().zip(&cont.permutations) {
        list.check(
            got.perm == want.to_vec(),
            format!("a = {}: {}", fmt_c(reference::c(*a)), perm_text(&got.perm)),
        );
    }

    let summary = format!(
        "{}\n{} comparisons failed\n",
        list.text.trim_start(),
        list.failed
    );
    run.write("reproduce.txt", &summary)?;
    Ok((summary, list.failed))
}
