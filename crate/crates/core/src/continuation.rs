//! Analytic continuation of `n = 1` eigenvalues along paths in the `q`-plane.
//!
//! A state `(q, t0, m)` is moved along the path keeping
//! `E = -wp(t0)` and `2 eta_1 t0 - zeta(t0) = m pi i`. Each step predicts
//! `t0` from the tangent `dt0/dq = -g_q / g_t` of
//! `g(t) = zeta(t) - 2 eta_1 t + m pi i` and corrects with Newton on `g`
//! (`g_t = -wp(t) - 2 eta_1`). Failed steps are halved. Whenever `t0`
//! leaves `|Im t0| <= Im(tau)/2` or `Re t0` in `(-1/2, 1/2]` it is moved
//! back by a lattice vector, with `m -> m - 2k` for `t0 -> t0 - k tau`.

use std::f64::consts::PI;

use num_complex::Complex;
use rayon::prelude::*;

use crate::elliptic::QContext;
use crate::error::{Error, Result};
use crate::monodromy::{exponent, seed_t0, SpectralPoint};
use crate::perturbation::{expand_with, Normalization, Series};
use crate::scalar::Field;
use crate::trig_basis::ModelParams;

type C64 = Complex<f64>;

const I: C64 = Complex::new(0.0, 1.0);

/// Default number of steps around a cycle.
pub const DEFAULT_CYCLE_STEPS: usize = 400;
/// Default cycle radius.
pub const DEFAULT_RADIUS: f64 = 0.02;

/// A path in the `q`-plane.
#[derive(Clone, Debug, PartialEq)]
pub enum PathSpec {
    /// Straight segments through the waypoints; `steps` nominal steps in total.
    Polyline { points: Vec<C64>, steps: usize },
    /// From `Re a` up to `a - i rho`, once anticlockwise around the circle
    /// `|q - a| = rho`, and back down to `Re a`.
    Cycle {
        anchor: C64,
        radius: f64,
        steps: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Segment {
    Line { from: C64, to: C64 },
    Arc { centre: C64, radius: f64, start: f64 },
}

impl Segment {
    fn at(&self, u: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => from + (to - from) * u,
            Segment::Arc {
                centre,
                radius,
                start,
            } => centre + C64::from_polar(radius, start + 2.0 * PI * u),
        }
    }

    fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => (to - from).norm(),
            Segment::Arc { radius, .. } => 2.0 * PI * radius,
        }
    }
}

impl PathSpec {
    pub fn cycle(anchor: C64, radius: f64) -> Self {
        Self::Cycle {
            anchor,
            radius,
            steps: DEFAULT_CYCLE_STEPS,
        }
    }

    pub fn line(from: C64, to: C64, steps: usize) -> Self {
        Self::Polyline {
            points: vec![from, to],
            steps,
        }
    }

    /// The same path traversed backwards (polylines only).
    pub fn reversed(&self) -> Option<Self> {
        match self {
            Self::Polyline { points, steps } => Some(Self::Polyline {
                points: points.iter().rev().copied().collect(),
                steps: *steps,
            }),
            Self::Cycle { .. } => None,
        }
    }

    pub fn start(&self) -> Option<C64> {
        match self {
            Self::Polyline { points, .. } => points.first().copied(),
            Self::Cycle { anchor, .. } => Some(C64::new(anchor.re, 0.0)),
        }
    }

    fn segments(&self) -> Vec<(Segment, usize)> {
        match self {
            Self::Polyline { points, steps } => {
                let segs: Vec<Segment> = points
                    .windows(2)
                    .map(|w| Segment::Line {
                        from: w[0],
                        to: w[1],
                    })
                    .filter(|s| s.length() > 0.0)
                    .collect();
                let total: f64 = segs.iter().map(Segment::length).sum();
                segs.into_iter()
                    .map(|s| {
                        let n = ((*steps as f64) * s.length() / total).ceil() as usize;
                        (s, n.max(1))
                    })
                    .collect()
            }
            Self::Cycle {
                anchor,
                radius,
                steps,
            } => {
                let base = C64::new(anchor.re, 0.0);
                let bottom = *anchor - I * *radius;
                let leg = (steps / 4).max(1);
                vec![
                    (Segment::Line { from: base, to: bottom }, leg),
                    (
                        Segment::Arc {
                            centre: *anchor,
                            radius: *radius,
                            start: -PI / 2.0,
                        },
                        (steps / 2).max(1),
                    ),
                    (Segment::Line { from: bottom, to: base }, leg),
                ]
            }
        }
    }

    /// Every point must satisfy `0 < |q| < 1`.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            Self::Polyline { points, steps } => {
                if points.is_empty() {
                    return bad("polyline needs at least one point".into());
                }
                if *steps == 0 {
                    return bad("polyline needs a positive step count".into());
                }
                for w in points.windows(2) {
                    // the segment's closest approach to 0 and its farthest point
                    let seg = Segment::Line { from: w[0], to: w[1] };
                    let far = w[0].norm().max(w[1].norm());
                    let d = w[1] - w[0];
                    let near = if d.norm() == 0.0 {
                        w[0].norm()
                    } else {
                        let s = (-(w[0] * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
                        seg.at(s).norm()
                    };
                    if far >= 1.0 || near <= 0.0 {
                        return bad(format!("segment {} -> {} leaves 0 < |q| < 1", w[0], w[1]));
                    }
                }
                if points.iter().any(|p| p.norm() >= 1.0 || p.norm() == 0.0) {
                    return bad("polyline point outside 0 < |q| < 1".into());
                }
                Ok(())
            }
            Self::Cycle {
                anchor,
                radius,
                steps,
            } => {
                if !(*radius > 0.0) || *steps < 4 {
                    return bad("cycle needs radius > 0 and at least 4 steps".into());
                }
                if anchor.re <= 0.0 || anchor.im <= *radius || anchor.norm() + radius >= 1.0 {
                    return bad(format!("cycle around {anchor} with radius {radius} leaves the disk"));
                }
                Ok(())
            }
        }
    }
}

/// Step controls for [`continue_along`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Controls {
    pub truncation: Option<usize>,
    pub max_halvings: u32,
    /// Newton stops at `|g| <= newton_tol (1 + |2 eta_1 t0|)`.
    pub newton_tol: f64,
    /// Largest accepted correction `|t0 - t0_predicted|`.
    pub step_jump_max: f64,
    /// Steps are capped at a quarter of nominal while `|E - 2 eta_1| < branch_guard pi^2`.
    pub branch_guard: f64,
    /// Bound on both defining residuals of every recorded state.
    pub residual_tol: f64,
}

impl Default for Controls {
    fn default() -> Self {
        Self {
            truncation: None,
            max_halvings: 12,
            newton_tol: 1e-13,
            step_jump_max: 0.05,
            branch_guard: 1e-3,
            residual_tol: 1e-9,
        }
    }
}

/// One recorded state of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryStep {
    /// Arclength fraction along the path.
    pub s: f64,
    pub point: SpectralPoint<f64>,
    pub newton_iterations: usize,
    /// Lattice moves applied after this step.
    pub lattice_moves: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub steps: Vec<TrajectoryStep>,
}

impl Trajectory {
    pub fn last(&self) -> &SpectralPoint<f64> {
        &self.steps.last().expect("trajectory is never empty").point
    }

    pub fn first(&self) -> &SpectralPoint<f64> {
        &self.steps[0].point
    }
}

fn context(q: C64, truncation: Option<usize>) -> Result<QContext<f64>> {
    match truncation {
        Some(k) => QContext::new(q, k),
        None => QContext::with_auto_truncation(q),
    }
}

/// Initial state from the perturbation series of `E_{m_index}` at a small
/// real nome.
///
/// The sheet index must have the parity of `m_index`.
pub fn init_state<T: Field>(
    m_index: usize,
    q_start: f64,
    series: &Series<T>,
    controls: &Controls,
) -> Result<SpectralPoint<f64>> {
    if !(q_start > 0.0 && q_start <= 0.3) {
        return Err(Error::InvalidParameter(format!(
            "q_start = {q_start} must lie in (0, 0.3]"
        )));
    }
    let q = C64::new(q_start, 0.0);
    let ctx = context(q, controls.truncation)?;
    let e = series.evaluate(q);
    let point = SpectralPoint::from_energy(&ctx, e, seed_t0(e))?;
    let r = exponent(&ctx, point.t0)? / (I * PI);
    if (r - point.m as f64).norm() > 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "series value {e} at q = {q_start} is not a Floquet eigenvalue (r = {r})"
        )));
    }
    if point.m.rem_euclid(2) as usize != m_index % 2 {
        return Err(Error::ParityMismatch {
            index: m_index,
            sheet: point.m,
        });
    }
    Ok(point)
}

struct Corrected {
    t: C64,
    iterations: usize,
}

fn correct(ctx: &QContext<f64>, t_pred: C64, m: i64, controls: &Controls) -> Option<Corrected> {
    let two_eta = ctx.eta1() * 2.0;
    let target = I * (PI * m as f64);
    let mut t = t_pred;
    for it in 0..25 {
        let v = ctx.eval(t).ok()?;
        let g = v.zeta - two_eta * t + target;
        if g.norm() <= controls.newton_tol * (1.0 + (two_eta * t).norm()) {
            return Some(Corrected { t, iterations: it });
        }
        let slope = -v.wp - two_eta;
        let dt = g / slope;
        if !dt.is_finite() || dt.norm() > controls.step_jump_max {
            return None;
        }
        t -= dt;
    }
    None
}

/// Shift `t` into the reduced strip, adjusting `m`; returns the move count.
fn lattice_normalize(ctx: &QContext<f64>, t: &mut C64, m: &mut i64) -> u32 {
    let mut moves = 0;
    if let Some(tau) = ctx.tau() {
        let k = (t.im / tau.im).round();
        if t.im.abs() > tau.im / 2.0 && k != 0.0 {
            *t -= tau * k;
            *m -= 2 * k as i64;
            moves += k.abs() as u32;
        }
    }
    if t.re.abs() > 0.5 {
        let j = t.re.round();
        *t -= j;
        moves += j.abs() as u32;
    }
    moves
}

/// Continue `state` along `path`.
///
/// Fails with [`Error::ContinuationStall`] once a step has been halved
/// `max_halvings` times without a converged correction.
pub fn continue_along(
    state: SpectralPoint<f64>,
    path: &PathSpec,
    controls: &Controls,
) -> Result<Trajectory> {
    path.validate()?;
    let segments = path.segments();
    let total: f64 = segments.iter().map(|(s, _)| s.length()).sum();
    let mut steps = vec![TrajectoryStep {
        s: 0.0,
        point: state,
        newton_iterations: 0,
        lattice_moves: 0,
    }];
    let mut point = state;
    let mut ctx = context(point.q, controls.truncation)?;
    let mut done = 0.0;
    for (seg, n) in segments {
        let nominal = 1.0 / n as f64;
        let mut u = 0.0;
        let mut du = nominal;
        while u < 1.0 {
            let guarded = (point.e - ctx.eta1() * 2.0).norm() < controls.branch_guard * PI * PI;
            let cap = if guarded { nominal / 4.0 } else { nominal };
            du = du.min(cap).min(1.0 - u);
            let u_next = if 1.0 - u - du < 1e-12 { 1.0 } else { u + du };
            let q_next = seg.at(u_next);
            // tangent predictor
            let jet = ctx.jet(point.t0)?;
            let g_q = jet.zeta_dq - ctx.eta1_dq() * point.t0 * 2.0;
            let g_t = -jet.values.wp - ctx.eta1() * 2.0;
            let t_pred = point.t0 - g_q / g_t * (q_next - point.q);
            let next_ctx = context(q_next, controls.truncation)?;
            let attempt = if t_pred.is_finite() {
                correct(&next_ctx, t_pred, point.m, controls)
            } else {
                None
            };
            let Some(fix) = attempt.filter(|f| (f.t - point.t0).norm() <= 4.0 * controls.step_jump_max) else {
                du /= 2.0;
                if du < nominal / f64::powi(2.0, controls.max_halvings as i32) {
                    return Err(Error::ContinuationStall {
                        re: q_next.re,
                        im: q_next.im,
                        halvings: controls.max_halvings,
                    });
                }
                continue;
            };
            let mut t = fix.t;
            let mut m = point.m;
            let moves = lattice_normalize(&next_ctx, &mut t, &mut m);
            let e = -next_ctx.wp(t)?;
            point = SpectralPoint {
                q: q_next,
                e,
                t0: t,
                m,
            };
            let (r1, r2) = point.residuals(&next_ctx)?;
            if r1.max(r2) > controls.residual_tol {
                return Err(Error::ConvergenceLoss(r1.max(r2)));
            }
            ctx = next_ctx;
            u = u_next;
            steps.push(TrajectoryStep {
                s: (done + u * seg.length()) / total,
                point,
                newton_iterations: fix.iterations,
                lattice_moves: moves,
            });
            du = (du * 2.0).min(nominal);
        }
        done += seg.length();
    }
    Ok(Trajectory { steps })
}

/// One row `E_from => E_to` of a monodromy permutation.
pub type PermutationEntry = (usize, usize);

/// Result of [`monodromy_permutation`].
#[derive(Clone, Debug, PartialEq)]
pub struct PermutationResult {
    pub anchor: C64,
    pub radius: f64,
    pub periodic: bool,
    pub perm: Vec<PermutationEntry>,
    /// States at `Re a` before the cycle, one per index.
    pub base: Vec<SpectralPoint<f64>>,
    /// Trajectories around the cycle, one per index.
    pub cycles: Vec<Trajectory>,
}

/// Settings for [`monodromy_permutation`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PermutationOptions {
    pub q_base: f64,
    pub radius: f64,
    pub cycle_steps: usize,
    /// Series order used to initialise the states.
    pub k_max: usize,
    /// Matching threshold on `|Delta E|`, in units of `pi^2`.
    pub match_tol: f64,
    pub controls: Controls,
}

impl Default for PermutationOptions {
    fn default() -> Self {
        Self {
            q_base: 0.2,
            radius: DEFAULT_RADIUS,
            cycle_steps: DEFAULT_CYCLE_STEPS,
            k_max: 40,
            match_tol: 1e-4,
            controls: Controls::default(),
        }
    }
}

/// Continue each `E_m`, `m` in `indices`, from `q_base` along the real
/// axis to `Re a`, around the cycle `C_a`, and match the end points to the
/// starting eigenvalues at `Re a`.
pub fn monodromy_permutation(
    anchor: C64,
    indices: &[usize],
    opts: &PermutationOptions,
) -> Result<PermutationResult> {
    if indices.is_empty() {
        return Err(Error::InvalidParameter("no eigenvalue indices".into()));
    }
    let parity = indices[0] % 2;
    if indices.iter().any(|m| m % 2 != parity) {
        return Err(Error::InvalidParameter(
            "indices must share one parity".into(),
        ));
    }
    let params = ModelParams::new(1)?;
    let base_q = C64::new(anchor.re, 0.0);
    let runs: Vec<(SpectralPoint<f64>, Trajectory)> = indices
        .par_iter()
        .map(|&m| -> Result<_> {
            let (series, _) = expand_with::<f64>(m, opts.k_max, params, Normalization::Intermediate)?;
            let start = init_state(m, opts.q_base, &series, &opts.controls)?;
            let approach = PathSpec::Polyline {
                points: vec![C64::new(opts.q_base, 0.0), base_q],
                steps: 200,
            };
            let base = *continue_along(start, &approach, &opts.controls)?.last();
            let cycle = PathSpec::Cycle {
                anchor,
                radius: opts.radius,
                steps: opts.cycle_steps,
            };
            let traj = continue_along(base, &cycle, &opts.controls)?;
            Ok((base, traj))
        })
        .collect::<Result<_>>()?;

    let ctx = context(base_q, opts.controls.truncation)?;
    let mut perm = Vec::with_capacity(indices.len());
    for (k, (_, traj)) in runs.iter().enumerate() {
        let end = traj.last();
        let (r1, r2) = end.residuals(&ctx)?;
        if r1.max(r2) > opts.controls.residual_tol {
            return Err(Error::UnmatchedState(format!(
                "end state of E_{} fails residual check ({r1:e}, {r2:e})",
                indices[k]
            )));
        }
        let mut dist: Vec<(f64, usize)> = runs
            .iter()
            .enumerate()
            .map(|(j, (b, _))| ((b.e - end.e).norm() / (PI * PI), j))
            .collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (best, j) = dist[0];
        let tie = dist.get(1).is_some_and(|d| d.0 - best < 1e-6);
        if best > opts.match_tol || tie {
            return Err(Error::UnmatchedState(format!(
                "E_{} ends at {} with nearest start {} (|dE| = {best:e} pi^2)",
                indices[k], end.e, runs[j].0.e
            )));
        }
        perm.push((indices[k], indices[j]));
    }
    Ok(PermutationResult {
        anchor,
        radius: opts.radius,
        periodic: parity == 0,
        perm,
        base: runs.iter().map(|(b, _)| *b).collect(),
        cycles: runs.into_iter().map(|(_, t)| t).collect(),
    })
}
