//! Floquet data of the `n = 1` Lamé operator `-d^2/dx^2 + 2 wp(x)`.
//!
//! For `E = -wp(t0)` the Hermite solution picks up the factor
//! `exp(2 eta_1 t0 - zeta(t0))` under `x -> x + 1`. An eigenvalue of the
//! periodic (anti-periodic) problem therefore has
//! `2 eta_1 t0 - zeta(t0) = m pi i` with `m` even (odd). Two branches of
//! these families can only meet where additionally `2 eta_1 + wp(t0) = 0`.
//!
//! Besides the closed form this module provides two independent
//! evaluations of the same exponent (a hyperelliptic integral in `E` and a
//! direct transfer-matrix integration of the ODE), the branch-point search
//! over a grid in the `q`-plane, and the classification of roots that are
//! only coincidences `2 eta_1 = -e_i` with a Lamé-polynomial eigenvalue.

use std::f64::consts::PI;

use num_complex::Complex;
use rayon::prelude::*;

use crate::elliptic::QContext;
use crate::error::{Error, Result};
use crate::quadrature::{converge, PanelRule};

type C64 = Complex<f64>;

const I: C64 = Complex::new(0.0, 1.0);

/// Newton tolerance for `wp(t0) + E = 0`, relative to `1 + |E|`.
pub const ROOT_TOL: f64 = 1e-12;
/// Iteration cap shared by the Newton solvers.
pub const MAX_NEWTON: usize = 50;
/// Branch points of the hyperelliptic integrand closer than this to the
/// integration segment force a detour.
pub const DETOUR_TOL: f64 = 1e-3;

/// A point `(q, E, t0, m)` on the spectral curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralPoint<T> {
    pub q: Complex<T>,
    pub e: Complex<T>,
    pub t0: Complex<T>,
    pub m: i64,
}

impl SpectralPoint<f64> {
    /// Build the point for eigenvalue `e`, solving for `t0` from `seed` and
    /// reading off the nearest sheet index.
    pub fn from_energy(ctx: &QContext<f64>, e: C64, seed: C64) -> Result<Self> {
        let t0 = solve_t0(ctx, e, seed)?;
        let f = exponent(ctx, t0)?;
        Ok(Self {
            q: ctx.q(),
            e,
            t0,
            m: (f.im / PI).round() as i64,
        })
    }

    /// `(|wp(t0) + E|, |2 eta_1 t0 - zeta(t0) - m pi i|)`.
    pub fn residuals(&self, ctx: &QContext<f64>) -> Result<(f64, f64)> {
        let v = ctx.eval(self.t0)?;
        let f = ctx.eta1() * self.t0 * 2.0 - v.zeta;
        Ok(((v.wp + self.e).norm(), (f - I * (PI * self.m as f64)).norm()))
    }

    /// `true` for the periodic family (even `m`).
    pub fn is_periodic(&self) -> bool {
        self.m.rem_euclid(2) == 0
    }

    /// Floquet multiplier `exp(m pi i) = +-1`.
    pub fn multiplier(&self) -> f64 {
        if self.is_periodic() {
            1.0
        } else {
            -1.0
        }
    }
}

/// Representative of `+-t` modulo the lattice with `|Im t| <= Im(tau)/2`
/// and `Re t` in `[0, 1/2]`.
pub fn canonical_t0(ctx: &QContext<f64>, t: C64) -> C64 {
    let (y, _, _) = ctx.reduce(t);
    if y.re < 0.0 || (y.re == 0.0 && y.im < 0.0) {
        -y
    } else {
        y
    }
}

/// Starting guess for `wp(t) = -E` from the `q = 0` limit
/// `wp(t) = -pi^2/3 + pi^2 / sin^2(pi t)`.
pub fn seed_t0(e: C64) -> C64 {
    let s = (C64::new(1.0 / 3.0, 0.0) - e / (PI * PI)).inv().sqrt();
    let t = s.asin() / PI;
    if t.is_finite() {
        t
    } else {
        C64::new(0.25, 0.1)
    }
}

/// Solve `wp(t0) + E = 0` by Newton's method from `seed`.
///
/// The result is lattice reduced by [`canonical_t0`].
pub fn solve_t0(ctx: &QContext<f64>, e: C64, seed: C64) -> Result<C64> {
    let scale = 1.0 + e.norm();
    let mut t = canonical_t0(ctx, seed);
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_NEWTON {
        let v = ctx.eval(t)?;
        let f = v.wp + e;
        residual = f.norm();
        if residual <= ROOT_TOL * scale {
            return Ok(t);
        }
        let slope = v.wp_prime.norm();
        if slope < 1e-10 * scale.powf(1.5) {
            return Err(Error::SingularJacobian(slope));
        }
        let mut dt = f / v.wp_prime;
        if dt.norm() > 0.1 {
            dt *= 0.1 / dt.norm();
        }
        t = canonical_t0(ctx, t - dt);
    }
    Err(Error::NoConvergence {
        iterations: MAX_NEWTON,
        residual,
    })
}

/// The Floquet exponent `2 eta_1 t0 - zeta(t0)`.
pub fn exponent(ctx: &QContext<f64>, t0: C64) -> Result<C64> {
    Ok(ctx.eta1() * t0 * 2.0 - ctx.zeta(t0)?)
}

/// Distance between `a` and `+-b` modulo `pi i Z`.
pub fn distance_mod_pi_i(a: C64, b: C64) -> f64 {
    [a - b, a + b]
        .into_iter()
        .map(|d| (d - I * (PI * (d.im / PI).round())).norm())
        .fold(f64::INFINITY, f64::min)
}

fn track(prev: &mut Option<C64>, w: C64) -> C64 {
    let w = match prev {
        Some(p) if (w - *p).norm() > (w + *p).norm() => -w,
        _ => w,
    };
    *prev = Some(w);
    w
}

fn distance_to_segment(p: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    if d.norm_sqr() == 0.0 {
        return (p - a).norm();
    }
    let s = ((p - a) * d.conj()).re / d.norm_sqr();
    (p - (a + d * s.clamp(0.0, 1.0))).norm()
}

/// The exponent as `1/2 int_{-e_1}^{E} (s - 2 eta_1) / sqrt(-(s+e_1)(s+e_2)(s+e_3)) ds`.
///
/// The path is the straight segment from `-e_1`, or two segments through a
/// displaced midpoint when `-e_2` or `-e_3` lies within [`DETOUR_TOL`] of
/// it. The endpoint singularity is removed by `s = -e_1 + (P + e_1) u^2` on
/// the first segment and the square root is continued from its principal
/// value at `u = 0`. The value agrees with [`exponent`] up to sign and
/// multiples of `pi i`.
pub fn hyperelliptic_exponent(ctx: &QContext<f64>, e: C64) -> Result<C64> {
    let k = ctx.constants()?;
    let start = -k.e1;
    if (e - start).norm() <= 1e-14 * (1.0 + e.norm()) {
        return Ok(C64::new(0.0, 0.0));
    }
    let branch = [-k.e2, -k.e3];
    let clear = |a: C64, b: C64| {
        branch
            .iter()
            .all(|&p| distance_to_segment(p, a, b) >= DETOUR_TOL)
    };
    let mid = if clear(start, e) {
        None
    } else {
        let centre = (start + e) * 0.5;
        let offset = (e - start) * I * 0.25;
        let pick = [centre + offset, centre - offset]
            .into_iter()
            .find(|&p| clear(start, p) && clear(p, e));
        match pick {
            Some(p) => Some(p),
            None => {
                let index = if distance_to_segment(branch[0], start, e) < DETOUR_TOL {
                    2
                } else {
                    3
                };
                return Err(Error::BranchPointOnPath { index });
            }
        }
    };
    let two_eta = k.eta1 * 2.0;
    let rule = PanelRule::new(16);
    let eval = |panels: usize| -> Result<C64> {
        let p = mid.unwrap_or(e);
        let a = p - start;
        let mut prev = None;
        let leg1 = rule.integrate(0.0, 1.0, panels, |u| {
            let x = start + a * (u * u);
            let s = track(&mut prev, (-a * (x + k.e2) * (x + k.e3)).sqrt());
            Ok(a * (x - two_eta) / s)
        })?;
        let Some(p) = mid else {
            return Ok(leg1);
        };
        // at u = 1 the full root equals the substituted one
        let junction = track(&mut prev, (-a * (p + k.e2) * (p + k.e3)).sqrt());
        let mut prev = Some(junction);
        let b = e - p;
        let leg2 = rule.integrate(0.0, 1.0, panels, |v| {
            let x = p + b * v;
            let s = track(&mut prev, (-(x + k.e1) * (x + k.e2) * (x + k.e3)).sqrt());
            Ok(b * (x - two_eta) / (s * 2.0))
        })?;
        Ok(leg1 + leg2)
    };
    converge(eval, 4, 1 << 12, 1e-13)
}

/// Transfer-matrix trace of `f'' = (2 wp(x + tau/2) - E) f` over one
/// period, and the multiplier `mu` with `mu + 1/mu = trace`, `|mu| >= 1`.
///
/// The shifted potential is pole-free on the real line. Classical RK4 with
/// one Richardson step; the step count doubles until two extrapolated
/// traces agree to `1e-12` relative.
pub fn ode_multiplier(ctx: &QContext<f64>, e: C64) -> Result<(C64, C64)> {
    let shift = ctx.tau().map(|t| t * 0.5);
    let potential = |x: f64| -> Result<C64> {
        match shift {
            Some(s) => Ok(ctx.wp(s + x)? * 2.0 - e),
            // Im x -> infinity limit of wp is -2 eta_1
            None => Ok(-ctx.eta1() * 4.0 - e),
        }
    };
    let trace_with = |n: usize| -> Result<C64> {
        let h = 1.0 / n as f64;
        let v: Vec<C64> = (0..=2 * n)
            .map(|j| potential(0.5 * h * j as f64))
            .collect::<Result<_>>()?;
        // columns (f, f') of the fundamental matrix
        let mut y = [[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]];
        let rhs = |s: [C64; 2], w: C64| [s[1], w * s[0]];
        for step in 0..n {
            let (v0, v1, v2) = (v[2 * step], v[2 * step + 1], v[2 * step + 2]);
            for col in y.iter_mut() {
                let k1 = rhs(*col, v0);
                let k2 = rhs([col[0] + k1[0] * (h / 2.0), col[1] + k1[1] * (h / 2.0)], v1);
                let k3 = rhs([col[0] + k2[0] * (h / 2.0), col[1] + k2[1] * (h / 2.0)], v1);
                let k4 = rhs([col[0] + k3[0] * h, col[1] + k3[1] * h], v2);
                for c in 0..2 {
                    col[c] += (k1[c] + k2[c] * 2.0 + k3[c] * 2.0 + k4[c]) * (h / 6.0);
                }
            }
        }
        Ok(y[0][0] + y[1][1])
    };
    let mut n = 128;
    let mut coarse = trace_with(n)?;
    let mut previous: Option<C64> = None;
    let mut diff = f64::INFINITY;
    while n <= 1 << 16 {
        let fine = trace_with(2 * n)?;
        let extrapolated = (fine * 16.0 - coarse) / 15.0;
        if let Some(p) = previous {
            diff = (extrapolated - p).norm();
            if diff <= 1e-12 * (1.0 + extrapolated.norm()) {
                return Ok((extrapolated, multiplier_from_trace(extrapolated)));
            }
        }
        previous = Some(extrapolated);
        coarse = fine;
        n *= 2;
    }
    Err(Error::Integrator(format!(
        "transfer-matrix trace did not settle (last change {diff:e})"
    )))
}

fn multiplier_from_trace(trace: C64) -> C64 {
    let root = (trace * trace - 4.0).sqrt();
    let a = (trace + root) * 0.5;
    let b = (trace - root) * 0.5;
    if a.norm() >= b.norm() {
        a
    } else {
        b
    }
}

/// Outcome of [`classify`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    /// Satisfies the branching conditions and is not a coincidence.
    TrueBranch,
    /// `2 eta_1 = -e_i` for the stored `i`.
    Coincidence(u8),
    /// Residuals above tolerance.
    Unresolved,
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Self::TrueBranch => "branch",
            Self::Coincidence(1) => "e1",
            Self::Coincidence(2) => "e2",
            Self::Coincidence(_) => "e3",
            Self::Unresolved => "unresolved",
        }
    }
}

/// A root of `2 eta_1 + wp(t0) = 0`, `2 eta_1 t0 - zeta(t0) = m pi i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchCandidate {
    pub point: SpectralPoint<f64>,
    /// Scaled residuals `|2 eta_1 + wp(t0)| / (1 + |2 eta_1|)` and
    /// `|2 eta_1 t0 - zeta(t0) - m pi i| / pi`.
    pub residuals: (f64, f64),
    pub classification: Classification,
}

impl BranchCandidate {
    pub fn residual(&self) -> f64 {
        self.residuals.0.max(self.residuals.1)
    }
}

fn context(q: C64, truncation: Option<usize>) -> Result<QContext<f64>> {
    match truncation {
        Some(k) => QContext::new(q, k),
        None => QContext::with_auto_truncation(q),
    }
}

fn branch_residuals(ctx: &QContext<f64>, t0: C64, m: i64) -> Result<(f64, f64)> {
    let v = ctx.eval(t0)?;
    let two_eta = ctx.eta1() * 2.0;
    let g1 = two_eta + v.wp;
    let g2 = two_eta * t0 - v.zeta - I * (PI * m as f64);
    Ok((g1.norm() / (1.0 + two_eta.norm()), g2.norm() / PI))
}

/// Newton on `(q, t0)` for the two branching conditions at fixed `m`.
///
/// Steps are damped to `|dq| <= 0.02`, `|dt0| <= 0.05`; the iteration
/// fails if `q` leaves `0.02 < |q| < 0.97`.
pub fn polish_branch(
    q: C64,
    t0: C64,
    m: i64,
    truncation: Option<usize>,
    tol: f64,
) -> Result<BranchCandidate> {
    let (mut q, mut t) = (q, t0);
    let mut residual = f64::INFINITY;
    for _ in 0..3 * MAX_NEWTON {
        let ctx = context(q, truncation)?;
        let jet = ctx.jet(t)?;
        let (eta, deta) = (ctx.eta1(), ctx.eta1_dq());
        let g1 = eta * 2.0 + jet.values.wp;
        let g2 = eta * t * 2.0 - jet.values.zeta - I * (PI * m as f64);
        residual = (g1.norm() / (1.0 + 2.0 * eta.norm())).max(g2.norm() / PI);
        if residual <= tol {
            return finish_candidate(&ctx, t);
        }
        let (a, b) = (deta * 2.0 + jet.wp_dq, jet.values.wp_prime);
        let (c, d) = (deta * t * 2.0 - jet.zeta_dq, eta * 2.0 + jet.values.wp);
        let det = a * d - b * c;
        if det.norm() < 1e-300 {
            return Err(Error::SingularJacobian(det.norm()));
        }
        let mut dq = (g1 * d - b * g2) / det;
        let mut dt = (a * g2 - c * g1) / det;
        let s = (dq.norm() / 0.02).max(dt.norm() / 0.05).max(1.0);
        dq /= s;
        dt /= s;
        q -= dq;
        t -= dt;
        if !(0.02..0.97).contains(&q.norm()) {
            return Err(Error::NoConvergence {
                iterations: 0,
                residual,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: 3 * MAX_NEWTON,
        residual,
    })
}

fn finish_candidate(ctx: &QContext<f64>, t: C64) -> Result<BranchCandidate> {
    let t0 = canonical_t0(ctx, t);
    let f = exponent(ctx, t0)?;
    let m = (f.im / PI).round() as i64;
    let point = SpectralPoint {
        q: ctx.q(),
        e: ctx.eta1() * 2.0,
        t0,
        m,
    };
    Ok(BranchCandidate {
        point,
        residuals: branch_residuals(ctx, t0, m)?,
        classification: Classification::Unresolved,
    })
}

/// Half-period `omega_i` (`1/2`, `-1/2 - tau/2`, `tau/2`).
pub fn half_period(ctx: &QContext<f64>, index: u8) -> Result<C64> {
    let half_tau = || {
        ctx.tau()
            .map(|t| t * 0.5)
            .ok_or_else(|| Error::InvalidParameter("tau undefined at q = 0".into()))
    };
    match index {
        1 => Ok(C64::new(0.5, 0.0)),
        2 => Ok(-half_tau()? - 0.5),
        3 => half_tau(),
        _ => Err(Error::InvalidParameter(format!("half-period index {index}"))),
    }
}

/// `|2 eta_1 + e_i| / pi^2` for `i = 1, 2, 3`.
pub fn coincidence_gaps(ctx: &QContext<f64>) -> Result<[f64; 3]> {
    let k = ctx.constants()?;
    let two_eta = k.eta1 * 2.0;
    Ok(k.e_all().map(|e| (two_eta + e).norm() / (PI * PI)))
}

/// Newton in `q` for `2 eta_1(q) + e_i(q) = 0`. At such `q` the point
/// `t0 = omega_i` satisfies both branching conditions.
pub fn solve_coincidence(
    index: u8,
    q: C64,
    truncation: Option<usize>,
    tol: f64,
) -> Result<BranchCandidate> {
    let mut q = q;
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_NEWTON {
        let ctx = context(q, truncation)?;
        let omega = half_period(&ctx, index)?;
        let jet = ctx.jet(omega)?;
        let eta = ctx.eta1();
        let h = eta * 2.0 + jet.values.wp;
        residual = h.norm() / (1.0 + 2.0 * eta.norm());
        if residual <= tol {
            return finish_candidate(&ctx, omega);
        }
        // wp'(omega_i) = 0, so the motion of omega_i with q drops out
        let slope = ctx.eta1_dq() * 2.0 + jet.wp_dq;
        if slope.norm() < 1e-300 {
            return Err(Error::SingularJacobian(slope.norm()));
        }
        let mut dq = h / slope;
        if dq.norm() > 0.02 {
            dq *= 0.02 / dq.norm();
        }
        q -= dq;
        if !(0.02..0.97).contains(&q.norm()) {
            return Err(Error::NoConvergence {
                iterations: 0,
                residual,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_NEWTON,
        residual,
    })
}

/// Default coincidence tolerance on `|2 eta_1 + e_i|`, in units of `pi^2`.
pub const TOL_CLASS: f64 = 1e-6;

/// Label a candidate as a coincidence `2 eta_1 = -e_i` when
/// `|2 eta_1 + e_i| <= tol_class pi^2`, as a true branch otherwise, and as
/// unresolved when its residuals exceed `tol_branch`.
pub fn classify(
    candidate: &BranchCandidate,
    ctx: &QContext<f64>,
    tol_branch: f64,
    tol_class: f64,
) -> Result<BranchCandidate> {
    let mut out = *candidate;
    if candidate.residual() > tol_branch {
        out.classification = Classification::Unresolved;
        return Ok(out);
    }
    let gaps = coincidence_gaps(ctx)?;
    let (best, gap) = gaps
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &g)| if g < acc.1 { (i, g) } else { acc });
    out.classification = if gap <= tol_class {
        Classification::Coincidence(best as u8 + 1)
    } else {
        Classification::TrueBranch
    };
    Ok(out)
}

/// Search rectangle in the `q`-plane intersected with `|q| < max_modulus`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRegion {
    pub re: (f64, f64),
    pub im: (f64, f64),
    pub max_modulus: f64,
}

impl ScanRegion {
    /// First quadrant of the disk `|q| < r`.
    pub fn quarter_disk(r: f64) -> Self {
        Self {
            re: (0.0, r),
            im: (0.0, r),
            max_modulus: r,
        }
    }

    pub fn contains(&self, q: C64) -> bool {
        let eps = 1e-9;
        q.re >= self.re.0 - eps
            && q.re <= self.re.1 + eps
            && q.im >= self.im.0 - eps
            && q.im <= self.im.1 + eps
            && q.norm() < self.max_modulus
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.re.0 < self.re.1
            && self.im.0 < self.im.1
            && self.max_modulus > 0.0
            && self.max_modulus < 0.97;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("bad scan region {self:?}")))
        }
    }
}

/// Knobs of [`branch_scan`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanOptions {
    pub nx: usize,
    pub ny: usize,
    pub m_range: (i64, i64),
    /// Fixed truncation, or `None` for [`QContext::with_auto_truncation`].
    pub truncation: Option<usize>,
    pub tol_branch: f64,
    pub tol_class: f64,
    pub dedup: f64,
    /// Polish a grid point only when `|r - round(r)|` is below this;
    /// `0.5` polishes every point.
    pub near_integer: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            nx: 40,
            ny: 40,
            m_range: (-6, 6),
            truncation: None,
            tol_branch: 1e-10,
            tol_class: TOL_CLASS,
            dedup: 1e-6,
            near_integer: 0.5,
        }
    }
}

/// A grid point at which no candidate could be produced.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanFailure {
    pub q: C64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    /// Classified candidates inside the region, sorted by `|q|`.
    pub candidates: Vec<BranchCandidate>,
    pub failures: Vec<ScanFailure>,
    pub grid_points: usize,
}

/// Grid search for roots of the branching conditions.
///
/// Columns of the grid run in parallel; inside a column `t0` is seeded
/// from the previous point. Each point solves `wp(t0) = -2 eta_1`, takes
/// `m = round(r)` for `r = (2 eta_1 t0 - zeta(t0)) / (pi i)` and polishes
/// with [`polish_branch`]; roots at half-periods (where that Newton is
/// singular) come from [`solve_coincidence`] started at the same point.
/// The output is independent of the thread count.
pub fn branch_scan(region: ScanRegion, opts: ScanOptions) -> Result<ScanResult> {
    region.validate()?;
    if opts.nx == 0 || opts.ny == 0 {
        return Err(Error::InvalidParameter("scan grid must be non-empty".into()));
    }
    let dx = (region.re.1 - region.re.0) / opts.nx as f64;
    let dy = (region.im.1 - region.im.0) / opts.ny as f64;
    let columns: Vec<(Vec<BranchCandidate>, Vec<ScanFailure>, usize)> = (0..opts.nx)
        .into_par_iter()
        .map(|i| {
            let mut found = Vec::new();
            let mut failures = Vec::new();
            let mut points = 0;
            let mut seed: Option<C64> = None;
            for j in 0..opts.ny {
                let q = C64::new(
                    region.re.0 + (i as f64 + 0.5) * dx,
                    region.im.0 + (j as f64 + 0.5) * dy,
                );
                if q.norm() >= region.max_modulus {
                    continue;
                }
                points += 1;
                match scan_point(q, seed, &opts) {
                    Ok((t, cands)) => {
                        seed = Some(t);
                        found.extend(cands);
                    }
                    Err(e) => {
                        log::debug!("scan point {q} skipped: {e}");
                        seed = None;
                        failures.push(ScanFailure {
                            q,
                            reason: e.to_string(),
                        });
                    }
                }
            }
            (found, failures, points)
        })
        .collect();

    let mut raw = Vec::new();
    let mut failures = Vec::new();
    let mut grid_points = 0;
    for (c, f, p) in columns {
        raw.extend(c.into_iter().filter(|c| {
            region.contains(c.point.q) && (opts.m_range.0..=opts.m_range.1).contains(&c.point.m)
        }));
        failures.extend(f);
        grid_points += p;
    }
    let mut unique: Vec<BranchCandidate> = Vec::new();
    for c in raw {
        match unique
            .iter_mut()
            .find(|u| (u.point.q - c.point.q).norm() < opts.dedup)
        {
            Some(u) => {
                if c.residual() < u.residual() {
                    *u = c;
                }
            }
            None => unique.push(c),
        }
    }
    let mut candidates = unique
        .iter()
        .map(|c| {
            let ctx = context(c.point.q, opts.truncation)?;
            classify(c, &ctx, opts.tol_branch, opts.tol_class)
        })
        .collect::<Result<Vec<_>>>()?;
    candidates.sort_by(|a, b| {
        a.point
            .q
            .norm()
            .total_cmp(&b.point.q.norm())
            .then(a.point.q.re.total_cmp(&b.point.q.re))
    });
    Ok(ScanResult {
        candidates,
        failures,
        grid_points,
    })
}

fn scan_point(
    q: C64,
    seed: Option<C64>,
    opts: &ScanOptions,
) -> Result<(C64, Vec<BranchCandidate>)> {
    let ctx = context(q, opts.truncation)?;
    let e = ctx.eta1() * 2.0;
    let t = match seed.map(|s| solve_t0(&ctx, e, s)) {
        Some(Ok(t)) => t,
        _ => solve_t0(&ctx, e, seed_t0(e))?,
    };
    let r = exponent(&ctx, t)? / (I * PI);
    let mut out = Vec::new();
    if (r.re - r.re.round()).abs() < opts.near_integer {
        let m = r.re.round() as i64;
        if let Ok(c) = polish_branch(q, t, m, opts.truncation, opts.tol_branch) {
            out.push(c);
        }
    }
    for index in 1..=3 {
        if let Ok(c) = solve_coincidence(index, q, opts.truncation, opts.tol_branch) {
            out.push(c);
        }
    }
    Ok((t, out))
}
