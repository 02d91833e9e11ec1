use std::f64::consts::PI;

use lame_core::continuation::{continue_along, init_state, Controls, PathSpec};
use lame_core::elliptic::QContext;
use lame_core::monodromy::{seed_t0, solve_t0};
use lame_core::perturbation::{expand_with, Normalization};
use lame_core::quadrature::PanelRule;
use lame_core::trig_basis::ModelParams;
use lame_core::{FloatSeries, C64};

fn series(m: usize) -> FloatSeries {
    expand_with::<f64>(m, 40, ModelParams::new(1).unwrap(), Normalization::Intermediate)
        .unwrap()
        .0
}

#[test]
fn path_reversal_returns_to_start() {
    let c = Controls::default();
    for m in [0, 1, 4] {
        let p = init_state(m, 0.2, &series(m), &c).unwrap();
        let path = PathSpec::Polyline {
            points: vec![p.q, C64::new(0.45, 0.3), C64::new(0.2, 0.55)],
            steps: 120,
        };
        let out = continue_along(p, &path, &c).unwrap();
        let back = continue_along(*out.last(), &path.reversed().unwrap(), &c).unwrap();
        let end = back.last();
        assert!((end.e - p.e).norm() < 1e-9 * p.e.norm(), "m = {m}: {} vs {}", end.e, p.e);
        assert_eq!(end.m.rem_euclid(2), p.m.rem_euclid(2));
    }
}

#[test]
fn homotopic_paths_agree() {
    // two routes to the same end point enclosing no branch point
    let c = Controls::default();
    let end = C64::new(0.4, 0.25);
    for m in [0, 2, 3] {
        let p = init_state(m, 0.2, &series(m), &c).unwrap();
        let a = PathSpec::Polyline {
            points: vec![p.q, C64::new(0.4, 0.0), end],
            steps: 100,
        };
        let b = PathSpec::Polyline {
            points: vec![p.q, C64::new(0.2, 0.25), end],
            steps: 100,
        };
        let ea = continue_along(p, &a, &c).unwrap().last().e;
        let eb = continue_along(p, &b, &c).unwrap().last().e;
        assert!((ea - eb).norm() < 1e-9 * ea.norm(), "m = {m}: {ea} vs {eb}");
    }
}

#[test]
fn continued_values_match_the_series_inside_the_disk() {
    let c = Controls::default();
    let s = series(1);
    let p = init_state(1, 0.2, &s, &c).unwrap();
    let q = C64::from_polar(0.45, 1.0);
    let out = continue_along(p, &PathSpec::line(p.q, q, 80), &c).unwrap();
    assert!((out.last().e - s.evaluate(q)).norm() < 1e-8 * s.evaluate(q).norm());
}

/// `t0` with `wp(t0) = -E` from `t0 = int_{-E}^{-E + i inf} ds / sqrt(4 prod (s - e_i))`.
fn t0_by_quadrature(ctx: &QContext<f64>, e: C64) -> C64 {
    let k = ctx.constants().unwrap();
    let rule = PanelRule::new(20);
    let mut prev: Option<C64> = None;
    // s = -E + i (v / (1 - v))^2
    let t = rule
        .integrate(0.0, 1.0, 400, |v| {
            let w = v / (1.0 - v);
            let s = -e + C64::new(0.0, w * w);
            let ds = C64::new(0.0, 2.0 * v / (1.0 - v).powi(3));
            let mut r = ((s - k.e1) * (s - k.e2) * (s - k.e3) * 4.0).sqrt();
            if let Some(p) = prev {
                if (r + p).norm() < (r - p).norm() {
                    r = -r;
                }
            }
            prev = Some(r);
            Ok(ds / r)
        })
        .unwrap();
    -t
}

#[test]
fn solve_t0_agrees_with_elliptic_integral() {
    let q = C64::new(0.2, 0.0);
    let ctx = QContext::new(q, 200).unwrap();
    for e in [C64::new(3.5 * PI * PI, 0.0), C64::new(12.0, 7.0), C64::new(60.0, -4.0)] {
        let t0 = solve_t0(&ctx, e, seed_t0(e)).unwrap();
        let ti = t0_by_quadrature(&ctx, e);
        assert!((ctx.wp(ti).unwrap() + e).norm() < 1e-8 * e.norm(), "E = {e}");
        // equal up to sign and lattice translations
        let d = [ti - t0, ti + t0]
            .into_iter()
            .map(|z| ctx.reduce(z).0.norm())
            .fold(f64::INFINITY, f64::min);
        assert!(d < 1e-8, "E = {e}: t0 {t0}, integral {ti}");
    }
}
