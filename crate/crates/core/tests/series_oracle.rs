//! The perturbation series against two independent spectral computations:
//! a Fourier-truncated Hill matrix and direct ODE integration.

use std::f64::consts::PI;

use lame_core::elliptic::QContext;
use lame_core::monodromy::ode_multiplier;
use lame_core::perturbation::{expand_exact, expand_with, Normalization};
use lame_core::trig_basis::ModelParams;
use lame_core::C64;
use nalgebra::DMatrix;
use num_rational::BigRational;
use proptest::prelude::*;

fn params() -> ModelParams {
    ModelParams::new(1).unwrap()
}

/// Eigenvalues of `-d^2/dx^2 + 2 wp(x + tau/2)` on the Fourier modes
/// `exp(i pi j x)`, `|j| <= j_max`, `j` of the given parity.
fn hill_spectrum(q: f64, parity: i64, j_max: i64) -> Vec<f64> {
    let ctx = QContext::new(C64::new(q, 0.0), 200).unwrap();
    let half_tau = ctx.tau().unwrap() * 0.5;
    let n = 512;
    let samples: Vec<f64> = (0..n)
        .map(|s| (ctx.wp(half_tau + s as f64 / n as f64).unwrap() * 2.0).re)
        .collect();
    // V(x) = sum_k v_k exp(2 pi i k x); the potential is real and even
    let coeff = |k: i64| -> f64 {
        samples
            .iter()
            .enumerate()
            .map(|(s, v)| v * (2.0 * PI * k as f64 * s as f64 / n as f64).cos())
            .sum::<f64>()
            / n as f64
    };
    let modes: Vec<i64> = (-j_max..=j_max).filter(|j| j.rem_euclid(2) == parity).collect();
    let d = modes.len();
    let mut h = DMatrix::<f64>::zeros(d, d);
    for (a, &ja) in modes.iter().enumerate() {
        for (b, &jb) in modes.iter().enumerate() {
            h[(a, b)] = coeff((ja - jb) / 2);
        }
        h[(a, a)] += (PI * ja as f64).powi(2);
    }
    let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[test]
fn series_values_are_hill_eigenvalues() {
    for q in [0.1, 0.3, 0.45] {
        for parity in [0, 1] {
            let ev = hill_spectrum(q, parity, 40);
            for m in (parity as usize..8).step_by(2) {
                let (s, _) = expand_with::<f64>(m, 60, params(), Normalization::Intermediate).unwrap();
                let e = s.evaluate(C64::new(q, 0.0)).re;
                let gap = ev.iter().map(|x| (x - e).abs()).fold(f64::INFINITY, f64::min);
                assert!(gap <= 1e-8 * e.abs(), "q = {q}, m = {m}: E = {e}, nearest gap {gap:e}");
            }
        }
    }
}

#[test]
fn ode_trace_is_plus_minus_two_at_series_values() {
    for q in [C64::new(0.1, 0.0), C64::new(0.2, 0.15), C64::new(-0.1, 0.25)] {
        let ctx = QContext::new(q, 200).unwrap();
        for m in 0..6 {
            let (s, _) = expand_with::<f64>(m, 60, params(), Normalization::Intermediate).unwrap();
            let (trace, _) = ode_multiplier(&ctx, s.evaluate(q)).unwrap();
            let want = if m % 2 == 0 { 2.0 } else { -2.0 };
            assert!((trace - want).norm() < 1e-8, "q = {q}, m = {m}: trace {trace}");
        }
    }
}

#[test]
fn exact_and_float_recursions_agree_to_high_order() {
    let exact = expand_exact(3, 30, params()).unwrap();
    let (float, _) = expand_with::<f64>(3, 30, params(), Normalization::Unit).unwrap();
    for (a, b) in exact.to_float().coeffs().iter().zip(float.coeffs()) {
        assert!((a - b).abs() <= 1e-13 * a.abs());
    }
}

#[test]
fn unperturbed_values() {
    for m in 0..10 {
        let s = expand_exact(m, 0, params()).unwrap();
        let want = BigRational::new((3 * (m as i64 + 2).pow(2) - 2).into(), 3.into());
        assert_eq!(s.coeffs(), &[want]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn json_round_trip(m in 0usize..6, k in 0usize..8) {
        let s = expand_exact(m, k, params()).unwrap();
        let j = serde_json::to_string(&s.to_json()).unwrap();
        let back = lame_core::RationalSeries::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        prop_assert_eq!(back, s);
    }
}
