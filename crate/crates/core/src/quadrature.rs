//! Composite Gauss–Legendre rules for complex integrands sampled in order.
//!
//! Nodes are visited left to right so that integrands carrying state (for
//! instance a square-root branch tracked by continuity) see a monotone
//! sequence of sample points.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[0, 1]`, sorted by node.
#[derive(Clone, Debug)]
pub struct PanelRule {
    pairs: Vec<(f64, f64)>,
}

impl PanelRule {
    pub fn new(points: usize) -> Self {
        let degree = NonZeroUsize::new(points.max(1)).expect("nonzero");
        let mut pairs: Vec<(f64, f64)> = GaussLegendre::new(degree)
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self { pairs }
    }

    pub fn points(&self) -> usize {
        self.pairs.len()
    }

    /// `int_a^b f(x) dx` with `panels` equal panels, calling `f` at increasing `x`.
    pub fn integrate<F>(&self, a: f64, b: f64, panels: usize, mut f: F) -> Result<Complex<f64>>
    where
        F: FnMut(f64) -> Result<Complex<f64>>,
    {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        let mut acc = Complex::new(0.0, 0.0);
        for p in 0..panels {
            let left = a + h * p as f64;
            let mut part = Complex::new(0.0, 0.0);
            for &(x, w) in &self.pairs {
                part += f(left + h * x)? * w;
            }
            acc += part * h;
        }
        Ok(acc)
    }
}

/// Rerun `eval(panels)` with doubling panel counts until two successive
/// values agree to `tol (1 + |I|)`.
pub fn converge<F>(mut eval: F, start: usize, max_panels: usize, tol: f64) -> Result<Complex<f64>>
where
    F: FnMut(usize) -> Result<Complex<f64>>,
{
    let mut panels = start.max(1);
    let mut prev = eval(panels)?;
    let mut diff = f64::INFINITY;
    while panels < max_panels {
        panels *= 2;
        let next = eval(panels)?;
        diff = (next - prev).norm();
        if diff <= tol * (1.0 + next.norm()) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureFailure(diff))
}
