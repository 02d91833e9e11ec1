//! Rayleigh–Schrödinger expansion of the Lamé eigenvalues around `q = 0`.
//!
//! The Hamiltonian is `H(q) = H(0) + sum_k q^{2k} V_{2k}`. Matching powers of
//! `q^2` in `H(q) psi = E(q) psi` with
//! `psi = w_m + sum_k q^{2k} sum_{m'} b[k][m'] w_{m'}` gives, in the
//! unnormalised Gegenbauer basis of [`crate::trig_basis`],
//!
//! ```text
//! E[k]     = sum_{j=1..k} (A_j b[k-j])_m - sum_{j=1..k-1} E[j] b[k-j][m]
//! b[k][m'] = (sum_{j=1..k} (A_j b[k-j])_{m'} - sum_{j=1..k-1} E[j] b[k-j][m']) / (E_m - E_{m'})
//! ```
//!
//! for `m' != m`, where `A_j` is the matrix of `V_{2j}`. The diagonal
//! coefficient `b[k][m]` is fixed by the normalisation: either
//! `<psi, psi> = <w_m, w_m>` to all orders (unit normalisation, so that
//! `psi / sqrt(N_m)` is the normalised eigenvector) or `b[k][m] = 0`
//! (intermediate normalisation). Eigenvalue coefficients do not depend on
//! the choice.
//!
//! `b[k]` is supported on `|m' - m| <= 2k` with `m' - m` even, so a basis
//! cutoff `M = m + 2 k_max + 2` loses nothing. The recursion is written over
//! any [`Field`]: exact with [`BigRational`], approximate with `f64`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{rational_ln_abs, Field};
use crate::trig_basis::ModelParams;

/// How the diagonal eigenvector coefficient is fixed at each order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Normalization {
    /// `<v_m(q), v_m(q)> = 1`.
    #[default]
    Unit,
    /// `b[k][m] = 0` for `k >= 1`.
    Intermediate,
}

/// Power series `E_m(q) = pi^2 sum_k coeffs[k] q^{2k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<T> {
    n: u32,
    m: usize,
    coeffs: Vec<T>,
}

/// Eigenvector coefficients `b[k][m']` of `v_m(q)` in the unnormalised basis.
///
/// The orthonormal-basis coefficients are
/// `c[k][m'] = b[k][m'] sqrt(N_{m'} / N_m)`; their squares are rational.
#[derive(Clone, Debug, PartialEq)]
pub struct EigvecTable<T> {
    m: usize,
    normalization: Normalization,
    norms: Vec<T>,
    coeffs: Vec<Vec<(usize, T)>>,
}

impl<T: Field> Series<T> {
    pub fn from_coeffs(n: u32, m: usize, coeffs: Vec<T>) -> Self {
        Self { n, m, coeffs }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Coefficients in units of `pi^2`; `coeffs()[k]` multiplies `q^{2k}`.
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Highest power `k_max` of `q^2`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn truncated(&self, k_max: usize) -> Self {
        Self {
            n: self.n,
            m: self.m,
            coeffs: self.coeffs[..=k_max.min(self.order())].to_vec(),
        }
    }

    /// Horner evaluation at a complex nome, in absolute units.
    pub fn evaluate(&self, q: Complex<f64>) -> Complex<f64> {
        let q2 = q * q;
        let acc = self
            .coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, c| acc * q2 + c.to_f64());
        acc * (PI * PI)
    }

    /// [`Series::evaluate`] together with a flag that is set when `|q|` is at
    /// or beyond the given convergence radius.
    pub fn evaluate_checked(&self, q: Complex<f64>, radius: f64) -> (Complex<f64>, bool) {
        (self.evaluate(q), q.norm() >= radius)
    }

    /// Evaluation inside the field at `q^2 = q2`, in units of `pi^2`.
    pub fn evaluate_in_field(&self, q2: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * q2.clone() + c.clone())
    }
}

impl<T: Field> EigvecTable<T> {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Nonzero `(m', b[k][m'])` at order `k`, sorted by `m'`.
    pub fn level(&self, k: usize) -> &[(usize, T)] {
        &self.coeffs[k]
    }

    pub fn coefficient(&self, k: usize, mp: usize) -> T {
        self.coeffs[k]
            .binary_search_by_key(&mp, |(i, _)| *i)
            .map(|i| self.coeffs[k][i].1.clone())
            .unwrap_or_else(|_| T::zero())
    }

    /// `c[k][m']^2 = b[k][m']^2 N_{m'} / N_m`.
    pub fn orthonormal_squared(&self, k: usize, mp: usize) -> T {
        let b = self.coefficient(k, mp);
        b.clone() * b * self.norms[mp].clone() / self.norms[self.m].clone()
    }

    /// Order-`k` coefficient of `<v_m(q), v_m(q)> - 1`; zero for every
    /// `k >= 1` under unit normalisation.
    pub fn normalization_defect(&self, k: usize) -> T {
        let mut acc = T::zero();
        for j in 0..=k {
            for (mp, b) in &self.coeffs[j] {
                let other = self.coefficient(k - j, *mp);
                if !other.is_zero() {
                    acc = acc + b.clone() * other * self.norms[*mp].clone();
                }
            }
        }
        let unit = if k == 0 { T::one() } else { T::zero() };
        acc / self.norms[self.m].clone() - unit
    }
}

/// Column-sparse matrices `A_j` converted into the working field.
struct Couplings<T> {
    /// `columns[j][col]` lists `(row, entry)` for `V_{2j}`; index 0 unused.
    columns: Vec<Vec<Sparse<T>>>,
}

/// Columns of `T_{2d}(Z)` for `d = 0..=d_max` on basis indices `0..=cols`,
/// built with `T_{2(d+1)} = 2 T_2 T_{2d} - T_{2(d-1)}` and never truncated
/// in the row index.
fn chebyshev_columns<T: Field>(d_max: usize, cols: usize, params: ModelParams) -> Vec<Vec<Sparse<T>>> {
    use crate::trig_basis::gegenbauer_recurrence;
    let nu = BigRational::from_integer(BigInt::from(params.nu()));
    let rows = cols + 2 * d_max + 2;
    let two = T::one() + T::one();
    let z_cols: Vec<Sparse<T>> = (0..=rows + 2)
        .map(|m| {
            let (ap, am) = gegenbauer_recurrence(m, &nu);
            let mut v = Vec::with_capacity(2);
            if let Some(am) = am {
                v.push((m - 1, T::from_rational(&am)));
            }
            v.push((m + 1, T::from_rational(&ap)));
            v
        })
        .collect();
    // T_2(Z) = 2 Z^2 - I
    let t2_cols: Vec<Sparse<T>> = (0..=rows)
        .map(|m| {
            let mut acc = Accumulator::new(m.saturating_sub(2), m + 2);
            acc.add(m, -T::one());
            for (r1, a1) in &z_cols[m] {
                for (r2, a2) in &z_cols[*r1] {
                    acc.add(*r2, two.clone() * a1.clone() * a2.clone());
                }
            }
            acc.finish()
        })
        .collect();

    let mut out: Vec<Vec<Sparse<T>>> = Vec::with_capacity(d_max + 1);
    out.push((0..=cols).map(|m| vec![(m, T::one())]).collect());
    if d_max >= 1 {
        out.push((0..=cols).map(|m| t2_cols[m].clone()).collect());
    }
    for d in 1..d_max {
        let next: Vec<Sparse<T>> = (0..=cols)
            .map(|m| {
                let mut acc = Accumulator::new(m.saturating_sub(2 * d + 2), m + 2 * d + 2);
                for (c, x) in &out[d][m] {
                    let x2 = two.clone() * x.clone();
                    for (r, a) in &t2_cols[*c] {
                        acc.add(*r, a.clone() * x2.clone());
                    }
                }
                for (r, x) in &out[d - 1][m] {
                    acc.add(*r, -x.clone());
                }
                acc.finish()
            })
            .collect();
        out.push(next);
    }
    out
}

type Sparse<T> = Vec<(usize, T)>;

/// Dense scratch vector over a row window, flushed to sparse form.
struct Accumulator<T> {
    lo: usize,
    vals: Vec<T>,
}

impl<T: Field> Accumulator<T> {
    fn new(lo: usize, hi: usize) -> Self {
        Self {
            lo,
            vals: vec![T::zero(); hi - lo + 1],
        }
    }

    fn add(&mut self, row: usize, x: T) {
        let slot = &mut self.vals[row - self.lo];
        *slot = slot.clone() + x;
    }

    fn finish(self) -> Sparse<T> {
        let lo = self.lo;
        self.vals
            .into_iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i + lo, v))
            .collect()
    }
}

impl<T: Field> Couplings<T> {
    fn build(k_max: usize, cutoff: usize, params: ModelParams) -> Self {
        let cheb = chebyshev_columns::<T>(k_max, cutoff, params);
        let coupling = T::from_rational(&BigRational::from_integer(BigInt::from(
            8 * params.coupling(),
        )));
        let mut columns = vec![Vec::new()];
        for j in 1..=k_max {
            let divisors: Vec<usize> = (1..=j).filter(|d| j % d == 0).collect();
            let sigma = T::from_rational(&BigRational::from_integer(BigInt::from(
                divisors.iter().sum::<usize>(),
            )));
            let cols = (0..=cutoff)
                .map(|m| {
                    let mut acc = Accumulator::new(m.saturating_sub(2 * j), m + 2 * j);
                    acc.add(m, sigma.clone());
                    for &d in &divisors {
                        let dr = T::from_rational(&BigRational::from_integer(BigInt::from(d)));
                        for (r, x) in &cheb[d][m] {
                            acc.add(*r, -(dr.clone() * x.clone()));
                        }
                    }
                    acc.finish()
                        .into_iter()
                        .filter(|(r, _)| *r <= cutoff)
                        .map(|(r, v)| (r, v * coupling.clone()))
                        .collect()
                })
                .collect();
            columns.push(cols);
        }
        Self { columns }
    }
}

/// Expand `E_m(q)` and `v_m(q)` to order `q^{2 k_max}` with unit normalisation.
pub fn expand<T: Field>(
    m: usize,
    k_max: usize,
    params: ModelParams,
) -> Result<(Series<T>, EigvecTable<T>)> {
    expand_with(m, k_max, params, Normalization::Unit)
}

/// [`expand`] with an explicit normalisation convention.
pub fn expand_with<T: Field>(
    m: usize,
    k_max: usize,
    params: ModelParams,
    normalization: Normalization,
) -> Result<(Series<T>, EigvecTable<T>)> {
    let cutoff = m + 2 * k_max + 2;
    let energies: Vec<T> = (0..=cutoff)
        .map(|i| T::from_rational(&params.unperturbed_energy(i)))
        .collect();
    let norms: Vec<T> = (0..=cutoff)
        .map(|i| T::from_rational(&params.squared_norm(i)))
        .collect();
    let couplings = Couplings::<T>::build(k_max.max(1), cutoff, params);
    // Energy gaps are differences of squares of distinct positive integers on
    // the reachable band, so they never vanish.
    let gaps: Vec<T> = (0..=cutoff)
        .map(|i| energies[m].clone() - energies[i].clone())
        .collect();

    let mut e = vec![energies[m].clone()];
    let mut b: Vec<Vec<T>> = vec![unit_vector(cutoff, m)];
    for k in 1..=k_max {
        // rhs = sum_j A_j b[k-j]
        let mut rhs = vec![T::zero(); cutoff + 1];
        for j in 1..=k {
            let cols = &couplings.columns[j];
            for (c, x) in b[k - j].iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (r, a) in &cols[c] {
                    rhs[*r] = rhs[*r].clone() + a.clone() * x.clone();
                }
            }
        }
        // subtract sum_{j=1..k-1} E[j] b[k-j]
        for j in 1..k {
            if e[j].is_zero() {
                continue;
            }
            for (i, x) in b[k - j].iter().enumerate() {
                if !x.is_zero() {
                    rhs[i] = rhs[i].clone() - e[j].clone() * x.clone();
                }
            }
        }
        e.push(rhs[m].clone());
        let mut next: Vec<T> = rhs
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                if i == m || r.is_zero() {
                    T::zero()
                } else {
                    debug_assert!((i + m) % 2 == 0, "parity leak at m'={i}");
                    r / gaps[i].clone()
                }
            })
            .collect();
        if normalization == Normalization::Unit && k >= 2 {
            let mut acc = T::zero();
            for j in 1..k {
                for (i, x) in b[j].iter().enumerate() {
                    let y = &b[k - j][i];
                    if !x.is_zero() && !y.is_zero() {
                        acc = acc + x.clone() * y.clone() * norms[i].clone();
                    }
                }
            }
            let two = T::one() + T::one();
            next[m] = -(acc / (two * norms[m].clone()));
        }
        b.push(next);
    }

    let coeffs = b
        .into_iter()
        .map(|v| {
            v.into_iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .collect()
        })
        .collect();
    Ok((
        Series {
            n: params.n(),
            m,
            coeffs: e,
        },
        EigvecTable {
            m,
            normalization,
            norms,
            coeffs,
        },
    ))
}

fn unit_vector<T: Field>(cutoff: usize, m: usize) -> Vec<T> {
    let mut v = vec![T::zero(); cutoff + 1];
    v[m] = T::one();
    v
}

/// Convenience: exact series only.
pub fn expand_exact(m: usize, k_max: usize, params: ModelParams) -> Result<Series<BigRational>> {
    expand_with::<BigRational>(m, k_max, params, Normalization::Intermediate).map(|(s, _)| s)
}

/// Result of [`estimate_radius`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    /// `1/b` from the least-squares fit `|E[k]| ~ a b^{2k}`.
    pub radius: f64,
    /// `min_{last 10 k} (|E[k]|/a)^{-1/(2k)}`.
    pub tail_radius: f64,
    pub a: f64,
    pub b: f64,
    pub points: usize,
}

/// Types whose magnitude can be taken logarithmically without overflow.
pub trait LogMagnitude {
    /// `ln |x|`, or `None` for zero.
    fn ln_abs(&self) -> Option<f64>;
}

impl LogMagnitude for BigRational {
    fn ln_abs(&self) -> Option<f64> {
        (!self.is_zero()).then(|| rational_ln_abs(self))
    }
}

impl LogMagnitude for twofloat::TwoFloat {
    fn ln_abs(&self) -> Option<f64> {
        let x = self.hi() + self.lo();
        (x != 0.0).then(|| x.abs().ln())
    }
}

impl LogMagnitude for f64 {
    fn ln_abs(&self) -> Option<f64> {
        (*self != 0.0).then(|| self.abs().ln())
    }
}

/// Default first order used in the radius fit.
pub const DEFAULT_K_MIN: usize = 10;

/// Estimate the convergence radius in `q` from coefficient growth.
///
/// Fits `ln |E[k]| = ln a + 2k ln b` by least squares over
/// `k in [k_min, k_max]` (zero coefficients skipped) and also reports the
/// stabilised tail value `min (|E[k]|/a)^{-1/(2k)}` over the last ten `k`.
pub fn estimate_radius<T: Field + LogMagnitude>(
    series: &Series<T>,
    k_min: usize,
) -> Result<RadiusEstimate> {
    let k_max = series.order();
    if k_max < k_min + 10 {
        return Err(Error::InvalidParameter(format!(
            "radius fit needs order >= k_min + 10 = {}, series has order {k_max}",
            k_min + 10
        )));
    }
    let pts: Vec<(f64, f64)> = (k_min.max(1)..=k_max)
        .filter_map(|k| series.coeffs[k].ln_abs().map(|l| (k as f64, l)))
        .collect();
    if pts.len() < 5 {
        return Err(Error::TooFewCoefficients(pts.len()));
    }
    // ordinary least squares for y = alpha + beta * (2k)
    let nn = pts.len() as f64;
    let sx: f64 = pts.iter().map(|(k, _)| 2.0 * k).sum();
    let sy: f64 = pts.iter().map(|(_, y)| y).sum();
    let sxx: f64 = pts.iter().map(|(k, _)| 4.0 * k * k).sum();
    let sxy: f64 = pts.iter().map(|(k, y)| 2.0 * k * y).sum();
    let log_b = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    let log_a = (sy - log_b * sx) / nn;
    let tail_start = k_max.saturating_sub(9).max(k_min.max(1));
    let tail_radius = (tail_start..=k_max)
        .filter_map(|k| {
            series.coeffs[k]
                .ln_abs()
                .map(|l| (-(l - log_a) / (2.0 * k as f64)).exp())
        })
        .fold(f64::INFINITY, f64::min);
    Ok(RadiusEstimate {
        radius: (-log_b).exp(),
        tail_radius,
        a: log_a.exp(),
        b: log_b.exp(),
        points: pts.len(),
    })
}

/// Format a rational as `"p/q"` (integers get denominator 1).
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse `"p/q"` or a bare integer `"p"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidParameter(format!("not a rational: {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() || q.is_negative() {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

/// JSON shape of an exported exact series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub n: u32,
    pub m: usize,
    pub units: String,
    pub coeffs: Vec<String>,
}

impl Series<BigRational> {
    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            n: self.n,
            m: self.m,
            units: "pi^2".into(),
            coeffs: self.coeffs.iter().map(format_rational).collect(),
        }
    }

    pub fn from_json(j: &SeriesJson) -> Result<Self> {
        if j.units != "pi^2" {
            return Err(Error::InvalidParameter(format!("unknown units {:?}", j.units)));
        }
        let coeffs = j
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("empty coefficient list".into()));
        }
        Ok(Self {
            n: j.n,
            m: j.m,
            coeffs,
        })
    }

    /// CSV rows `k,numerator,denominator,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,numerator,denominator,value\n");
        for (k, c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(
                out,
                "{k},{},{},{:e}",
                c.numer(),
                c.denom(),
                crate::scalar::rational_to_f64(c)
            );
        }
        out
    }

    pub fn to_float(&self) -> Series<f64> {
        Series {
            n: self.n,
            m: self.m,
            coeffs: self.coeffs.iter().map(Field::to_f64).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn p1() -> ModelParams {
        ModelParams::new(1).unwrap()
    }

    #[test]
    fn low_orders_n1_m0() {
        let s = expand_exact(0, 3, p1()).unwrap();
        assert_eq!(s.coeffs(), &[r(10, 3), r(80, 3), r(1360, 27), r(20800, 243)]);
    }

    #[test]
    fn normalizations_agree_on_eigenvalues() {
        for m in 0..4 {
            let (a, _) = expand_with::<BigRational>(m, 6, p1(), Normalization::Unit).unwrap();
            let (b, _) =
                expand_with::<BigRational>(m, 6, p1(), Normalization::Intermediate).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn unit_normalization_holds_exactly() {
        let (_, v) = expand::<BigRational>(1, 6, ModelParams::new(2).unwrap()).unwrap();
        assert_eq!(v.normalization_defect(0), BigRational::zero());
        for k in 1..=6 {
            assert_eq!(v.normalization_defect(k), BigRational::zero(), "k={k}");
        }
    }

    #[test]
    fn eigenvector_support_is_banded_with_parity() {
        let (_, v) = expand::<BigRational>(3, 5, p1()).unwrap();
        assert_eq!(v.level(0), &[(3, BigRational::one())]);
        for k in 1..=5 {
            for (mp, _) in v.level(k) {
                assert!(mp.abs_diff(3) <= 2 * k && (mp + 3) % 2 == 0, "k={k} m'={mp}");
            }
        }
    }

    #[test]
    fn float_recursion_tracks_exact() {
        let exact = expand_exact(2, 15, p1()).unwrap();
        let (float, _) = expand::<f64>(2, 15, p1()).unwrap();
        for (a, b) in exact.coeffs().iter().zip(float.coeffs()) {
            let a = a.to_f64();
            assert!((a - b).abs() <= 1e-11 * a.abs(), "{a} vs {b}");
        }
    }

    #[test]
    fn evaluate_at_zero_and_symmetric_nome() {
        let s = expand_exact(0, 8, p1()).unwrap();
        assert_eq!(s.evaluate(Complex::new(0.0, 0.0)), Complex::new(PI * PI * 10.0 / 3.0, 0.0));
        let q = Complex::new(0.21, 0.13);
        assert_eq!(s.evaluate(q), s.evaluate(-q));
        let (_, beyond) = s.evaluate_checked(Complex::new(0.8, 0.0), 0.749);
        assert!(beyond);
    }

    #[test]
    fn geometric_series_radius() {
        let rad: f64 = 0.6;
        let coeffs: Vec<f64> = (0..=40).map(|k| rad.powi(-2 * k as i32)).collect();
        let s = Series::from_coeffs(1, 0, coeffs);
        let est = estimate_radius(&s, DEFAULT_K_MIN).unwrap();
        assert!((est.radius - rad).abs() < 1e-12);
        assert!((est.a - 1.0).abs() < 1e-9);
        assert!((est.tail_radius - rad).abs() < 1e-12);
    }

    #[test]
    fn radius_needs_enough_points() {
        let s = Series::from_coeffs(1, 0, vec![1.0; 15]);
        assert!(matches!(estimate_radius(&s, 10), Err(Error::InvalidParameter(_))));
        let mut c = vec![0.0; 25];
        c[12] = 1.0;
        c[20] = 2.0;
        let s = Series::from_coeffs(1, 0, c);
        assert!(matches!(estimate_radius(&s, 10), Err(Error::TooFewCoefficients(2))));
    }

    #[test]
    fn rational_strings() {
        assert_eq!(format_rational(&r(80, 3)), "80/3");
        assert_eq!(format_rational(&r(20, 1)), "20/1");
        assert_eq!(format_rational(&r(-5, 10)), "-1/2");
        assert_eq!(parse_rational("20").unwrap(), r(20, 1));
        assert_eq!(parse_rational("-6/4").unwrap(), r(-3, 2));
        assert!(parse_rational("1.5").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let s = expand_exact(1, 2, p1()).unwrap();
        let csv = s.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "k,numerator,denominator,value");
        assert!(lines[2].starts_with("1,20,1,"));
        assert_eq!(lines.len(), 4);
    }
}
