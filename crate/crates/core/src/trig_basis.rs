//! The trigonometric (`q = 0`) model and the exact matrices of the
//! perturbing potentials.
//!
//! At `q = 0` the Lamé operator becomes the Pöschl–Teller Hamiltonian
//! `-d^2/dx^2 + n(n+1) pi^2 / sin^2(pi x)` shifted by `-pi^2 n(n+1)/3`.
//! Its eigenfunctions are `w_m = C^{n+1}_m(cos pi x) (sin pi x)^{n+1}` with
//! eigenvalues `pi^2 (m+n+1)^2 - pi^2 n(n+1)/3`.
//!
//! The `q^{2k}` part of the potential is
//! `V_{2k}(x) = 8 pi^2 n(n+1) sum_{d | k} d (1 - cos 2 d pi x)`, a polynomial in
//! `z = cos pi x` through `cos 2 d pi x = T_{2d}(z)`. Multiplying `w_m` by `z`
//! only touches `w_{m-1}` and `w_{m+1}` (Gegenbauer recurrence), so the
//! matrix of `V_{2k}` in the unnormalised basis `w_m` is banded and exactly
//! rational. All energies below are in units of `pi^2`.
//!
//! The orthonormal basis `v_m = w_m / sqrt(N_m)` is only reachable through
//! square roots: `N_{m+2}/N_m` is generally not a rational square (for
//! `n = 1`, `N_2/N_0 = 5`). The matrix is therefore kept in the `w_m` basis,
//! which is a diagonal similarity of the orthonormal one and has the same
//! spectrum. The symmetric forms are available as the exact Gram matrix
//! `<w_m', V w_m>` and as exact squares of the orthonormal entries.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::rational_to_f64;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// The coupling `n` of `n(n+1) wp(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModelParams {
    n: u32,
}

impl ModelParams {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("coupling n must be >= 1".into()));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Gegenbauer index `nu = n + 1`.
    pub fn nu(&self) -> u32 {
        self.n + 1
    }

    /// `n(n+1)`.
    pub fn coupling(&self) -> i64 {
        let n = self.n as i64;
        n * (n + 1)
    }

    /// Unperturbed eigenvalue `(m+n+1)^2 - n(n+1)/3`, in units of `pi^2`.
    pub fn unperturbed_energy(&self, m: usize) -> BigRational {
        let s = m as i64 + self.n as i64 + 1;
        rat(s * s, 1) - rat(self.coupling(), 3)
    }

    /// `N_m = <w_m, w_m> = Gamma(m+2n+2) / (2^{2n+1} (m+n+1) m! Gamma(n+1)^2)`.
    pub fn squared_norm(&self, m: usize) -> BigRational {
        let n = self.n as u64;
        let m64 = m as u64;
        let numer = factorial(m64 + 2 * n + 1);
        let nf = factorial(n);
        let denom = (BigInt::one() << (2 * n + 1) as usize)
            * BigInt::from(m64 + n + 1)
            * factorial(m64)
            * &nf
            * &nf;
        BigRational::new(numer, denom)
    }

    pub fn basis_element(&self, m: usize) -> BasisElement {
        BasisElement {
            m,
            squared_norm: self.squared_norm(m),
            unperturbed_e: self.unperturbed_energy(m),
        }
    }
}

/// One unperturbed eigenfunction `w_m` with its norm and energy.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisElement {
    pub m: usize,
    /// `N_m = 1 / c_m^2` where `v_m = c_m w_m` is normalised.
    pub squared_norm: BigRational,
    /// Energy in units of `pi^2`.
    pub unperturbed_e: BigRational,
}

/// Fourier data of `V_{2k}` in units of `pi^2`: `(0, constant)` followed by
/// `(d, coefficient of cos 2 d pi x)` for each divisor `d` of `k`.
pub fn potential_fourier(k: usize, n: u32) -> Vec<(usize, BigRational)> {
    assert!(k >= 1, "potential order k must be >= 1");
    let coupling = (n as i64) * (n as i64 + 1);
    let divisors: Vec<usize> = (1..=k).filter(|d| k % d == 0).collect();
    let sigma: i64 = divisors.iter().map(|&d| d as i64).sum();
    let mut out = vec![(0, rat(8 * coupling * sigma, 1))];
    out.extend(
        divisors
            .iter()
            .map(|&d| (d, rat(-8 * coupling * d as i64, 1))),
    );
    out
}

/// Coefficients of `z C^nu_m(z) = a_plus C^nu_{m+1}(z) + a_minus C^nu_{m-1}(z)`;
/// `a_minus` is `None` for `m = 0`.
pub fn gegenbauer_recurrence(m: usize, nu: &BigRational) -> (BigRational, Option<BigRational>) {
    let mr = BigRational::from_integer(BigInt::from(m));
    let two = BigRational::from_integer(BigInt::from(2));
    let denom = &two * (&mr + nu);
    let a_plus = (&mr + BigRational::one()) / &denom;
    let a_minus = (m > 0).then(|| (&mr + &two * nu - BigRational::one()) / &denom);
    (a_plus, a_minus)
}

/// `C^nu_m(z)` evaluated through the three-term recurrence.
pub fn gegenbauer_eval(m: usize, nu: &BigRational, z: &BigRational) -> BigRational {
    let two = BigRational::from_integer(BigInt::from(2));
    let mut prev = BigRational::one();
    if m == 0 {
        return prev;
    }
    let mut cur = &two * nu * z;
    for j in 1..m {
        let jr = BigRational::from_integer(BigInt::from(j));
        let next = (&two * (&jr + nu) * z * &cur
            - (&jr + &two * nu - BigRational::one()) * &prev)
            / (&jr + BigRational::one());
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Integer coefficients of the Chebyshev polynomial `T_deg`, lowest power first.
pub fn chebyshev_t(deg: usize) -> Vec<BigInt> {
    let mut prev = vec![BigInt::one()];
    if deg == 0 {
        return prev;
    }
    let mut cur = vec![BigInt::zero(), BigInt::one()];
    for _ in 1..deg {
        let mut next = vec![BigInt::zero(); cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += c * 2;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= c;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Sparse vector in the `w_m` basis.
type Sparse = BTreeMap<usize, BigRational>;

/// Apply multiplication by `z = cos(pi x)` to a combination of `w_m`.
fn times_z(v: &Sparse, nu: &BigRational) -> Sparse {
    let mut out = Sparse::new();
    for (&m, coef) in v {
        let (a_plus, a_minus) = gegenbauer_recurrence(m, nu);
        *out.entry(m + 1).or_insert_with(BigRational::zero) += coef * a_plus;
        if let Some(a_minus) = a_minus {
            *out.entry(m - 1).or_insert_with(BigRational::zero) += coef * a_minus;
        }
    }
    out
}

/// The matrix of `V_{2k}` restricted to indices `0..=M`, stored column-wise
/// in the unnormalised basis: column `m` holds the expansion
/// `V_{2k} w_m = sum_{m'} P[m'][m] w_{m'}` (units of `pi^2`).
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingMatrix {
    order: usize,
    cutoff: usize,
    params: ModelParams,
    columns: Vec<Vec<(usize, BigRational)>>,
    norms: Vec<BigRational>,
}

impl CouplingMatrix {
    /// The `q^{2k}` level `k`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    /// Nonzero entries `(m', P[m'][m])` of column `m`, sorted by `m'`.
    pub fn column(&self, m: usize) -> &[(usize, BigRational)] {
        &self.columns[m]
    }

    /// `P[row][col]`: coefficient of `w_row` in `V_{2k} w_col`.
    pub fn action_entry(&self, row: usize, col: usize) -> BigRational {
        self.columns[col]
            .binary_search_by_key(&row, |(r, _)| *r)
            .map(|i| self.columns[col][i].1.clone())
            .unwrap_or_else(|_| BigRational::zero())
    }

    /// Exact Gram entry `<w_row, V_{2k} w_col> = P[row][col] N_row`; symmetric.
    pub fn gram_entry(&self, row: usize, col: usize) -> BigRational {
        self.action_entry(row, col) * &self.norms[row]
    }

    /// `d[m][m'] = <v_m', V_{2k} v_m>` exactly when the normalisation ratio
    /// is a rational square; always exact on the diagonal.
    pub fn orthonormal_entry_exact(&self, m: usize, mp: usize) -> Option<BigRational> {
        let p = self.action_entry(mp, m);
        if m == mp || p.is_zero() {
            return Some(p);
        }
        let ratio = &self.norms[mp] / &self.norms[m];
        rational_sqrt(&ratio).map(|r| p * r)
    }

    /// `d[m][m']^2 = P[m'][m] P[m][m']`, exact.
    pub fn orthonormal_entry_squared(&self, m: usize, mp: usize) -> BigRational {
        self.action_entry(mp, m) * self.action_entry(m, mp)
    }

    /// `d[m][m']` in floating point (units of `pi^2`).
    pub fn orthonormal_entry(&self, m: usize, mp: usize) -> f64 {
        let p = self.action_entry(mp, m);
        if p.is_zero() {
            return 0.0;
        }
        let ratio = rational_to_f64(&(&self.norms[mp] / &self.norms[m]));
        rational_to_f64(&p) * ratio.sqrt()
    }

    /// Exact diagonal entry `d[m][m]`.
    pub fn diagonal(&self, m: usize) -> BigRational {
        self.action_entry(m, m)
    }
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

/// Build the matrix of `V_{2k}` on basis indices `0..=cutoff`.
///
/// Columns are computed by applying `T_{2d}(z)` to `w_m` with the Gegenbauer
/// recurrence; rows beyond `cutoff` are dropped.
pub fn coupling_matrix(k: usize, cutoff: usize, params: ModelParams) -> Result<CouplingMatrix> {
    if k == 0 {
        return Err(Error::InvalidParameter("potential order k must be >= 1".into()));
    }
    if cutoff < 2 * k {
        return Err(Error::InvalidParameter(format!(
            "cutoff M = {cutoff} is smaller than the bandwidth 2k = {}",
            2 * k
        )));
    }
    let nu = BigRational::from_integer(BigInt::from(params.nu()));
    let fourier = potential_fourier(k, params.n());
    let chebyshev: Vec<(Vec<BigInt>, BigRational)> = fourier[1..]
        .iter()
        .map(|(d, coef)| (chebyshev_t(2 * d), coef.clone()))
        .collect();
    let constant = fourier[0].1.clone();

    let columns = (0..=cutoff)
        .map(|m| {
            let mut acc = Sparse::new();
            acc.insert(m, constant.clone());
            for (poly, coef) in &chebyshev {
                let mut power = Sparse::new();
                power.insert(m, BigRational::one());
                for (p, c) in poly.iter().enumerate() {
                    if p > 0 {
                        power = times_z(&power, &nu);
                    }
                    if c.is_zero() {
                        continue;
                    }
                    let scale = coef * BigRational::from_integer(c.clone());
                    for (&row, v) in &power {
                        *acc.entry(row).or_insert_with(BigRational::zero) += &scale * v;
                    }
                }
            }
            acc.into_iter()
                .filter(|(row, v)| *row <= cutoff && !v.is_zero())
                .collect::<Vec<_>>()
        })
        .collect();
    let norms = (0..=cutoff).map(|m| params.squared_norm(m)).collect();
    Ok(CouplingMatrix {
        order: k,
        cutoff,
        params,
        columns,
        norms,
    })
}

/// Divisor sum `sigma_1(k)`.
pub fn divisor_sum(k: usize) -> usize {
    (1..=k).filter(|d| k.is_multiple_of(*d)).sum()
}

/// Numerical inner products need `c_m = 1/sqrt(N_m)`.
pub fn normalisation_constant(params: ModelParams, m: usize) -> f64 {
    let n = params.squared_norm(m);
    1.0 / rational_to_f64(&n).sqrt()
}

/// Convert an exact rational to `i64` if it is an integer that fits.
pub fn as_small_integer(r: &BigRational) -> Option<i64> {
    r.is_integer().then(|| r.numer().to_i64()).flatten()
}
