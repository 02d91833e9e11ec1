//! Weierstrass functions for the lattice generated by `1` and `tau`,
//! evaluated from their nome expansions.
//!
//! With half-periods `omega_1 = 1/2`, `omega_3 = tau/2` and `q = exp(pi i tau)`:
//!
//! ```text
//! wp(x)   = -2 eta_1 + pi^2 / sin^2(pi x) - 8 pi^2 sum_k k q^{2k}/(1 - q^{2k}) cos(2 k pi x)
//! zeta(x) =  2 eta_1 x + pi / tan(pi x)   + 4 pi   sum_k   q^{2k}/(1 - q^{2k}) sin(2 k pi x)
//! eta_1   =  pi^2 (1/6 - 4 sum_k k q^{2k}/(1 - q^{2k}))
//! ```
//!
//! Every sum runs over exactly `k = 1..=K`. The trigonometric factors are
//! never formed on their own: `q^{2k} cos(2 k pi x)` is assembled from the
//! powers of `q^2 e^{+-2 pi i x}`, which stay bounded whenever the series
//! converge, so large `k` with complex `x` cannot overflow.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Truncation order used when the caller has no preference.
pub const DEFAULT_TRUNCATION: usize = 200;

/// Guard on `|sin(pi x)|` below which an argument counts as a lattice point.
pub const POLE_TOL: f64 = 1e-8;

/// A nome together with its truncation order and the cached lattice sums.
///
/// Immutable after construction; all evaluations are pure functions of the
/// argument and the context.
#[derive(Clone, Debug)]
pub struct QContext<T: Real> {
    q: Complex<T>,
    truncation: usize,
    tau: Option<Complex<T>>,
    /// `1 / (1 - q^{2k})` for `k = 1..=K`.
    inv_one_minus: Vec<Complex<T>>,
    /// `d/dq sum_k k q^{2k} / (1 - q^{2k})`.
    lambert_k_dq: Complex<T>,
    eta1: Complex<T>,
}

/// Values of `wp`, `wp'` and `zeta` at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WpValues<T: Real> {
    pub wp: Complex<T>,
    pub wp_prime: Complex<T>,
    pub zeta: Complex<T>,
}

/// `wp`, `wp'`, `zeta` plus their partial derivatives in `q` at fixed `x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WpJet<T: Real> {
    pub values: WpValues<T>,
    pub wp_dq: Complex<T>,
    pub zeta_dq: Complex<T>,
}

/// Half-period values of `zeta` and `wp`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipticConstants<T: Real> {
    pub eta1: Complex<T>,
    pub eta3: Complex<T>,
    pub e1: Complex<T>,
    pub e2: Complex<T>,
    pub e3: Complex<T>,
}

impl<T: Real> EllipticConstants<T> {
    pub fn e(&self, index: usize) -> Complex<T> {
        match index {
            1 => self.e1,
            2 => self.e2,
            3 => self.e3,
            _ => panic!("half-period index must be 1, 2 or 3"),
        }
    }

    pub fn e_all(&self) -> [Complex<T>; 3] {
        [self.e1, self.e2, self.e3]
    }
}

/// Raw trigonometric sums at one point, before assembly.
struct Sums<T: Real> {
    /// `sum k a_k cos(2 k pi x)`
    k_cos: Complex<T>,
    /// `sum k^2 a_k sin(2 k pi x)`
    k2_sin: Complex<T>,
    /// `sum a_k sin(2 k pi x)`
    sin: Complex<T>,
    /// `sum k a_k' cos(2 k pi x)`, `a_k' = d a_k / dq`
    k_cos_dq: Complex<T>,
    /// `sum a_k' sin(2 k pi x)`
    sin_dq: Complex<T>,
}

fn c<T: Real>(re: f64) -> Complex<T> {
    Complex::new(T::from_f64_lossy(re), T::zero())
}

fn pi<T: Real>() -> T {
    T::PI()
}

impl<T: Real> QContext<T> {
    pub fn new(q: Complex<T>, truncation: usize) -> Result<Self> {
        let modulus = q.norm();
        if !(modulus < T::one()) {
            return Err(Error::NomeOutsideDisk(modulus.to_f64_lossy()));
        }
        if truncation == 0 {
            return Err(Error::ZeroTruncation);
        }
        let q2 = q * q;
        let tau = if q.is_zero() {
            None
        } else {
            Some(q.ln() / Complex::new(T::zero(), pi::<T>()))
        };
        let mut inv_one_minus = Vec::with_capacity(truncation);
        let mut lambert_k = Complex::zero();
        let mut lambert_k_dq = Complex::zero();
        let mut q2k = Complex::one();
        for k in 1..=truncation {
            q2k = q2k * q2;
            let u = (Complex::<T>::one() - q2k).inv();
            let kt = T::from_usize_lossy(k);
            let a = q2k * u;
            lambert_k = lambert_k + a * kt;
            if !q.is_zero() {
                // d/dq [q^{2k}/(1-q^{2k})] = 2k q^{2k-1} / (1-q^{2k})^2
                lambert_k_dq = lambert_k_dq + a * u * (kt * kt * T::from_f64_lossy(2.0)) / q;
            }
            inv_one_minus.push(u);
        }
        let p2 = pi::<T>() * pi::<T>();
        let eta1 = (c::<T>(1.0 / 6.0) - lambert_k * T::from_f64_lossy(4.0)) * p2;
        Ok(Self {
            q,
            truncation,
            tau,
            inv_one_minus,
            lambert_k_dq,
            eta1,
        })
    }

    pub fn with_default_truncation(q: Complex<T>) -> Result<Self> {
        Self::new(q, DEFAULT_TRUNCATION)
    }

    /// Context whose truncation is at least [`DEFAULT_TRUNCATION`] and large
    /// enough that `|q|^K < 1e-18`, so arguments anywhere in the reduced
    /// strip `|Im x| <= Im(tau)/2` keep full double precision.
    pub fn with_auto_truncation(q: Complex<T>) -> Result<Self> {
        Self::new(q, auto_truncation(q.norm().to_f64_lossy()))
    }

    pub fn q(&self) -> Complex<T> {
        self.q
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// `tau = log(q) / (pi i)`; `None` at `q = 0` where `Im tau` is infinite.
    pub fn tau(&self) -> Option<Complex<T>> {
        self.tau
    }

    /// `d tau / dq = 1 / (pi i q)`.
    pub fn tau_dq(&self) -> Option<Complex<T>> {
        self.tau
            .map(|_| (Complex::new(T::zero(), pi::<T>()) * self.q).inv())
    }

    pub fn im_tau(&self) -> T {
        self.tau.map_or(T::infinity(), |t| t.im)
    }

    pub fn eta1(&self) -> Complex<T> {
        self.eta1
    }

    pub fn eta1_dq(&self) -> Complex<T> {
        -self.lambert_k_dq * (pi::<T>() * pi::<T>() * T::from_f64_lossy(4.0))
    }

    /// `eta_3` from the Legendre relation `eta_1 tau - eta_3 = pi i`.
    pub fn eta3(&self) -> Option<Complex<T>> {
        self.tau
            .map(|tau| self.eta1 * tau - Complex::new(T::zero(), pi::<T>()))
    }

    fn eta3_dq(&self) -> Option<Complex<T>> {
        match (self.tau, self.tau_dq()) {
            (Some(tau), Some(dtau)) => Some(self.eta1_dq() * tau + self.eta1 * dtau),
            _ => None,
        }
    }

    /// Reduce `x` modulo the lattice: returns `(x', n_tau, n_one)` with
    /// `x = x' + n_tau tau + n_one`, `|Im x'| <= Im(tau)/2` and
    /// `Re x'` in `(-1/2, 1/2]`.
    pub fn reduce(&self, x: Complex<T>) -> (Complex<T>, i64, i64) {
        let mut y = x;
        let mut n_tau = 0i64;
        if let Some(tau) = self.tau {
            let n = (y.im / tau.im).round();
            n_tau = n.to_f64_lossy() as i64;
            y = y - tau * n;
        }
        let half = T::from_f64_lossy(0.5);
        let mut n_one = y.re.round();
        if y.re - n_one <= -half {
            n_one = n_one - T::one();
        }
        y = y - Complex::new(n_one, T::zero());
        (y, n_tau, n_one.to_f64_lossy() as i64)
    }

    fn check_argument(&self, x: Complex<T>) -> Result<()> {
        let s = (x * pi::<T>()).sin();
        let tol = T::from_f64_lossy(POLE_TOL);
        if s.norm() < tol {
            return Err(Error::PoleProximity {
                re: x.re.to_f64_lossy(),
                im: x.im.to_f64_lossy(),
                tol: POLE_TOL,
            });
        }
        let growth = (self.q * self.q).norm()
            * (T::from_f64_lossy(2.0) * pi::<T>() * x.im.abs()).exp();
        if !self.q.is_zero() && !(growth < T::one()) {
            return Err(Error::ConvergenceLoss(growth.to_f64_lossy()));
        }
        Ok(())
    }

    fn sums(&self, x: Complex<T>) -> Sums<T> {
        let two = T::from_f64_lossy(2.0);
        let q2 = self.q * self.q;
        let w = (Complex::new(T::zero(), two * pi::<T>()) * x).exp();
        let up = q2 * w;
        let down = q2 / w;
        let mut p = Complex::<T>::one();
        let mut m = Complex::<T>::one();
        let mut out = Sums {
            k_cos: Complex::zero(),
            k2_sin: Complex::zero(),
            sin: Complex::zero(),
            k_cos_dq: Complex::zero(),
            sin_dq: Complex::zero(),
        };
        if self.q.is_zero() {
            return out;
        }
        let half = T::from_f64_lossy(0.5);
        let i_half = Complex::new(T::zero(), -half); // 1/(2i)
        let inv_q = self.q.inv();
        for (idx, u) in self.inv_one_minus.iter().enumerate() {
            p = p * up;
            m = m * down;
            let kt = T::from_usize_lossy(idx + 1);
            // a_k cos(2k pi x) and a_k sin(2k pi x)
            let cos_term = (p + m) * (*u * half);
            let sin_term = (p - m) * (*u * i_half);
            out.k_cos = out.k_cos + cos_term * kt;
            out.k2_sin = out.k2_sin + sin_term * (kt * kt);
            out.sin = out.sin + sin_term;
            // a_k' = 2k q^{2k-1} u_k^2 = a_k * (2k u_k / q)
            let scale = *u * inv_q * (two * kt);
            out.k_cos_dq = out.k_cos_dq + cos_term * scale * kt;
            out.sin_dq = out.sin_dq + sin_term * scale;
        }
        out
    }

    /// Series values at an argument already in the reduced strip (no lattice
    /// bookkeeping).
    fn assemble(&self, x: Complex<T>) -> Result<(WpValues<T>, Sums<T>)> {
        self.check_argument(x)?;
        let p = pi::<T>();
        let p2 = p * p;
        let p3 = p2 * p;
        let px = x * p;
        let (s, co) = (px.sin(), px.cos());
        let sums = self.sums(x);
        let two = T::from_f64_lossy(2.0);
        let wp = -self.eta1 * two + (s * s).inv() * p2 - sums.k_cos * (p2 * T::from_f64_lossy(8.0));
        let wp_prime = -co / (s * s * s) * (two * p3) + sums.k2_sin * (p3 * T::from_f64_lossy(16.0));
        let zeta = self.eta1 * x * two + co / s * p + sums.sin * (p * T::from_f64_lossy(4.0));
        Ok((WpValues { wp, wp_prime, zeta }, sums))
    }

    /// Evaluate the truncated series at `x` exactly as written, without
    /// lattice reduction. Fails if the series diverge at `x`.
    pub fn eval_unreduced(&self, x: Complex<T>) -> Result<WpValues<T>> {
        self.assemble(x).map(|(v, _)| v)
    }

    /// `wp`, `wp'` and `zeta` at `x`, reducing `x` into the fundamental
    /// strip first. `zeta` picks up `2 n_tau eta_3 + 2 n_one eta_1`.
    pub fn eval(&self, x: Complex<T>) -> Result<WpValues<T>> {
        self.jet(x).map(|j| j.values)
    }

    /// Values with their `q`-derivatives at fixed `x`.
    pub fn jet(&self, x: Complex<T>) -> Result<WpJet<T>> {
        let (y, n_tau, n_one) = self.reduce(x);
        let (mut values, sums) = self.assemble(y)?;
        let p = pi::<T>();
        let two = T::from_f64_lossy(2.0);
        let eta1_dq = self.eta1_dq();
        let mut wp_dq = -eta1_dq * two - sums.k_cos_dq * (p * p * T::from_f64_lossy(8.0));
        let mut zeta_dq = eta1_dq * y * two + sums.sin_dq * (p * T::from_f64_lossy(4.0));
        let ntau = T::from_f64_lossy(n_tau as f64);
        let none = T::from_f64_lossy(n_one as f64);
        values.zeta = values.zeta + self.eta1 * (two * none);
        zeta_dq = zeta_dq + eta1_dq * (two * none);
        if n_tau != 0 {
            let eta3 = self.eta3().expect("nonzero q");
            let eta3_dq = self.eta3_dq().expect("nonzero q");
            let dtau = self.tau_dq().expect("nonzero q");
            values.zeta = values.zeta + eta3 * (two * ntau);
            // y = x - n tau(q) - n_one, so d y / dq = -n tau'
            wp_dq = wp_dq - values.wp_prime * dtau * ntau;
            zeta_dq = zeta_dq + values.wp * dtau * ntau + eta3_dq * (two * ntau);
        }
        Ok(WpJet {
            values,
            wp_dq,
            zeta_dq,
        })
    }

    pub fn wp(&self, x: Complex<T>) -> Result<Complex<T>> {
        self.eval(x).map(|v| v.wp)
    }

    pub fn wp_prime(&self, x: Complex<T>) -> Result<Complex<T>> {
        self.eval(x).map(|v| v.wp_prime)
    }

    pub fn zeta(&self, x: Complex<T>) -> Result<Complex<T>> {
        self.eval(x).map(|v| v.zeta)
    }

    /// `e_i = wp(omega_i)` for `omega_1 = 1/2`, `omega_2 = -1/2 - tau/2`,
    /// `omega_3 = tau/2`, with `eta_3` from the Legendre relation.
    ///
    /// At `q = 0` the limits `e_2 = e_3 = -pi^2/3` are used and `eta_3` is
    /// reported as infinite.
    pub fn constants(&self) -> Result<EllipticConstants<T>> {
        let e1 = self.wp(c(0.5))?;
        let (e2, e3, eta3) = match self.tau {
            Some(tau) => {
                let half_tau = tau * T::from_f64_lossy(0.5);
                let e3 = self.wp(half_tau)?;
                let e2 = self.wp(-half_tau - c::<T>(0.5))?;
                (e2, e3, self.eta3().expect("nonzero q"))
            }
            None => {
                let limit = -self.eta1 * T::from_f64_lossy(2.0);
                (limit, limit, Complex::new(T::infinity(), T::zero()))
            }
        };
        Ok(EllipticConstants {
            eta1: self.eta1,
            eta3,
            e1,
            e2,
            e3,
        })
    }

    /// Upper bound on the truncation error of `wp` at an argument with
    /// imaginary part `im_x`, from the geometric tail of the dropped terms
    /// (the `eta_1` tail is included).
    pub fn truncation_error_bound(&self, im_x: f64) -> f64 {
        let qa = self.q.norm().to_f64_lossy();
        if qa == 0.0 {
            return 0.0;
        }
        let p2 = std::f64::consts::PI.powi(2);
        let kk = self.truncation as f64;
        let tail = |rho: f64| -> f64 {
            if rho >= 1.0 {
                return f64::INFINITY;
            }
            rho.powf(kk + 1.0) * ((kk + 1.0) - kk * rho) / (1.0 - rho).powi(2)
        };
        let damp = 1.0 / (1.0 - qa * qa);
        let rho_trig = qa * qa * (2.0 * std::f64::consts::PI * im_x.abs()).exp();
        8.0 * p2 * damp * (tail(qa * qa) + tail(rho_trig))
    }
}

/// Smallest truncation `K >= DEFAULT_TRUNCATION` with `|q|^K < 1e-18`.
pub fn auto_truncation(modulus: f64) -> usize {
    if modulus <= 0.0 {
        return DEFAULT_TRUNCATION;
    }
    let needed = (18.0 * std::f64::consts::LN_10 / -modulus.ln()).ceil();
    if needed.is_finite() {
        DEFAULT_TRUNCATION.max(needed as usize)
    } else {
        DEFAULT_TRUNCATION
    }
}

/// `eta_1` for the nome `q` with exactly `truncation` terms.
pub fn eta1<T: Real>(ctx: &QContext<T>) -> Complex<T> {
    ctx.eta1()
}

/// Free-function form of [`QContext::wp`].
pub fn wp<T: Real>(x: Complex<T>, ctx: &QContext<T>) -> Result<Complex<T>> {
    ctx.wp(x)
}

/// Free-function form of [`QContext::wp_prime`].
pub fn wp_prime<T: Real>(x: Complex<T>, ctx: &QContext<T>) -> Result<Complex<T>> {
    ctx.wp_prime(x)
}

/// Free-function form of [`QContext::zeta`].
pub fn zeta<T: Real>(x: Complex<T>, ctx: &QContext<T>) -> Result<Complex<T>> {
    ctx.zeta(x)
}

/// Free-function form of [`QContext::constants`].
pub fn constants<T: Real>(ctx: &QContext<T>) -> Result<EllipticConstants<T>> {
    ctx.constants()
}
