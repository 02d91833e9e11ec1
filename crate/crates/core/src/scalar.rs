//! Scalar abstractions.
//!
//! The elliptic and monodromy code is written once against [`Real`] and runs
//! in `f32`, `f64` or double-double ([`twofloat::TwoFloat`]) precision. The
//! perturbation recursion is written against [`Field`] so the same code runs
//! in exact rationals or in floating point.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, One, Signed, ToPrimitive, Zero};
use twofloat::TwoFloat;

/// Real floating-point scalar used for complex elliptic evaluations.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`.
    fn from_f64_lossy(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite f64")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_usize_lossy(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize fits")
    }
}

impl Real for f32 {}
impl Real for f64 {}
// the `FromPrimitive` float conversions of `TwoFloat` go through `i64`
impl Real for TwoFloat {
    fn from_f64_lossy(x: f64) -> Self {
        TwoFloat::from(x)
    }

    fn to_f64_lossy(self) -> f64 {
        self.hi() + self.lo()
    }
}

/// Convert a complex number between real scalar types.
pub fn cast_complex<S: Real, T: Real>(z: Complex<S>) -> Complex<T> {
    Complex::new(
        T::from_f64_lossy(z.re.to_f64_lossy()),
        T::from_f64_lossy(z.im.to_f64_lossy()),
    )
}

/// A field in which the Rayleigh–Schrödinger recursion is carried out.
pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Neg<Output = Self>
    + Send
    + Sync
{
    fn from_rational(r: &BigRational) -> Self;
    fn to_f64(&self) -> f64;
    /// `true` if the field is exact, i.e. zero tests are reliable.
    const EXACT: bool;
}

impl Field for BigRational {
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    const EXACT: bool = true;
}

impl Field for f64 {
    fn from_rational(r: &BigRational) -> Self {
        rational_to_f64(r)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    const EXACT: bool = false;
}

impl Field for TwoFloat {
    fn from_rational(r: &BigRational) -> Self {
        let hi = rational_to_f64(r);
        let lo = match BigRational::from_float(hi) {
            Some(h) => rational_to_f64(&(r - h)),
            None => 0.0,
        };
        TwoFloat::new_add(hi, lo)
    }

    fn to_f64(&self) -> f64 {
        self.hi() + self.lo()
    }

    const EXACT: bool = false;
}

/// Nearest-ish `f64` of a big rational, robust to numerators and
/// denominators far outside the `f64` range.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    let (num, shift_n) = top_bits(r.numer());
    let (den, shift_d) = top_bits(r.denom());
    sign * (num / den) * 2f64.powi(shift_n - shift_d)
}

/// `ln |r|` for a nonzero big rational, without overflow.
pub fn rational_ln_abs(r: &BigRational) -> f64 {
    (log2_big(r.numer()) - log2_big(r.denom())) * std::f64::consts::LN_2
}

fn top_bits(n: &BigInt) -> (f64, i32) {
    let bits = n.bits();
    if bits <= 1000 {
        (n.abs().to_f64().unwrap_or(f64::INFINITY), 0)
    } else {
        let shift = bits - 64;
        let top: BigInt = n.abs() >> shift;
        (top.to_f64().unwrap_or(f64::INFINITY), shift as i32)
    }
}

fn log2_big(n: &BigInt) -> f64 {
    let (top, shift) = top_bits(n);
    top.log2() + shift as f64
}
