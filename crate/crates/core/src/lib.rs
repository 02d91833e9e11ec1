//! Eigenvalues of the Lamé operator `H = -d^2/dx^2 + n(n+1) wp(x)` as
//! analytic functions of the nome `q = exp(pi i tau)`.
//!
//! * [`elliptic`]: Weierstrass `wp`, `wp'`, `zeta`, `eta_1`, `e_i` from nome series.
//! * [`trig_basis`]: the `q = 0` Pöschl–Teller model in its Gegenbauer basis.
//! * [`perturbation`]: exact Rayleigh–Schrödinger series `E_m(q)` and radius estimates.
//! * [`monodromy`]: the `n = 1` Floquet exponent, branch-point search and classification.
//! * [`continuation`]: analytic continuation of eigenvalues along paths in the `q`-plane.
//! * [`reference`]: tabulated `n = 1` values used for reproduction checks.
//!
//! The floating-point code is generic over [`scalar::Real`] and the
//! recursion over [`scalar::Field`]; the aliases below fix the common choices.

pub mod continuation;
pub mod elliptic;
pub mod error;
pub mod monodromy;
pub mod perturbation;
pub mod quadrature;
pub mod reference;
pub mod report;
pub mod scalar;
pub mod trig_basis;

pub use error::{Error, Result};

use num_rational::BigRational;

/// Double-precision complex number.
pub type C64 = num_complex::Complex<f64>;
/// Double-precision nome context.
pub type QContext64 = elliptic::QContext<f64>;
/// Double-double nome context, used for high-precision cross-checks.
pub type QContextDD = elliptic::QContext<twofloat::TwoFloat>;
/// Exact eigenvalue series with rational coefficients.
pub type RationalSeries = perturbation::Series<BigRational>;
/// Exact eigenvector coefficients.
pub type EigvecTable = perturbation::EigvecTable<BigRational>;
/// Floating-point eigenvalue series (fast, inexact).
pub type FloatSeries = perturbation::Series<f64>;
/// Double-precision spectral point.
pub type SpectralPoint = monodromy::SpectralPoint<f64>;

/// Library version embedded in every output file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
