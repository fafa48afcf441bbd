//! Infinitesimal generators of quadratic harnesses `QH(η, θ; 0, τ; q)`.
//!
//! The crate has three layers:
//!
//! * [`polyseq`]: the non-commutative algebra of polynomial sequences, with
//!   windowed truncation and validity tracking.
//! * [`solver`]: the q-commutation equation solved in that algebra, producing
//!   the generator element whose coordinates are `A_t(x^n)`.
//! * [`measures`], [`process`], [`generator`]: orthogonality measures from
//!   three-term recurrences, transition measures of the process, and the
//!   cross-checked evaluation of `A_t f(x)`.
//!
//! Everything is generic over [`Scalar`]. Exact work uses [`Rational`];
//! symbolic parameters use [`ZPoly`], the polynomial ring over the rationals.

pub mod error;
pub mod generator;
pub mod json;
pub mod measures;
pub mod poly;
pub mod polyseq;
pub mod process;
pub mod scalar;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use poly::Polynomial;
pub use polyseq::{AlgebraParams, PolySeq, ResidualReport, Special};
pub use scalar::{RealScalar, Scalar};
pub use solver::QHParams;

/// Exact rational scalars.
pub type Rational = num_rational::BigRational;
/// Polynomials in an auxiliary indeterminate over the rationals.
pub type ZPoly = Polynomial<Rational>;
pub type RationalSeq = PolySeq<Rational>;
pub type FloatSeq = PolySeq<f64>;
/// Sequences whose coefficients are polynomials in an auxiliary indeterminate.
pub type SymbolicSeq = PolySeq<ZPoly>;

/// Shorthand for `n/d` as a [`Rational`].
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
