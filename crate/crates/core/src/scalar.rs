//! Scalar domains: exact rationals, `f64`, and polynomial rings over either.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A commutative ring the algebra can run over.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// True when arithmetic rounds.
    const INEXACT: bool;

    /// Multiplicative inverse when it exists in the domain.
    fn try_inv(&self) -> Option<Self>;

    fn from_i64(n: i64) -> Self;

    /// Size used in residual reports.
    fn magnitude(&self) -> f64;
}

/// An ordered field embedded in the reals.
pub trait RealScalar: Scalar + PartialOrd {
    fn to_f64(&self) -> f64;

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }

    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.try_inv().map(|r| self.clone() * r)
    }
}

impl Scalar for f64 {
    const INEXACT: bool = true;

    fn try_inv(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / *self)
        }
    }

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl RealScalar for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    const INEXACT: bool = false;

    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn magnitude(&self) -> f64 {
        ToPrimitive::to_f64(&self.abs()).unwrap_or(f64::INFINITY)
    }
}

impl RealScalar for BigRational {
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// `s^n` by repeated squaring.
pub fn pow<S: Scalar>(s: &S, mut n: u32) -> S {
    let mut base = s.clone();
    let mut acc = S::one();
    while n > 0 {
        if n & 1 == 1 {
            acc = acc * base.clone();
        }
        base = base.clone() * base;
        n >>= 1;
    }
    acc
}

/// The q-bracket `[n]_q = 1 + q + ... + q^{n-1}`, with `[0]_q = 0`.
pub fn qint<S: Scalar>(q: &S, n: usize) -> S {
    let mut acc = S::zero();
    let mut p = S::one();
    for _ in 0..n {
        acc = acc + p.clone();
        p = p * q.clone();
    }
    acc
}

/// Parse `"p/q"`, `"p"` or a decimal literal such as `"0.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Ok(r) = s.parse::<BigRational>() {
        return Some(r);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.')?;
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let num: BigInt = digits.parse().ok()?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(num, den);
    Some(if neg { -r } else { r })
}

/// Render a rational as `"num/den"`.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
