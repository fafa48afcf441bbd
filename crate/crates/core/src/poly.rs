//! Dense univariate polynomials over a [`Scalar`] domain.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// Dense polynomial in the generic variable. The trailing coefficient is
/// nonzero unless the polynomial is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn constant(c: S) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^n`.
    pub fn monomial(c: S, n: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut v = vec![S::zero(); n + 1];
        v[n] = c;
        Polynomial { coeffs: v }
    }

    /// The generic variable itself.
    pub fn var() -> Self {
        Self::monomial(S::one(), 1)
    }

    /// Degree, with `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    /// Coefficient of `x^j`, zero beyond the degree.
    pub fn coeff(&self, j: usize) -> S {
        self.coeffs.get(j).cloned().unwrap_or_else(S::zero)
    }

    pub fn leading(&self) -> Option<&S> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![S::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Polynomial { coeffs: v }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c.clone() * S::from_i64(j as i64))
                .collect(),
        )
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Polynomial<T> {
        Polynomial::new(self.coeffs.iter().map(f).collect())
    }

    pub fn max_magnitude(&self) -> f64 {
        self.coeffs.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    /// `self(other(x))` by Horner's scheme.
    pub fn compose(&self, other: &Self) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| &(&acc * other) + &Self::constant(c.clone()))
    }
}

impl<S: Scalar> Polynomial<Polynomial<S>> {
    /// Evaluate the inner indeterminate at `z`, leaving a polynomial over `S`.
    pub fn eval_inner(&self, z: &S) -> Polynomial<S> {
        Polynomial::new(self.coeffs.iter().map(|c| c.eval(z)).collect())
    }

    /// Replace the inner indeterminate by the outer variable.
    pub fn merge_inner(&self) -> Polynomial<S> {
        let mut acc = Polynomial::zero();
        for (j, c) in self.coeffs.iter().enumerate() {
            acc = &acc + &c.shift(j);
        }
        acc
    }
}

impl<S: Scalar> Zero for Polynomial<S> {
    fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<S: Scalar> One for Polynomial<S> {
    fn one() -> Self {
        Self::constant(S::one())
    }
}

impl<'a, S: Scalar> Add for &'a Polynomial<S> {
    type Output = Polynomial<S>;

    fn add(self, rhs: Self) -> Polynomial<S> {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut v = long.coeffs.clone();
        for (a, b) in v.iter_mut().zip(&short.coeffs) {
            *a = a.clone() + b.clone();
        }
        Polynomial::new(v)
    }
}

impl<'a, S: Scalar> Sub for &'a Polynomial<S> {
    type Output = Polynomial<S>;

    fn sub(self, rhs: Self) -> Polynomial<S> {
        self + &(-rhs)
    }
}

impl<'a, S: Scalar> Neg for &'a Polynomial<S> {
    type Output = Polynomial<S>;

    fn neg(self) -> Polynomial<S> {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl<'a, S: Scalar> Mul for &'a Polynomial<S> {
    type Output = Polynomial<S>;

    fn mul(self, rhs: Self) -> Polynomial<S> {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut v = vec![S::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    v[i + j] = v[i + j].clone() + a.clone() * b.clone();
                }
            }
        }
        Polynomial::new(v)
    }
}

impl<S: Scalar> Add for Polynomial<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl<S: Scalar> Sub for Polynomial<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        &self - &rhs
    }
}

impl<S: Scalar> Mul for Polynomial<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<S: Scalar> Neg for Polynomial<S> {
    type Output = Self;
    fn neg(self) -> Self {
        -&self
    }
}

impl<S: Scalar> Scalar for Polynomial<S> {
    const INEXACT: bool = S::INEXACT;

    /// Only nonzero constants are units.
    fn try_inv(&self) -> Option<Self> {
        if self.degree() == 0 {
            self.coeffs[0].try_inv().map(Self::constant)
        } else {
            None
        }
    }

    fn from_i64(n: i64) -> Self {
        Self::constant(S::from_i64(n))
    }

    fn magnitude(&self) -> f64 {
        self.max_magnitude()
    }
}
