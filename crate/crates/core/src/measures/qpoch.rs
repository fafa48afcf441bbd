//! q-Pochhammer symbols `(w;q)_n` and `(w;q)_∞`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `(w;q)_n = Π_{j<n} (1 - w q^j)`, exact in exact domains.
pub fn qpoch<S: Scalar>(w: &S, q: &S, n: usize) -> S {
    let mut acc = S::one();
    let mut wq = w.clone();
    for _ in 0..n {
        acc = acc * (S::one() - wq.clone());
        wq = wq * q.clone();
    }
    acc
}

/// A truncated infinite product with a bound on the relative truncation error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InfiniteProduct<T> {
    pub value: T,
    /// Number of factors multiplied.
    pub terms: usize,
    /// Bound on `|true / value - 1|`.
    pub error_bound: f64,
}

pub const DEFAULT_TOL: f64 = 1e-12;

const MAX_TERMS: usize = 100_000;

/// `(w;q)_∞` for complex `w`. Factors are taken until `|w q^j| < tol (1-|q|)`;
/// the omitted tail `Π_{k>=j}(1 - w q^k)` then lies within `error_bound`.
pub fn qpoch_inf_complex(w: Complex64, q: f64, tol: f64) -> Result<InfiniteProduct<Complex64>> {
    if !(q.abs() < 1.0) {
        return Err(Error::ParameterRange(format!(
            "infinite q-Pochhammer needs |q| < 1, got q = {q}"
        )));
    }
    let cut = tol * (1.0 - q.abs());
    let mut acc = Complex64::new(1.0, 0.0);
    let mut wq = w;
    let mut terms = 0;
    while wq.norm() >= cut {
        if terms == MAX_TERMS {
            return Err(Error::Precondition(format!(
                "(w;q)_∞ did not reach tolerance {tol} after {MAX_TERMS} factors"
            )));
        }
        acc *= Complex64::new(1.0, 0.0) - wq;
        wq *= q;
        terms += 1;
    }
    // |log Π(1 - z_k)| <= Σ |z_k| / (1 - |z_k|) <= r / ((1 - |q|)(1 - r)).
    let r = wq.norm();
    let log_bound = if r == 0.0 {
        0.0
    } else {
        r / ((1.0 - q.abs()) * (1.0 - r))
    };
    Ok(InfiniteProduct {
        value: acc,
        terms,
        error_bound: log_bound.exp_m1(),
    })
}

/// `(w;q)_∞` for real `w`.
pub fn qpoch_inf(w: f64, q: f64, tol: f64) -> Result<InfiniteProduct<f64>> {
    let p = qpoch_inf_complex(Complex64::new(w, 0.0), q, tol)?;
    Ok(InfiniteProduct {
        value: p.value.re,
        terms: p.terms,
        error_bound: p.error_bound,
    })
}

/// Product of several `(w_i;q)_∞` with the combined error bound.
pub fn qpoch_inf_many(ws: &[Complex64], q: f64, tol: f64) -> Result<InfiniteProduct<Complex64>> {
    let mut value = Complex64::new(1.0, 0.0);
    let mut bound = 1.0;
    let mut terms = 0;
    for &w in ws {
        let p = qpoch_inf_complex(w, q, tol)?;
        value *= p.value;
        bound *= 1.0 + p.error_bound;
        terms += p.terms;
    }
    Ok(InfiniteProduct {
        value,
        terms,
        error_bound: bound - 1.0,
    })
}

/// Finite complex product `(w;q)_n`.
pub fn qpoch_complex(w: Complex64, q: f64, n: usize) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    let mut wq = w;
    for _ in 0..n {
        acc *= Complex64::new(1.0, 0.0) - wq;
        wq *= q;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    #[test]
    fn finite_values() {
        assert_eq!(qpoch(&rat(3, 7), &rat(1, 2), 0), rat(1, 1));
        assert_eq!(qpoch(&rat(1, 2), &rat(1, 2), 2), rat(3, 8));
        assert_eq!(qpoch(&rat(1, 1), &rat(1, 2), 3), rat(0, 1));
    }

    #[test]
    fn infinite_values() {
        assert_eq!(qpoch_inf(0.0, 0.5, DEFAULT_TOL).unwrap().value, 1.0);
        assert_eq!(qpoch_inf(0.3, 0.0, DEFAULT_TOL).unwrap().value, 0.7);
        // Pentagonal number theorem.
        let q: f64 = 0.3;
        let mut euler = 0.0;
        for k in -20i32..=20 {
            let e = (k * (3 * k - 1) / 2) as f64;
            euler += if k % 2 == 0 { 1.0 } else { -1.0 } * q.powf(e);
        }
        let p = qpoch_inf(q, q, 1e-15).unwrap();
        assert!((p.value - euler).abs() < 1e-14);
        assert!(p.error_bound < 1e-14);
    }

    #[test]
    fn rejects_unit_modulus() {
        assert!(qpoch_inf(0.5, 1.0, DEFAULT_TOL).is_err());
        assert!(qpoch_inf(0.5, -1.0, DEFAULT_TOL).is_err());
    }
}
