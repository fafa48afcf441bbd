//! Three-term recurrences, Favard classification and moment functionals.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{pow, qint, RealScalar, Scalar};
use crate::solver::QHParams;

/// Coefficients of a monic recurrence
/// `y B_n = B_{n+1} + diag[n] B_n + sub[n] B_{n-1}`, with `sub[0] = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiMatrix<S> {
    pub diag: Vec<S>,
    pub sub: Vec<S>,
}

impl<S: Scalar> JacobiMatrix<S> {
    pub fn new(diag: Vec<S>, mut sub: Vec<S>) -> Self {
        assert_eq!(diag.len(), sub.len(), "diag and sub must have equal length");
        if let Some(s0) = sub.first_mut() {
            *s0 = S::zero();
        }
        JacobiMatrix { diag, sub }
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn truncate(&self, n: usize) -> Self {
        JacobiMatrix {
            diag: self.diag[..n.min(self.size())].to_vec(),
            sub: self.sub[..n.min(self.size())].to_vec(),
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> JacobiMatrix<T> {
        JacobiMatrix {
            diag: self.diag.iter().map(&f).collect(),
            sub: self.sub.iter().map(&f).collect(),
        }
    }

    /// Recurrence of the law of `scale * Y + shift` when `self` belongs to `Y`.
    pub fn affine(&self, scale: &S, shift: &S) -> Self {
        JacobiMatrix {
            diag: self
                .diag
                .iter()
                .map(|a| scale.clone() * a.clone() + shift.clone())
                .collect(),
            sub: self
                .sub
                .iter()
                .map(|b| scale.clone() * scale.clone() * b.clone())
                .collect(),
        }
    }

    /// The monic polynomials `B_0..B_{n}` of the recurrence.
    pub fn polynomials(&self, n: usize) -> Vec<crate::Polynomial<S>> {
        use crate::Polynomial;
        let mut out = vec![Polynomial::constant(S::one())];
        let y = Polynomial::var();
        for k in 0..n.min(self.size()) {
            let next = &(&y - &Polynomial::constant(self.diag[k].clone())) * &out[k];
            let next = if k == 0 {
                next
            } else {
                &next - &out[k - 1].scale(&self.sub[k])
            };
            out.push(next);
        }
        out
    }
}

impl<S: RealScalar> JacobiMatrix<S> {
    pub fn to_f64(&self) -> JacobiMatrix<f64> {
        self.map(RealScalar::to_f64)
    }
}

/// Recurrence coefficients `(diag[n], sub[n])` of `B_n(·; z, t)`.
pub fn nu_coefficients<S: Scalar>(params: &QHParams<S>, t: &S, z: &S, n: usize) -> (S, S) {
    let d = params.derived(t);
    let q = &params.q;
    let (qn, qn1) = (qint(q, n), qint(q, n + 1));
    let diag = (d.gamma.clone() + d.beta.clone() * (qn1.clone() + qn.clone())) * qn1.clone()
        + z.clone() * pow(q, n as u32 + 1);
    let eta = &params.eta;
    let factor = S::one()
        + eta.clone() * d.gamma.clone() * qn.clone()
        + eta.clone() * d.beta.clone() * qn.clone() * qn.clone()
        + z.clone() * eta.clone() * pow(q, n as u32);
    let sub = if n == 0 {
        S::zero()
    } else {
        d.alpha * factor * qn1 * qn
    };
    (diag, sub)
}

/// Jacobi matrix of size `n` for `ν_{x,t}`.
pub fn jacobi_from_recurrence<S: Scalar>(params: &QHParams<S>, t: &S, x: &S, n: usize) -> JacobiMatrix<S> {
    let (diag, sub) = (0..n).map(|k| nu_coefficients(params, t, x, k)).unzip();
    JacobiMatrix::new(diag, sub)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FavardClass {
    /// Every stored `sub[n]`, `n >= 1`, is positive.
    AllPositive,
    /// `sub[n0]` is the first zero; the measure sits on the zeros of `B_{n0}`.
    TruncatedAt(usize),
    /// `sub[n]` is negative before any zero: no probability measure.
    Invalid { at: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FavardReport {
    pub class: FavardClass,
    /// `1 + ηθ + η²τ >= 0`.
    pub first_factor_ok: bool,
    /// `1 + ηθ̃/(1-q) >= 0`, absent when `q = 1`.
    pub limit_ok: Option<bool>,
}

impl FavardReport {
    pub fn admissible(&self) -> bool {
        !matches!(self.class, FavardClass::Invalid { .. })
            && self.first_factor_ok
            && self.limit_ok.unwrap_or(true)
    }

    /// Name of the first violated condition.
    pub fn violation(&self) -> Option<String> {
        if let FavardClass::Invalid { at } = self.class {
            return Some(format!("recurrence coefficient sub[{at}] is negative"));
        }
        if !self.first_factor_ok {
            return Some("1 + ηθ + η²τ < 0".into());
        }
        if self.limit_ok == Some(false) {
            return Some("1 + ηθ̃/(1-q) < 0".into());
        }
        None
    }
}

pub fn classify_signs<S: RealScalar>(j: &JacobiMatrix<S>) -> FavardClass {
    for n in 1..j.size() {
        if j.sub[n].is_negative() {
            return FavardClass::Invalid { at: n };
        }
        if j.sub[n].is_zero() {
            return FavardClass::TruncatedAt(n);
        }
    }
    FavardClass::AllPositive
}

/// Favard classification of `j` plus the parameter-level admissibility flags.
pub fn favard_classify<S: RealScalar>(j: &JacobiMatrix<S>, params: &QHParams<S>) -> FavardReport {
    let (eta, theta, tau, q) = (&params.eta, &params.theta, &params.tau, &params.q);
    let first = S::one() + eta.clone() * theta.clone() + eta.clone() * eta.clone() * tau.clone();
    let limit_ok = params.theta_tilde().map(|tt| {
        let one_minus_q = S::one() - q.clone();
        let v = S::one()
            + eta.clone() * tt * one_minus_q.try_inv().expect("q != 1 when θ̃ exists");
        !v.is_negative()
    });
    FavardReport {
        class: classify_signs(j),
        first_factor_ok: !first.is_negative(),
        limit_ok,
    }
}

/// Moments `m_0..m_k` of the functional making the recurrence orthogonal,
/// i.e. `m_j = (J^j)_{00}`.
pub fn moments_from_jacobi<S: Scalar>(j: &JacobiMatrix<S>, k: usize) -> Result<Vec<S>> {
    if j.size() < k + 1 {
        return Err(Error::Precondition(format!(
            "{k} moments need a Jacobi matrix of size {}, got {}",
            k + 1,
            j.size()
        )));
    }
    let mut out = vec![S::one()];
    // Coordinates of y^step in the basis B_0, B_1, ...; entries past
    // k - step never reach index 0 again and are dropped.
    let mut c = vec![S::one()];
    for step in 1..=k {
        let keep = step.min(k - step) + 1;
        let mut next = vec![S::zero(); keep];
        for (m, slot) in next.iter_mut().enumerate() {
            let mut v = S::zero();
            if m >= 1 {
                if let Some(prev) = c.get(m - 1) {
                    v = v + prev.clone();
                }
            }
            if let Some(cur) = c.get(m) {
                v = v + j.diag[m].clone() * cur.clone();
            }
            if let Some(up) = c.get(m + 1) {
                v = v + j.sub[m + 1].clone() * up.clone();
            }
            *slot = v;
        }
        c = next;
        out.push(c[0].clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, Rational};

    fn params(eta: Rational, theta: Rational, tau: Rational, q: Rational) -> QHParams<Rational> {
        QHParams::new(eta, theta, tau, q).unwrap()
    }

    #[test]
    fn zero_parameters() {
        let q = rat(1, 3);
        let p = params(rat(0, 1), rat(0, 1), rat(0, 1), q.clone());
        let (t, x) = (rat(2, 1), rat(1, 5));
        let j = jacobi_from_recurrence(&p, &t, &x, 6);
        for n in 0..6 {
            assert_eq!(j.diag[n], x.clone() * pow(&q, n as u32 + 1));
            if n > 0 {
                let expect = (rat(1, 1) - q.clone()) * t.clone() * qint(&q, n + 1) * qint(&q, n);
                assert_eq!(j.sub[n], expect);
            }
        }
    }

    #[test]
    fn q_minus_one_collapses() {
        let p = params(rat(1, 2), rat(1, 3), rat(1, 4), rat(-1, 1));
        let j = jacobi_from_recurrence(&p, &rat(1, 1), &rat(1, 7), 8);
        assert!(j.sub.iter().all(|s| *s == rat(0, 1)));
        assert_eq!(classify_signs(&j), FavardClass::TruncatedAt(1));
        let c = rat(1, 3) + rat(1, 2) * rat(5, 4) - rat(1, 7);
        let m = moments_from_jacobi(&j, 5).unwrap();
        for (k, mk) in m.iter().enumerate() {
            assert_eq!(*mk, pow(&c, k as u32));
        }
    }

    #[test]
    fn free_case_coefficients() {
        let (eta, theta, tau) = (rat(1, 2), rat(1, 3), rat(1, 5));
        let t = rat(2, 1);
        let p = params(eta.clone(), theta.clone(), tau.clone(), rat(0, 1));
        let j = jacobi_from_recurrence(&p, &t, &rat(0, 1), 6);
        assert_eq!(j.diag[0], theta.clone() + eta.clone() * tau.clone());
        let s2 = (tau.clone() + t.clone())
            * (rat(1, 1) + eta.clone() * theta.clone() + eta.clone() * eta.clone() * tau.clone());
        for n in 1..6 {
            assert_eq!(j.sub[n], s2);
            assert_eq!(j.diag[n], theta.clone() + rat(2, 1) * eta.clone() * tau.clone() + eta.clone() * t.clone());
        }
    }

    #[test]
    fn favard_examples() {
        // 1 + ηθ + η²τ < 0 at q = 0.
        let p = params(rat(1, 1), rat(-2, 1), rat(1, 2), rat(0, 1));
        let j = jacobi_from_recurrence(&p, &rat(1, 1), &rat(0, 1), 6);
        let r = favard_classify(&j, &p);
        assert!(matches!(r.class, FavardClass::Invalid { at: 1 }));
        assert!(!r.admissible());
        // 1 + ηθ + η²τ = 0 at q = 0: Dirac at θ + ητ.
        let p = params(rat(1, 1), rat(-3, 2), rat(1, 2), rat(0, 1));
        let j = jacobi_from_recurrence(&p, &rat(1, 1), &rat(0, 1), 6);
        assert_eq!(favard_classify(&j, &p).class, FavardClass::TruncatedAt(1));
        assert_eq!(j.diag[0], rat(-1, 1));
        // all-zero parameters
        let p = params(rat(0, 1), rat(0, 1), rat(0, 1), rat(1, 2));
        let j = jacobi_from_recurrence(&p, &rat(1, 1), &rat(0, 1), 10);
        assert_eq!(favard_classify(&j, &p).class, FavardClass::AllPositive);
    }

    #[test]
    fn moments_low_order() {
        let p = params(rat(1, 4), rat(1, 2), rat(1, 5), rat(1, 3));
        let (t, x) = (rat(1, 1), rat(2, 7));
        let j = jacobi_from_recurrence(&p, &t, &x, 4);
        let m = moments_from_jacobi(&j, 3).unwrap();
        let d = p.derived(&t);
        assert_eq!(m[0], rat(1, 1));
        assert_eq!(m[1], d.gamma.clone() + d.beta.clone() + p.q.clone() * x.clone());
        let (a0, a1, b1) = (j.diag[0].clone(), j.diag[1].clone(), j.sub[1].clone());
        assert_eq!(m[2], a0.clone() * a0.clone() + b1.clone());
        assert_eq!(
            m[3],
            a0.clone() * a0.clone() * a0.clone() + rat(2, 1) * a0 * b1.clone() + a1 * b1
        );
        assert!(moments_from_jacobi(&j, 4).is_err());
    }
}
