//! The algebra of polynomial sequences.
//!
//! An element is a sequence `P = (P_0, P_1, ...)` of polynomials in one
//! variable `x`. The product is
//!
//! ```text
//! (P Q)_k = sum_j [Q_k]_j P_j
//! ```
//!
//! where `[Q_k]_j` is the coefficient of `x^j` in `Q_k`. Left multiplication by
//! `P` therefore acts on every coordinate of `Q` as the linear map
//! `x^j -> P_j`. The product is associative and non-commutative, with unit
//! `E = (1, x, x^2, ...)`.
//!
//! Elements are stored on a finite window. Only the leading coordinates that
//! are exact survive an operation, so `len()` is the validity count and any
//! coordinate that can be read is exact.

use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::scalar::{pow, qint, Scalar};

/// A windowed element of the algebra. Every nonzero stored coordinate
/// satisfies `deg(coords[n]) <= n + bandwidth`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySeq<S> {
    coords: Vec<Polynomial<S>>,
    bandwidth: i64,
    window: usize,
}

/// The `α_t, β_t, γ_t, q` entering the special elements.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraParams<S> {
    pub alpha: S,
    pub beta: S,
    pub gamma: S,
    pub q: S,
}

impl<S: Scalar> AlgebraParams<S> {
    /// Parameters for elements that only need `q` and `β`.
    pub fn with_beta(beta: S, q: S) -> Self {
        AlgebraParams {
            alpha: S::zero(),
            beta,
            gamma: S::zero(),
            q,
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> AlgebraParams<T> {
        AlgebraParams {
            alpha: f(&self.alpha),
            beta: f(&self.beta),
            gamma: f(&self.gamma),
            q: f(&self.q),
        }
    }
}

/// Named elements of the algebra.
#[derive(Clone, Debug, PartialEq)]
pub enum Special<S> {
    /// Unit `(1, x, x^2, ...)`.
    E,
    /// Evaluation at `a`: `(1, a, a^2, ...)`.
    Ea(S),
    /// `(0, 1, x, x^2, ...)`.
    D,
    /// `(x, x^2, x^3, ...)`.
    F,
    /// q-derivative `([0]_q, [1]_q, [2]_q x, ...)`.
    Dq,
    /// Classical derivative.
    D1,
    /// `E + β D_q F D_q`.
    W1,
    /// `E + β F D_q^2`.
    W2,
    /// `E + qβ F D_q^2`.
    W3,
    /// `E + β D_q^2 F`.
    W4,
    /// `(W1 + γ D_q) W2 + α D_q^2`.
    R,
    /// `(1 - q) D_q W2 - β D_q^2`.
    Q,
    /// `R + z (D - Q)`.
    S(S),
}

/// Outcome of comparing two elements coordinate-wise.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub window: usize,
    /// Largest coefficient magnitude of `lhs - rhs`.
    pub max_abs: f64,
    /// All differences are exactly zero.
    pub exact_zero: bool,
    /// First coordinate attaining `max_abs` when it is positive.
    pub worst_coord: Option<usize>,
}

impl ResidualReport {
    /// Zero residual: exact in exact domains, within `tol` otherwise.
    pub fn passes<S: Scalar>(&self, tol: f64) -> bool {
        if S::INEXACT {
            self.max_abs <= tol
        } else {
            self.exact_zero
        }
    }
}

impl<S: Scalar> PolySeq<S> {
    /// Wrap coordinates, checking the bandwidth invariant.
    pub fn from_coords(coords: Vec<Polynomial<S>>, bandwidth: i64) -> Result<Self> {
        for (n, c) in coords.iter().enumerate() {
            if !c.is_zero() && c.degree() > n as i64 + bandwidth {
                return Err(Error::Precondition(format!(
                    "coordinate {n} has degree {} above bandwidth {bandwidth}",
                    c.degree()
                )));
            }
        }
        let window = coords.len();
        Ok(PolySeq {
            coords,
            bandwidth,
            window,
        })
    }

    /// Wrap coordinates with the tightest bandwidth they satisfy.
    pub fn from_coords_tight(coords: Vec<Polynomial<S>>) -> Self {
        let bandwidth = tight_bandwidth(&coords);
        let window = coords.len();
        PolySeq {
            coords,
            bandwidth,
            window,
        }
    }

    fn from_fn(window: usize, bandwidth: i64, f: impl Fn(usize) -> Polynomial<S>) -> Self {
        PolySeq {
            coords: (0..window).map(f).collect(),
            bandwidth,
            window,
        }
    }

    pub fn zero(window: usize) -> Self {
        Self::from_fn(window, -1, |_| Polynomial::zero())
    }

    pub fn e(window: usize) -> Self {
        Self::from_fn(window, 0, |n| Polynomial::monomial(S::one(), n))
    }

    pub fn ea(a: &S, window: usize) -> Self {
        Self::from_fn(window, 0, |n| Polynomial::constant(pow(a, n as u32)))
    }

    pub fn d(window: usize) -> Self {
        Self::from_fn(window, -1, |n| match n {
            0 => Polynomial::zero(),
            _ => Polynomial::monomial(S::one(), n - 1),
        })
    }

    pub fn f(window: usize) -> Self {
        Self::from_fn(window, 1, |n| Polynomial::monomial(S::one(), n + 1))
    }

    pub fn dq(q: &S, window: usize) -> Self {
        Self::from_fn(window, -1, |n| match n {
            0 => Polynomial::zero(),
            _ => Polynomial::monomial(qint(q, n), n - 1),
        })
    }

    /// `E - F D = (1, 0, 0, ...)`.
    pub fn e_minus_fd(window: usize) -> Self {
        Self::from_fn(window, 0, |n| match n {
            0 => Polynomial::one(),
            _ => Polynomial::zero(),
        })
    }

    /// `x^n + c_n x^{n-1}` style elements.
    fn unit_plus_lower(window: usize, c: impl Fn(usize) -> S) -> Self {
        Self::from_fn(window, 0, |n| {
            let mut p = Polynomial::monomial(S::one(), n);
            if n >= 1 {
                p = &p + &Polynomial::monomial(c(n), n - 1);
            }
            p
        })
    }

    /// Number of valid coordinates.
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Window the element was constructed on.
    pub fn window(&self) -> usize {
        self.window
    }

    pub fn bandwidth(&self) -> i64 {
        self.bandwidth
    }

    pub fn coords(&self) -> &[Polynomial<S>] {
        &self.coords
    }

    pub fn coord(&self, n: usize) -> Option<&Polynomial<S>> {
        self.coords.get(n)
    }

    /// Keep the first `v` coordinates.
    pub fn truncate(&self, v: usize) -> Self {
        let mut out = self.clone();
        out.coords.truncate(v);
        out
    }

    pub fn is_zero_on(&self, v: usize) -> bool {
        self.coords.iter().take(v).all(Zero::is_zero)
    }

    /// Largest `deg(coords[n]) - n` over nonzero coordinates.
    pub fn tight_bandwidth(&self) -> i64 {
        tight_bandwidth(&self.coords)
    }

    pub fn scale(&self, c: &S) -> Self {
        PolySeq {
            coords: self.coords.iter().map(|p| p.scale(c)).collect(),
            bandwidth: self.bandwidth,
            window: self.window,
        }
    }

    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T) -> PolySeq<T> {
        PolySeq {
            coords: self.coords.iter().map(|p| p.map(&f)).collect(),
            bandwidth: self.bandwidth,
            window: self.window,
        }
    }

    /// Embed into sequences over `S[z]` with `z`-free coefficients.
    pub fn lift(&self) -> PolySeq<Polynomial<S>> {
        self.map_scalars(|c| Polynomial::constant(c.clone()))
    }

    /// The product `self · rhs`.
    ///
    /// Coordinate `k` needs `self_j` for every `j <= deg(rhs_k)`; the result
    /// stops at the first `k` for which that is not available.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        let avail = self.coords.len();
        let mut out = Vec::with_capacity(rhs.coords.len());
        for qk in &rhs.coords {
            let d = qk.degree();
            if d >= avail as i64 {
                break;
            }
            let mut acc: Vec<S> = Vec::new();
            for (j, c) in qk.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let pj = self.coords[j].coeffs();
                if acc.len() < pj.len() {
                    acc.resize(pj.len(), S::zero());
                }
                for (slot, a) in acc.iter_mut().zip(pj) {
                    if !a.is_zero() {
                        *slot = slot.clone() + a.clone() * c.clone();
                    }
                }
            }
            out.push(Polynomial::new(acc));
        }
        if out.is_empty() && !rhs.coords.is_empty() {
            return Err(Error::WindowExhausted {
                needed: rhs.coords[0].degree().max(0) as usize,
                available: avail,
            });
        }
        let bandwidth = self.bandwidth + rhs.bandwidth;
        if let Some(k) =
            (0..out.len()).find(|&k| !out[k].is_zero() && out[k].degree() > k as i64 + bandwidth)
        {
            return Err(Error::Precondition(format!(
                "bandwidth bookkeeping failed at coordinate {k}"
            )));
        }
        Ok(PolySeq {
            coords: out,
            bandwidth,
            window: self.window.max(rhs.window),
        })
    }

    /// Left-to-right product of several factors.
    pub fn product(factors: &[&Self]) -> Result<Self> {
        let (first, rest) = factors
            .split_first()
            .ok_or_else(|| Error::Precondition("empty product".into()))?;
        rest.iter().try_fold((*first).clone(), |acc, f| acc.mul(f))
    }

    pub fn pow(&self, k: usize) -> Result<Self> {
        let mut acc = Self::e(self.coords.len());
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Inverse of `E + self`, which must satisfy `deg(self_n) <= n - 1`.
    ///
    /// Coordinate `n` of `self^k` has degree at most `n - k`, so the Neumann
    /// series `sum_k (-self)^k` terminates coordinate-wise.
    pub fn invert_neumann(&self) -> Result<Self> {
        if let Some((n, c)) = self
            .coords
            .iter()
            .enumerate()
            .find(|(n, c)| c.degree() > *n as i64 - 1)
        {
            return Err(Error::Precondition(format!(
                "Neumann inverse needs deg X_n <= n-1, coordinate {n} has degree {}",
                c.degree()
            )));
        }
        let v = self.coords.len();
        let neg = PolySeq {
            coords: self.coords.iter().map(|c| -c).collect(),
            bandwidth: -1,
            window: self.window,
        };
        let mut sum = Self::e(v);
        let mut term = Self::e(v);
        for _ in 0..v {
            term = term.mul(&neg)?;
            if term.is_zero_on(term.len()) {
                break;
            }
            sum = &sum + &term;
        }
        sum.bandwidth = 0;
        sum.window = self.window;
        Ok(sum)
    }

    /// Inverse of an element with `deg(P_n) = n` for every stored `n`.
    ///
    /// With `M(X)_{n,j} = [X_n]_j` the product satisfies `M(PQ) = M(Q) M(P)`,
    /// so the inverse is the lower-triangular matrix inverse of `M(P)`.
    pub fn invert_graded(&self) -> Result<Self> {
        let v = self.coords.len();
        let mut diag_inv = Vec::with_capacity(v);
        for (n, c) in self.coords.iter().enumerate() {
            if c.degree() != n as i64 {
                return Err(Error::NotGraded {
                    coord: n,
                    degree: c.degree(),
                    expected: n as i64,
                });
            }
            let lead = c.leading().expect("nonzero coordinate");
            diag_inv.push(lead.try_inv().ok_or_else(|| {
                Error::Precondition(format!("leading coefficient of coordinate {n} is not a unit"))
            })?);
        }
        let m = |k: usize, j: usize| self.coords[k].coeff(j);
        let mut rows: Vec<Vec<S>> = Vec::with_capacity(v);
        for n in 0..v {
            let mut row = vec![S::zero(); n + 1];
            row[n] = diag_inv[n].clone();
            for j in (0..n).rev() {
                let mut s = S::zero();
                for (k, nk) in row.iter().enumerate().take(n + 1).skip(j + 1) {
                    if !nk.is_zero() {
                        let mkj = m(k, j);
                        if !mkj.is_zero() {
                            s = s + nk.clone() * mkj;
                        }
                    }
                }
                row[j] = -(s * diag_inv[j].clone());
            }
            rows.push(row);
        }
        Ok(PolySeq {
            coords: rows.into_iter().map(Polynomial::new).collect(),
            bandwidth: 0,
            window: self.window,
        })
    }

    /// Compare the first `v` coordinates of `self` and `rhs`.
    pub fn check_identity(&self, rhs: &Self, v: usize) -> Result<ResidualReport> {
        if self.len() < v || rhs.len() < v {
            return Err(Error::IncompatibleWindows {
                requested: v,
                lhs: self.len(),
                rhs: rhs.len(),
            });
        }
        let mut max_abs = 0.0;
        let mut exact_zero = true;
        let mut worst = None;
        for n in 0..v {
            let diff = &self.coords[n] - &rhs.coords[n];
            if !diff.is_zero() {
                exact_zero = false;
                let m = diff.max_magnitude();
                if m > max_abs || worst.is_none() {
                    max_abs = m.max(max_abs);
                    worst = Some(n);
                }
            }
        }
        Ok(ResidualReport {
            window: v,
            max_abs,
            exact_zero,
            worst_coord: worst,
        })
    }

    /// Coordinate-wise evaluation `(P_0(a), P_1(a), ...)` as an element with constant coordinates.
    pub fn evaluate_at(&self, a: &S) -> Self {
        PolySeq::ea(a, self.coords.len().max(1))
            .mul(self)
            .expect("evaluation element has constant coordinates")
    }
}

impl<S: Scalar> PolySeq<Polynomial<S>> {
    /// Replace the auxiliary indeterminate `z` by the generic variable `x`.
    ///
    /// This does not commute with the product, so it has to be applied at the
    /// point of the computation where the substitution is meant.
    pub fn substitute_z(&self) -> PolySeq<S> {
        PolySeq::from_coords_tight(self.coords.iter().map(Polynomial::merge_inner).collect())
    }

    /// Set the auxiliary indeterminate to a value.
    pub fn eval_z(&self, z: &S) -> PolySeq<S> {
        PolySeq {
            coords: self.coords.iter().map(|c| c.eval_inner(z)).collect(),
            bandwidth: self.bandwidth,
            window: self.window,
        }
    }
}

fn tight_bandwidth<S: Scalar>(coords: &[Polynomial<S>]) -> i64 {
    coords
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(n, c)| c.degree() - n as i64)
        .max()
        .unwrap_or(-1)
}

/// Build a named element on `window` coordinates.
pub fn make_special<S: Scalar>(name: &Special<S>, p: &AlgebraParams<S>, window: usize) -> PolySeq<S> {
    let q = &p.q;
    let beta = &p.beta;
    let full = "factors with nonpositive bandwidth keep full validity";
    match name {
        Special::E => PolySeq::e(window),
        Special::Ea(a) => PolySeq::ea(a, window),
        Special::D => PolySeq::d(window),
        Special::F => PolySeq::f(window),
        Special::Dq => PolySeq::dq(q, window),
        Special::D1 => PolySeq::dq(&S::one(), window),
        Special::W1 => PolySeq::unit_plus_lower(window, |n| {
            let b = qint(q, n);
            beta.clone() * b.clone() * b
        }),
        Special::W2 => {
            PolySeq::unit_plus_lower(window, |n| beta.clone() * qint(q, n) * qint(q, n - 1))
        }
        Special::W3 => PolySeq::unit_plus_lower(window, |n| {
            q.clone() * beta.clone() * qint(q, n) * qint(q, n - 1)
        }),
        Special::W4 => {
            PolySeq::unit_plus_lower(window, |n| beta.clone() * qint(q, n + 1) * qint(q, n))
        }
        Special::R => {
            let dq = PolySeq::dq(q, window);
            let w1 = make_special(&Special::W1, p, window);
            let w2 = make_special(&Special::W2, p, window);
            let left = &w1 + &dq.scale(&p.gamma);
            let dq2 = dq.mul(&dq).expect(full);
            &left.mul(&w2).expect(full) + &dq2.scale(&p.alpha)
        }
        Special::Q => {
            let dq = PolySeq::dq(q, window);
            let w2 = make_special(&Special::W2, p, window);
            let one_minus_q = S::one() - q.clone();
            let dq2 = dq.mul(&dq).expect(full);
            &dq.mul(&w2).expect(full).scale(&one_minus_q) - &dq2.scale(beta)
        }
        Special::S(z) => {
            let r = make_special(&Special::R, p, window);
            let qq = make_special(&Special::Q, p, window);
            &r + &(&PolySeq::d(window) - &qq).scale(z)
        }
    }
}

impl<'a, S: Scalar> Add for &'a PolySeq<S> {
    type Output = PolySeq<S>;

    fn add(self, rhs: Self) -> PolySeq<S> {
        PolySeq {
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a + b)
                .collect(),
            bandwidth: self.bandwidth.max(rhs.bandwidth),
            window: self.window.max(rhs.window),
        }
    }
}

impl<'a, S: Scalar> Sub for &'a PolySeq<S> {
    type Output = PolySeq<S>;

    fn sub(self, rhs: Self) -> PolySeq<S> {
        self + &(-rhs)
    }
}

impl<'a, S: Scalar> Neg for &'a PolySeq<S> {
    type Output = PolySeq<S>;

    fn neg(self) -> PolySeq<S> {
        PolySeq {
            coords: self.coords.iter().map(|c| -c).collect(),
            bandwidth: self.bandwidth,
            window: self.window,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, Rational};

    type Seq = PolySeq<Rational>;

    fn mono(c: Rational, n: usize) -> Polynomial<Rational> {
        Polynomial::monomial(c, n)
    }

    #[test]
    fn df_is_unit() {
        let l = 10;
        let df = Seq::d(l).mul(&Seq::f(l)).unwrap();
        assert_eq!(df.len(), l - 1);
        assert!(df.check_identity(&Seq::e(l), l - 1).unwrap().exact_zero);
    }

    #[test]
    fn fd_drops_constant() {
        let l = 8;
        let fd = Seq::f(l).mul(&Seq::d(l)).unwrap();
        assert!(fd.coord(0).unwrap().is_zero());
        for n in 1..l {
            assert_eq!(fd.coord(n).unwrap(), &mono(rat(1, 1), n));
        }
        let r = (&Seq::e(l) - &fd).check_identity(&Seq::e_minus_fd(l), l).unwrap();
        assert!(r.exact_zero);
    }

    #[test]
    fn ea_evaluates() {
        let l = 6;
        let a = rat(-2, 3);
        let p = Seq::from_coords_tight(
            (0..l)
                .map(|n| Polynomial::new(vec![rat(n as i64, 1), rat(1, 1), rat(0, 1), rat(1, 2)]))
                .collect(),
        );
        let ev = Seq::ea(&a, l).mul(&p).unwrap();
        for n in 0..l {
            assert_eq!(ev.coord(n).unwrap(), &Polynomial::constant(p.coord(n).unwrap().eval(&a)));
        }
    }

    #[test]
    fn dq_closed_forms() {
        let l = 7;
        assert_eq!(Seq::dq(&rat(0, 1), l), Seq::d(l));
        let d1 = make_special(&Special::D1, &AlgebraParams::with_beta(rat(0, 1), rat(0, 1)), l);
        for n in 1..l {
            assert_eq!(d1.coord(n).unwrap(), &mono(rat(n as i64, 1), n - 1));
        }
    }

    #[test]
    fn w1_matches_direct_product() {
        let l = 9;
        let (beta, q) = (rat(1, 2), rat(1, 3));
        let p = AlgebraParams::with_beta(beta.clone(), q.clone());
        let dq = Seq::dq(&q, l + 1);
        let prod = Seq::product(&[&dq, &Seq::f(l + 1), &dq]).unwrap();
        let direct = &Seq::e(l) + &prod.scale(&beta);
        let w1 = make_special(&Special::W1, &p, l);
        assert!(w1.check_identity(&direct, l).unwrap().exact_zero);
    }

    #[test]
    fn neumann_inverse_two_sided() {
        let l = 8;
        let p = AlgebraParams::with_beta(rat(3, 7), rat(-1, 2));
        for name in [Special::W1, Special::W2] {
            let w = make_special(&name, &p, l);
            let x = &w - &Seq::e(l);
            let inv = x.invert_neumann().unwrap();
            assert!(w.mul(&inv).unwrap().check_identity(&Seq::e(l), l).unwrap().exact_zero);
            assert!(inv.mul(&w).unwrap().check_identity(&Seq::e(l), l).unwrap().exact_zero);
        }
        assert_eq!(Seq::zero(5).invert_neumann().unwrap(), Seq::e(5));
        assert!(Seq::e(4).invert_neumann().is_err());
    }

    #[test]
    fn graded_inverse_of_shift_powers() {
        // P_n = (x - c)^n; its inverse is Q_n = (x + c)^n.
        let l = 8;
        let c = rat(5, 3);
        let lin = Polynomial::new(vec![-c.clone(), rat(1, 1)]);
        let mut coords = vec![Polynomial::one()];
        for n in 1..l {
            coords.push(&coords[n - 1] * &lin);
        }
        let p = Seq::from_coords(coords, 0).unwrap();
        let inv = p.invert_graded().unwrap();
        let binom = |n: usize, k: usize| -> i64 {
            (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
        };
        for n in 0..l {
            let expect = Polynomial::new(
                (0..=n)
                    .map(|k| rat(binom(n, k), 1) * crate::scalar::pow(&c, (n - k) as u32))
                    .collect(),
            );
            assert_eq!(inv.coord(n).unwrap(), &expect);
        }
        assert!(Seq::e(4).invert_graded().unwrap() == Seq::e(4));
        assert!(Seq::d(4).invert_graded().is_err());
    }

    #[test]
    fn substitution() {
        let l = 6;
        // F - zE with z := x vanishes.
        let f = Seq::f(l).lift();
        let ze = Seq::e(l).lift().scale(&Polynomial::var());
        assert!((&f - &ze).substitute_z().is_zero_on(l));
        let constant = Seq::d(l).lift();
        assert_eq!(constant.substitute_z().coords(), Seq::d(l).coords());
    }

    #[test]
    fn window_exhaustion_is_reported() {
        let d = Seq::d(3);
        let f = Seq::f(3);
        assert_eq!(d.mul(&f).unwrap().len(), 2);
        let tiny = Seq::d(1).mul(&Seq::f(3));
        assert!(matches!(tiny, Err(Error::WindowExhausted { .. })));
    }

    #[test]
    fn check_identity_windows() {
        let e = Seq::e(4);
        assert!(e.check_identity(&Seq::e(3), 4).is_err());
        let mut bumped = e.clone();
        bumped.coords[2] = &bumped.coords[2] + &Polynomial::one();
        let r = e.check_identity(&bumped, 4).unwrap();
        assert!(!r.exact_zero);
        assert_eq!(r.worst_coord, Some(2));
        assert_eq!(r.max_abs, 1.0);
    }
}
