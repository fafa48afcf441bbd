//! The q-commutation equation
//!
//! ```text
//! H T - q T H = E + θ H + η T + τ H^2,   T = F - t H,   H (E - F D) = 0
//! ```
//!
//! solved in the algebra of polynomial sequences. Writing `H = (E + ηF) H̃`,
//! the reduced unknown `H̃` is conjugate to `D_q W1^{-1}` by the element
//! `B(z)` whose coordinates are the monic orthogonal polynomials of `ν_{z,t}`.
//! A second construction goes through the moment sequence
//! `M̃ = ((E - F D) B(z)^{-1})|_{z:=x}` and `H̃ = sum_k F^k M̃ D^{k+1}`.
//! The generator element `A = sum_j F^j H D^{j+1}` has `A_n = A_t(x^n)`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::measures::jacobi::nu_coefficients;
use crate::poly::Polynomial;
use crate::polyseq::{make_special, AlgebraParams, PolySeq, ResidualReport, Special};
use crate::scalar::{RealScalar, Scalar};

/// Extra coordinates carried beyond the requested window. Forming the
/// equation multiplies by `T`, which has bandwidth `+1`, so residuals lose one
/// coordinate; the second is headroom for the generator element.
pub const WINDOW_MARGIN: usize = 2;

/// Floating-point residual tolerance used when the scalar domain rounds.
pub const FLOAT_RESIDUAL_TOL: f64 = 1e-8;

/// Parameters `(η, θ, τ, q)` of `QH(η, θ; 0, τ; q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QHParams<S> {
    pub eta: S,
    pub theta: S,
    pub tau: S,
    pub q: S,
}

/// `α_t = τ + (1-q)t`, `β_t = η α_t`, `γ_t = θ - ηt`.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivedParams<S> {
    pub alpha: S,
    pub beta: S,
    pub gamma: S,
}

impl<S: RealScalar> QHParams<S> {
    /// Checks `τ >= 0` and `q <= 1`.
    pub fn new(eta: S, theta: S, tau: S, q: S) -> Result<Self> {
        if tau.is_negative() {
            return Err(Error::ParameterRange("τ must be nonnegative".into()));
        }
        if q > S::one() {
            return Err(Error::ParameterRange("q must not exceed 1".into()));
        }
        Ok(QHParams { eta, theta, tau, q })
    }

    pub fn to_f64(&self) -> QHParams<f64> {
        self.map(RealScalar::to_f64)
    }
}

impl<S: Scalar> QHParams<S> {
    /// No range checks; for ring-valued parameters such as symbolic ones.
    pub fn new_unchecked(eta: S, theta: S, tau: S, q: S) -> Self {
        QHParams { eta, theta, tau, q }
    }

    pub fn derived(&self, t: &S) -> DerivedParams<S> {
        let alpha = self.tau.clone() + (S::one() - self.q.clone()) * t.clone();
        DerivedParams {
            beta: self.eta.clone() * alpha.clone(),
            gamma: self.theta.clone() - self.eta.clone() * t.clone(),
            alpha,
        }
    }

    /// `θ̃ = θ + ητ/(1-q)`, absent when `1 - q` is not invertible.
    pub fn theta_tilde(&self) -> Option<S> {
        let inv = (S::one() - self.q.clone()).try_inv()?;
        Some(self.theta.clone() + self.eta.clone() * self.tau.clone() * inv)
    }

    pub fn algebra(&self, t: &S) -> AlgebraParams<S> {
        let d = self.derived(t);
        AlgebraParams {
            alpha: d.alpha,
            beta: d.beta,
            gamma: d.gamma,
            q: self.q.clone(),
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> QHParams<T> {
        QHParams {
            eta: f(&self.eta),
            theta: f(&self.theta),
            tau: f(&self.tau),
            q: f(&self.q),
        }
    }

    pub fn lift(&self) -> QHParams<Polynomial<S>> {
        self.map(|c| Polynomial::constant(c.clone()))
    }
}

/// `F^k`, coordinates `x^{n+k}`.
pub fn f_power<S: Scalar>(k: usize, window: usize) -> PolySeq<S> {
    let coords = (0..window).map(|n| Polynomial::monomial(S::one(), n + k)).collect();
    PolySeq::from_coords(coords, k as i64).expect("monomials respect the bandwidth")
}

/// `D^k`, coordinates `x^{n-k}` (zero for `n < k`).
pub fn d_power<S: Scalar>(k: usize, window: usize) -> PolySeq<S> {
    let coords = (0..window)
        .map(|n| match n.checked_sub(k) {
            Some(m) => Polynomial::monomial(S::one(), m),
            None => Polynomial::zero(),
        })
        .collect();
    PolySeq::from_coords(coords, -(k as i64)).expect("monomials respect the bandwidth")
}

/// `sum_k F^k X D^{k+1}`.
pub fn shift_series<S: Scalar>(x: &PolySeq<S>) -> Result<PolySeq<S>> {
    let l = x.len();
    let mut acc = PolySeq::zero(l);
    for k in 0..l {
        let term = f_power(k, l).mul(&x.mul(&d_power(k + 1, l))?)?;
        acc = &acc + &term;
    }
    Ok(acc)
}

/// `B(z)` on `window` coordinates: coordinate `n` is the monic `B_n(x; z, t)`.
pub fn build_b<S: Scalar>(params: &QHParams<S>, t: &S, z: &S, window: usize) -> PolySeq<S> {
    let x = Polynomial::<S>::var();
    let mut coords: Vec<Polynomial<S>> = vec![Polynomial::one()];
    for n in 0..window.saturating_sub(1) {
        let (a, b) = nu_coefficients(params, t, z, n);
        let mut next = &(&x - &Polynomial::constant(a)) * &coords[n];
        if n >= 1 {
            next = &next - &coords[n - 1].scale(&b);
        }
        coords.push(next);
    }
    coords.truncate(window);
    PolySeq::from_coords(coords, 0).expect("B_n has degree n")
}

/// `B(z)` with `z` kept as an indeterminate.
pub fn build_b_symbolic<S: Scalar>(params: &QHParams<S>, t: &S, window: usize) -> PolySeq<Polynomial<S>> {
    build_b(&params.lift(), &Polynomial::constant(t.clone()), &Polynomial::var(), window)
}

/// How [`solve_htilde_with`] builds and checks `H̃`.
#[derive(Clone, Debug)]
pub struct SolveOptions<S> {
    /// Point at which `B(z)` is evaluated.
    pub z: S,
    /// Rebuild `H̃` from the moment sequence with symbolic `z` and compare.
    pub cross_check: bool,
}

impl<S: Scalar> Default for SolveOptions<S> {
    fn default() -> Self {
        SolveOptions {
            z: S::zero(),
            cross_check: true,
        }
    }
}

/// `H̃` and the checks it passed.
#[derive(Clone, Debug)]
pub struct HTildeSolution<S> {
    pub htilde: PolySeq<S>,
    /// Number of coordinates the caller asked to be exact.
    pub window: usize,
    /// Residual of `H̃F - qFH̃ = E + γH̃ + αH̃(E + ηF)H̃`.
    pub residual: ResidualReport,
    /// Residual of `H̃(E - FD) = 0`.
    pub initial: ResidualReport,
    /// Difference between the two constructions, when requested.
    pub series_check: Option<ResidualReport>,
}

/// Moment sequence `M̃ = ((E - FD) B(z)^{-1})|_{z:=x}` on `window` coordinates.
pub fn moment_sequence<S: Scalar>(params: &QHParams<S>, t: &S, window: usize) -> Result<PolySeq<S>> {
    let bz = build_b_symbolic(params, t, window);
    let binv = bz.invert_graded()?;
    let z = PolySeq::<S>::e_minus_fd(window).lift().mul(&binv)?;
    Ok(z.substitute_z())
}

fn ensure<S: Scalar>(report: &ResidualReport, what: &str) -> Result<()> {
    if report.passes::<S>(FLOAT_RESIDUAL_TOL) {
        Ok(())
    } else {
        Err(Error::ResidualNonzero {
            what: what.into(),
            max: report.max_abs,
        })
    }
}

/// `H̃F - qFH̃ - E - γH̃ - αH̃(E + ηF)H̃` against zero, on every valid coordinate.
pub fn reduced_residual<S: Scalar>(
    ht: &PolySeq<S>,
    params: &QHParams<S>,
    t: &S,
) -> Result<ResidualReport> {
    let l = ht.len();
    let d = params.derived(t);
    let f = PolySeq::f(l);
    let e = PolySeq::e(l);
    let e_eta_f = &e + &f.scale(&params.eta);
    let lhs = &ht.mul(&f)? - &f.mul(ht)?.scale(&params.q);
    let quad = PolySeq::product(&[ht, &e_eta_f, ht])?;
    let rhs = &(&e + &ht.scale(&d.gamma)) + &quad.scale(&d.alpha);
    let v = lhs.len().min(rhs.len());
    lhs.check_identity(&rhs, v)
}

/// Solve for `H̃` with default options (`z = 0`, cross-check on).
pub fn solve_htilde<S: Scalar>(params: &QHParams<S>, t: &S, window: usize) -> Result<HTildeSolution<S>> {
    solve_htilde_with(params, t, window, &SolveOptions::default())
}

pub fn solve_htilde_with<S: Scalar>(
    params: &QHParams<S>,
    t: &S,
    window: usize,
    opts: &SolveOptions<S>,
) -> Result<HTildeSolution<S>> {
    let l = window + WINDOW_MARGIN;
    let alg = params.algebra(t);
    let b = build_b(params, t, &opts.z, l);
    let binv = b.invert_graded()?;
    let dq = make_special(&Special::Dq, &alg, l);
    let w1 = make_special(&Special::W1, &alg, l);
    let w1inv = (&w1 - &PolySeq::e(l)).invert_neumann()?;
    let ht = PolySeq::product(&[&b, &dq, &w1inv, &binv])?;
    if ht.len() < window + 1 {
        return Err(Error::WindowExhausted {
            needed: window + 1,
            available: ht.len(),
        });
    }

    let residual = reduced_residual(&ht, params, t)?;
    ensure::<S>(&residual, "reduced q-commutation equation")?;
    if residual.window < window {
        return Err(Error::WindowExhausted {
            needed: window,
            available: residual.window,
        });
    }
    let initial = ht
        .mul(&PolySeq::e_minus_fd(l))?
        .check_identity(&PolySeq::zero(l), l)?;
    ensure::<S>(&initial, "initial condition of H̃")?;

    let series_check = if opts.cross_check {
        let m = moment_sequence(params, t, l)?;
        let hser = shift_series(&m)?;
        let v = hser.len().min(ht.len());
        let r = hser.check_identity(&ht, v)?;
        ensure::<S>(&r, "agreement of the two H̃ constructions")?;
        Some(r)
    } else {
        None
    };

    Ok(HTildeSolution {
        htilde: ht,
        window,
        residual,
        initial,
        series_check,
    })
}

/// `H = (E + ηF) H̃`.
pub fn assemble_h<S: Scalar>(ht: &PolySeq<S>, eta: &S) -> Result<PolySeq<S>> {
    let l = ht.len();
    let e_eta_f = &PolySeq::e(l + 1) + &PolySeq::f(l + 1).scale(eta);
    e_eta_f.mul(ht)
}

/// Solve for `H` on `window` exact coordinates (plus margin).
pub fn solve_h<S: Scalar>(params: &QHParams<S>, t: &S, window: usize) -> Result<PolySeq<S>> {
    let sol = solve_htilde(params, t, window)?;
    assemble_h(&sol.htilde, &params.eta)
}

/// Residuals of the full equation and of the initial condition.
#[derive(Clone, Debug)]
pub struct CommutationReport {
    pub equation: ResidualReport,
    pub initial: ResidualReport,
}

impl CommutationReport {
    pub fn passes<S: Scalar>(&self, tol: f64) -> bool {
        self.equation.passes::<S>(tol) && self.initial.passes::<S>(tol)
    }
}

/// Check `H T - q T H = E + θH + ηT + τH^2` with `T = F - tH`, and `H(E - FD) = 0`.
pub fn verify_qcommutation<S: Scalar>(h: &PolySeq<S>, params: &QHParams<S>, t: &S) -> Result<CommutationReport> {
    let l = h.len();
    let f = PolySeq::f(l);
    let tt = &f - &h.scale(t);
    let lhs = &h.mul(&tt)? - &tt.mul(h)?.scale(&params.q);
    let rhs = &(&(&PolySeq::e(l) + &h.scale(&params.theta)) + &tt.scale(&params.eta))
        + &h.mul(h)?.scale(&params.tau);
    let v = lhs.len().min(rhs.len());
    if v == 0 {
        return Err(Error::WindowExhausted {
            needed: 1,
            available: 0,
        });
    }
    let equation = lhs.check_identity(&rhs, v)?;
    let initial = h
        .mul(&PolySeq::e_minus_fd(l))?
        .check_identity(&PolySeq::zero(l), l)?;
    Ok(CommutationReport { equation, initial })
}

/// `A = sum_j F^j H D^{j+1}`.
pub fn generator_from_h<S: Scalar>(h: &PolySeq<S>) -> Result<PolySeq<S>> {
    shift_series(h)
}

/// The generator element on at least `window` coordinates.
pub fn generator_element<S: Scalar>(params: &QHParams<S>, t: &S, window: usize) -> Result<PolySeq<S>> {
    generator_from_h(&solve_h(params, t, window)?)
}

/// Same as [`generator_element`] without the symbolic cross-check, for
/// domains where the extra indeterminate is expensive.
pub fn generator_element_fast<S: Scalar>(params: &QHParams<S>, t: &S, window: usize) -> Result<PolySeq<S>> {
    let opts = SolveOptions {
        z: S::zero(),
        cross_check: false,
    };
    let sol = solve_htilde_with(params, t, window, &opts)?;
    generator_from_h(&assemble_h(&sol.htilde, &params.eta)?)
}

/// Closed form of `H` at `q = 1`, `τ = 0`:
/// `(E + ηF)(exp(c D_1) - E)/c` with `c = θ - tη`, as the series
/// `sum_{k>=1} c^{k-1}/k! D_1^k`.
pub fn quantum_bessel_h<S: Scalar>(params: &QHParams<S>, t: &S, window: usize) -> Result<PolySeq<S>> {
    if !params.q.is_one() || !params.tau.is_zero() {
        return Err(Error::Precondition("closed form needs q = 1 and τ = 0".into()));
    }
    let c = params.theta.clone() - t.clone() * params.eta.clone();
    let d1 = PolySeq::dq(&S::one(), window);
    let mut acc = PolySeq::zero(window);
    let mut power = PolySeq::e(window);
    let mut coef = S::one();
    for k in 1..window {
        power = power.mul(&d1)?;
        let kinv = S::from_i64(k as i64)
            .try_inv()
            .ok_or_else(|| Error::Precondition("series needs division by k".into()))?;
        coef = if k == 1 { kinv } else { coef * c.clone() * kinv };
        acc = &acc + &power.scale(&coef);
    }
    assemble_h(&acc, &params.eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, Rational};

    fn p(eta: Rational, theta: Rational, tau: Rational, q: Rational) -> QHParams<Rational> {
        QHParams::new(eta, theta, tau, q).unwrap()
    }

    #[test]
    fn b_first_coordinates() {
        let params = p(rat(1, 4), rat(1, 2), rat(1, 5), rat(1, 3));
        let t = rat(1, 1);
        let b = build_b_symbolic(&params, &t, 4);
        assert_eq!(b.coord(0).unwrap(), &Polynomial::one());
        let d = params.map(|c| c.clone()).derived(&t);
        let z = Polynomial::<Rational>::var();
        let c0 = &Polynomial::constant(d.gamma + d.beta) + &z.scale(&params.q);
        let b1 = Polynomial::new(vec![-c0, Polynomial::one()]);
        assert_eq!(b.coord(1).unwrap(), &b1);
    }

    #[test]
    fn b_intertwines_with_s() {
        let params = p(rat(1, 3), rat(-1, 2), rat(1, 4), rat(1, 2));
        let t = rat(3, 2);
        let l = 9;
        let b = build_b_symbolic(&params, &t, l);
        let alg = params.lift().algebra(&Polynomial::constant(t.clone()));
        let s = make_special(&Special::S(Polynomial::var()), &alg, l + 1);
        let f = PolySeq::f(l + 1);
        let lhs = f.mul(&b).unwrap();
        let rhs = PolySeq::product(&[&b, &s, &f]).unwrap();
        let v = lhs.len().min(rhs.len());
        assert!(v >= l - 1);
        assert!(lhs.check_identity(&rhs, v).unwrap().exact_zero);
        let init = b.mul(&PolySeq::e_minus_fd(l)).unwrap();
        assert!(init.check_identity(&PolySeq::e_minus_fd(l), l).unwrap().exact_zero);
    }

    #[test]
    fn z_independence() {
        let params = p(rat(1, 4), rat(1, 2), rat(1, 5), rat(1, 3));
        let t = rat(1, 1);
        let a = solve_htilde(&params, &t, 8).unwrap();
        let opts = SolveOptions {
            z: rat(1, 1),
            cross_check: false,
        };
        let b = solve_htilde_with(&params, &t, 8, &opts).unwrap();
        assert_eq!(a.htilde, b.htilde);
        assert!(a.series_check.unwrap().exact_zero);
    }

    #[test]
    fn zero_parameters_equation() {
        let q = rat(-1, 2);
        let params = p(rat(0, 1), rat(0, 1), rat(0, 1), q.clone());
        let t = rat(2, 3);
        let ht = solve_htilde(&params, &t, 8).unwrap().htilde;
        let l = ht.len();
        let f = PolySeq::f(l);
        let lhs = &ht.mul(&f).unwrap() - &f.mul(&ht).unwrap().scale(&q);
        let alpha = (rat(1, 1) - q) * t;
        let rhs = &PolySeq::e(l) + &ht.mul(&ht).unwrap().scale(&alpha);
        assert!(lhs.check_identity(&rhs, l - 1).unwrap().exact_zero);
    }

    #[test]
    fn wiener_and_perturbation() {
        let params = p(rat(0, 1), rat(0, 1), rat(0, 1), rat(1, 1));
        let t = rat(5, 2);
        let d1 = PolySeq::dq(&rat(1, 1), 10);
        let r = verify_qcommutation(&d1, &params, &t).unwrap();
        assert!(r.equation.exact_zero && r.initial.exact_zero);

        let params = p(rat(1, 4), rat(1, 2), rat(1, 5), rat(1, 3));
        let t = rat(1, 1);
        let h = solve_h(&params, &t, 8).unwrap();
        assert!(verify_qcommutation(&h, &params, &t).unwrap().passes::<Rational>(0.0));
        let mut coords = h.coords().to_vec();
        coords[3] = &coords[3] + &Polynomial::one();
        let bumped = PolySeq::from_coords(coords, h.bandwidth()).unwrap();
        let r = verify_qcommutation(&bumped, &params, &t).unwrap();
        assert!(!r.equation.exact_zero);
    }

    #[test]
    fn quantum_bessel() {
        let params = p(rat(1, 3), rat(2, 5), rat(0, 1), rat(1, 1));
        let t = rat(1, 2);
        let h = solve_h(&params, &t, 9).unwrap();
        let closed = quantum_bessel_h(&params, &t, 12).unwrap();
        let v = h.len().min(closed.len()).min(10);
        assert!(h.check_identity(&closed, v).unwrap().exact_zero);
        // θ = tη exercises the c = 0 limit, where H̃ = D_1.
        let params = p(rat(1, 2), rat(1, 4), rat(0, 1), rat(1, 1));
        let h = solve_h(&params, &t, 8).unwrap();
        let closed = quantum_bessel_h(&params, &t, 12).unwrap();
        assert!(h.check_identity(&closed, 9).unwrap().exact_zero);
    }

    #[test]
    fn generator_low_coordinates() {
        let params = p(rat(1, 4), rat(1, 2), rat(1, 5), rat(1, 3));
        let t = rat(1, 1);
        let a = generator_element(&params, &t, 8).unwrap();
        assert!(a.coord(0).unwrap().is_zero());
        assert!(a.coord(1).unwrap().is_zero());
        let one_eta_x = Polynomial::new(vec![rat(1, 1), params.eta.clone()]);
        assert_eq!(a.coord(2).unwrap(), &one_eta_x);
        let d = params.derived(&t);
        let c = d.gamma + d.beta;
        let lin = Polynomial::new(vec![c, params.q.clone() + rat(2, 1)]);
        assert_eq!(a.coord(3).unwrap(), &(&one_eta_x * &lin));
        for n in 1..a.len() {
            assert!(a.coord(n).unwrap().degree() <= n as i64 - 1);
        }
    }

    #[test]
    fn powers_match_repeated_products() {
        let l = 8;
        let f2 = PolySeq::<Rational>::f(l + 2).pow(2).unwrap();
        assert!(f_power::<Rational>(2, l).check_identity(&f2, f2.len().min(l)).unwrap().exact_zero);
        let d3 = PolySeq::<Rational>::d(l).pow(3).unwrap();
        assert!(d_power::<Rational>(3, l).check_identity(&d3, l).unwrap().exact_zero);
    }
}
