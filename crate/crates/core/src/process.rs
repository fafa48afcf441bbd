//! Transition probabilities of `QH(η, θ; 0, τ; q)` and of bi-Poisson
//! processes, martingale polynomials, and the finite-difference generator.
//!
//! `Q_{s,t}(x, dy)` is the orthogonality measure of the polynomials `Q_n(y; x, t, s)`
//! with recurrence `y Q_n = Q_{n+1} + A_n Q_n + B_n Q_{n-1}`.

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::askey::{al_salam_carlitz_jacobi, al_salam_carlitz_measure, askey_wilson_jacobi, askey_wilson_measure_tol};
use crate::measures::classify::{check_support_interval, recurrence_matches, truncated_measure, NuOptions, MATCH_ENTRIES};
use crate::measures::jacobi::{classify_signs, favard_classify, moments_from_jacobi, FavardClass, JacobiMatrix};
use crate::measures::measure::{Affine, Atom, Family, OrthMeasure};
use crate::measures::quadrature::golub_welsch;
use crate::poly::Polynomial;
use crate::scalar::{pow, qint, RealScalar, Scalar};
use crate::solver::QHParams;

fn q_minus_one_power<S: Scalar>(q: &S, n: usize) -> S {
    if n == 0 {
        S::zero()
    } else {
        pow(q, n as u32 - 1)
    }
}

/// `(A_n, B_n)` of the bi-Poisson process `QH(η, θ; 0, 0; q)`.
pub fn bipoisson_coefficients<S: Scalar>(eta: &S, theta: &S, q: &S, x: &S, t: &S, s: &S, n: usize) -> (S, S) {
    let zero = S::zero();
    let params = QHParams::new_unchecked(eta.clone(), theta.clone(), zero, q.clone());
    qh_transition_coefficients(&params, x, t, s, n)
}

/// `(Ã_n, B̃_n)` of `QH(η, θ; 0, τ; q)`.
pub fn qh_transition_coefficients<S: Scalar>(params: &QHParams<S>, x: &S, t: &S, s: &S, n: usize) -> (S, S) {
    let (eta, theta, tau, q) = (&params.eta, &params.theta, &params.tau, &params.q);
    let bn = qint(q, n);
    if n == 0 {
        return (x.clone(), S::zero());
    }
    let b1 = qint(q, n - 1);
    let qp = q_minus_one_power(q, n);
    let diag = pow(q, n as u32) * x.clone()
        + bn.clone()
            * (eta.clone() * t.clone() + theta.clone() + eta.clone() * tau.clone() * (bn.clone() + b1.clone())
                - (S::one() + q.clone()) * qp.clone() * s.clone() * eta.clone());
    let sub = bn
        * (t.clone() - s.clone() * qp.clone() + tau.clone() * b1.clone())
        * (S::one()
            + eta.clone() * x.clone() * qp.clone()
            + eta.clone()
                * b1.clone()
                * (theta.clone() + eta.clone() * tau.clone() * b1 - s.clone() * eta.clone() * qp));
    (diag, sub)
}

/// Unchecked Jacobi matrix of size `n` for the bi-Poisson `Q_n(·; x, t, s)`.
pub fn bipoisson_jacobi_raw<S: Scalar>(eta: &S, theta: &S, q: &S, x: &S, t: &S, s: &S, n: usize) -> JacobiMatrix<S> {
    let (diag, sub) = (0..n).map(|k| bipoisson_coefficients(eta, theta, q, x, t, s, k)).unzip();
    JacobiMatrix::new(diag, sub)
}

/// Unchecked Jacobi matrix of size `n` for `Q̃_n(·; x, t, s)`.
pub fn qh_transition_jacobi_raw<S: Scalar>(params: &QHParams<S>, x: &S, t: &S, s: &S, n: usize) -> JacobiMatrix<S> {
    let (diag, sub) = (0..n).map(|k| qh_transition_coefficients(params, x, t, s, k)).unzip();
    JacobiMatrix::new(diag, sub)
}

fn check_times<S: RealScalar>(s: &S, t: &S) -> Result<()> {
    if s.is_negative() || !(s < t) {
        return Err(Error::Precondition(format!(
            "transition times need 0 <= s < t, got s = {}, t = {}",
            s.to_f64(),
            t.to_f64()
        )));
    }
    Ok(())
}

/// Bi-Poisson recurrence under `1 + ηθ >= max(q, 0)`.
pub fn bipoisson_polys<S: RealScalar>(eta: &S, theta: &S, q: &S, x: &S, t: &S, s: &S, n: usize) -> Result<JacobiMatrix<S>> {
    check_times(s, t)?;
    let lhs = S::one() + eta.clone() * theta.clone();
    let floor = if q.is_negative() { S::zero() } else { q.clone() };
    if lhs < floor {
        return Err(Error::Inadmissible(format!(
            "bi-Poisson process needs 1 + ηθ >= max(q, 0), got 1 + ηθ = {}",
            lhs.to_f64()
        )));
    }
    if !(q.to_f64() >= -1.0 && q.to_f64() <= 1.0) {
        return Err(Error::ParameterRange("q must lie in [-1, 1]".into()));
    }
    Ok(bipoisson_jacobi_raw(eta, theta, q, x, t, s, n))
}

/// Recurrence of `Q̃_n(·; x, t, s)` with the existence checks: the Favard
/// signs and the first and limiting factors of `B̃_n`.
pub fn qh_transition_polys<S: RealScalar>(params: &QHParams<S>, x: &S, t: &S, s: &S, n: usize) -> Result<JacobiMatrix<S>> {
    check_times(s, t)?;
    if params.q.to_f64() < -1.0 {
        return Err(Error::ParameterRange("q must lie in [-1, 1]".into()));
    }
    let j = qh_transition_jacobi_raw(params, x, t, s, n);
    let report = favard_classify(&j, params);
    if let Some(why) = report.violation() {
        return Err(Error::Inadmissible(why));
    }
    Ok(j)
}

/// Martingale polynomials `P_0..P_n` of `QH(η, θ; 0, τ; q)`, i.e.
/// `Q̃_k(y; 0, t, 0)`. With `S = Polynomial<Rational>` and `t` the variable
/// they are symbolic in `t`.
pub fn martingale_polys<S: Scalar>(params: &QHParams<S>, t: &S, n: usize) -> Vec<Polynomial<S>> {
    let zero = S::zero();
    qh_transition_jacobi_raw(params, &zero, t, &zero, n + 1).polynomials(n)
}

/// Transition from state `x` at time `s` to time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionSpec<S> {
    pub params: QHParams<S>,
    pub s: S,
    pub t: S,
    pub x: S,
}

impl<S: RealScalar> TransitionSpec<S> {
    pub fn new(params: QHParams<S>, s: S, t: S, x: S) -> Result<Self> {
        check_times(&s, &t)?;
        Ok(TransitionSpec { params, s, t, x })
    }

    pub fn jacobi(&self, n: usize) -> Result<JacobiMatrix<S>> {
        qh_transition_polys(&self.params, &self.x, &self.t, &self.s, n)
    }

    /// Parameters `(θ̃, s', t')` of the bi-Poisson process with the same
    /// transition, `s' = α_s/(1-q)`, `t' = α_t/(1-q)`.
    pub fn bipoisson_equivalent(&self) -> Option<(S, S, S)> {
        let tt = self.params.theta_tilde()?;
        let inv = (S::one() - self.params.q.clone()).try_inv()?;
        let alpha = |u: &S| self.params.derived(u).alpha * inv.clone();
        Some((tt, alpha(&self.s), alpha(&self.t)))
    }

    /// Whether `x` lies in the support of `X_s`, with slack `1e-9`. `None`
    /// outside the regime `1 - q + ηθ̃ > 0`, `|q| < 1`.
    pub fn x_in_support(&self) -> Option<bool> {
        let p = self.params.to_f64();
        let info = check_support_interval(&p, self.s.to_f64()).ok()?;
        Some(info.contains(self.x.to_f64(), SUPPORT_SLACK))
    }
}

pub const SUPPORT_SLACK: f64 = 1e-9;

/// Askey-Wilson parameters `(a, b, c, 0)` and affine map for the bi-Poisson
/// transition, from matching the recurrence as polynomials in `q^n`. Needs
/// `0 < |q| < 1`, `t > 0` and `1 + ηθ/(1-q) > 0`.
pub fn bipoisson_aw_parameters(eta: f64, theta: f64, q: f64, x: f64, t: f64, s: f64) -> Option<([Complex64; 4], Affine)> {
    if !(q != 0.0 && q.abs() < 1.0 && t > 0.0) {
        return None;
    }
    let k = 1.0 + eta * theta / (1.0 - q);
    if !(k > 0.0) {
        return None;
    }
    let u = ((1.0 - q) / (4.0 * t * k)).sqrt();
    let c0 = (eta * t + theta) / (1.0 - q);
    let c1 = x - c0 - eta * s * (1.0 + q) / (q * (1.0 - q));
    let e1 = (eta * x - (eta * theta + eta * eta * s) / (1.0 - q)) / k;
    let s3 = -2.0 * u * eta * s / (1.0 - q);
    let s2 = s / t - e1;
    let s1 = 2.0 * u * c1 - s3 / q;
    // Companion matrix of z^3 - s1 z^2 + s2 z - s3.
    let m = Matrix3::new(s1, -s2, s3, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
    let roots = m.complex_eigenvalues();
    let mut p = [Complex64::new(0.0, 0.0); 4];
    for (slot, r) in p.iter_mut().zip(roots.iter()) {
        *slot = Complex64::new(r.re, r.im);
    }
    Some((p, Affine { u, w: -u * c0 }))
}

/// `Q_{0,t}(0, ·)` at the boundary `1 + ηθ = q > 0`: Al-Salam-Carlitz I with
/// `a = -tη²/(1-q)`, mapped by `(Y - 1 - a)/η`.
fn asc_boundary(eta: f64, q: f64, t: f64, tol: f64) -> Result<(OrthMeasure, JacobiMatrix<f64>, Affine)> {
    let a = -t * eta * eta / (1.0 - q);
    let map = Affine { u: eta, w: 1.0 + a };
    let m = al_salam_carlitz_measure(a, q, tol)?.mapped(map);
    Ok((m, al_salam_carlitz_jacobi(a, q, MATCH_ENTRIES), map))
}

/// Closed-form `Q_{0,t}(0, ·)` in the two boundary regimes of the bi-Poisson
/// process: Al-Salam-Carlitz I when `1 + ηθ = q > 0`, two atoms
/// `x_{1,2} = (ηt + θ ± √((ηt+θ)² + 4t))/2` when `1 + ηθ = 0 >= q`.
pub fn bipoisson_boundary_measure<S: RealScalar>(eta: &S, theta: &S, q: &S, t: &S, tol: f64) -> Result<OrthMeasure> {
    let lhs = S::one() + eta.clone() * theta.clone();
    let (ef, thf, qf, tf) = (eta.to_f64(), theta.to_f64(), q.to_f64(), t.to_f64());
    if !(tf > 0.0) {
        return Err(Error::Precondition("boundary measures need t > 0".into()));
    }
    if lhs == *q && qf > 0.0 && qf < 1.0 {
        return Ok(asc_boundary(ef, qf, tf, tol)?.0);
    }
    if lhs.is_zero() && !(qf > 0.0) {
        let m = ef * tf + thf;
        let r = (m * m + 4.0 * tf).sqrt();
        let (x1, x2) = ((m - r) / 2.0, (m + r) / 2.0);
        let atoms = vec![
            Atom { at: x1, mass: x2 / (x2 - x1) },
            Atom { at: x2, mass: x1 / (x1 - x2) },
        ];
        return Ok(OrthMeasure::atomic(Family::FiniteAtomic, atoms));
    }
    Err(Error::Precondition(
        "boundary measures need 1 + ηθ = q > 0 or 1 + ηθ = 0 >= q".into(),
    ))
}

/// Measure of a bi-Poisson recurrence known to be positive: the closed form
/// when one is verified against `j`, else the Gauss rule.
fn bipoisson_measure_f64(
    eta: f64,
    theta: f64,
    q: f64,
    x: f64,
    t: f64,
    s: f64,
    j: &JacobiMatrix<f64>,
    opts: &NuOptions,
) -> Result<OrthMeasure> {
    if s == 0.0 && x == 0.0 && q > 0.0 && q < 1.0 && ((1.0 + eta * theta) - q).abs() <= 1e-14 {
        if let Ok((m, reference, map)) = asc_boundary(eta, q, t, opts.tol) {
            if recurrence_matches(&reference, map, j, MATCH_ENTRIES) {
                return Ok(m);
            }
        }
    }
    if let Some((p, map)) = bipoisson_aw_parameters(eta, theta, q, x, t, s) {
        if let Ok(reference) = askey_wilson_jacobi(&p, q, MATCH_ENTRIES) {
            if recurrence_matches(&reference, map, j, MATCH_ENTRIES) {
                if let Ok(m) = askey_wilson_measure_tol(p[0], p[1], p[2], p[3], q, opts.tol) {
                    return Ok(m.mapped(map));
                }
            }
        }
    }
    Ok(OrthMeasure::from_quadrature(golub_welsch(j, opts.order.min(j.size()))?))
}

fn measure_from_exact<S: RealScalar>(
    j: &JacobiMatrix<S>,
    closed: impl FnOnce(&JacobiMatrix<f64>) -> Result<OrthMeasure>,
) -> Result<OrthMeasure> {
    let jf = j.to_f64();
    match classify_signs(j) {
        FavardClass::Invalid { at } => Err(Error::Inadmissible(format!(
            "recurrence coefficient sub[{at}] is negative"
        ))),
        FavardClass::TruncatedAt(n0) => truncated_measure(&jf, n0),
        FavardClass::AllPositive => closed(&jf),
    }
}

/// `Q̃_{s,t}(x, ·)`. Finite when a `B̃_n` vanishes (for instance at an
/// absorbing state or when `q = -1`), Askey-Wilson through the bi-Poisson
/// time change when verified, else the Gauss rule of the recurrence.
pub fn transition_measure<S: RealScalar>(spec: &TransitionSpec<S>, opts: &NuOptions) -> Result<OrthMeasure> {
    let j = spec.jacobi(opts.jacobi_size.max(2))?;
    let eta = spec.params.eta.to_f64();
    let q = spec.params.q.to_f64();
    let x = spec.x.to_f64();
    let equivalent = spec.bipoisson_equivalent();
    measure_from_exact(&j, |jf| match equivalent {
        Some((tt, s1, t1)) => bipoisson_measure_f64(eta, tt.to_f64(), q, x, t1.to_f64(), s1.to_f64(), jf, opts),
        None => Ok(OrthMeasure::from_quadrature(golub_welsch(jf, opts.order.min(jf.size()))?)),
    })
}

/// Bi-Poisson process, time and state at which `Q_{s',t'}(x', ·) = ν_{x,t}`:
/// `θ̃`, `s' = q²α_t/(1-q)`, `t' = α_t/(1-q)`, `x' = qx + γ_t + β_t`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiPoissonShift<S> {
    pub eta: S,
    pub theta: S,
    pub q: S,
    pub s: S,
    pub t: S,
    pub x: S,
}

impl<S: RealScalar> BiPoissonShift<S> {
    /// Requires `|q| < 1` and `1 + ηθ̃ >= max(0, q)`.
    pub fn new(params: &QHParams<S>, t: &S, x: &S) -> Result<Self> {
        let q = params.q.clone();
        if !(q.to_f64().abs() < 1.0) {
            return Err(Error::ParameterRange("the bi-Poisson shift needs |q| < 1".into()));
        }
        let tt = params.theta_tilde().expect("q != 1");
        let lhs = S::one() + params.eta.clone() * tt.clone();
        let floor = if q.is_negative() { S::zero() } else { q.clone() };
        if lhs < floor {
            return Err(Error::Inadmissible(format!(
                "1 + ηθ̃ >= max(0, q) fails: 1 + ηθ̃ = {}",
                lhs.to_f64()
            )));
        }
        let d = params.derived(t);
        let inv = (S::one() - q.clone()).try_inv().expect("q != 1");
        let t1 = d.alpha.clone() * inv;
        Ok(BiPoissonShift {
            eta: params.eta.clone(),
            theta: tt,
            s: q.clone() * q.clone() * t1.clone(),
            t: t1,
            x: q * x.clone() + d.gamma + d.beta,
            q: params.q.clone(),
        })
    }

    pub fn jacobi(&self, n: usize) -> JacobiMatrix<S> {
        bipoisson_jacobi_raw(&self.eta, &self.theta, &self.q, &self.x, &self.t, &self.s, n)
    }
}

/// `ν_{x,t}` as a bi-Poisson transition measure.
pub fn nu_via_bipoisson<S: RealScalar>(params: &QHParams<S>, t: &S, x: &S, opts: &NuOptions) -> Result<OrthMeasure> {
    let b = BiPoissonShift::new(params, t, x)?;
    let j = b.jacobi(opts.jacobi_size.max(2));
    let f = |v: &S| v.to_f64();
    measure_from_exact(&j, |jf| {
        bipoisson_measure_f64(f(&b.eta), f(&b.theta), f(&b.q), f(&b.x), f(&b.t), f(&b.s), jf, opts)
    })
}

/// `(∫ f(y) P_{t,t+h}(x, dy) - f(x)) / h` from the exact moments of the
/// transition recurrence.
pub fn finite_diff_generator<S: RealScalar>(params: &QHParams<S>, t: &S, x: &S, f: &Polynomial<S>, h: &S) -> Result<S> {
    if !(h.to_f64() > 0.0) {
        return Err(Error::Precondition("step h must be positive".into()));
    }
    let deg = f.degree().max(0) as usize;
    let spec = TransitionSpec::new(params.clone(), t.clone(), t.clone() + h.clone(), x.clone())?;
    let m = moments_from_jacobi(&spec.jacobi(deg + 2)?, deg)?;
    let integral = f
        .coeffs()
        .iter()
        .zip(&m)
        .fold(S::zero(), |acc, (c, mk)| acc + c.clone() * mk.clone());
    Ok((integral - f.eval(x)) * h.try_inv().expect("h > 0"))
}

/// Difference quotient with the transition measure integrated numerically.
pub fn finite_diff_generator_quadrature(
    params: &QHParams<f64>,
    t: f64,
    x: f64,
    f: impl Fn(f64) -> f64,
    h: f64,
    opts: &NuOptions,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Precondition("step h must be positive".into()));
    }
    let m = transition_measure(&TransitionSpec::new(params.clone(), t, t + h, x)?, opts)?;
    Ok((m.integrate(&f) - f(x)) / h)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FdStep {
    pub k: u32,
    pub h: f64,
    pub value: f64,
    /// Distance to the reference value, when one is given.
    pub error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FdLadder {
    pub steps: Vec<FdStep>,
    /// Intercept of the least-squares line `value ≈ a + b h`.
    pub extrapolated: f64,
    /// Least-squares slope of `log error` against `log h`; successive
    /// differences stand in for the error without a reference. Absent when
    /// fewer than two nonzero errors remain.
    pub observed_order: Option<f64>,
}

/// Default ladder exponents, `h = 2^-k`.
pub const FD_LADDER: std::ops::RangeInclusive<u32> = 4..=12;

fn least_squares(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((my - slope * mx, slope))
}

/// Finite-difference values on `h = 2^-k`, `k` in `ks`. Errors against
/// `reference` are formed in the scalar domain before conversion.
pub fn fd_ladder<S: RealScalar>(
    params: &QHParams<S>,
    t: &S,
    x: &S,
    f: &Polynomial<S>,
    ks: std::ops::RangeInclusive<u32>,
    reference: Option<&S>,
) -> Result<FdLadder> {
    let mut steps = Vec::new();
    let mut exact = Vec::new();
    for k in ks {
        let h = S::from_i64(1i64 << k).try_inv().expect("powers of two are invertible");
        let v = finite_diff_generator(params, t, x, f, &h)?;
        let error = reference.map(|r| {
            let d = v.clone() - r.clone();
            if d.is_negative() { -d } else { d }.to_f64()
        });
        steps.push(FdStep {
            k,
            h: h.to_f64(),
            value: v.to_f64(),
            error,
        });
        exact.push(v);
    }
    let hs: Vec<f64> = steps.iter().map(|s| s.h).collect();
    let vs: Vec<f64> = steps.iter().map(|s| s.value).collect();
    let extrapolated = least_squares(&hs, &vs).map_or(vs[vs.len() - 1], |(a, _)| a);
    let pairs: Vec<(f64, f64)> = if reference.is_some() {
        steps.iter().filter_map(|s| s.error.map(|e| (s.h, e))).collect()
    } else {
        exact
            .windows(2)
            .zip(&steps)
            .map(|(w, s)| {
                let d = w[0].clone() - w[1].clone();
                (s.h, if d.is_negative() { -d } else { d }.to_f64())
            })
            .collect()
    };
    let (lx, ly): (Vec<f64>, Vec<f64>) = pairs
        .into_iter()
        .filter(|&(_, e)| e > 0.0)
        .map(|(h, e)| (h.ln(), e.ln()))
        .unzip();
    Ok(FdLadder {
        steps,
        extrapolated,
        observed_order: least_squares(&lx, &ly).map(|(_, b)| b),
    })
}
