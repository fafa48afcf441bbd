//! Evaluation of `A_t f(x)` by several independent routes.
//!
//! For polynomial `f`:
//!
//! ```text
//! A_t f(x) = (1 + ηx) ∫ ∂_x ((f(y) - f(x))/(y - x)) ν_{x,t}(dy)
//! ```
//!
//! and for `C²` functions the integrand becomes `φ_x(y) = (g(y) - g(x) - g'(x)(y - x))/(y - x)²`
//! with value `g''(x)/2` at `y = x`.

use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::json::JsonScalar;
use crate::measures::classify::{classify_nu_with, NuOptions};
use crate::measures::jacobi::{favard_classify, jacobi_from_recurrence, moments_from_jacobi, FavardClass};
use crate::measures::measure::{OrthMeasure, DENSITY_NODES};
use crate::measures::quadrature::golub_welsch;
use crate::poly::Polynomial;
use crate::process::{fd_ladder, martingale_polys, FdLadder, FD_LADDER};
use crate::scalar::{RealScalar, Scalar};
use crate::solver::{generator_element, generator_element_fast, QHParams};
use crate::{Rational, ZPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    Algebraic,
    MomentFunctional,
    Quadrature,
    FiniteDifference,
    ClosedFormQm1,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorEvaluation<S> {
    pub value: S,
    pub method: Method,
    /// Zero for exact routes.
    pub error_estimate: f64,
    /// `params`, `t`, `x` and `f` as given.
    pub inputs: Value,
}

impl<S: JsonScalar> GeneratorEvaluation<S> {
    pub fn to_json(&self) -> Value {
        let mut v = self.inputs.clone();
        v["method"] = json!(self.method);
        v["value"] = self.value.to_json();
        v["error_estimate"] = json!(self.error_estimate);
        v
    }
}

pub fn inputs_json<S: JsonScalar>(params: &QHParams<S>, t: &S, x: &S, f: Value) -> Value {
    json!({
        "params": {
            "eta": params.eta.to_json(),
            "theta": params.theta.to_json(),
            "tau": params.tau.to_json(),
            "q": params.q.to_json(),
        },
        "t": t.to_json(),
        "x": x.to_json(),
        "f": f,
    })
}

fn exact<S>(value: S, method: Method, inputs: Value) -> GeneratorEvaluation<S> {
    GeneratorEvaluation {
        value,
        method,
        error_estimate: 0.0,
        inputs,
    }
}

/// `∂_x (f(y) - f(x))/(y - x)` as a polynomial in `y`; for `f = y^n` this is
/// `sum_{j=0}^{n-2} (n-1-j) x^{n-2-j} y^j`.
pub fn divided_difference_kernel<S: Scalar>(f: &Polynomial<S>, x: &S) -> Polynomial<S> {
    let c = f.coeffs();
    if c.len() < 3 {
        return Polynomial::zero();
    }
    let mut out = vec![S::zero(); c.len() - 2];
    for (n, cn) in c.iter().enumerate().skip(2) {
        if cn.is_zero() {
            continue;
        }
        // x^{n-2-j} for j = n-2 down to 0.
        let mut xp = S::one();
        for j in (0..=n - 2).rev() {
            let w = S::from_i64((n - 1 - j) as i64);
            out[j] = out[j].clone() + cn.clone() * w * xp.clone();
            xp = xp * x.clone();
        }
    }
    Polynomial::new(out)
}

fn one_eta_x<S: Scalar>(params: &QHParams<S>, x: &S) -> S {
    S::one() + params.eta.clone() * x.clone()
}

fn require_q_below_one<S: RealScalar>(params: &QHParams<S>) -> Result<()> {
    if params.q < S::one() {
        Ok(())
    } else {
        Err(Error::ParameterRange(
            "only the algebraic route is available at q = 1".into(),
        ))
    }
}

/// Size of the exact Jacobi matrix checked for admissibility.
pub const ADMISSIBILITY_WINDOW: usize = 64;

/// Moment-functional route: moments `(J^j)_{00}` of `ν_{x,t}` against the
/// kernel, exact in exact domains. At an absorbing state `1 + ηx = 0` the
/// value is zero.
pub fn apply_generator_poly<S: RealScalar + JsonScalar>(
    params: &QHParams<S>,
    t: &S,
    x: &S,
    f: &Polynomial<S>,
) -> Result<GeneratorEvaluation<S>> {
    require_q_below_one(params)?;
    let inputs = inputs_json(params, t, x, f.to_json());
    let lead = one_eta_x(params, x);
    if lead.is_zero() {
        return Ok(exact(S::zero(), Method::MomentFunctional, inputs));
    }
    let kernel = divided_difference_kernel(f, x);
    let k = kernel.degree().max(0) as usize;
    let j = jacobi_from_recurrence(params, t, x, (k + 1).max(ADMISSIBILITY_WINDOW));
    let report = favard_classify(&j, params);
    if let FavardClass::Invalid { .. } = report.class {
        return Err(Error::Inadmissible(report.violation().unwrap_or_default()));
    }
    let m = moments_from_jacobi(&j, k)?;
    let integral = kernel
        .coeffs()
        .iter()
        .zip(&m)
        .fold(S::zero(), |acc, (c, mk)| acc + c.clone() * mk.clone());
    Ok(exact(lead * integral, Method::MomentFunctional, inputs))
}

/// Algebraic route: `sum_n f_n A_n(x)` with `A_n` the coordinates of the
/// generator element. Defined for every `x` and for `q = 1`.
pub fn apply_generator_algebraic<S: RealScalar + JsonScalar>(
    params: &QHParams<S>,
    t: &S,
    x: &S,
    f: &Polynomial<S>,
) -> Result<GeneratorEvaluation<S>> {
    let inputs = inputs_json(params, t, x, f.to_json());
    let n = f.coeffs().len();
    let a = generator_element(params, t, n.max(4))?;
    let mut value = S::zero();
    for (k, c) in f.coeffs().iter().enumerate() {
        let coord = a.coord(k).ok_or(Error::WindowExhausted {
            needed: k + 1,
            available: a.len(),
        })?;
        value = value + c.clone() * coord.eval(x);
    }
    Ok(exact(value, Method::Algebraic, inputs))
}

/// Quadrature route: the kernel integrated against the classified `ν_{x,t}`.
pub fn apply_generator_quadrature(
    params: &QHParams<f64>,
    t: f64,
    x: f64,
    f: &Polynomial<f64>,
    opts: &NuOptions,
) -> Result<GeneratorEvaluation<f64>> {
    require_q_below_one(params)?;
    let inputs = inputs_json(params, &t, &x, f.to_json());
    let lead = one_eta_x(params, &x);
    if lead == 0.0 {
        return Ok(exact(0.0, Method::Quadrature, inputs));
    }
    let kernel = divided_difference_kernel(f, &x);
    let m = classify_nu_with(params, &t, &x, opts)?;
    let value = lead * m.integrate(|y| kernel.eval(&y));
    let scale = lead.abs() * m.integrate(|y| kernel.map(|c| c.abs()).eval(&y.abs()));
    Ok(GeneratorEvaluation {
        value,
        method: Method::Quadrature,
        error_estimate: scale * (1e3 * f64::EPSILON + m.truncation_error),
        inputs,
    })
}

/// Finite-difference route: the extrapolated ladder on `h = 2^-k`.
pub fn apply_generator_fd<S: RealScalar + JsonScalar>(
    params: &QHParams<S>,
    t: &S,
    x: &S,
    f: &Polynomial<S>,
) -> Result<(GeneratorEvaluation<f64>, FdLadder)> {
    let ladder = fd_ladder(params, t, x, f, FD_LADDER, None)?;
    let last = ladder.steps.last().expect("ladder is nonempty").value;
    let eval = GeneratorEvaluation {
        value: ladder.extrapolated,
        method: Method::FiniteDifference,
        error_estimate: (ladder.extrapolated - last).abs(),
        inputs: inputs_json(params, t, x, f.to_json()),
    };
    Ok((eval, ladder))
}

/// Points within this distance of `x`, relative to the scale, count as `x`.
pub const COLLISION_TOL: f64 = 1e-12;

/// A `C²` test function with optional derivatives.
pub struct C2Function<'a> {
    pub g: &'a dyn Fn(f64) -> f64,
    pub g_second: &'a dyn Fn(f64) -> f64,
    /// Central difference of `g` when absent.
    pub g_prime: Option<&'a dyn Fn(f64) -> f64>,
    /// Echoed in the result.
    pub label: String,
}

fn scale_of(m: &OrthMeasure, x: f64) -> f64 {
    let width = m.support().map_or(0.0, |(a, b)| (b - a).abs());
    x.abs().max(width).max(1.0)
}

fn derivative(g: &C2Function, x: f64, scale: f64) -> f64 {
    match g.g_prime {
        Some(d) => d(x),
        None => {
            let h = 1e-6 * scale;
            ((g.g)(x + h) - (g.g)(x - h)) / (2.0 * h)
        }
    }
}

/// `∫ φ_x dν` over atoms and the continuous rule, with the atom at `x`
/// contributing `g''(x)/2` times its mass.
fn c2_integral(m: &OrthMeasure, g: &C2Function, x: f64, gp: f64, scale: f64, density_nodes: usize) -> Result<f64> {
    let tol = COLLISION_TOL * scale;
    let gx = (g.g)(x);
    let phi = |y: f64| {
        let d = y - x;
        ((g.g)(y) - gx - gp * d) / (d * d)
    };
    let mut acc = 0.0;
    for a in m.target_atoms() {
        if (a.at - x).abs() <= tol {
            if m.quadrature.is_some() {
                return Err(Error::NodeCollision(x));
            }
            acc += a.mass * (g.g_second)(x) / 2.0;
        } else {
            acc += a.mass * phi(a.at);
        }
    }
    for (y, w) in m.continuous_rule(density_nodes) {
        if (y - x).abs() <= tol {
            return Err(Error::NodeCollision(x));
        }
        acc += w * phi(y);
    }
    Ok(acc)
}

/// `A_t g(x) = (1+ηx)/2 g''(x) ν({x}) + (1+ηx) ∫_{y != x} φ_x(y) ν(dy)`.
/// A rule node falling on `x` triggers one retry with a different order.
pub fn apply_generator_c2(
    params: &QHParams<f64>,
    t: f64,
    x: f64,
    g: &C2Function,
    opts: &NuOptions,
) -> Result<GeneratorEvaluation<f64>> {
    require_q_below_one(params)?;
    let inputs = inputs_json(params, &t, &x, json!(g.label));
    let lead = one_eta_x(params, &x);
    if lead == 0.0 {
        return Ok(exact(0.0, Method::Quadrature, inputs));
    }
    let mut m = classify_nu_with(params, &t, &x, opts)?;
    let scale = scale_of(&m, x);
    let gp = derivative(g, x, scale);
    let integral = match c2_integral(&m, g, x, gp, scale, DENSITY_NODES) {
        Err(Error::NodeCollision(_)) => {
            if let Some(rule) = &m.quadrature {
                let j = jacobi_from_recurrence(params, &t, &x, rule.order + 2);
                m.quadrature = Some(golub_welsch(&j, rule.order + 1)?);
            }
            c2_integral(&m, g, x, gp, scale, DENSITY_NODES + 1)?
        }
        other => other?,
    };
    let fd_err = if g.g_prime.is_some() { 0.0 } else { 1e-8 };
    Ok(GeneratorEvaluation {
        value: lead * integral,
        method: Method::Quadrature,
        error_estimate: lead.abs() * (fd_err + m.truncation_error + 1e3 * f64::EPSILON) * scale,
        inputs,
    })
}

/// Closed form at `q = -1`, where `ν_{x,t}` is the point mass at
/// `c - x`, `c = θ + η(t + τ)`: `(1+ηx)/2 g''(x)` when `c = 2x`, else
/// `(1+ηx)/(c - 2x) ((g(c - x) - g(x))/(c - 2x) - g'(x))`.
pub fn generator_q_minus_one(params: &QHParams<f64>, t: f64, x: f64, g: &C2Function) -> Result<GeneratorEvaluation<f64>> {
    if params.q != -1.0 {
        return Err(Error::Precondition("closed form needs q = -1".into()));
    }
    let inputs = inputs_json(params, &t, &x, json!(g.label));
    let lead = one_eta_x(params, &x);
    let c = params.theta + params.eta * (t + params.tau);
    let d = c - 2.0 * x;
    let value = if d == 0.0 {
        lead / 2.0 * (g.g_second)(x)
    } else {
        let gp = derivative(g, x, x.abs().max(d.abs()).max(1.0));
        lead / d * (((g.g)(c - x) - (g.g)(x)) / d - gp)
    };
    Ok(GeneratorEvaluation {
        value,
        method: Method::ClosedFormQm1,
        error_estimate: if g.g_prime.is_some() || d == 0.0 { 0.0 } else { 1e-8 },
        inputs,
    })
}

/// `A_t P_n + ∂_t P_n` for one martingale polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct MartingaleResidual {
    pub n: usize,
    /// Polynomial in `x` whose coefficients are polynomials in `t`.
    pub residual: Polynomial<ZPoly>,
}

impl MartingaleResidual {
    pub fn is_zero(&self) -> bool {
        self.residual.coeffs().iter().all(|c| c.coeffs().iter().all(|r| r.is_zero()))
    }
}

/// Residuals of `A_t P_n = -∂_t P_n` for `n = 0..=n_max`, identically in `x`
/// and in `t`.
pub fn martingale_poly_check(params: &QHParams<Rational>, n_max: usize) -> Result<Vec<MartingaleResidual>> {
    let sym = params.lift();
    let t = ZPoly::var();
    let polys = martingale_polys(&sym, &t, n_max);
    let a = generator_element_fast(&sym, &t, (n_max + 1).max(4))?;
    polys
        .iter()
        .enumerate()
        .map(|(n, p)| {
            let mut acc: Polynomial<ZPoly> = p.map(|c| c.derivative());
            for (k, c) in p.coeffs().iter().enumerate() {
                let coord = a.coord(k).ok_or(Error::WindowExhausted {
                    needed: k + 1,
                    available: a.len(),
                })?;
                acc = &acc + &coord.scale(c);
            }
            Ok(MartingaleResidual { n, residual: acc })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn qh(eta: (i64, i64), theta: (i64, i64), tau: (i64, i64), q: (i64, i64)) -> QHParams<Rational> {
        QHParams::new(rat(eta.0, eta.1), rat(theta.0, theta.1), rat(tau.0, tau.1), rat(q.0, q.1)).unwrap()
    }

    fn mono(n: usize) -> Polynomial<Rational> {
        Polynomial::monomial(rat(1, 1), n)
    }

    #[test]
    fn kernel_examples() {
        let x = rat(3, 1);
        assert!(divided_difference_kernel(&mono(1), &x).is_zero());
        assert_eq!(divided_difference_kernel(&mono(2), &x), Polynomial::constant(rat(1, 1)));
        assert_eq!(divided_difference_kernel(&mono(3), &x), Polynomial::new(vec![rat(6, 1), rat(1, 1)]));
    }

    #[test]
    fn routes_agree_on_monomials() {
        let p = qh((1, 4), (1, 2), (1, 5), (1, 3));
        let (t, x) = (rat(1, 1), rat(3, 10));
        for n in 0..=10 {
            let a = apply_generator_algebraic(&p, &t, &x, &mono(n)).unwrap();
            let b = apply_generator_poly(&p, &t, &x, &mono(n)).unwrap();
            assert_eq!(a.value, b.value, "n = {n}");
        }
        let d = p.derived(&t);
        let y3 = apply_generator_poly(&p, &t, &x, &mono(3)).unwrap().value;
        let expect = (rat(1, 1) + p.eta.clone() * x.clone())
            * (rat(2, 1) * x.clone() + p.q.clone() * x.clone() + d.gamma + d.beta);
        assert_eq!(y3, expect);
    }

    #[test]
    fn absorbing_state() {
        let p = qh((1, 2), (1, 3), (1, 5), (1, 2));
        let (t, x) = (rat(1, 1), rat(-2, 1));
        for n in 0..6 {
            assert!(apply_generator_algebraic(&p, &t, &x, &mono(n)).unwrap().value.is_zero());
            assert!(apply_generator_poly(&p, &t, &x, &mono(n)).unwrap().value.is_zero());
        }
    }

    #[test]
    fn c2_quadratic_matches_poly() {
        let p = qh((1, 4), (1, 2), (1, 5), (1, 3));
        let pf = p.to_f64();
        let g = C2Function {
            g: &|y| 2.0 * y * y - y + 3.0,
            g_second: &|_| 4.0,
            g_prime: None,
            label: "2y²-y+3".into(),
        };
        let v = apply_generator_c2(&pf, 1.0, 0.3, &g, &NuOptions::default()).unwrap();
        assert!((v.value - 2.0 * (1.0 + 0.25 * 0.3)).abs() < 1e-8);
    }

    #[test]
    fn q_minus_one_branches() {
        let pf = QHParams::new(0.25, 0.5, 0.2, -1.0).unwrap();
        let g = C2Function {
            g: &|y: f64| y.sin(),
            g_second: &|y: f64| -y.sin(),
            g_prime: Some(&|y: f64| y.cos()),
            label: "sin".into(),
        };
        let c = 0.5 + 0.25 * 1.2;
        let opts = NuOptions::default();
        for x in [c / 2.0, 0.1] {
            let a = generator_q_minus_one(&pf, 1.0, x, &g).unwrap();
            let b = apply_generator_c2(&pf, 1.0, x, &g, &opts).unwrap();
            assert!((a.value - b.value).abs() <= 4.0 * f64::EPSILON * a.value.abs().max(1.0));
        }
    }

    #[test]
    fn martingale_low_degree() {
        let p = qh((1, 3), (1, 4), (1, 6), (1, 2));
        for r in martingale_poly_check(&p, 4).unwrap() {
            assert!(r.is_zero(), "n = {}", r.n);
        }
    }
}
