//! Identification of `ν_{x,t}` with a closed-form measure.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measures::askey::{
    askey_wilson_jacobi, askey_wilson_measure_tol, big_q_jacobi_jacobi, big_q_jacobi_measure,
    little_q_jacobi_jacobi, little_q_jacobi_measure,
};
use crate::measures::jacobi::{favard_classify, jacobi_from_recurrence, FavardClass, JacobiMatrix};
use crate::measures::measure::{Affine, Atom, Density, Family, OrthMeasure};
use crate::measures::qpoch::DEFAULT_TOL;
use crate::measures::quadrature::golub_welsch;
use crate::scalar::RealScalar;
use crate::solver::QHParams;

#[derive(Clone, Debug, PartialEq)]
pub struct NuOptions {
    /// Size of the exact Jacobi matrix used for the Favard classification.
    pub jacobi_size: usize,
    /// Order of the fallback Gauss rule.
    pub order: usize,
    /// Truncation tolerance for infinite products and lattices.
    pub tol: f64,
}

impl Default for NuOptions {
    fn default() -> Self {
        NuOptions {
            jacobi_size: 64,
            order: 40,
            tol: DEFAULT_TOL,
        }
    }
}

/// Entries compared when checking a closed-form identification.
pub const MATCH_ENTRIES: usize = 12;
pub const MATCH_TOL: f64 = 1e-9;

/// Whether the law of `(Y - w)/u`, `Y` having recurrence `reference`, has
/// recurrence `target` on the first entries.
pub fn recurrence_matches(reference: &JacobiMatrix<f64>, map: Affine, target: &JacobiMatrix<f64>, n: usize) -> bool {
    let n = n.min(reference.size()).min(target.size());
    let close = |a: f64, b: f64| (a - b).abs() <= MATCH_TOL * a.abs().max(b.abs()).max(1.0);
    (0..n).all(|k| {
        let d = (reference.diag[k] - map.w) / map.u;
        let s = reference.sub[k] / (map.u * map.u);
        close(d, target.diag[k]) && close(s, target.sub[k])
    })
}

fn fallback(j: &JacobiMatrix<f64>, order: usize) -> Result<OrthMeasure> {
    Ok(OrthMeasure::from_quadrature(golub_welsch(j, order.min(j.size()))?))
}

/// Measure of a recurrence whose `sub[n0]` vanishes: the Gauss rule on the
/// zeros of `B_{n0}`.
pub fn truncated_measure(j: &JacobiMatrix<f64>, n0: usize) -> Result<OrthMeasure> {
    if n0 == 1 {
        return Ok(OrthMeasure::dirac(j.diag[0]));
    }
    let mut jt = j.truncate(n0 + 1);
    if jt.size() > n0 {
        jt.sub[n0] = 0.0;
    }
    let g = golub_welsch(&jt, jt.size())?;
    let atoms = g.nodes.iter().zip(&g.weights).map(|(&at, &mass)| Atom { at, mass }).collect();
    Ok(OrthMeasure::atomic(Family::FiniteAtomic, atoms))
}

/// `q = 0`: constant recurrence after the first step.
fn free_q0(j: &JacobiMatrix<f64>) -> OrthMeasure {
    let center = j.diag[1];
    let sigma = j.sub[1].sqrt();
    let c = j.diag[0] - center;
    let family = Family::FreeQ0 { center, sigma, c };
    let density = Density::Semicircle { center, sigma, c };
    let mut atoms = vec![];
    if c.abs() > sigma {
        atoms.push(Atom {
            at: center + c + sigma * sigma / c,
            mass: 1.0 - sigma * sigma / (c * c),
        });
    }
    OrthMeasure::new(family, None, atoms, Some(density), None, 0.0)
}

/// Askey-Wilson parameters and map for `1 - q + ηθ̃ > 0`.
pub fn case_i_parameters(p: &QHParams<f64>, t: f64, x: f64) -> Option<([Complex64; 4], Affine)> {
    let q = p.q;
    let d = p.derived(&t);
    let tt = p.theta_tilde()?;
    let k = 1.0 - q + p.eta * tt;
    if !(k > 0.0 && d.alpha > 0.0) {
        return None;
    }
    let sa = d.alpha.sqrt();
    let root = ((1.0 - q) * k).sqrt();
    let u = -(1.0 - q).powf(1.5) / (2.0 * sa * k.sqrt());
    let w = ((1.0 - q) * tt + d.beta) / (2.0 * sa * (1.0 - q).sqrt() * k.sqrt());
    let a = p.eta * sa / root;
    let big_x = (1.0 - q) * tt + d.beta - (1.0 - q) * (1.0 - q) * x;
    let disc = Complex64::new(big_x * big_x / ((1.0 - q) * k) - 4.0 * d.alpha, 0.0).sqrt();
    let lead = Complex64::new(q * big_x / root, 0.0);
    let b = (lead + q.abs() * disc) / (2.0 * sa);
    let c = (lead - q.abs() * disc) / (2.0 * sa);
    let re = |z: f64| Complex64::new(z, 0.0);
    Some(([re(a), b, c, re(0.0)], Affine { u, w }))
}

fn case_i(p: &QHParams<f64>, t: f64, x: f64, j: &JacobiMatrix<f64>, tol: f64) -> Option<OrthMeasure> {
    let (params, map) = case_i_parameters(p, t, x)?;
    let reference = askey_wilson_jacobi(&params, p.q, MATCH_ENTRIES).ok()?;
    if !recurrence_matches(&reference, map, j, MATCH_ENTRIES) {
        return None;
    }
    let [a, b, c, d] = params;
    let m = askey_wilson_measure_tol(a, b, c, d, p.q, tol).ok()?;
    Some(m.mapped(map))
}

/// `1 - q + ηθ̃ = 0`, `q != 0`: Big or little q-Jacobi.
fn case_ii(p: &QHParams<f64>, t: f64, x: f64, j: &JacobiMatrix<f64>, tol: f64) -> Option<OrthMeasure> {
    let q = p.q;
    let beta = p.derived(&t).beta;
    let eta = p.eta;
    let omq2 = (1.0 - q) * (1.0 - q);
    let gap = eta * beta - (1.0 + x * eta) * omq2;
    if gap.abs() > 1e-12 * omq2 {
        let u = -q * eta * omq2 / gap;
        let w = -u * (eta * beta - omq2) / (eta * omq2);
        let c = eta * beta / gap;
        let map = Affine { u, w };
        let reference = big_q_jacobi_jacobi(q, 0.0, c, q, MATCH_ENTRIES);
        if !recurrence_matches(&reference, map, j, MATCH_ENTRIES) {
            return None;
        }
        Some(big_q_jacobi_measure(q, 0.0, c, q, tol).ok()?.mapped(map))
    } else {
        let u = -omq2 / beta;
        let map = Affine { u, w: 1.0 + u / eta };
        let reference = little_q_jacobi_jacobi(q, 0.0, q, MATCH_ENTRIES);
        if !recurrence_matches(&reference, map, j, MATCH_ENTRIES) {
            return None;
        }
        Some(little_q_jacobi_measure(q, 0.0, q, tol).ok()?.mapped(map))
    }
}

/// `ν_{x,t}` with default options.
pub fn classify_nu<S: RealScalar>(params: &QHParams<S>, t: &S, x: &S) -> Result<OrthMeasure> {
    classify_nu_with(params, t, x, &NuOptions::default())
}

/// The orthogonality measure of `B_n(·; x, t)`. The Favard classification
/// runs in the scalar domain of the input, so zero coefficients are detected
/// exactly for rational input.
pub fn classify_nu_with<S: RealScalar>(params: &QHParams<S>, t: &S, x: &S, opts: &NuOptions) -> Result<OrthMeasure> {
    let pf = params.to_f64();
    let (tf, xf) = (t.to_f64(), x.to_f64());
    if !(-1.0..1.0).contains(&pf.q) {
        return Err(Error::ParameterRange(format!(
            "measures need q in [-1, 1), got {}",
            pf.q
        )));
    }
    if pf.q == -1.0 {
        return Ok(OrthMeasure::dirac(pf.theta + pf.eta * (tf + pf.tau) - xf));
    }
    let exact = jacobi_from_recurrence(params, t, x, opts.jacobi_size.max(2));
    let report = favard_classify(&exact, params);
    let j = exact.to_f64();
    match report.class {
        FavardClass::Invalid { .. } => {
            let why = report.violation().unwrap_or_default();
            let msg = if pf.q == 0.0 {
                format!("{why}; the process does not exist for these parameters")
            } else {
                why
            };
            Err(Error::Inadmissible(msg))
        }
        FavardClass::TruncatedAt(n0) => truncated_measure(&j, n0),
        FavardClass::AllPositive => {
            if let Some(why) = report.violation() {
                return Err(Error::Inadmissible(why));
            }
            if pf.q == 0.0 {
                return Ok(free_q0(&j));
            }
            let tt = pf.theta_tilde().expect("q != 1");
            let k = 1.0 - pf.q + pf.eta * tt;
            let closed = if k > 0.0 {
                case_i(&pf, tf, xf, &j, opts.tol)
            } else {
                case_ii(&pf, tf, xf, &j, opts.tol)
            };
            match closed {
                Some(m) => Ok(m),
                None => fallback(&j, opts.order),
            }
        }
    }
}

/// Support of `X_t` in the Askey-Wilson regime `1 - q + ηθ̃ > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportInfo {
    pub interval: (f64, f64),
    /// Discrete points outside the interval.
    pub atoms: Vec<f64>,
}

impl SupportInfo {
    /// Membership with `slack` on the interval and on the atoms.
    pub fn contains(&self, x: f64, slack: f64) -> bool {
        (self.interval.0 - slack..=self.interval.1 + slack).contains(&x)
            || self.atoms.iter().any(|a| (a - x).abs() <= slack)
    }
}

/// Continuous support `[w - u, w + u]` of `X_t` and the atom ladders
/// `u/2 (p q^k + 1/(p q^k)) + w` of the real parameters with `|p q^k| > 1`.
pub fn check_support_interval(params: &QHParams<f64>, t: f64) -> Result<SupportInfo> {
    let q = params.q;
    if !(q.abs() < 1.0) {
        return Err(Error::ParameterRange(format!("support needs |q| < 1, got {q}")));
    }
    let (eta, theta, tau) = (params.eta, params.theta, params.tau);
    let tt = params.theta_tilde().expect("q != 1");
    let k = 1.0 - q + eta * tt;
    if !(k > 0.0) {
        return Err(Error::ParameterRange("support interval needs 1 - q + ηθ̃ > 0".into()));
    }
    let alpha = params.derived(&t).alpha;
    let big_t = alpha / (1.0 - q);
    let u = 2.0 * big_t.sqrt() * k.sqrt() / (1.0 - q);
    let w = (tt + eta * alpha / (1.0 - q)) / (1.0 - q);
    let mut atoms = Vec::new();
    if big_t > 0.0 {
        let disc = theta * theta - 4.0 * tau;
        let mut ps = vec![-eta / k.sqrt() * big_t.sqrt()];
        if disc >= 0.0 {
            let base = tt + eta * tau / (1.0 - q);
            for s in [-1.0, 1.0] {
                ps.push(-(base + s * disc.sqrt()) / (2.0 * k.sqrt()) / big_t.sqrt());
            }
        }
        for p in ps {
            let mut kq = 0;
            while (p * q.powi(kq)).abs() > 1.0 {
                let pk = p * q.powi(kq);
                atoms.push(u / 2.0 * (pk + 1.0 / pk) + w);
                kq += 1;
                if q == 0.0 {
                    break;
                }
            }
        }
    }
    atoms.sort_by(f64::total_cmp);
    Ok(SupportInfo {
        interval: (w - u, w + u),
        atoms,
    })
}
