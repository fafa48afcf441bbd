//! Askey-Wilson, Big and Little q-Jacobi and Al-Salam-Carlitz I measures,
//! in the coordinates of their own recurrences.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measures::jacobi::JacobiMatrix;
use crate::measures::measure::{Atom, Density, Family, OrthMeasure};
use crate::measures::qpoch::{qpoch_complex, qpoch_inf, qpoch_inf_many, DEFAULT_TOL};
use crate::measures::quadrature::golub_welsch;

/// Imaginary parts below this (relative) are rounding.
pub const IMAG_TOL: f64 = 1e-12;

/// Tolerance for recognising `1/q^N` and vanishing recurrence coefficients.
const MATCH_TOL: f64 = 1e-9;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn is_real(z: Complex64) -> bool {
    z.im.abs() <= IMAG_TOL * z.norm().max(1.0)
}

fn in_ray(z: Complex64) -> bool {
    is_real(z) && z.re >= 1.0 - MATCH_TOL
}

/// Existence case of the Askey-Wilson distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AwCase {
    /// `q >= 0`, `m1 = 0`.
    ContinuousNonnegativeQ,
    /// `q < 0`, `m1 = m2 = 0`.
    ContinuousNegativeQ,
    /// `q >= 0`, `m1 = 2`.
    DiscreteNonnegativeQ { atoms: usize },
    /// `q < 0`, `m1 = 2`, `m2 = 0`.
    DiscreteM1 { atoms: usize },
    /// `q < 0`, `m1 = 0`, `m2 = 2`.
    DiscreteM2 { atoms: usize },
}

impl AwCase {
    pub fn number(&self) -> u8 {
        match self {
            AwCase::ContinuousNonnegativeQ => 1,
            AwCase::ContinuousNegativeQ => 2,
            AwCase::DiscreteNonnegativeQ { .. } => 3,
            AwCase::DiscreteM1 { .. } => 4,
            AwCase::DiscreteM2 { .. } => 5,
        }
    }
}

fn pair_products(p: &[Complex64; 4]) -> [Complex64; 6] {
    [
        p[0] * p[1],
        p[0] * p[2],
        p[0] * p[3],
        p[1] * p[2],
        p[1] * p[3],
        p[2] * p[3],
    ]
}

/// `(m1, m2)`: how many of `ab, ..., cd` and of `qab, ..., qcd` lie in `[1, ∞)`.
pub fn aw_counts(p: &[Complex64; 4], q: f64) -> (usize, usize) {
    let prods = pair_products(p);
    let m1 = prods.iter().filter(|z| in_ray(**z)).count();
    let m2 = prods.iter().filter(|z| in_ray(**z * q)).count();
    (m1, m2)
}

fn check_parameters(p: &[Complex64; 4], q: f64) -> Result<()> {
    if !(q.abs() < 1.0) {
        return Err(Error::ParameterRange(format!("Askey-Wilson needs |q| < 1, got {q}")));
    }
    let mut used = [false; 4];
    for i in 0..4 {
        if is_real(p[i]) || used[i] {
            continue;
        }
        let partner = (0..4).find(|&j| {
            j != i && !used[j] && (p[j] - p[i].conj()).norm() <= IMAG_TOL * p[i].norm().max(1.0)
        });
        match partner {
            Some(j) => {
                used[i] = true;
                used[j] = true;
            }
            None => {
                return Err(Error::ParameterRange(format!(
                    "parameter {} is neither real nor part of a conjugate pair",
                    p[i]
                )))
            }
        }
    }
    let abcd = p[0] * p[1] * p[2] * p[3];
    if in_ray(abcd) || in_ray(abcd * q) {
        return Err(Error::ParameterRange(format!(
            "abcd = {abcd} or q abcd lies in [1, ∞)"
        )));
    }
    Ok(())
}

/// `N` with `value = q^{-N}`, if any.
fn inverse_q_power(value: f64, q: f64) -> Option<usize> {
    if q == 0.0 || value <= 0.0 {
        return None;
    }
    let n = (-value.ln() / q.abs().ln()).round();
    if n < 0.0 || n > 10_000.0 {
        return None;
    }
    let n = n as usize;
    let back = value * q.powi(n as i32);
    ((back - 1.0).abs() <= MATCH_TOL).then_some(n)
}

fn smaller_of_two(prods: impl Iterator<Item = Complex64>) -> f64 {
    prods.filter(|z| in_ray(*z)).map(|z| z.re).fold(f64::INFINITY, f64::min)
}

/// Which of the five existence cases applies.
pub fn askey_wilson_case(p: &[Complex64; 4], q: f64) -> Result<AwCase> {
    check_parameters(p, q)?;
    let (m1, m2) = aw_counts(p, q);
    let prods = pair_products(p);
    let nonexistence = |why: String| Err(Error::Nonexistence(format!("m1 = {m1}, m2 = {m2}: {why}")));
    match (q >= 0.0, m1, m2) {
        (true, 0, _) => Ok(AwCase::ContinuousNonnegativeQ),
        (false, 0, 0) => Ok(AwCase::ContinuousNegativeQ),
        (true, 2, _) => {
            if q == 0.0 {
                return Ok(AwCase::DiscreteNonnegativeQ { atoms: 0 });
            }
            let s = smaller_of_two(prods.iter().copied());
            match inverse_q_power(s, q) {
                Some(n) => Ok(AwCase::DiscreteNonnegativeQ { atoms: n + 1 }),
                None => nonexistence(format!("smaller product {s} is not of the form q^-N")),
            }
        }
        (false, 2, 0) => {
            let s = smaller_of_two(prods.iter().copied());
            match inverse_q_power(s, q) {
                Some(n) if n % 2 == 0 => Ok(AwCase::DiscreteM1 { atoms: n + 1 }),
                _ => nonexistence(format!("smaller product {s} is not q^-N with even N")),
            }
        }
        (false, 0, 2) => {
            let s = smaller_of_two(prods.iter().map(|z| z * q));
            match inverse_q_power(s, q) {
                Some(n) if n % 2 == 0 => Ok(AwCase::DiscreteM2 { atoms: n + 2 }),
                _ => nonexistence(format!("smaller product {s} is not q^-N with even N")),
            }
        }
        _ => nonexistence("no existence case applies".into()),
    }
}

/// Monic recurrence `y p_n = p_{n+1} + B_n/2 p_n + A_{n-1} C_n / 4 p_{n-1}`.
/// The coefficients are symmetric in the parameters, so the one of largest
/// modulus goes first to keep `1/a` finite.
pub fn askey_wilson_jacobi(p: &[Complex64; 4], q: f64, n: usize) -> Result<JacobiMatrix<f64>> {
    let mut s = *p;
    s.sort_by(|x, y| y.norm().total_cmp(&x.norm()));
    let [a, b, cc, d] = s;
    let one = c(1.0);
    if a.norm() == 0.0 {
        let sub = (0..n).map(|k| if k == 0 { 0.0 } else { (1.0 - q.powi(k as i32)) / 4.0 }).collect();
        return Ok(JacobiMatrix::new(vec![0.0; n], sub));
    }
    let abcd = a * b * cc * d;
    let qp = |k: i32| q.powi(k);
    let big_a = |k: i32| -> Complex64 {
        if k < 0 {
            return one;
        }
        (one - a * b * qp(k)) * (one - a * cc * qp(k)) * (one - a * d * qp(k)) * (one - abcd * qp(k - 1))
            / ((one - abcd * qp(2 * k - 1)) * (one - abcd * qp(2 * k)))
    };
    let big_c = |k: i32| -> Complex64 {
        if k == 0 {
            return c(0.0);
        }
        (one - qp(k)) * (one - b * cc * qp(k - 1)) * (one - b * d * qp(k - 1)) * (one - cc * d * qp(k - 1))
            / ((one - abcd * qp(2 * k - 2)) * (one - abcd * qp(2 * k - 1)))
    };
    let mut diag = Vec::with_capacity(n);
    let mut sub = Vec::with_capacity(n);
    for k in 0..n as i32 {
        let bn = a + one / a - big_a(k) / a - a * big_c(k);
        let cn = big_a(k - 1) * big_c(k);
        for z in [bn, cn] {
            if !is_real(z) {
                return Err(Error::Precondition(format!(
                    "Askey-Wilson coefficient {z} is not real; parameters are not conjugate-closed"
                )));
            }
        }
        diag.push(bn.re / 2.0);
        sub.push(cn.re / 4.0);
    }
    Ok(JacobiMatrix::new(diag, sub))
}

/// `x_k = (p q^k + 1/(p q^k))/2` for real `|p| > 1`, with `ρ_k` relative to
/// the other three parameters.
fn atom_ladder(p: Complex64, others: [Complex64; 3], q: f64, tol: f64) -> Result<Vec<Atom>> {
    let a = p.re;
    let [b, cc, d] = others;
    let inv = |z: Complex64| z / a;
    let rho0 = qpoch_inf_many(&[c(1.0 / (a * a)), b * cc, b * d, cc * d], q, tol)?.value
        / qpoch_inf_many(&[inv(b), inv(cc), inv(d), b * cc * d * a], q, tol)?.value;
    let mut out = Vec::new();
    let mut k = 0usize;
    while (a * q.powi(k as i32)).abs() > 1.0 {
        let ki = k as i32;
        let num = qpoch_complex(c(a * a), q, k)
            * qpoch_complex(b * a, q, k)
            * qpoch_complex(cc * a, q, k)
            * qpoch_complex(d * a, q, k)
            * (1.0 - a * a * q.powi(2 * ki))
            * q.powi(ki);
        let mut den = qpoch_complex(c(q), q, k) * (1.0 - a * a) * a.powi(ki);
        for j in 0..k {
            let aq = a * q.powi(j as i32 + 1);
            den *= (b - aq) * (cc - aq) * (d - aq);
        }
        let mass = rho0 * num / den;
        if !is_real(mass) {
            return Err(Error::Precondition(format!("atom mass {mass} is not real")));
        }
        let apk = a * q.powi(ki);
        out.push(Atom {
            at: (apk + 1.0 / apk) / 2.0,
            mass: mass.re,
        });
        k += 1;
        if q == 0.0 {
            break;
        }
    }
    Ok(out)
}

fn discrete_from_recurrence(p: &[Complex64; 4], q: f64, atoms: usize) -> Result<Vec<Atom>> {
    let mut j = askey_wilson_jacobi(p, q, atoms + 1)?;
    let scale = j.sub.iter().fold(1.0f64, |m, s| m.max(s.abs()));
    if atoms == 0 || j.sub[atoms].abs() > MATCH_TOL * scale {
        return Err(Error::Nonexistence(format!(
            "recurrence does not terminate after {atoms} steps"
        )));
    }
    j.sub[atoms] = 0.0;
    let g = golub_welsch(&j, atoms + 1)?;
    if g.order != atoms {
        return Err(Error::Nonexistence(format!(
            "recurrence vanishes after {} steps, expected {atoms}",
            g.order
        )));
    }
    Ok(g.nodes.iter().zip(&g.weights).map(|(&at, &mass)| Atom { at, mass }).collect())
}

/// Order of the first vanishing `sub[n]`, `n < limit`.
fn first_vanishing(p: &[Complex64; 4], q: f64, limit: usize) -> Result<Option<usize>> {
    let j = askey_wilson_jacobi(p, q, limit)?;
    let scale = j.sub.iter().fold(1.0f64, |m, s| m.max(s.abs()));
    Ok((1..limit).find(|&n| j.sub[n].abs() <= MATCH_TOL * scale))
}

/// The Askey-Wilson distribution on `[-1, 1]` plus atoms, or an error when
/// none of the existence cases applies.
pub fn askey_wilson_measure(a: Complex64, b: Complex64, cc: Complex64, d: Complex64, q: f64) -> Result<OrthMeasure> {
    askey_wilson_measure_tol(a, b, cc, d, q, DEFAULT_TOL)
}

pub fn askey_wilson_measure_tol(
    a: Complex64,
    b: Complex64,
    cc: Complex64,
    d: Complex64,
    q: f64,
    tol: f64,
) -> Result<OrthMeasure> {
    let p = [a, b, cc, d];
    let case = askey_wilson_case(&p, q)?;
    let family = Family::AskeyWilson { a, b, c: cc, d, q };
    let atoms_needed = match case {
        AwCase::DiscreteNonnegativeQ { atoms: 0 } => first_vanishing(&p, q, 64)?,
        AwCase::DiscreteNonnegativeQ { atoms } | AwCase::DiscreteM1 { atoms } | AwCase::DiscreteM2 { atoms } => {
            Some(atoms)
        }
        _ => None,
    };
    if let Some(n) = atoms_needed {
        let atoms = discrete_from_recurrence(&p, q, n)?;
        return Ok(OrthMeasure::atomic(family, atoms).with_case(case.number()));
    }

    let prods = pair_products(&p);
    let norm_num = qpoch_inf_many(
        &[c(q), prods[0], prods[1], prods[2], prods[3], prods[4], prods[5]],
        q,
        tol,
    )?;
    let norm_den = qpoch_inf_many(&[a * b * cc * d], q, tol)?;
    let norm = norm_num.value / norm_den.value;
    if !is_real(norm) {
        return Err(Error::Precondition(format!("density normalisation {norm} is not real")));
    }
    let mut atoms = Vec::new();
    for i in 0..4 {
        if is_real(p[i]) && p[i].re.abs() > 1.0 {
            let others: Vec<Complex64> = (0..4).filter(|&j| j != i).map(|j| p[j]).collect();
            atoms.extend(atom_ladder(p[i], [others[0], others[1], others[2]], q, tol)?);
        }
    }
    let density = Density::AskeyWilson {
        params: p,
        q,
        norm: norm.re,
        tol,
    };
    let truncation = norm_num.error_bound + norm_den.error_bound;
    let m = OrthMeasure::new(family, None, atoms, Some(density), None, truncation).with_case(case.number());
    m.check_mass(1e-8)?;
    Ok(m)
}

fn lattice_len(q: f64, tol: f64) -> usize {
    if q == 0.0 {
        return 1;
    }
    ((tol * (1.0 - q.abs())).ln() / q.abs().ln()).ceil().max(1.0) as usize + 1
}

fn normalise(family: Family, mut atoms: Vec<Atom>, q: f64, tol: f64) -> Result<OrthMeasure> {
    if let Some(bad) = atoms.iter().find(|a| !(a.mass >= 0.0)) {
        return Err(Error::ParameterRange(format!(
            "lattice weight {} at {} is not a probability mass",
            bad.mass, bad.at
        )));
    }
    let total: f64 = atoms.iter().map(|a| a.mass).sum();
    let head = atoms.iter().fold(0.0f64, |m, a| m.max(a.mass));
    for a in atoms.iter_mut() {
        a.mass /= total;
    }
    atoms.retain(|a| a.mass > 0.0);
    let n = lattice_len(q, tol) as i32;
    let tail = head * q.abs().powi(n) / (1.0 - q.abs()) / total;
    Ok(OrthMeasure::atomic(family, atoms).with_truncation(tail))
}

/// Monic Big q-Jacobi recurrence.
pub fn big_q_jacobi_jacobi(a: f64, b: f64, cc: f64, q: f64, n: usize) -> JacobiMatrix<f64> {
    let big_a = |k: i32| {
        (1.0 - a * q.powi(k + 1)) * (1.0 - a * b * q.powi(k + 1)) * (1.0 - cc * q.powi(k + 1))
            / ((1.0 - a * b * q.powi(2 * k + 1)) * (1.0 - a * b * q.powi(2 * k + 2)))
    };
    let big_c = |k: i32| {
        -a * cc * q.powi(k + 1) * (1.0 - q.powi(k)) * (1.0 - a * b / cc * q.powi(k)) * (1.0 - b * q.powi(k))
            / ((1.0 - a * b * q.powi(2 * k)) * (1.0 - a * b * q.powi(2 * k + 1)))
    };
    let diag = (0..n as i32).map(|k| 1.0 - (big_a(k) + big_c(k))).collect();
    let sub = (0..n as i32)
        .map(|k| if k == 0 { 0.0 } else { big_a(k - 1) * big_c(k) })
        .collect();
    JacobiMatrix::new(diag, sub)
}

/// Big q-Jacobi measure on the lattice `{a q^{k+1}} ∪ {c q^{k+1}}`.
pub fn big_q_jacobi_measure(a: f64, b: f64, cc: f64, q: f64, tol: f64) -> Result<OrthMeasure> {
    if !(0.0 < q && q < 1.0 && 0.0 < a * q && a * q < 1.0 && 0.0 <= b * q && b * q < 1.0 && cc < 0.0) {
        return Err(Error::ParameterRange(format!(
            "Big q-Jacobi needs 0<q<1, 0<aq<1, 0<=bq<1, c<0; got a={a}, b={b}, c={cc}, q={q}"
        )));
    }
    let w = |x: f64| -> Result<f64> {
        Ok(qpoch_inf(x / a, q, tol)?.value * qpoch_inf(x / cc, q, tol)?.value
            / (qpoch_inf(x, q, tol)?.value * qpoch_inf(b * x / cc, q, tol)?.value))
    };
    let mut atoms = Vec::new();
    for k in 0..lattice_len(q, tol) {
        let qk = q.powi(k as i32);
        let xa = a * q * qk;
        let xc = cc * q * qk;
        atoms.push(Atom {
            at: xa,
            mass: a * q * (1.0 - q) * w(xa)? * qk,
        });
        atoms.push(Atom {
            at: xc,
            mass: -cc * q * (1.0 - q) * w(xc)? * qk,
        });
    }
    normalise(Family::BigQJacobi { a, b, c: cc, q }, atoms, q, tol)
}

/// Monic little q-Jacobi recurrence.
pub fn little_q_jacobi_jacobi(a: f64, b: f64, q: f64, n: usize) -> JacobiMatrix<f64> {
    let ta = |k: i32| {
        q.powi(k) * (1.0 - a * q.powi(k + 1)) * (1.0 - a * b * q.powi(k + 1))
            / ((1.0 - a * b * q.powi(2 * k + 1)) * (1.0 - a * b * q.powi(2 * k + 2)))
    };
    let tc = |k: i32| {
        a * q.powi(k) * (1.0 - q.powi(k)) * (1.0 - b * q.powi(k))
            / ((1.0 - a * b * q.powi(2 * k)) * (1.0 - a * b * q.powi(2 * k + 1)))
    };
    let diag = (0..n as i32).map(|k| ta(k) + tc(k)).collect();
    let sub = (0..n as i32).map(|k| if k == 0 { 0.0 } else { ta(k - 1) * tc(k) }).collect();
    JacobiMatrix::new(diag, sub)
}

/// Little q-Jacobi measure: mass `∝ (bq;q)_k (aq)^k / (q;q)_k` at `q^k`.
pub fn little_q_jacobi_measure(a: f64, b: f64, q: f64, tol: f64) -> Result<OrthMeasure> {
    if !(q.abs() < 1.0 && q != 0.0 && 0.0 < a * q && a * q < 1.0 && b * q < 1.0) {
        return Err(Error::ParameterRange(format!(
            "little q-Jacobi needs 0<|q|<1, 0<aq<1, bq<1; got a={a}, b={b}, q={q}"
        )));
    }
    let mut atoms = Vec::new();
    let mut weight = 1.0;
    for k in 0..lattice_len(q * a, tol).max(lattice_len(q, tol)) {
        atoms.push(Atom {
            at: q.powi(k as i32),
            mass: weight,
        });
        let kq = q.powi(k as i32);
        weight *= (1.0 - b * q * kq) / (1.0 - q * kq) * a * q;
    }
    normalise(Family::LittleQJacobi { a, b, q }, atoms, q, tol)
}

/// Monic Al-Salam-Carlitz I recurrence.
pub fn al_salam_carlitz_jacobi(a: f64, q: f64, n: usize) -> JacobiMatrix<f64> {
    let diag = (0..n as i32).map(|k| (a + 1.0) * q.powi(k)).collect();
    let sub = (0..n as i32)
        .map(|k| if k == 0 { 0.0 } else { -a * q.powi(k - 1) * (1.0 - q.powi(k)) })
        .collect();
    JacobiMatrix::new(diag, sub)
}

/// Al-Salam-Carlitz I measure on `{q^k} ∪ {a q^k}` with weight `(qx, qx/a; q)_∞`.
pub fn al_salam_carlitz_measure(a: f64, q: f64, tol: f64) -> Result<OrthMeasure> {
    if !(a < 0.0 && 0.0 < q && q < 1.0) {
        return Err(Error::ParameterRange(format!(
            "Al-Salam-Carlitz I needs a<0, 0<q<1; got a={a}, q={q}"
        )));
    }
    let w = |x: f64| -> Result<f64> { Ok(qpoch_inf(q * x, q, tol)?.value * qpoch_inf(q * x / a, q, tol)?.value) };
    let mut atoms = Vec::new();
    for k in 0..lattice_len(q, tol) {
        let qk = q.powi(k as i32);
        atoms.push(Atom {
            at: qk,
            mass: (1.0 - q) * w(qk)? * qk,
        });
        atoms.push(Atom {
            at: a * qk,
            mass: -a * (1.0 - q) * w(a * qk)? * qk,
        });
    }
    normalise(Family::AlSalamCarlitzI { a, q }, atoms, q, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::jacobi::moments_from_jacobi;

    fn r(p: [f64; 4]) -> [Complex64; 4] {
        p.map(c)
    }

    fn assert_moments(m: &OrthMeasure, j: &JacobiMatrix<f64>, k: usize, tol: f64) {
        let exact = moments_from_jacobi(j, k).unwrap();
        let got = m.moments(k);
        let abs = m.absolute_moments(k);
        for i in 0..=k {
            let e = (got[i] - exact[i]).abs() / abs[i].max(1e-300);
            assert!(e < tol, "moment {i}: {} vs {} ({e})", got[i], exact[i]);
        }
    }

    #[test]
    fn q_hermite_normalisation() {
        let m = askey_wilson_measure(c(0.0), c(0.0), c(0.0), c(0.0), 0.5).unwrap();
        assert!((m.mass() - 1.0).abs() < 1e-8);
        assert!(m.atoms.is_empty());
        let j = askey_wilson_jacobi(&r([0.0; 4]), 0.5, 12).unwrap();
        assert_moments(&m, &j, 10, 1e-10);
    }

    #[test]
    fn continuous_with_atoms() {
        for (p, q) in [
            ([1.8, 0.3, -0.4, 0.0], 0.5),
            ([1.8, 0.3, -0.4, 0.1], -0.5),
            ([-2.2, 0.5, 0.1, 0.0], 0.6),
        ] {
            let m = askey_wilson_measure(c(p[0]), c(p[1]), c(p[2]), c(p[3]), q).unwrap();
            assert!(!m.atoms.is_empty());
            let j = askey_wilson_jacobi(&r(p), q, 12).unwrap();
            assert_moments(&m, &j, 10, 1e-10);
        }
    }

    #[test]
    fn complex_pair() {
        let b = Complex64::new(0.2, 0.4);
        let m = askey_wilson_measure(c(0.3), b, b.conj(), c(0.0), 0.4).unwrap();
        let j = askey_wilson_jacobi(&[c(0.3), b, b.conj(), c(0.0)], 0.4, 12).unwrap();
        assert_moments(&m, &j, 10, 1e-10);
        assert!(askey_wilson_measure(c(0.3), b, b, c(0.0), 0.4).is_err());
    }

    #[test]
    fn existence_table() {
        let case = |p: [f64; 4], q: f64| askey_wilson_case(&r(p), q);
        assert_eq!(case([0.5, 0.2, 0.0, 0.0], 0.5).unwrap().number(), 1);
        assert_eq!(case([0.5, 0.2, 0.0, 0.0], -0.5).unwrap().number(), 2);
        assert_eq!(
            case([4.0, 0.5, 0.5, 0.0], 0.5).unwrap(),
            AwCase::DiscreteNonnegativeQ { atoms: 2 }
        );
        assert_eq!(case([8.0, 0.5, 0.5, 0.0], -0.5).unwrap(), AwCase::DiscreteM1 { atoms: 3 });
        assert_eq!(case([16.0, -0.5, -0.5, 0.0], -0.5).unwrap(), AwCase::DiscreteM2 { atoms: 4 });
        assert!(matches!(case([2.0, 0.6, 0.0, 0.0], 0.5), Err(Error::Nonexistence(_))));
        assert_eq!(aw_counts(&r([2.0, 0.6, 0.0, 0.0]), 0.5), (1, 0));
    }

    #[test]
    fn discrete_cases_match_recurrence() {
        for (p, q, n) in [
            ([4.0, 0.5, 0.5, 0.0], 0.5, 2),
            ([8.0, 0.5, 0.5, 0.0], -0.5, 3),
            ([16.0, -0.5, -0.5, 0.0], -0.5, 4),
        ] {
            let m = askey_wilson_measure(c(p[0]), c(p[1]), c(p[2]), c(p[3]), q).unwrap();
            assert_eq!(m.atoms.len(), n);
            assert!(m.atoms.iter().all(|a| a.mass > 0.0));
            assert!((m.mass() - 1.0).abs() < 1e-12);
            let j = askey_wilson_jacobi(&r(p), q, 2 * n).unwrap();
            assert_moments(&m, &j, 2 * n - 1, 1e-9);
        }
    }

    #[test]
    fn atom_location() {
        let m = askey_wilson_measure(c(2.0), c(0.1), c(0.0), c(0.0), 0.5).unwrap();
        assert_eq!(m.atoms.len(), 1);
        assert!((m.atoms[0].at - 1.25).abs() < 1e-15);
    }

    #[test]
    fn lattice_families() {
        let m = big_q_jacobi_measure(0.5, 0.0, -1.3, 0.5, 1e-14).unwrap();
        assert_moments(&m, &big_q_jacobi_jacobi(0.5, 0.0, -1.3, 0.5, 12), 10, 1e-10);
        assert!(m.atoms.iter().all(|a| a.at >= -1.3 * 0.5 - 1e-15 && a.at <= 0.25 + 1e-15));
        let m = big_q_jacobi_measure(0.8, 0.3, -2.0, 0.6, 1e-14).unwrap();
        assert_moments(&m, &big_q_jacobi_jacobi(0.8, 0.3, -2.0, 0.6, 12), 10, 1e-10);
        for (a, b, q) in [(0.5, 0.0, 0.5), (-0.5, 0.0, -0.5), (0.7, 0.4, 0.6)] {
            let m = little_q_jacobi_measure(a, b, q, 1e-14).unwrap();
            assert_moments(&m, &little_q_jacobi_jacobi(a, b, q, 12), 10, 1e-10);
        }
        for (a, q) in [(-0.6, 0.5), (-2.0, 0.3)] {
            let m = al_salam_carlitz_measure(a, q, 1e-14).unwrap();
            let j = al_salam_carlitz_jacobi(a, q, 12);
            assert_moments(&m, &j, 10, 1e-10);
            assert!((m.moments(1)[1] - (a + 1.0)).abs() < 1e-12);
        }
        assert!(big_q_jacobi_measure(0.5, 0.0, 1.0, 0.5, 1e-12).is_err());
        assert!(al_salam_carlitz_measure(0.5, 0.5, 1e-12).is_err());
    }
}
