//! Named identity suites for the algebra and the q-commutation equation.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::polyseq::{make_special, AlgebraParams, PolySeq, ResidualReport, Special};
use crate::scalar::Scalar;
use crate::solver::{assemble_h, solve_htilde, verify_qcommutation, QHParams};

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub report: ResidualReport,
}

impl IdentityCheck {
    pub fn to_json(&self) -> Value {
        json!({
            "identity": self.name,
            "window": self.report.window,
            "max_residual": self.report.max_abs,
            "exact_zero": self.report.exact_zero,
        })
    }
}

fn check<S: Scalar>(name: &'static str, lhs: &PolySeq<S>, rhs: &PolySeq<S>, window: usize) -> Result<IdentityCheck> {
    let v = lhs.len().min(rhs.len());
    if v < window {
        return Err(Error::WindowExhausted {
            needed: window,
            available: v,
        });
    }
    Ok(IdentityCheck {
        name,
        report: lhs.check_identity(rhs, window)?,
    })
}

/// `DF = E`, `D_q F = qF D_q + E`, `D_q(E - FD) = 0` and the six `W_i`
/// identities, each on `window` coordinates.
pub fn algebra_identities<S: Scalar>(beta: &S, q: &S, window: usize) -> Result<Vec<IdentityCheck>> {
    let l = window + 2;
    let p = AlgebraParams::with_beta(beta.clone(), q.clone());
    let sp = |s: Special<S>| make_special(&s, &p, l);
    let (e, d, f, dq) = (sp(Special::E), sp(Special::D), sp(Special::F), sp(Special::Dq));
    let (w1, w2, w3, w4) = (sp(Special::W1), sp(Special::W2), sp(Special::W3), sp(Special::W4));
    let dq2 = dq.mul(&dq)?;
    let zero = PolySeq::zero(l);
    let efd = PolySeq::e_minus_fd(l);
    let b_dq = dq.scale(beta);
    Ok(vec![
        check("DF = E", &d.mul(&f)?, &e, window)?,
        check("D_q F = q F D_q + E", &dq.mul(&f)?, &(&f.mul(&dq)?.scale(q) + &e), window)?,
        check("D_q (E - FD) = 0", &dq.mul(&efd)?, &zero, window)?,
        check("(i) W1 D_q = D_q W2", &w1.mul(&dq)?, &dq.mul(&w2)?, window)?,
        check("(ii) D_q W1 = W4 D_q", &dq.mul(&w1)?, &w4.mul(&dq)?, window)?,
        check("(iii) D_q^2 W2 = W4 D_q^2", &dq2.mul(&w2)?, &w4.mul(&dq2)?, window)?,
        check("(iv) W1 = W3 + beta D_q", &w1, &(&w3 + &b_dq), window)?,
        check(
            "(v) D_q F W3 = E + q W2 F D_q",
            &PolySeq::product(&[&dq, &f, &w3])?,
            &(&e + &PolySeq::product(&[&w2, &f, &dq])?.scale(q)),
            window,
        )?,
        check("(vi) W2 W3 = W1 (W2 - beta D_q)", &w2.mul(&w3)?, &w1.mul(&(&w2 - &b_dq))?, window)?,
    ])
}

/// Residuals of the solved `H̃` and `H` on `window` coordinates: the reduced
/// equation, both initial conditions, agreement of the two `H̃`
/// constructions, and the full q-commutation equation.
pub fn commutation_checks<S: Scalar>(params: &QHParams<S>, t: &S, window: usize) -> Result<Vec<IdentityCheck>> {
    let sol = solve_htilde(params, t, window)?;
    let h = assemble_h(&sol.htilde, &params.eta)?;
    let full = verify_qcommutation(&h, params, t)?;
    let mut out = vec![
        IdentityCheck {
            name: "reduced equation for H~",
            report: sol.residual,
        },
        IdentityCheck {
            name: "H~ (E - FD) = 0",
            report: sol.initial,
        },
    ];
    if let Some(r) = sol.series_check {
        out.push(IdentityCheck {
            name: "H~ constructions agree",
            report: r,
        });
    }
    out.push(IdentityCheck {
        name: "HT - qTH = E + theta H + eta T + tau H^2",
        report: full.equation,
    });
    out.push(IdentityCheck {
        name: "H (E - FD) = 0",
        report: full.initial,
    });
    if let Some(short) = out.iter().find(|c| c.report.window < window) {
        return Err(Error::WindowExhausted {
            needed: window,
            available: short.report.window,
        });
    }
    Ok(out)
}
