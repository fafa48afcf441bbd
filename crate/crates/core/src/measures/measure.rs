//! Probability measures assembled from closed forms or from quadrature.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::measures::qpoch::qpoch_inf_complex;
use crate::measures::quadrature::Quadrature;

/// Nodes used for integrating a density.
pub const DENSITY_NODES: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub at: f64,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    AskeyWilson {
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
        q: f64,
    },
    BigQJacobi {
        a: f64,
        b: f64,
        c: f64,
        q: f64,
    },
    LittleQJacobi {
        a: f64,
        b: f64,
        q: f64,
    },
    AlSalamCarlitzI {
        a: f64,
        q: f64,
    },
    /// Recurrence with `diag = (center + c, center, center, ...)` and constant
    /// `sub = sigma^2`: a semicircle on `center ± 2 sigma` reweighted by `c`.
    FreeQ0 {
        center: f64,
        sigma: f64,
        c: f64,
    },
    Dirac(f64),
    FiniteAtomic,
    QuadratureOnly,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::AskeyWilson { .. } => "AskeyWilson",
            Family::BigQJacobi { .. } => "BigQJacobi",
            Family::LittleQJacobi { .. } => "LittleQJacobi",
            Family::AlSalamCarlitzI { .. } => "AlSalamCarlitzI",
            Family::FreeQ0 { .. } => "FreeQ0/semicircle",
            Family::Dirac(_) => "Dirac",
            Family::FiniteAtomic => "FiniteAtomic",
            Family::QuadratureOnly => "QuadratureOnly",
        }
    }

    /// Families given by a closed form rather than a numerical rule.
    pub fn is_closed_form(&self) -> bool {
        !matches!(self, Family::QuadratureOnly)
    }

    fn params_json(&self) -> Value {
        let cx = |z: &Complex64| json!([z.re, z.im]);
        match self {
            Family::AskeyWilson { a, b, c, d, q } => {
                json!({"a": cx(a), "b": cx(b), "c": cx(c), "d": cx(d), "q": q})
            }
            Family::BigQJacobi { a, b, c, q } => json!({"a": a, "b": b, "c": c, "q": q}),
            Family::LittleQJacobi { a, b, q } => json!({"a": a, "b": b, "q": q}),
            Family::AlSalamCarlitzI { a, q } => json!({"a": a, "q": q}),
            Family::FreeQ0 { center, sigma, c } => {
                json!({"center": center, "sigma": sigma, "c": c})
            }
            Family::Dirac(p) => json!({"point": p}),
            Family::FiniteAtomic | Family::QuadratureOnly => json!({}),
        }
    }
}

/// Absolutely continuous parts.
#[derive(Clone, Debug, PartialEq)]
pub enum Density {
    /// Askey-Wilson weight on `(-1, 1)`.
    AskeyWilson {
        params: [Complex64; 4],
        q: f64,
        /// `(q, ab, ac, ad, bc, bd, cd; q)_∞ / (abcd; q)_∞`.
        norm: f64,
        tol: f64,
    },
    /// `√(4σ² - (y-A)²) / (2π(σ² + c² - c(y-A)))` on `A ± 2σ`.
    Semicircle { center: f64, sigma: f64, c: f64 },
}

impl Density {
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Density::AskeyWilson { .. } => (-1.0, 1.0),
            Density::Semicircle { center, sigma, .. } => (center - 2.0 * sigma, center + 2.0 * sigma),
        }
    }

    /// `(e^{2iθ}; q)_∞ / Π (p e^{iθ}; q)_∞`, squared modulus.
    fn aw_ratio(params: &[Complex64; 4], q: f64, tol: f64, theta: f64) -> f64 {
        let e = Complex64::from_polar(1.0, theta);
        let prod = |w: Complex64| qpoch_inf_complex(w, q, tol).map(|p| p.value.norm_sqr()).unwrap_or(f64::NAN);
        let mut r = prod(e * e);
        for p in params {
            r /= prod(p * e);
        }
        r
    }

    /// Density at `y`; zero outside the support.
    pub fn eval(&self, y: f64) -> f64 {
        let (lo, hi) = self.support();
        if !(lo < y && y < hi) {
            return 0.0;
        }
        match self {
            Density::AskeyWilson { params, q, norm, tol } => {
                let theta = y.acos();
                norm / (2.0 * PI * (1.0 - y * y).sqrt()) * Self::aw_ratio(params, *q, *tol, theta)
            }
            Density::Semicircle { center, sigma, c } => {
                let z = y - center;
                (4.0 * sigma * sigma - z * z).sqrt() / (2.0 * PI * (sigma * sigma + c * c - c * z))
            }
        }
    }

    /// Midpoint rule in `θ` with `y = cos θ` scaled to the support; the
    /// integrand is smooth and periodic there, and no endpoint is evaluated.
    pub fn rule(&self, n: usize) -> Vec<(f64, f64)> {
        let h = PI / n as f64;
        (0..n)
            .map(|j| {
                let theta = (j as f64 + 0.5) * h;
                match self {
                    Density::AskeyWilson { params, q, norm, tol } => {
                        let w = norm / (2.0 * PI) * Self::aw_ratio(params, *q, *tol, theta) * h;
                        (theta.cos(), w)
                    }
                    Density::Semicircle { center, sigma, c } => {
                        let (s, co) = theta.sin_cos();
                        let w = (2.0 * sigma * s).powi(2)
                            / (2.0 * PI * (sigma * sigma + c * c - 2.0 * c * sigma * co))
                            * h;
                        (center + 2.0 * sigma * co, w)
                    }
                }
            })
            .collect()
    }
}

/// `ν` is the law of `(Y - w)/u` when `Y` follows the reference measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Affine {
    pub u: f64,
    pub w: f64,
}

impl Affine {
    pub fn apply(&self, y: f64) -> f64 {
        (y - self.w) / self.u
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrthMeasure {
    pub family: Family,
    /// Map from the family's own coordinates, `None` for identity.
    pub affine: Option<Affine>,
    /// Atoms in the family's own coordinates.
    pub atoms: Vec<Atom>,
    pub density: Option<Density>,
    pub quadrature: Option<Quadrature>,
    /// Bound on the mass lost to truncated products and lattices.
    pub truncation_error: f64,
    /// Askey-Wilson existence case, when the family is Askey-Wilson.
    pub aw_case: Option<u8>,
}

impl OrthMeasure {
    pub fn new(
        family: Family,
        affine: Option<Affine>,
        atoms: Vec<Atom>,
        density: Option<Density>,
        quadrature: Option<Quadrature>,
        truncation_error: f64,
    ) -> Self {
        OrthMeasure {
            family,
            affine,
            atoms,
            density,
            quadrature,
            truncation_error,
            aw_case: None,
        }
    }

    pub fn atomic(family: Family, atoms: Vec<Atom>) -> Self {
        Self::new(family, None, atoms, None, None, 0.0)
    }

    pub fn dirac(point: f64) -> Self {
        Self::atomic(Family::Dirac(point), vec![Atom { at: point, mass: 1.0 }])
    }

    pub fn from_quadrature(g: Quadrature) -> Self {
        Self::new(Family::QuadratureOnly, None, vec![], None, Some(g), 0.0)
    }

    pub fn with_case(mut self, case: u8) -> Self {
        self.aw_case = Some(case);
        self
    }

    pub fn with_truncation(mut self, err: f64) -> Self {
        self.truncation_error = err;
        self
    }

    /// Compose with a further map: the result is the law of `(X - w)/u`.
    pub fn mapped(mut self, map: Affine) -> Self {
        self.affine = Some(match self.affine {
            None => map,
            // (((y - w1)/u1) - w2)/u2 = (y - (w1 + u1 w2)) / (u1 u2)
            Some(a) => Affine {
                u: a.u * map.u,
                w: a.w + a.u * map.w,
            },
        });
        self
    }

    fn to_target(&self, y: f64) -> f64 {
        match self.affine {
            Some(a) => a.apply(y),
            None => y,
        }
    }

    /// Atoms in the coordinates of the measure itself.
    pub fn target_atoms(&self) -> Vec<Atom> {
        let mut out: Vec<Atom> = self
            .atoms
            .iter()
            .map(|a| Atom {
                at: self.to_target(a.at),
                mass: a.mass,
            })
            .collect();
        if let Some(g) = &self.quadrature {
            out.extend(g.nodes.iter().zip(&g.weights).map(|(&at, &mass)| Atom {
                at: self.to_target(at),
                mass,
            }));
        }
        out.sort_by(|a, b| a.at.total_cmp(&b.at));
        out
    }

    /// Support interval of the continuous part.
    pub fn support(&self) -> Option<(f64, f64)> {
        let (lo, hi) = self.density.as_ref()?.support();
        let (a, b) = (self.to_target(lo), self.to_target(hi));
        Some((a.min(b), a.max(b)))
    }

    /// Density of the continuous part at `z`.
    pub fn density_at(&self, z: f64) -> f64 {
        let Some(d) = &self.density else { return 0.0 };
        match self.affine {
            Some(a) => a.u.abs() * d.eval(a.u * z + a.w),
            None => d.eval(z),
        }
    }

    /// Integration rule for the continuous part with `n` nodes.
    pub fn continuous_rule(&self, n: usize) -> Vec<(f64, f64)> {
        match &self.density {
            Some(d) => d.rule(n).into_iter().map(|(y, w)| (self.to_target(y), w)).collect(),
            None => vec![],
        }
    }

    /// Atoms followed by the continuous rule.
    pub fn rule(&self) -> Vec<(f64, f64)> {
        let mut r: Vec<(f64, f64)> = self.target_atoms().iter().map(|a| (a.at, a.mass)).collect();
        r.extend(self.continuous_rule(DENSITY_NODES));
        r
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.rule().iter().map(|&(y, w)| w * f(y)).sum()
    }

    pub fn mass(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    pub fn continuous_mass(&self) -> f64 {
        self.continuous_rule(DENSITY_NODES).iter().map(|p| p.1).sum()
    }

    pub fn moments(&self, k: usize) -> Vec<f64> {
        let r = self.rule();
        (0..=k)
            .map(|j| r.iter().map(|&(y, w)| w * y.powi(j as i32)).sum())
            .collect()
    }

    /// `∫ |y|^j` for `j = 0..=k`, the scale for relative moment errors.
    pub fn absolute_moments(&self, k: usize) -> Vec<f64> {
        let r = self.rule();
        (0..=k)
            .map(|j| r.iter().map(|&(y, w)| w * y.abs().powi(j as i32)).sum())
            .collect()
    }

    /// No atoms, only a density.
    pub fn continuous_only(&self) -> bool {
        self.density.is_some() && self.atoms.is_empty() && self.quadrature.is_none()
    }

    /// Total mass is one and all masses are nonnegative.
    pub fn check_mass(&self, tol: f64) -> Result<()> {
        if let Some(a) = self.target_atoms().iter().find(|a| a.mass < -tol) {
            return Err(Error::Precondition(format!("negative atom mass {} at {}", a.mass, a.at)));
        }
        if let Some((y, w)) = self
            .continuous_rule(DENSITY_NODES)
            .into_iter()
            .find(|p| !(p.1 >= 0.0))
        {
            return Err(Error::Precondition(format!("density weight {w} at {y} is negative")));
        }
        let m = self.mass();
        if (m - 1.0).abs() > tol + self.truncation_error {
            return Err(Error::Precondition(format!("total mass {m} differs from 1")));
        }
        Ok(())
    }

    /// JSON descriptor: family, parameters, map, atoms and support.
    pub fn descriptor(&self) -> Value {
        let atoms: Vec<Value> = self
            .target_atoms()
            .iter()
            .map(|a| json!({"at": a.at, "mass": a.mass}))
            .collect();
        json!({
            "family": self.family.name(),
            "parameters": self.family.params_json(),
            "askey_wilson_case": self.aw_case,
            "affine": self.affine.map(|a| json!({"u": a.u, "w": a.w})),
            "atoms": atoms,
            "support": self.support().map(|(a, b)| json!([a, b])),
            "continuous_only": self.continuous_only(),
            "continuous_mass": self.continuous_mass(),
            "mass": self.mass(),
            "truncation_error": self.truncation_error,
        })
    }
}
