//! Gauss quadrature from a Jacobi matrix.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::measures::jacobi::JacobiMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct Quadrature {
    /// Increasing.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl Quadrature {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn moments(&self, k: usize) -> Vec<f64> {
        (0..=k)
            .map(|j| self.integrate(|x| x.powi(j as i32)))
            .collect()
    }

    /// `Σ w |x|^j` for `j = 0..=k`.
    pub fn absolute_moments(&self, k: usize) -> Vec<f64> {
        (0..=k)
            .map(|j| self.integrate(|x| x.abs().powi(j as i32)))
            .collect()
    }
}

/// `n`-point Gauss rule of the recurrence. When `sub[n0] = 0` for some
/// `1 <= n0 < n` the rule has `n0` points, which carry the whole measure.
pub fn golub_welsch(j: &JacobiMatrix<f64>, n: usize) -> Result<Quadrature> {
    if n == 0 {
        return Err(Error::Precondition("quadrature order must be positive".into()));
    }
    if j.size() < n {
        return Err(Error::Precondition(format!(
            "order {n} needs a Jacobi matrix of size {n}, got {}",
            j.size()
        )));
    }
    let mut order = n;
    for k in 1..n {
        let b = j.sub[k];
        if b < 0.0 {
            return Err(Error::Inadmissible(format!(
                "recurrence coefficient sub[{k}] = {b} is negative"
            )));
        }
        if b == 0.0 {
            order = k;
            break;
        }
    }
    let m = DMatrix::from_fn(order, order, |r, c| {
        if r == c {
            j.diag[r]
        } else if r == c + 1 {
            j.sub[r].sqrt()
        } else if c == r + 1 {
            j.sub[c].sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(m);
    let mut pairs: Vec<(f64, f64)> = (0..order)
        .map(|i| {
            let v = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], v * v)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Quadrature {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
        order,
    })
}

/// `|a - b| / scale` with a floor on the scale.
pub fn relative_error(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.abs().max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::jacobi::{jacobi_from_recurrence, moments_from_jacobi};
    use crate::scalar::RealScalar;
    use crate::solver::QHParams;
    use crate::{rat, Rational};

    #[test]
    fn one_point_rule() {
        let j = JacobiMatrix::new(vec![0.7, 1.0], vec![0.0, 2.0]);
        let g = golub_welsch(&j, 1).unwrap();
        assert_eq!(g.nodes, vec![0.7]);
        assert_eq!(g.weights, vec![1.0]);
    }

    #[test]
    fn hermite_rule() {
        // Monic Hermite: sub[n] = n, nodes of degree 3 are 0, ±√3.
        let j = JacobiMatrix::new(vec![0.0; 3], vec![0.0, 1.0, 2.0]);
        let g = golub_welsch(&j, 3).unwrap();
        assert!((g.nodes[2] - 3f64.sqrt()).abs() < 1e-14);
        assert!((g.weights[1] - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn dual_route_free_example() {
        let p = QHParams::<Rational>::new(rat(0, 1), rat(1, 2), rat(1, 5), rat(0, 1)).unwrap();
        let j = jacobi_from_recurrence(&p, &rat(1, 1), &rat(0, 1), 16);
        let exact = moments_from_jacobi(&j, 15).unwrap();
        let g = golub_welsch(&j.to_f64(), 8).unwrap();
        let num = g.moments(15);
        let abs = g.absolute_moments(15);
        for k in 0..=15 {
            assert!(relative_error(num[k], exact[k].to_f64(), abs[k]) < 1e-10, "k = {k}");
        }
    }

    #[test]
    fn truncated_rule_shrinks() {
        let j = JacobiMatrix::new(vec![1.0, 2.0, 3.0], vec![0.0, 0.5, 0.0]);
        let g = golub_welsch(&j, 3).unwrap();
        assert_eq!(g.order, 2);
        assert!((g.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }
}
