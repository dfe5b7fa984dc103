//! L²([0, X]) inner products on the fixed 256-node composite Gauss–Legendre
//! rule: Gram matrices, norms and least-squares projections onto spans.

use nalgebra::{DMatrix, DVector};

use crate::curvespace::Curve;
use crate::error::Result;
use crate::linalg::{least_squares, symmetric_eigenvalues};
use crate::quadrature::CompositeRule;

/// Samples of curves at the nodes of the Gram rule on [0, x_max].
#[derive(Debug, Clone)]
pub struct L2Grid {
    rule: CompositeRule,
}

impl L2Grid {
    pub fn new(x_max: f64) -> Self {
        L2Grid {
            rule: CompositeRule::gram(0.0, x_max),
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.rule.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.rule.weights
    }

    pub fn sample(&self, c: &Curve) -> Result<Vec<f64>> {
        c.eval_many(&self.rule.nodes)
    }

    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.rule
            .weights
            .iter()
            .zip(a.iter().zip(b))
            .map(|(w, (x, y))| w * x * y)
            .sum()
    }

    pub fn norm(&self, a: &[f64]) -> f64 {
        self.inner(a, a).max(0.0).sqrt()
    }

    pub fn gram(&self, samples: &[Vec<f64>]) -> DMatrix<f64> {
        let n = samples.len();
        DMatrix::from_fn(n, n, |i, j| self.inner(&samples[i], &samples[j]))
    }

    /// Least-squares projection of `target` onto span(`basis`), all given as samples.
    pub fn project(&self, target: &[f64], basis: &[Vec<f64>]) -> Result<Projection> {
        if basis.is_empty() {
            return Ok(Projection {
                coefficients: Vec::new(),
                residual: self.norm(target),
            });
        }
        let m = target.len();
        let sw: Vec<f64> = self.rule.weights.iter().map(|w| w.sqrt()).collect();
        let a = DMatrix::from_fn(m, basis.len(), |i, j| sw[i] * basis[j][i]);
        let y = DVector::from_fn(m, |i, _| sw[i] * target[i]);
        let ls = least_squares(&a, &y)?;
        let coefficients: Vec<f64> = ls.solution.clone();
        let remainder: Vec<f64> = (0..m)
            .map(|i| target[i] - basis.iter().zip(&coefficients).map(|(b, c)| c * b[i]).sum::<f64>())
            .collect();
        Ok(Projection {
            coefficients,
            residual: self.norm(&remainder),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub coefficients: Vec<f64>,
    /// L² norm of target − projection.
    pub residual: f64,
}

/// Projects `target` onto span(`basis`) in L²([0, x_max]).
pub fn project(target: &Curve, basis: &[Curve], x_max: f64) -> Result<Projection> {
    let grid = L2Grid::new(x_max);
    let t = grid.sample(target)?;
    let b = basis.iter().map(|c| grid.sample(c)).collect::<Result<Vec<_>>>()?;
    grid.project(&t, &b)
}

/// Gram matrix of `curves` in L²([0, x_max]).
pub fn gram_matrix(curves: &[Curve], x_max: f64) -> Result<DMatrix<f64>> {
    let grid = L2Grid::new(x_max);
    let s = curves.iter().map(|c| grid.sample(c)).collect::<Result<Vec<_>>>()?;
    Ok(grid.gram(&s))
}

/// Smallest and largest eigenvalue of a Gram matrix.
pub fn gram_spectrum(g: &DMatrix<f64>) -> (f64, f64) {
    let ev = symmetric_eigenvalues(g);
    (ev.first().copied().unwrap_or(0.0), ev.last().copied().unwrap_or(0.0))
}
