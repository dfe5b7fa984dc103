//! Curves of the form x ↦ offset + ⟨left, e^{xM} right⟩, evaluated through
//! the matrix exponential.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{expm, SquareMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct MatExpCurve {
    offset: f64,
    left: DVector<f64>,
    right: DVector<f64>,
    generator: SquareMatrix,
}

impl MatExpCurve {
    pub fn new(offset: f64, left: Vec<f64>, generator: SquareMatrix, right: Vec<f64>) -> Result<Self> {
        let n = generator.dim();
        if left.len() != n || right.len() != n {
            return Err(Error::invalid(format!(
                "matrix-exponential curve vectors must have length {n}"
            )));
        }
        Ok(MatExpCurve {
            offset,
            left: DVector::from_vec(left),
            right: DVector::from_vec(right),
            generator,
        })
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn left(&self) -> &[f64] {
        self.left.as_slice()
    }

    pub fn right(&self) -> &[f64] {
        self.right.as_slice()
    }

    pub fn generator(&self) -> &SquareMatrix {
        &self.generator
    }

    pub fn eval(&self, x: f64) -> f64 {
        let e = expm(&(self.generator.as_matrix() * x));
        self.offset + self.left.dot(&(e * &self.right))
    }

    pub fn derivative(&self) -> Self {
        MatExpCurve {
            offset: 0.0,
            left: self.left.clone(),
            right: self.generator.as_matrix() * &self.right,
            generator: self.generator.clone(),
        }
    }

    pub fn shift(&self, t: f64) -> Self {
        let e = expm(&(self.generator.as_matrix() * t));
        MatExpCurve {
            offset: self.offset,
            left: self.left.clone(),
            right: e * &self.right,
            generator: self.generator.clone(),
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        MatExpCurve {
            offset: a * self.offset,
            left: &self.left * a,
            right: self.right.clone(),
            generator: self.generator.clone(),
        }
    }

    /// ∫₀ˣ in closed form: the upper-right block of exp(x·[[M, I], [0, 0]])
    /// equals ∫₀ˣ e^{sM} ds.
    pub fn integrate(&self, x: f64) -> f64 {
        let n = self.generator.dim();
        let mut block = DMatrix::zeros(2 * n, 2 * n);
        block.view_mut((0, 0), (n, n)).copy_from(self.generator.as_matrix());
        for i in 0..n {
            block[(i, n + i)] = 1.0;
        }
        let e = expm(&(block * x));
        let phi = e.view((0, n), (n, n)).into_owned();
        self.offset * x + self.left.dot(&(phi * &self.right))
    }
}
