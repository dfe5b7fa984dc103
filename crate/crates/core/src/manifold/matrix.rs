//! (c, u)(x) = (𝟙 − e^{xM})e₁ as curves: exponential polynomials from the
//! spectrum of M (Putzer's algorithm), or matrix-exponential evaluators
//! when the spectrum is complex or clustered.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::curvespace::{Curve, ExpPolyCurve, MatExpCurve};
use crate::error::Result;
use crate::linalg::{expm, SquareMatrix};

/// Eigenvalues closer than this (relative) are treated as one repeated value.
const MERGE_REL: f64 = 1e-12;
/// Distinct eigenvalues closer than this make the closed form ill-conditioned.
const MIN_GAP: f64 = 1e-8;
/// Points where the closed form is compared with the Padé exponential.
const CHECK_POINTS: [f64; 8] = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0];
const CHECK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    /// Closed-form exponential polynomials.
    ExpPoly,
    /// Evaluated through the matrix exponential.
    MatExp,
    /// Supplied curves without a generating matrix.
    Curves,
}

pub(crate) struct MatrixCurves {
    pub c: Curve,
    pub u: Vec<Curve>,
    pub representation: Representation,
    /// max over the check points of |closed form − Padé| (0 for the evaluator form)
    pub identity_error: f64,
}

pub(crate) fn matrix_curves(m: &SquareMatrix) -> Result<MatrixCurves> {
    let n = m.dim();
    if let Some(lambdas) = real_spectrum(m.as_matrix()) {
        let comps = putzer_first_column(m.as_matrix(), &lambdas);
        let err = closed_form_error(m.as_matrix(), &comps);
        if err.is_finite() && err <= CHECK_TOL {
            let c = Curve::from(ExpPolyCurve::linear_combination(1.0, &[(-1.0, &comps[0])]));
            let u = comps[1..].iter().map(|p| Curve::from(p.scale(-1.0))).collect();
            return Ok(MatrixCurves {
                c,
                u,
                representation: Representation::ExpPoly,
                identity_error: err,
            });
        }
        log::debug!("closed form of e^(xM) failed validation (error {err:.3e}); using evaluator");
    }
    let e = |i: usize| {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    };
    let neg_e = |i: usize| {
        let mut v = vec![0.0; n];
        v[i] = -1.0;
        v
    };
    let c = Curve::from(MatExpCurve::new(1.0, neg_e(0), m.clone(), e(0))?);
    let u = (1..n)
        .map(|j| MatExpCurve::new(0.0, neg_e(j), m.clone(), e(0)).map(Curve::from))
        .collect::<Result<Vec<_>>>()?;
    Ok(MatrixCurves {
        c,
        u,
        representation: Representation::MatExp,
        identity_error: 0.0,
    })
}

/// Real eigenvalues with multiplicity (clusters merged to one value), or
/// `None` when they are complex or too closely spaced.
fn real_spectrum(a: &DMatrix<f64>) -> Option<Vec<f64>> {
    let n = a.nrows();
    let lower = (0..n).all(|i| (i + 1..n).all(|j| a[(i, j)] == 0.0));
    let upper = (0..n).all(|i| (0..i).all(|j| a[(i, j)] == 0.0));
    let mut lambdas: Vec<f64> = if lower || upper {
        (0..n).map(|i| a[(i, i)]).collect()
    } else {
        let scale = a.abs().max().max(1.0);
        let ev = a.clone().complex_eigenvalues();
        if ev.iter().any(|z| z.im.abs() > 1e-12 * scale) {
            return None;
        }
        ev.iter().map(|z| z.re).collect()
    };
    lambdas.sort_by(f64::total_cmp);
    // merge clusters to their mean so repeated roots cancel exactly
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && (lambdas[j] - lambdas[i]).abs() <= MERGE_REL * lambdas[i].abs().max(1.0) {
            j += 1;
        }
        let mean = lambdas[i..j].iter().sum::<f64>() / (j - i) as f64;
        out.extend(std::iter::repeat_n(mean, j - i));
        i = j;
    }
    let mut distinct = out.clone();
    distinct.dedup();
    if distinct.windows(2).any(|w| w[1] - w[0] < MIN_GAP) {
        return None;
    }
    Some(out)
}

/// Components of e^{xM}e₁ = Σₖ r_{k+1}(x) Pₖe₁ with P₀ = I,
/// Pₖ = Π_{j≤k}(M − λⱼI), r₁ = e^{λ₁x}, r_{k+1} = ∫₀ˣ e^{λ_{k+1}(x−s)} r_k(s) ds.
fn putzer_first_column(a: &DMatrix<f64>, lambdas: &[f64]) -> Vec<ExpPolyCurve> {
    let n = a.nrows();
    let mut r = vec![ExpPolyCurve::exponential(1.0, lambdas[0])];
    for k in 1..n {
        let mu = lambdas[k];
        let inner = ExpPolyCurve::exponential(1.0, -mu).mul(&r[k - 1]).antiderivative();
        r.push(ExpPolyCurve::exponential(1.0, mu).mul(&inner));
    }
    let mut p = DVector::from_fn(n, |i, _| if i == 0 { 1.0 } else { 0.0 });
    let mut columns = Vec::with_capacity(n);
    for (k, &lam) in lambdas.iter().enumerate().take(n) {
        columns.push(p.clone());
        if k + 1 < n {
            p = a * &p - &p * lam;
        }
    }
    (0..n)
        .map(|i| {
            let parts: Vec<(f64, &ExpPolyCurve)> = (0..n).map(|k| (columns[k][i], &r[k])).collect();
            ExpPolyCurve::linear_combination(0.0, &parts)
        })
        .collect()
}

fn closed_form_error(a: &DMatrix<f64>, comps: &[ExpPolyCurve]) -> f64 {
    let mut worst = 0.0_f64;
    for &x in &CHECK_POINTS {
        let e = expm(&(a * x));
        for (i, p) in comps.iter().enumerate() {
            let v = e[(i, 0)];
            let rel = (p.eval(x) - v).abs() / v.abs().max(1.0);
            if !rel.is_finite() {
                return f64::INFINITY;
            }
            worst = worst.max(rel);
        }
    }
    worst
}
