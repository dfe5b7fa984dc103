//! Exponential polynomials x ↦ Σ_k p_k(x) e^{μ_k x}.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Coefficient cancellation threshold relative to the magnitude of the
/// contributions that were summed into it.
const CANCELLATION_REL: f64 = 1e-12;

/// Exponents closer than this (relative) are merged into one term.
const EXPONENT_MERGE_REL: f64 = 1e-12;

/// One term p(x)·e^{μx}; `coeffs[k]` multiplies x^k.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpTerm {
    pub coeffs: Vec<f64>,
    pub mu: f64,
}

impl ExpTerm {
    pub fn new(coeffs: Vec<f64>, mu: f64) -> Self {
        ExpTerm { coeffs, mu }
    }

    fn poly(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Leading polynomial coefficient (the one of highest degree).
    pub fn leading_coeff(&self) -> f64 {
        *self.coeffs.last().unwrap_or(&0.0)
    }
}

/// Σ_k p_k(x) e^{μ_k x}, terms sorted by increasing exponent with pairwise
/// distinct exponents and no identically zero polynomial.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpPolyCurve {
    terms: Vec<ExpTerm>,
}

struct Accum {
    coeffs: Vec<f64>,
    magnitude: Vec<f64>,
    mu: f64,
}

impl ExpPolyCurve {
    /// Builds the curve from arbitrary terms: equal exponents are merged,
    /// cancelled coefficients zeroed and empty terms dropped.
    pub fn new(terms: Vec<ExpTerm>) -> Result<Self> {
        for t in &terms {
            if !t.mu.is_finite() || t.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid("exponential polynomial terms must be finite"));
            }
        }
        Ok(Self::normalize(
            terms
                .into_iter()
                .map(|t| {
                    let magnitude = t.coeffs.iter().map(|c| c.abs()).collect();
                    Accum {
                        coeffs: t.coeffs,
                        magnitude,
                        mu: t.mu,
                    }
                })
                .collect(),
        ))
    }

    fn normalize(mut parts: Vec<Accum>) -> Self {
        parts.sort_by(|a, b| a.mu.partial_cmp(&b.mu).unwrap_or(Ordering::Equal));
        let mut merged: Vec<Accum> = Vec::with_capacity(parts.len());
        for p in parts {
            match merged.last_mut() {
                Some(last) if (last.mu - p.mu).abs() <= EXPONENT_MERGE_REL * last.mu.abs().max(p.mu.abs()).max(1.0) => {
                    if p.coeffs.len() > last.coeffs.len() {
                        last.coeffs.resize(p.coeffs.len(), 0.0);
                        last.magnitude.resize(p.coeffs.len(), 0.0);
                    }
                    for (k, (c, m)) in p.coeffs.iter().zip(&p.magnitude).enumerate() {
                        last.coeffs[k] += c;
                        last.magnitude[k] += m;
                    }
                }
                _ => merged.push(p),
            }
        }
        let terms = merged
            .into_iter()
            .filter_map(|mut a| {
                for (c, m) in a.coeffs.iter_mut().zip(&a.magnitude) {
                    if c.abs() <= CANCELLATION_REL * m {
                        *c = 0.0;
                    }
                }
                while a.coeffs.last() == Some(&0.0) {
                    a.coeffs.pop();
                }
                if a.coeffs.is_empty() {
                    None
                } else {
                    Some(ExpTerm::new(a.coeffs, if a.mu == 0.0 { 0.0 } else { a.mu }))
                }
            })
            .collect();
        ExpPolyCurve { terms }
    }

    pub fn zero() -> Self {
        ExpPolyCurve { terms: vec![] }
    }

    pub fn constant(c: f64) -> Self {
        Self::exponential(c, 0.0)
    }

    /// c·e^{μx}.
    pub fn exponential(c: f64, mu: f64) -> Self {
        if c == 0.0 {
            return Self::zero();
        }
        ExpPolyCurve {
            terms: vec![ExpTerm::new(vec![c], mu)],
        }
    }

    /// Polynomial Σ coeffs[k] x^k.
    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Self::new(vec![ExpTerm::new(coeffs, 0.0)]).expect("finite polynomial coefficients")
    }

    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.poly(x) * (t.mu * x).exp()).sum()
    }

    pub fn derivative(&self) -> Self {
        let parts = self
            .terms
            .iter()
            .map(|t| {
                // d/dx p e^{μx} = (p' + μ p) e^{μx}
                let n = t.coeffs.len();
                let mut out = vec![0.0; n];
                let mut mag = vec![0.0; n];
                for k in 0..n {
                    out[k] += t.mu * t.coeffs[k];
                    mag[k] += (t.mu * t.coeffs[k]).abs();
                    if k + 1 < n {
                        let d = (k + 1) as f64 * t.coeffs[k + 1];
                        out[k] += d;
                        mag[k] += d.abs();
                    }
                }
                Accum {
                    coeffs: out,
                    magnitude: mag,
                    mu: t.mu,
                }
            })
            .collect();
        Self::normalize(parts)
    }

    /// The antiderivative F with F(0) = 0.
    pub fn antiderivative(&self) -> Self {
        let mut parts = Vec::with_capacity(self.terms.len() + 1);
        for t in &self.terms {
            let n = t.coeffs.len();
            if t.mu == 0.0 {
                let mut q = vec![0.0; n + 1];
                for k in 0..n {
                    q[k + 1] = t.coeffs[k] / (k + 1) as f64;
                }
                let magnitude = q.iter().map(|c| c.abs()).collect();
                parts.push(Accum {
                    coeffs: q,
                    magnitude,
                    mu: 0.0,
                });
            } else {
                // q' + μ q = p, solved from the top degree down
                let mut q = vec![0.0; n];
                for k in (0..n).rev() {
                    let carry = if k + 1 < n { (k + 1) as f64 * q[k + 1] } else { 0.0 };
                    q[k] = (t.coeffs[k] - carry) / t.mu;
                }
                let q0 = q[0];
                let magnitude = q.iter().map(|c| c.abs()).collect();
                parts.push(Accum {
                    coeffs: q,
                    magnitude,
                    mu: t.mu,
                });
                parts.push(Accum {
                    coeffs: vec![-q0],
                    magnitude: vec![q0.abs()],
                    mu: 0.0,
                });
            }
        }
        Self::normalize(parts)
    }

    /// ∫₀ˣ of the curve in closed form.
    ///
    /// Terms with |μx| ≤ 2 use the power series of e^{μs}, which avoids the
    /// cancellation of the 1/μ^k coefficients of the antiderivative.
    pub fn integrate(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                if (t.mu * x).abs() <= 2.0 {
                    series_moment_sum(t, x)
                } else {
                    ExpPolyCurve { terms: vec![t.clone()] }.antiderivative().eval(x)
                }
            })
            .sum()
    }

    /// x ↦ curve(x + t): e^{μt} p(x + t) e^{μx}.
    pub fn shift(&self, t: f64) -> Self {
        let parts = self
            .terms
            .iter()
            .map(|term| {
                let n = term.coeffs.len();
                let mut out = vec![0.0; n];
                let mut mag = vec![0.0; n];
                let growth = (term.mu * t).exp();
                // p(x+t) = Σ_k c_k Σ_j C(k,j) t^{k-j} x^j
                for (k, &c) in term.coeffs.iter().enumerate() {
                    let mut binom = 1.0;
                    for j in (0..=k).rev() {
                        // binom = C(k, j)
                        let v = c * binom * t.powi((k - j) as i32) * growth;
                        out[j] += v;
                        mag[j] += v.abs();
                        if j > 0 {
                            binom = binom * j as f64 / (k - j + 1) as f64;
                        }
                    }
                }
                Accum {
                    coeffs: out,
                    magnitude: mag,
                    mu: term.mu,
                }
            })
            .collect();
        Self::normalize(parts)
    }

    pub fn scale(&self, a: f64) -> Self {
        if a == 0.0 {
            return Self::zero();
        }
        ExpPolyCurve {
            terms: self
                .terms
                .iter()
                .map(|t| ExpTerm::new(t.coeffs.iter().map(|c| a * c).collect(), t.mu))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::linear_combination(0.0, &[(1.0, self), (1.0, other)])
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::linear_combination(0.0, &[(1.0, self), (-1.0, other)])
    }

    /// offset + Σ wᵢ cᵢ.
    pub fn linear_combination(offset: f64, parts: &[(f64, &Self)]) -> Self {
        let mut acc = Vec::new();
        if offset != 0.0 {
            acc.push(Accum {
                coeffs: vec![offset],
                magnitude: vec![offset.abs()],
                mu: 0.0,
            });
        }
        for (w, c) in parts {
            if *w == 0.0 {
                continue;
            }
            for t in &c.terms {
                let coeffs: Vec<f64> = t.coeffs.iter().map(|v| w * v).collect();
                let magnitude = coeffs.iter().map(|v| v.abs()).collect();
                acc.push(Accum {
                    coeffs,
                    magnitude,
                    mu: t.mu,
                });
            }
        }
        Self::normalize(acc)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut parts = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let n = a.coeffs.len() + b.coeffs.len() - 1;
                let mut out = vec![0.0; n];
                let mut mag = vec![0.0; n];
                for (i, ca) in a.coeffs.iter().enumerate() {
                    for (j, cb) in b.coeffs.iter().enumerate() {
                        out[i + j] += ca * cb;
                        mag[i + j] += (ca * cb).abs();
                    }
                }
                parts.push(Accum {
                    coeffs: out,
                    magnitude: mag,
                    mu: a.mu + b.mu,
                });
            }
        }
        Self::normalize(parts)
    }

    /// The asymptotically dominant term as x → ∞ (largest exponent, then degree).
    pub fn leading_term(&self) -> Option<&ExpTerm> {
        self.terms.last()
    }

    /// Approximate structural equality: same exponents and coefficients to `tol`
    /// relative to the largest coefficient.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let diff = self.sub(other);
        let scale = self
            .terms
            .iter()
            .chain(&other.terms)
            .flat_map(|t| t.coeffs.iter())
            .fold(0.0_f64, |m, c| m.max(c.abs()))
            .max(1e-300);
        diff.terms
            .iter()
            .flat_map(|t| t.coeffs.iter())
            .all(|c| c.abs() <= tol * scale)
    }
}

// Σ_k c_k ∫₀ˣ s^k e^{μs} ds with ∫₀ˣ s^k e^{μs} ds = Σ_n μⁿ x^{n+k+1} / (n! (n+k+1))
fn series_moment_sum(t: &ExpTerm, x: f64) -> f64 {
    let mut total = 0.0;
    let mut xk = x;
    for (k, c) in t.coeffs.iter().enumerate() {
        let mut sum = 0.0;
        let mut factor = xk; // μⁿ x^{n+k+1} / n!
        for n in 0..200 {
            let term = factor / (n + k + 1) as f64;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
            factor *= t.mu * x / (n + 1) as f64;
        }
        total += c * sum;
        xk *= x;
    }
    total
}
