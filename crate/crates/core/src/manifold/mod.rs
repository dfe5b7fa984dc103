//! Linear-rational manifolds of forward curves
//! f = (c′ + ⟨z, u′⟩) / (1 − c − ⟨z, u⟩), z ∈ U, and their discount-space
//! image h = 1 − D(x)/D(0) with D = 1 − c − ⟨z, u⟩.

mod domain;
mod matrix;
mod spec;

use serde::Serialize;

pub use domain::{HalfSpace, StateDomain};
pub use matrix::Representation;
pub use spec::ManifoldSpec;

use nalgebra::{DMatrix, DVector};

use crate::curvespace::{first_nonpositive, scan_minimum, Curve, RationalCurve, POSITIVITY_STEP};
use crate::error::{Error, Result};
use crate::linalg::{least_squares, SquareMatrix};
use crate::projection::{gram_matrix, gram_spectrum};
use crate::transform::DiscountCurve;

/// Right end of the interval on which positivity and independence are checked.
pub const DEFAULT_X_MAX: f64 = 50.0;
/// Gram eigenvalue ratio below which the curves u count as dependent.
pub const INDEPENDENCE_REL: f64 = 1e-10;
const ZERO_TOL: f64 = 1e-14;
// |u_j(x)| below this is treated as an exact zero in the domain bound
const U_ZERO: f64 = 1e-15;

/// Results of the checks run when a manifold is built.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifoldChecks {
    pub dimension: usize,
    pub normalized: bool,
    pub representation: Representation,
    pub x_max: f64,
    pub gram_min_eigenvalue: f64,
    pub gram_max_eigenvalue: f64,
    /// inf over z ∈ U and x ∈ [0, x_max] of 1 − c(x) − ⟨z, u(x)⟩
    pub positivity_min: f64,
    pub positivity_argmin_x: f64,
    /// Sign check of the leading exponential term beyond x_max (exponential
    /// polynomials only).
    pub tail_positive: Option<bool>,
    /// max |(c, u) − (𝟙 − e^{xM})e₁| on the validation grid, for matrix manifolds
    pub matrix_identity_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearRationalManifold {
    c: Curve,
    u: Vec<Curve>,
    domain: StateDomain,
    matrix: Option<SquareMatrix>,
    checks: ManifoldChecks,
}

/// Outcome of [`LinearRationalManifold::fit_state`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub z: Vec<f64>,
    /// RMS of model price − observed price.
    pub residual: f64,
    pub in_domain: bool,
}

impl LinearRationalManifold {
    /// The matrix form c = 1 − (e^{xM}e₁)₁, u_j = −(e^{xM}e₁)_{j+1}.
    pub fn from_matrix(m: SquareMatrix, domain: StateDomain) -> Result<Self> {
        Self::from_matrix_with_x_max(m, domain, DEFAULT_X_MAX)
    }

    pub fn from_matrix_with_x_max(m: SquareMatrix, domain: StateDomain, x_max: f64) -> Result<Self> {
        if m.dim() < 2 {
            return Err(Error::invalid("generating matrix must be at least 2x2"));
        }
        let mc = matrix::matrix_curves(&m)?;
        let identity = Some(mc.identity_error);
        Self::build(mc.c, mc.u, domain, Some(m), mc.representation, identity, x_max)
    }

    pub fn from_curves(c: Curve, u: Vec<Curve>, domain: StateDomain) -> Result<Self> {
        Self::from_curves_with_x_max(c, u, domain, DEFAULT_X_MAX)
    }

    pub fn from_curves_with_x_max(c: Curve, u: Vec<Curve>, domain: StateDomain, x_max: f64) -> Result<Self> {
        Self::build(c, u, domain, None, Representation::Curves, None, x_max)
    }

    fn build(
        c: Curve,
        u: Vec<Curve>,
        domain: StateDomain,
        matrix: Option<SquareMatrix>,
        representation: Representation,
        matrix_identity_error: Option<f64>,
        x_max: f64,
    ) -> Result<Self> {
        if !(x_max > 0.0) || !x_max.is_finite() {
            return Err(Error::invalid("x_max must be positive and finite"));
        }
        if u.is_empty() {
            return Err(Error::invalid("a manifold needs at least one curve u"));
        }
        if domain.dim() != u.len() {
            return Err(Error::invalid(format!(
                "domain has dimension {}, but {} curves u were given",
                domain.dim(),
                u.len()
            )));
        }
        let g = gram_matrix(&u, x_max)?;
        let (lo, hi) = gram_spectrum(&g);
        if !(hi > 0.0) || lo <= INDEPENDENCE_REL * hi {
            return Err(Error::DegenerateManifold {
                min_eigenvalue: lo,
                max_eigenvalue: hi,
            });
        }
        let normalized = matrix.is_some()
            || (c.eval(0.0)?.abs() <= ZERO_TOL
                && u.iter()
                    .map(|uj| uj.eval(0.0))
                    .collect::<Result<Vec<_>>>()?
                    .iter()
                    .all(|v| v.abs() <= ZERO_TOL));
        let mut m = LinearRationalManifold {
            c,
            u,
            domain,
            matrix,
            checks: ManifoldChecks {
                dimension: 0,
                normalized,
                representation,
                x_max,
                gram_min_eigenvalue: lo,
                gram_max_eigenvalue: hi,
                positivity_min: f64::NAN,
                positivity_argmin_x: f64::NAN,
                tail_positive: None,
                matrix_identity_error,
            },
        };
        m.checks.dimension = m.dim();
        let (x, v) = scan_minimum(|x| m.worst_denominator(x).0, x_max, POSITIVITY_STEP);
        m.checks.positivity_min = v;
        m.checks.positivity_argmin_x = x;
        if !(v > 0.0) {
            let (x, value) = first_nonpositive(|x| m.worst_denominator(x).0, x_max, POSITIVITY_STEP).unwrap_or((x, v));
            let z = m.worst_denominator(x).1;
            return Err(Error::PositivityWitness { z, x, value });
        }
        m.checks.tail_positive = m.tail_sign_check();
        if let Some(false) = m.checks.tail_positive {
            let (z, value) = m.tail_witness();
            return Err(Error::PositivityWitness {
                z,
                x: f64::INFINITY,
                value,
            });
        }
        Ok(m)
    }

    /// inf over the box part of U of 1 − c(x) − ⟨z, u(x)⟩ and a state that
    /// (nearly) attains it. An infinite bound on the side that matters gives
    /// −∞ together with a state that makes the denominator negative.
    fn worst_denominator(&self, x: f64) -> (f64, Vec<f64>) {
        let c = match self.c.eval(x) {
            Ok(v) => v,
            Err(_) => return (f64::NAN, vec![0.0; self.dim()]),
        };
        let mut value = 1.0 - c;
        let mut z = vec![0.0; self.dim()];
        let mut unbounded = None;
        for (j, uj) in self.u.iter().enumerate() {
            let v = match uj.eval(x) {
                Ok(v) => v,
                Err(_) => return (f64::NAN, z),
            };
            if v.abs() <= U_ZERO {
                z[j] = finite_point(self.domain.lower()[j], self.domain.upper()[j]);
                continue;
            }
            let bound = if v > 0.0 {
                self.domain.upper()[j]
            } else {
                self.domain.lower()[j]
            };
            match bound {
                Some(b) => {
                    z[j] = b;
                    value -= b * v;
                }
                None => {
                    z[j] = finite_point(self.domain.lower()[j], self.domain.upper()[j]);
                    unbounded = Some((j, v));
                }
            }
        }
        if let Some((j, v)) = unbounded {
            // push z_j far enough that the denominator turns negative
            let rest = 1.0
                - c
                - z.iter()
                    .zip(&self.u)
                    .enumerate()
                    .filter(|(i, _)| *i != j)
                    .map(|(i, (zi, _))| zi * self.u[i].eval(x).unwrap_or(0.0))
                    .sum::<f64>();
            z[j] = (rest.abs() + 1.0) / v;
            return (f64::NEG_INFINITY, z);
        }
        (value, z)
    }

    /// For exponential-polynomial data: every corner of the box must have a
    /// denominator with positive leading term, and along infinite sides the
    /// curve u_j must eventually carry the sign that keeps D positive.
    fn tail_sign_check(&self) -> Option<bool> {
        let c = self.c.as_exppoly()?;
        let u: Vec<_> = self.u.iter().map(|uj| uj.as_exppoly()).collect::<Option<Vec<_>>>()?;
        if self.dim() > 12 {
            return None;
        }
        for corner in self.box_corners() {
            let parts: Vec<(f64, &_)> = std::iter::once((-1.0, c))
                .chain(corner.iter().zip(&u).map(|(z, uj)| (-z, *uj)))
                .collect();
            let d = crate::curvespace::ExpPolyCurve::linear_combination(1.0, &parts);
            match d.leading_term() {
                Some(t) if t.leading_coeff() > 0.0 => {}
                _ => return Some(false),
            }
        }
        for (j, uj) in u.iter().enumerate() {
            let lead = uj.leading_term().map_or(0.0, |t| t.leading_coeff());
            if self.domain.upper()[j].is_none() && lead > 0.0 {
                return Some(false);
            }
            if self.domain.lower()[j].is_none() && lead < 0.0 {
                return Some(false);
            }
        }
        Some(true)
    }

    fn tail_witness(&self) -> (Vec<f64>, f64) {
        let corners = self.box_corners();
        for corner in &corners {
            let d = self.denominator_unchecked(corner);
            if let Some(t) = d.as_exppoly().and_then(|p| p.leading_term()) {
                if t.leading_coeff() <= 0.0 {
                    return (corner.clone(), t.leading_coeff());
                }
            }
        }
        (corners.into_iter().next().unwrap_or_default(), f64::NEG_INFINITY)
    }

    // corners of the box, with infinite sides replaced by the finite bound or 0
    fn box_corners(&self) -> Vec<Vec<f64>> {
        let mut corners = vec![Vec::with_capacity(self.dim())];
        for j in 0..self.dim() {
            let opts: Vec<f64> = match (self.domain.lower()[j], self.domain.upper()[j]) {
                (Some(l), Some(h)) => vec![l, h],
                (Some(l), None) => vec![l],
                (None, Some(h)) => vec![h],
                (None, None) => vec![0.0],
            };
            corners = corners
                .into_iter()
                .flat_map(|c| {
                    opts.iter().map(move |&v| {
                        let mut c = c.clone();
                        c.push(v);
                        c
                    })
                })
                .collect();
        }
        corners
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn c(&self) -> &Curve {
        &self.c
    }

    pub fn u(&self) -> &[Curve] {
        &self.u
    }

    pub fn domain(&self) -> &StateDomain {
        &self.domain
    }

    pub fn matrix(&self) -> Option<&SquareMatrix> {
        self.matrix.as_ref()
    }

    pub fn is_normalized(&self) -> bool {
        self.checks.normalized
    }

    pub fn x_max(&self) -> f64 {
        self.checks.x_max
    }

    pub fn checks(&self) -> &ManifoldChecks {
        &self.checks
    }

    pub fn representation(&self) -> Representation {
        self.checks.representation
    }

    /// D = 1 − c − ⟨z, u⟩ for a state in U.
    pub fn denominator(&self, z: &[f64]) -> Result<Curve> {
        self.domain.check(z)?;
        Ok(self.denominator_unchecked(z))
    }

    pub(crate) fn denominator_unchecked(&self, z: &[f64]) -> Curve {
        let parts: Vec<(f64, &Curve)> = std::iter::once((-1.0, &self.c))
            .chain(z.iter().zip(&self.u).map(|(zj, uj)| (-zj, uj)))
            .collect();
        Curve::linear_combination(1.0, &parts)
    }

    /// The forward curve −D′/D at z.
    pub fn chart(&self, z: &[f64]) -> Result<Curve> {
        let d = self.denominator(z)?;
        Ok(Curve::from(RationalCurve::log_derivative_unchecked(d, self.x_max())))
    }

    /// The discount curve h = 1 − D/D(0) at z, equal to Ψ(chart(z)).
    pub fn chart_h(&self, z: &[f64]) -> Result<DiscountCurve> {
        let d = self.denominator(z)?;
        let d0 = d.eval(0.0)?;
        if !(d0 > 0.0) {
            return Err(Error::Positivity { x: 0.0, value: d0 });
        }
        let h = Curve::linear_combination(1.0, &[(-1.0 / d0, &d)]);
        Ok(DiscountCurve::new_unchecked(h, self.x_max()))
    }

    /// ∂f/∂z_j = (u_j′ D + N u_j) / D² with N = c′ + ⟨z, u′⟩ = −D′.
    pub fn tangent_basis(&self, z: &[f64]) -> Result<Vec<Curve>> {
        let d = self.denominator(z)?;
        let n = d.derivative().scale(-1.0);
        let d2 = d.mul(&d);
        Ok(self
            .u
            .iter()
            .map(|uj| {
                let num = uj.derivative().mul(&d).add(&n.mul(uj));
                Curve::from(RationalCurve::new_unchecked(num, d2.clone(), self.x_max()))
            })
            .collect())
    }

    /// ∂h/∂z_j = u_j/D(0) − D u_j(0)/D(0)²; exactly u_j when normalized.
    pub fn h_tangent_basis(&self, z: &[f64]) -> Result<Vec<Curve>> {
        if self.is_normalized() {
            self.domain.check(z)?;
            return Ok(self.u.clone());
        }
        let d = self.denominator(z)?;
        let d0 = d.eval(0.0)?;
        self.u
            .iter()
            .map(|uj| {
                let u0 = uj.eval(0.0)?;
                Ok(Curve::linear_combination(0.0, &[(1.0 / d0, uj), (-u0 / (d0 * d0), &d)]))
            })
            .collect()
    }

    /// r = f(0) for the chart at z.
    pub fn short_rate(&self, z: &[f64]) -> Result<f64> {
        self.chart(z)?.eval(0.0)
    }

    /// ⟨−Me₁, (1, z)⟩ for matrix manifolds.
    pub fn matrix_short_rate(&self, z: &[f64]) -> Option<f64> {
        let m = self.matrix.as_ref()?;
        let col: Vec<f64> = (0..m.dim()).map(|i| -m.get(i, 0)).collect();
        Some(col[0] + z.iter().zip(&col[1..]).map(|(a, b)| a * b).sum::<f64>())
    }

    /// Least-squares state for observed zero-coupon prices (x_i, P_i).
    ///
    /// Uses the linear relation P_i D(0) = D(x_i), i.e.
    /// ⟨z, u(x_i) − P_i u(0)⟩ = 1 − c(x_i) − P_i (1 − c(0)),
    /// which for normalized manifolds reads ⟨z, u(x_i)⟩ = 1 − P_i − c(x_i).
    pub fn fit_state(&self, observations: &[(f64, f64)]) -> Result<FitResult> {
        let d = self.dim();
        if observations.len() < d {
            return Err(Error::IllPosedFit(format!(
                "{} observations for {d} unknowns",
                observations.len()
            )));
        }
        for &(x, p) in observations {
            if !(x >= 0.0) || !x.is_finite() || !p.is_finite() {
                return Err(Error::invalid(format!("bad observation ({x}, {p})")));
            }
        }
        let c0 = self.c.eval(0.0)?;
        let u0: Vec<f64> = self.u.iter().map(|uj| uj.eval(0.0)).collect::<Result<_>>()?;
        let n = observations.len();
        let mut a = DMatrix::zeros(n, d);
        let mut y = DVector::zeros(n);
        for (i, &(x, p)) in observations.iter().enumerate() {
            for j in 0..d {
                a[(i, j)] = self.u[j].eval(x)? - p * u0[j];
            }
            y[i] = 1.0 - self.c.eval(x)? - p * (1.0 - c0);
        }
        let ls = least_squares(&a, &y)?;
        let z = ls.solution;
        let den = self.denominator_unchecked(&z);
        let d0 = den.eval(0.0)?;
        let mut sq = 0.0;
        for &(x, p) in observations {
            let model = den.eval(x)? / d0;
            sq += (model - p).powi(2);
        }
        Ok(FitResult {
            in_domain: self.domain.contains(&z),
            residual: (sq / n as f64).sqrt(),
            z,
        })
    }

    pub fn to_spec(&self) -> ManifoldSpec {
        ManifoldSpec::from_manifold(self)
    }
}

fn finite_point(lo: Option<f64>, hi: Option<f64>) -> f64 {
    match (lo, hi) {
        (Some(l), Some(h)) => 0.5 * (l + h),
        (Some(l), None) => l + 1.0,
        (None, Some(h)) => h - 1.0,
        (None, None) => 0.0,
    }
}
