//! Curves on [0, ∞): evaluation, differentiation, integration ∫₀ˣ, shifts
//! and the weighted norm.
//!
//! [`Curve`] is a cheap-to-clone handle over the concrete classes
//! (exponential polynomials, quotients, sampled grids, matrix-exponential
//! evaluators) and lazily composed curves. Arithmetic stays inside the
//! exponential-polynomial class whenever all operands belong to it.

mod exppoly;
mod grid;
mod json;
mod matexp;
mod norm;
mod rational;

use std::sync::Arc;

pub use exppoly::{ExpPolyCurve, ExpTerm};
pub use grid::{Extrapolation, GridCurve};
pub use matexp::MatExpCurve;
pub use norm::{hw_norm, WeightSpec};
pub use rational::{first_nonpositive, scan_minimum, RationalCurve, DEFAULT_VALIDITY, POSITIVITY_STEP};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, DEFAULT_MAX_DEPTH, DEFAULT_REL_TOL};

#[derive(Debug, Clone, PartialEq)]
pub enum Curve {
    ExpPoly(ExpPolyCurve),
    Rational(Arc<RationalCurve>),
    Grid(Arc<GridCurve>),
    MatExp(Arc<MatExpCurve>),
    Lazy(Arc<LazyCurve>),
}

/// Curves built from other curves and evaluated on demand.
#[derive(Debug, Clone, PartialEq)]
pub enum LazyCurve {
    /// offset + Σ wᵢ cᵢ
    Combination {
        offset: f64,
        parts: Vec<(f64, Curve)>,
    },
    Product(Curve, Curve),
    /// x ↦ ∫₀ˣ c
    Antiderivative(Curve),
    /// x ↦ exp(c(x))
    Exp(Curve),
    /// x ↦ c(x + t)
    Shifted(Curve, f64),
}

/// Asymptotic behaviour p(x)e^{μx} ~ x^degree e^{μx} as x → ∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// Vanishes identically beyond some point.
    Zero,
    Exp {
        mu: f64,
        degree: i32,
    },
    Unknown,
}

impl From<ExpPolyCurve> for Curve {
    fn from(c: ExpPolyCurve) -> Self {
        Curve::ExpPoly(c)
    }
}

impl From<RationalCurve> for Curve {
    fn from(c: RationalCurve) -> Self {
        Curve::Rational(Arc::new(c))
    }
}

impl From<GridCurve> for Curve {
    fn from(c: GridCurve) -> Self {
        Curve::Grid(Arc::new(c))
    }
}

impl From<MatExpCurve> for Curve {
    fn from(c: MatExpCurve) -> Self {
        Curve::MatExp(Arc::new(c))
    }
}

impl From<LazyCurve> for Curve {
    fn from(c: LazyCurve) -> Self {
        Curve::Lazy(Arc::new(c))
    }
}

pub(crate) fn adaptive_integral<F>(f: F, a: f64, b: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate_adaptive(f, a, b, DEFAULT_REL_TOL, DEFAULT_MAX_DEPTH)
}

fn check_time(x: f64, what: &str) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("{what} must be a finite time >= 0, got {x}")));
    }
    Ok(())
}

impl Curve {
    pub fn zero() -> Self {
        Curve::ExpPoly(ExpPolyCurve::zero())
    }

    pub fn constant(c: f64) -> Self {
        Curve::ExpPoly(ExpPolyCurve::constant(c))
    }

    /// c·e^{μx}.
    pub fn exponential(c: f64, mu: f64) -> Self {
        Curve::ExpPoly(ExpPolyCurve::exponential(c, mu))
    }

    pub fn as_exppoly(&self) -> Option<&ExpPolyCurve> {
        match self {
            Curve::ExpPoly(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<&RationalCurve> {
        match self {
            Curve::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// True only for the structurally zero exponential polynomial.
    pub fn is_zero(&self) -> bool {
        matches!(self, Curve::ExpPoly(p) if p.is_zero())
    }

    fn constant_value(&self) -> Option<f64> {
        let p = self.as_exppoly()?;
        match p.terms() {
            [] => Some(0.0),
            [t] if t.mu == 0.0 && t.coeffs.len() == 1 => Some(t.coeffs[0]),
            _ => None,
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        check_time(x, "evaluation point")?;
        self.value(x)
    }

    /// Evaluation without the x ≥ 0 check (x comes from a validated caller).
    fn value(&self, x: f64) -> Result<f64> {
        match self {
            Curve::ExpPoly(p) => Ok(p.eval(x)),
            Curve::Rational(r) => r.eval(x),
            Curve::Grid(g) => Ok(g.eval(x)),
            Curve::MatExp(m) => Ok(m.eval(x)),
            Curve::Lazy(l) => match l.as_ref() {
                LazyCurve::Combination { offset, parts } => {
                    let mut s = *offset;
                    for (w, c) in parts {
                        s += w * c.value(x)?;
                    }
                    Ok(s)
                }
                LazyCurve::Product(a, b) => Ok(a.value(x)? * b.value(x)?),
                LazyCurve::Antiderivative(c) => c.integrate_unchecked(x),
                LazyCurve::Exp(c) => Ok(c.value(x)?.exp()),
                LazyCurve::Shifted(c, t) => c.value(x + t),
            },
        }
    }

    /// Samples the curve, failing on the first evaluation error.
    pub fn eval_many(&self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }

    pub fn derivative(&self) -> Curve {
        match self {
            Curve::ExpPoly(p) => Curve::ExpPoly(p.derivative()),
            Curve::Rational(r) => Curve::from(r.derivative()),
            Curve::Grid(g) => Curve::from(g.derivative()),
            Curve::MatExp(m) => Curve::from(m.derivative()),
            Curve::Lazy(l) => match l.as_ref() {
                LazyCurve::Combination { parts, .. } => {
                    let ds: Vec<(f64, Curve)> = parts.iter().map(|(w, c)| (*w, c.derivative())).collect();
                    Curve::combination(0.0, ds)
                }
                LazyCurve::Product(a, b) => a.derivative().mul(b).add(&a.mul(&b.derivative())),
                LazyCurve::Antiderivative(c) => c.clone(),
                LazyCurve::Exp(c) => self.mul(&c.derivative()),
                LazyCurve::Shifted(c, t) => Curve::from(LazyCurve::Shifted(c.derivative(), *t)).simplify_shift(),
            },
        }
    }

    // a shifted curve whose inner part became an exponential polynomial can be shifted exactly
    fn simplify_shift(self) -> Curve {
        if let Curve::Lazy(l) = &self {
            if let LazyCurve::Shifted(Curve::ExpPoly(p), t) = l.as_ref() {
                return Curve::ExpPoly(p.shift(*t));
            }
        }
        self
    }

    /// x ↦ ∫₀ˣ curve.
    pub fn antiderivative(&self) -> Curve {
        match self {
            Curve::ExpPoly(p) => Curve::ExpPoly(p.antiderivative()),
            Curve::Grid(g) if g.derivative_order() > 0 => {
                let prev = g.as_ref().clone().with_order(g.derivative_order() - 1);
                let at0 = prev.eval(0.0);
                Curve::combination(-at0, vec![(1.0, Curve::from(prev))])
            }
            Curve::Lazy(l) => match l.as_ref() {
                LazyCurve::Combination { offset, parts } => {
                    let mut anti: Vec<(f64, Curve)> = parts.iter().map(|(w, c)| (*w, c.antiderivative())).collect();
                    if *offset != 0.0 {
                        anti.push((*offset, Curve::ExpPoly(ExpPolyCurve::polynomial(vec![0.0, 1.0]))));
                    }
                    Curve::combination(0.0, anti)
                }
                _ => Curve::from(LazyCurve::Antiderivative(self.clone())),
            },
            _ => Curve::from(LazyCurve::Antiderivative(self.clone())),
        }
    }

    /// ∫₀ˣ curve(s) ds: closed form where available, adaptive Gauss–Legendre
    /// otherwise.
    pub fn integrate(&self, x: f64) -> Result<f64> {
        check_time(x, "integration bound")?;
        self.integrate_unchecked(x)
    }

    fn integrate_unchecked(&self, x: f64) -> Result<f64> {
        match self {
            Curve::ExpPoly(p) => Ok(p.integrate(x)),
            Curve::Rational(r) => r.integrate(x),
            Curve::Grid(g) => Ok(g.integrate(x)),
            Curve::MatExp(m) => Ok(m.integrate(x)),
            Curve::Lazy(l) => match l.as_ref() {
                LazyCurve::Combination { offset, parts } => {
                    let mut s = offset * x;
                    for (w, c) in parts {
                        s += w * c.integrate_unchecked(x)?;
                    }
                    Ok(s)
                }
                LazyCurve::Shifted(c, t) => Ok(c.integrate_unchecked(x + t)? - c.integrate_unchecked(*t)?),
                _ => self.quadrature(x),
            },
        }
    }

    fn quadrature(&self, x: f64) -> Result<f64> {
        let breaks = self.breakpoints(x);
        let mut total = 0.0;
        let mut a = 0.0;
        for b in breaks.into_iter().chain(std::iter::once(x)) {
            if b > a {
                total += adaptive_integral(|s| self.value(s), a, b)?;
                a = b;
            }
        }
        Ok(total)
    }

    // knots of any grid inside the expression tree that lie in (0, x)
    fn breakpoints(&self, x: f64) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breakpoints(0.0, x, &mut out);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn collect_breakpoints(&self, shift: f64, x: f64, out: &mut Vec<f64>) {
        match self {
            Curve::Grid(g) => out.extend(g.breakpoints().iter().map(|k| k - shift).filter(|&k| k > 0.0 && k < x)),
            Curve::Rational(r) => {
                r.numerator().collect_breakpoints(shift, x, out);
                r.denominator().collect_breakpoints(shift, x, out);
            }
            Curve::Lazy(l) => match l.as_ref() {
                LazyCurve::Combination { parts, .. } => {
                    for (_, c) in parts {
                        c.collect_breakpoints(shift, x, out);
                    }
                }
                LazyCurve::Product(a, b) => {
                    a.collect_breakpoints(shift, x, out);
                    b.collect_breakpoints(shift, x, out);
                }
                LazyCurve::Antiderivative(c) | LazyCurve::Exp(c) => c.collect_breakpoints(shift, x, out),
                LazyCurve::Shifted(c, t) => c.collect_breakpoints(shift + t, x, out),
            },
            _ => {}
        }
    }

    /// The semigroup action x ↦ curve(x + t).
    pub fn shift(&self, t: f64) -> Result<Curve> {
        check_time(t, "shift")?;
        if t == 0.0 {
            return Ok(self.clone());
        }
        Ok(match self {
            Curve::ExpPoly(p) => Curve::ExpPoly(p.shift(t)),
            Curve::Rational(r) => Curve::from(r.shift(t)?),
            Curve::MatExp(m) => Curve::from(m.shift(t)),
            Curve::Grid(_) => Curve::from(LazyCurve::Shifted(self.clone(), t)),
            Curve::Lazy(l) => match l.as_ref() {
                LazyCurve::Combination { offset, parts } => {
                    let shifted = parts
                        .iter()
                        .map(|(w, c)| Ok((*w, c.shift(t)?)))
                        .collect::<Result<Vec<_>>>()?;
                    Curve::combination(*offset, shifted)
                }
                LazyCurve::Product(a, b) => a.shift(t)?.mul(&b.shift(t)?),
                LazyCurve::Exp(c) => c.shift(t)?.exp(),
                LazyCurve::Shifted(c, s) => Curve::from(LazyCurve::Shifted(c.clone(), s + t)),
                LazyCurve::Antiderivative(_) => Curve::from(LazyCurve::Shifted(self.clone(), t)),
            },
        })
    }

    pub fn scale(&self, a: f64) -> Curve {
        if a == 1.0 {
            return self.clone();
        }
        match self {
            Curve::ExpPoly(p) => Curve::ExpPoly(p.scale(a)),
            Curve::MatExp(m) => Curve::from(m.scale(a)),
            Curve::Rational(r) => Curve::from(r.scale(a)),
            _ => Curve::combination(0.0, vec![(a, self.clone())]),
        }
    }

    pub fn add(&self, other: &Curve) -> Curve {
        Curve::linear_combination(0.0, &[(1.0, self), (1.0, other)])
    }

    pub fn sub(&self, other: &Curve) -> Curve {
        Curve::linear_combination(0.0, &[(1.0, self), (-1.0, other)])
    }

    /// offset + Σ wᵢ cᵢ.
    pub fn linear_combination(offset: f64, parts: &[(f64, &Curve)]) -> Curve {
        Curve::combination(offset, parts.iter().map(|(w, c)| (*w, (*c).clone())).collect())
    }

    fn combination(mut offset: f64, parts: Vec<(f64, Curve)>) -> Curve {
        // flatten nested combinations and fold exponential polynomials together
        let mut poly = ExpPolyCurve::zero();
        let mut rest: Vec<(f64, Curve)> = Vec::new();
        let mut stack: Vec<(f64, Curve)> = parts.into_iter().rev().collect();
        while let Some((w, c)) = stack.pop() {
            if w == 0.0 {
                continue;
            }
            match &c {
                Curve::ExpPoly(p) => {
                    poly = ExpPolyCurve::linear_combination(0.0, &[(1.0, &poly), (w, p)]);
                }
                Curve::Lazy(l) => match l.as_ref() {
                    LazyCurve::Combination { offset: o, parts } => {
                        offset += w * o;
                        for (v, inner) in parts.iter().rev() {
                            stack.push((w * v, inner.clone()));
                        }
                    }
                    _ => rest.push((w, c)),
                },
                _ => rest.push((w, c)),
            }
        }
        let poly = ExpPolyCurve::linear_combination(offset, &[(1.0, &poly)]);
        if rest.is_empty() {
            return Curve::ExpPoly(poly);
        }
        let (offset, mut parts) = match poly.terms() {
            [] => (0.0, Vec::new()),
            [t] if t.mu == 0.0 && t.coeffs.len() == 1 => (t.coeffs[0], Vec::new()),
            _ => (0.0, vec![(1.0, Curve::ExpPoly(poly))]),
        };
        parts.extend(rest);
        if offset == 0.0 && parts.len() == 1 && parts[0].0 == 1.0 {
            return parts.pop().map(|(_, c)| c).unwrap_or_else(Curve::zero);
        }
        Curve::from(LazyCurve::Combination { offset, parts })
    }

    pub fn mul(&self, other: &Curve) -> Curve {
        if let (Curve::ExpPoly(a), Curve::ExpPoly(b)) = (self, other) {
            return Curve::ExpPoly(a.mul(b));
        }
        if let Some(c) = self.constant_value() {
            return other.scale(c);
        }
        if let Some(c) = other.constant_value() {
            return self.scale(c);
        }
        Curve::from(LazyCurve::Product(self.clone(), other.clone()))
    }

    /// x ↦ exp(curve(x)).
    pub fn exp(&self) -> Curve {
        if let Some(c) = self.constant_value() {
            return Curve::constant(c.exp());
        }
        Curve::from(LazyCurve::Exp(self.clone()))
    }

    /// numerator / denominator with the denominator checked positive on [0, validity].
    pub fn quotient(numerator: &Curve, denominator: &Curve, validity: f64) -> Result<Curve> {
        if let Some(c) = denominator.constant_value() {
            if c > 0.0 {
                return Ok(numerator.scale(1.0 / c));
            }
        }
        RationalCurve::new(numerator.clone(), denominator.clone(), validity).map(Curve::from)
    }

    /// Leading asymptotic behaviour, when it can be read off the structure.
    pub fn tail(&self) -> Tail {
        match self {
            Curve::ExpPoly(p) => match p.leading_term() {
                None => Tail::Zero,
                Some(t) => Tail::Exp {
                    mu: t.mu,
                    degree: t.degree() as i32,
                },
            },
            Curve::Rational(r) => match (r.numerator().tail(), r.denominator().tail()) {
                (Tail::Zero, _) => Tail::Zero,
                (Tail::Exp { mu: a, degree: p }, Tail::Exp { mu: b, degree: q }) => Tail::Exp {
                    mu: a - b,
                    degree: p - q,
                },
                _ => Tail::Unknown,
            },
            Curve::Grid(g) => {
                let last = *g.values().last().unwrap_or(&0.0);
                match g.extrapolation() {
                    Extrapolation::Constant if g.derivative_order() > 0 || last == 0.0 => Tail::Zero,
                    Extrapolation::Constant => Tail::Exp { mu: 0.0, degree: 0 },
                    Extrapolation::ExponentialDecay(rate) => {
                        if last == 0.0 || (rate == 0.0 && g.derivative_order() > 0) {
                            Tail::Zero
                        } else {
                            Tail::Exp { mu: -rate, degree: 0 }
                        }
                    }
                }
            }
            Curve::MatExp(_) => Tail::Unknown,
            Curve::Lazy(l) => match l.as_ref() {
                LazyCurve::Combination { offset, parts } => {
                    let mut tails: Vec<Tail> = parts.iter().map(|(_, c)| c.tail()).collect();
                    if *offset != 0.0 {
                        tails.push(Tail::Exp { mu: 0.0, degree: 0 });
                    }
                    dominant(&tails)
                }
                LazyCurve::Product(a, b) => match (a.tail(), b.tail()) {
                    (Tail::Zero, _) | (_, Tail::Zero) => Tail::Zero,
                    (Tail::Exp { mu: m1, degree: d1 }, Tail::Exp { mu: m2, degree: d2 }) => Tail::Exp {
                        mu: m1 + m2,
                        degree: d1 + d2,
                    },
                    _ => Tail::Unknown,
                },
                LazyCurve::Shifted(c, _) => c.tail(),
                _ => Tail::Unknown,
            },
        }
    }

    /// Resamples onto a grid curve with the given knots.
    pub fn to_grid(&self, knots: Vec<f64>, extrapolation: Extrapolation) -> Result<GridCurve> {
        GridCurve::sample(knots, |x| self.eval(x), extrapolation)
    }

    /// max |self − other| over `n + 1` equally spaced points of [a, b].
    pub fn sup_distance(&self, other: &Curve, a: f64, b: f64, n: usize) -> Result<f64> {
        let mut worst = 0.0_f64;
        for i in 0..=n {
            let x = a + (b - a) * i as f64 / n as f64;
            worst = worst.max((self.eval(x)? - other.eval(x)?).abs());
        }
        Ok(worst)
    }
}

// largest (μ, degree) among the tails; ties between distinct parts may cancel
fn dominant(tails: &[Tail]) -> Tail {
    let mut best: Option<(f64, i32)> = None;
    let mut tie = false;
    for t in tails {
        match *t {
            Tail::Unknown => return Tail::Unknown,
            Tail::Zero => {}
            Tail::Exp { mu, degree } => match best {
                None => best = Some((mu, degree)),
                Some((bm, bd)) => {
                    if (mu - bm).abs() <= 1e-12 * mu.abs().max(1.0) {
                        if degree == bd {
                            tie = true;
                        } else if degree > bd {
                            best = Some((mu, degree));
                            tie = false;
                        }
                    } else if mu > bm {
                        best = Some((mu, degree));
                        tie = false;
                    }
                }
            },
        }
    }
    match (best, tie) {
        (None, _) => Tail::Zero,
        (Some(_), true) => Tail::Unknown,
        (Some((mu, degree)), false) => Tail::Exp { mu, degree },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn example_forward() -> Curve {
        let den = ExpPolyCurve::linear_combination(1.0, &[(0.5, &ExpPolyCurve::exponential(1.0, -1.0))]);
        Curve::from(RationalCurve::log_derivative(Curve::from(den), 50.0).unwrap())
    }

    fn sine_grid() -> Curve {
        let knots: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1).collect();
        Curve::from(GridCurve::sample(knots, |x| Ok(0.02 + 0.01 * (0.8 * x).sin()), Extrapolation::Constant).unwrap())
    }

    #[test]
    fn trivial_evaluations() {
        assert_eq!(Curve::constant(0.03).eval(2.0).unwrap(), 0.03);
        assert_eq!(Curve::exponential(1.0, -0.5).eval(0.0).unwrap(), 1.0);
        assert!((example_forward().eval(0.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(Curve::constant(1.0).eval(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn trivial_derivatives_and_integrals() {
        assert!(Curve::constant(0.03).derivative().is_zero());
        let d = Curve::exponential(1.0, -1.0).derivative();
        assert_eq!(d, Curve::exponential(-1.0, -1.0));
        assert!((Curve::constant(0.03).integrate(2.0).unwrap() - 0.06).abs() < 1e-16);
        let v = Curve::exponential(1.0, -1.0).integrate(1.0).unwrap();
        assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn shift_identity_and_exponential_law() {
        let f = example_forward();
        assert_eq!(f.shift(0.0).unwrap(), f);
        let e = Curve::exponential(1.0, -0.7).shift(2.0).unwrap();
        assert_eq!(e, Curve::exponential((-1.4f64).exp(), -0.7));
        assert!(f.shift(-1.0).is_err());
        let g = sine_grid();
        let gs = g.shift(1.25).unwrap();
        for &x in &[0.0, 0.3, 4.0, 9.0] {
            assert!((gs.eval(x).unwrap() - g.eval(x + 1.25).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn lazy_integrals_match_closed_forms() {
        // ∫₀ˣ e^{-F(s)} f(s) ds = 1 - e^{-F(x)} for F = ∫f
        let f = sine_grid();
        let integrand = f.antiderivative().scale(-1.0).exp().mul(&f);
        for &x in &[0.5, 3.3, 10.0, 12.0] {
            let exact = 1.0 - (-f.integrate(x).unwrap()).exp();
            assert!((integrand.integrate(x).unwrap() - exact).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn lazy_derivatives_match_finite_differences() {
        let f = example_forward();
        let g = f.antiderivative().exp().mul(&sine_grid());
        let d = g.derivative();
        let h = 1e-5;
        for &x in &[0.5, 2.05, 7.0] {
            let fd = (g.eval(x + h).unwrap() - g.eval(x - h).unwrap()) / (2.0 * h);
            assert!((d.eval(x).unwrap() - fd).abs() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn integral_is_differentiable_in_its_bound() {
        let h = 1e-5;
        for c in [example_forward(), sine_grid(), Curve::exponential(2.0, -0.3)] {
            for &x in &[0.7, 3.0, 8.0] {
                let fd = (c.integrate(x + h).unwrap() - c.integrate(x - h).unwrap()) / (2.0 * h);
                assert!((fd - c.eval(x).unwrap()).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn resampling_converges_locally_uniformly() {
        let c = Curve::from(
            ExpPolyCurve::new(vec![
                ExpTerm::new(vec![0.02, 0.01], -0.3),
                ExpTerm::new(vec![0.01], 0.0),
            ])
            .unwrap(),
        );
        let mut prev = f64::INFINITY;
        for &n in &[20usize, 80, 320] {
            let knots: Vec<f64> = (0..=n).map(|i| 10.0 * i as f64 / n as f64).collect();
            let h = 10.0 / n as f64;
            let g = Curve::from(c.to_grid(knots, Extrapolation::Constant).unwrap());
            let err = g.sup_distance(&c, 0.0, 10.0, 2000).unwrap();
            // monotone Hermite interpolation error is O(h²) with the curve's curvature scale
            assert!(err <= 0.01 * h * h + 1e-12, "n={n} err={err}");
            assert!(err < prev);
            prev = err;
        }
    }

    #[test]
    fn smart_constructors_stay_in_closed_form() {
        let a = Curve::exponential(1.0, -0.5);
        let b = Curve::constant(2.0);
        assert!(a.mul(&b).as_exppoly().is_some());
        assert!(Curve::linear_combination(1.0, &[(2.0, &a), (-1.0, &b)])
            .as_exppoly()
            .is_some());
        assert!(b.exp().as_exppoly().is_some());
        let g = sine_grid();
        assert_eq!(g.scale(1.0), g);
        assert_eq!(Curve::linear_combination(0.0, &[(1.0, &g)]), g);
    }

    #[test]
    fn tails() {
        assert_eq!(Curve::zero().tail(), Tail::Zero);
        assert_eq!(Curve::exponential(3.0, -0.2).tail(), Tail::Exp { mu: -0.2, degree: 0 });
        assert_eq!(example_forward().tail(), Tail::Exp { mu: -1.0, degree: 0 });
        let a = Curve::exponential(1.0, -0.1);
        let g = sine_grid();
        assert_eq!(g.add(&a).tail(), Tail::Exp { mu: 0.0, degree: 0 });
    }

    fn arb_exppoly() -> impl Strategy<Value = Curve> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -2.0f64..0.0), 1..4).prop_map(|v| {
            let terms = v.into_iter().map(|(a, b, mu)| ExpTerm::new(vec![a, b], mu)).collect();
            Curve::from(ExpPolyCurve::new(terms).unwrap())
        })
    }

    proptest! {
        #[test]
        fn integral_is_linear(c1 in arb_exppoly(), a in -2.0f64..2.0, b in -2.0f64..2.0, x in 0.0f64..10.0) {
            let g = sine_grid();
            let lhs = Curve::linear_combination(0.0, &[(a, &c1), (b, &g)]).integrate(x).unwrap();
            let rhs = a * c1.integrate(x).unwrap() + b * g.integrate(x).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10);
        }

        #[test]
        fn shifts_compose(c in arb_exppoly(), s in 0.0f64..3.0, t in 0.0f64..3.0) {
            let lhs = c.shift(s).unwrap().shift(t).unwrap();
            let rhs = c.shift(s + t).unwrap();
            for i in 0..=20 {
                let x = i as f64 * 0.5;
                let (l, r) = (lhs.eval(x).unwrap(), rhs.eval(x).unwrap());
                prop_assert!((l - r).abs() <= 1e-12 * r.abs().max(1.0));
            }
        }

        #[test]
        fn antiderivative_inverts_derivative(c in arb_exppoly(), x in 0.0f64..20.0) {
            let back = c.antiderivative().derivative();
            prop_assert!((back.eval(x).unwrap() - c.eval(x).unwrap()).abs() <= 1e-10);
        }
    }
}
