//! Quotients of curves with a denominator that stays positive on a declared
//! validity interval, plus the grid/bisection positivity scan they rely on.

use super::Curve;
use crate::error::{Error, Result};

/// Default right end of validity intervals and positivity scans.
pub const DEFAULT_VALIDITY: f64 = 50.0;
/// Spacing of the dense positivity scan.
pub const POSITIVITY_STEP: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct RationalCurve {
    numerator: Curve,
    denominator: Curve,
    validity: f64,
    log_derivative: bool,
}

impl RationalCurve {
    /// numerator / denominator, after checking the denominator on [0, validity].
    ///
    /// When both parts are exponential polynomials and the numerator equals
    /// −denominator′, the curve is tagged as a log-derivative so that its
    /// integral has the closed form ln(den(0)/den(x)).
    pub fn new(numerator: Curve, denominator: Curve, validity: f64) -> Result<Self> {
        check_validity(validity)?;
        ensure_positive(&denominator, validity)?;
        let log_derivative = match (numerator.as_exppoly(), denominator.as_exppoly()) {
            (Some(n), Some(d)) => n.approx_eq(&d.derivative().scale(-1.0), 1e-13),
            _ => false,
        };
        Ok(RationalCurve {
            numerator,
            denominator,
            validity,
            log_derivative,
        })
    }

    /// −den′/den, the forward curve whose discount factor is den/den(0).
    pub fn log_derivative(denominator: Curve, validity: f64) -> Result<Self> {
        check_validity(validity)?;
        ensure_positive(&denominator, validity)?;
        Ok(Self::log_derivative_unchecked(denominator, validity))
    }

    /// Skips the positivity scan; callers must have established den > 0.
    pub(crate) fn log_derivative_unchecked(denominator: Curve, validity: f64) -> Self {
        RationalCurve {
            numerator: denominator.derivative().scale(-1.0),
            denominator,
            validity,
            log_derivative: true,
        }
    }

    pub(crate) fn new_unchecked(numerator: Curve, denominator: Curve, validity: f64) -> Self {
        RationalCurve {
            numerator,
            denominator,
            validity,
            log_derivative: false,
        }
    }

    pub fn numerator(&self) -> &Curve {
        &self.numerator
    }

    pub fn denominator(&self) -> &Curve {
        &self.denominator
    }

    pub fn validity(&self) -> f64 {
        self.validity
    }

    pub fn is_log_derivative(&self) -> bool {
        self.log_derivative
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let d = self.denominator.eval(x)?;
        if !(d > 0.0) {
            return Err(Error::Positivity { x, value: d });
        }
        Ok(self.numerator.eval(x)? / d)
    }

    /// ∫₀ˣ; closed form for log-derivatives, adaptive quadrature otherwise.
    pub fn integrate(&self, x: f64) -> Result<f64> {
        if self.log_derivative {
            let d0 = self.denominator.eval(0.0)?;
            let dx = self.denominator.eval(x)?;
            if !(dx > 0.0) {
                return Err(Error::Positivity { x, value: dx });
            }
            return Ok((d0 / dx).ln());
        }
        super::adaptive_integral(|s| self.eval(s), 0.0, x)
    }

    pub fn derivative(&self) -> Self {
        let (n, d) = (&self.numerator, &self.denominator);
        let num = n.derivative().mul(d).sub(&n.mul(&d.derivative()));
        Self::new_unchecked(num, d.mul(d), self.validity)
    }

    pub fn shift(&self, t: f64) -> Result<Self> {
        Ok(RationalCurve {
            numerator: self.numerator.shift(t)?,
            denominator: self.denominator.shift(t)?,
            validity: self.validity,
            log_derivative: self.log_derivative,
        })
    }

    pub fn scale(&self, a: f64) -> Self {
        Self::new_unchecked(self.numerator.scale(a), self.denominator.clone(), self.validity)
    }
}

fn check_validity(validity: f64) -> Result<()> {
    if !(validity > 0.0) || !validity.is_finite() {
        return Err(Error::invalid("validity bound must be positive and finite"));
    }
    Ok(())
}

fn ensure_positive(den: &Curve, validity: f64) -> Result<()> {
    match first_nonpositive(|x| den.eval(x).unwrap_or(f64::NAN), validity, POSITIVITY_STEP) {
        Some((x, value)) => Err(Error::Positivity { x, value }),
        None => Ok(()),
    }
}

/// The leftmost point of [0, x_max] found where `f` is not positive (or NaN),
/// using the same sampling and refinement as [`scan_minimum`].
pub fn first_nonpositive<F>(f: F, x_max: f64, step: f64) -> Option<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let n = ((x_max / step).ceil() as usize).max(1);
    let xs: Vec<f64> = (0..=n).map(|i| (i as f64 * step).min(x_max)).collect();
    let mut vs = Vec::with_capacity(n + 1);
    for (i, &x) in xs.iter().enumerate() {
        let v = f(x);
        vs.push(v);
        if !(v > 0.0) {
            if i == 0 || v.is_nan() {
                return Some((x, v));
            }
            let (mut a, mut b) = (xs[i - 1], x);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if f(m) > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            return Some((b, f(b)));
        }
        if i >= 2 && vs[i - 1] <= vs[i - 2] && vs[i - 1] <= v {
            let (xm, vm) = golden_minimum(&f, xs[i - 2], x);
            if !(vm > 0.0) {
                return Some((xm, vm));
            }
        }
    }
    None
}

/// Smallest value of `f` on [0, x_max]: dense sampling at `step`, bisection
/// to a non-positive point across each sign change and golden-section
/// refinement around interior local minima. NaN samples are returned as-is
/// so callers treat them as violations.
pub fn scan_minimum<F>(f: F, x_max: f64, step: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let n = ((x_max / step).ceil() as usize).max(1);
    let xs: Vec<f64> = (0..=n).map(|i| (i as f64 * step).min(x_max)).collect();
    let vs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    if let Some(i) = vs.iter().position(|v| v.is_nan()) {
        return (xs[i], f64::NAN);
    }
    let mut best = (xs[0], vs[0]);
    let consider = |x: f64, v: f64, best: &mut (f64, f64)| {
        if v < best.1 {
            *best = (x, v);
        }
    };
    for i in 0..=n {
        consider(xs[i], vs[i], &mut best);
    }
    for i in 0..n {
        if vs[i] > 0.0 && vs[i + 1] <= 0.0 {
            let (mut a, mut b) = (xs[i], xs[i + 1]);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if f(m) > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            consider(b, f(b), &mut best);
        }
        if i > 0 && vs[i] <= vs[i - 1] && vs[i] <= vs[i + 1] {
            let (x, v) = golden_minimum(&f, xs[i - 1], xs[i + 1]);
            consider(x, v, &mut best);
        }
    }
    best
}

fn golden_minimum<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        if (b - a).abs() < 1e-14 {
            break;
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvespace::ExpPolyCurve;

    fn example_den(z: f64, lambda: f64) -> Curve {
        Curve::from(ExpPolyCurve::linear_combination(
            1.0,
            &[(-z, &ExpPolyCurve::exponential(1.0, lambda))],
        ))
    }

    #[test]
    fn example_forward_curve_at_zero() {
        let f = RationalCurve::log_derivative(example_den(-0.5, -1.0), 50.0).unwrap();
        assert!((f.eval(0.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn log_derivative_is_detected() {
        let den = example_den(-0.5, -1.0);
        let num = den.derivative().scale(-1.0);
        let f = RationalCurve::new(num, den, 50.0).unwrap();
        assert!(f.is_log_derivative());
    }

    #[test]
    fn closed_form_integral_agrees_with_quadrature() {
        let den = example_den(-0.5, -1.0);
        let num = den.derivative().scale(-1.0);
        let closed = RationalCurve::log_derivative(den.clone(), 50.0).unwrap();
        // a numerically different but equal numerator defeats detection
        let generic = RationalCurve::new_unchecked(num.add(&Curve::constant(0.0)), den, 50.0);
        let a = closed.integrate(1.0).unwrap();
        let b = super::super::adaptive_integral(|s| generic.eval(s), 0.0, 1.0).unwrap();
        assert!((a - b).abs() <= 1e-10);
        assert!((a - (1.5f64 / (1.0 + 0.5 * (-1.0f64).exp())).ln()).abs() < 1e-15);
    }

    #[test]
    fn vanishing_denominator_is_rejected_with_witness() {
        // 1 - 0.5 x vanishes at x = 2
        let den = Curve::from(ExpPolyCurve::polynomial(vec![1.0, -0.5]));
        match RationalCurve::log_derivative(den, 10.0) {
            Err(Error::Positivity { x, value }) => {
                assert!(value <= 0.0);
                assert!((x - 2.0).abs() < 0.02);
            }
            other => panic!("expected positivity error, got {other:?}"),
        }
    }

    #[test]
    fn scan_finds_dip_between_samples() {
        // touches -1e-9 between grid points
        let (x, v) = scan_minimum(|x| (x - 0.123_45).powi(2) - 1e-9, 1.0, 0.01);
        assert!(v < 0.0);
        assert!((x - 0.123_45).abs() < 1e-4);
    }
}
