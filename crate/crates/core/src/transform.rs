//! Forward curves ↔ discount curves: h = Ψf = 1 − exp(−∫₀^· f), bond
//! prices P(x) = 1 − h(x) and the short rate f(0).

use crate::curvespace::{first_nonpositive, Curve, RationalCurve, DEFAULT_VALIDITY, POSITIVITY_STEP};
use crate::error::{Error, Result};

/// h with h(0) = 0 and 1 − h > 0 on [0, validity].
#[derive(Debug, Clone, PartialEq)]
pub struct DiscountCurve {
    h: Curve,
    // the curve as given and its value at 0; evaluation subtracts the value
    // so that h(0) = 0 holds exactly in floating point
    raw: Curve,
    anchor: f64,
    validity: f64,
}

impl DiscountCurve {
    /// Wraps `h − h(0)` after checking 1 − h > 0 on [0, validity].
    pub fn new(h: Curve, validity: f64) -> Result<Self> {
        if !(validity > 0.0) || !validity.is_finite() {
            return Err(Error::invalid("validity bound must be positive and finite"));
        }
        let anchor = h.eval(0.0)?;
        let d = DiscountCurve {
            h: Curve::linear_combination(-anchor, &[(1.0, &h)]),
            raw: h,
            anchor,
            validity,
        };
        let price = |x: f64| d.price(x).unwrap_or(f64::NAN);
        if let Some((x, value)) = first_nonpositive(price, validity, POSITIVITY_STEP) {
            return Err(Error::Positivity { x, value });
        }
        Ok(d)
    }

    /// For curves with 1 − h > 0 known by construction.
    pub(crate) fn new_unchecked(h: Curve, validity: f64) -> Self {
        let anchor = h.eval(0.0).unwrap_or(0.0);
        DiscountCurve {
            h: Curve::linear_combination(-anchor, &[(1.0, &h)]),
            raw: h,
            anchor,
            validity,
        }
    }

    pub fn curve(&self) -> &Curve {
        &self.h
    }

    pub fn into_curve(self) -> Curve {
        self.h
    }

    pub fn validity(&self) -> f64 {
        self.validity
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.raw.eval(x)? - self.anchor)
    }

    /// The zero-coupon price 1 − h(x).
    pub fn price(&self, x: f64) -> Result<f64> {
        Ok(1.0 - self.eval(x)?)
    }

    /// h′(0), which equals the short rate of Ψ⁻¹h because h(0) = 0.
    pub fn short_rate(&self) -> Result<f64> {
        self.h.derivative().eval(0.0)
    }
}

/// Ψf. Log-derivative quotients f = −den′/den map to the closed form
/// 1 − den/den(0); all other curves go through 1 − exp(−∫₀^· f).
pub fn psi(f: &Curve) -> Result<DiscountCurve> {
    psi_with_validity(f, validity_of(f))
}

pub fn psi_with_validity(f: &Curve, validity: f64) -> Result<DiscountCurve> {
    if let Some(r) = f.as_rational().filter(|r| r.is_log_derivative()) {
        let den = r.denominator();
        let d0 = den.eval(0.0)?;
        if !(d0 > 0.0) {
            return Err(Error::Positivity { x: 0.0, value: d0 });
        }
        let h = Curve::linear_combination(1.0, &[(-1.0 / d0, den)]);
        return Ok(DiscountCurve::new_unchecked(h, validity));
    }
    let h = Curve::linear_combination(1.0, &[(-1.0, &f.antiderivative().scale(-1.0).exp())]);
    // a failing integral shows up here rather than at first use
    h.eval(validity)?;
    Ok(DiscountCurve::new_unchecked(h, validity))
}

fn validity_of(f: &Curve) -> f64 {
    f.as_rational().map_or(DEFAULT_VALIDITY, |r| r.validity())
}

/// Ψ⁻¹h = h′/(1 − h), the log-derivative of the price curve 1 − h.
pub fn psi_inverse(h: &DiscountCurve) -> Curve {
    let price = Curve::linear_combination(1.0, &[(-1.0, h.curve())]);
    if price.derivative().is_zero() {
        return Curve::zero();
    }
    Curve::from(RationalCurve::log_derivative_unchecked(price, h.validity()))
}

/// P(x) = exp(−∫₀ˣ f).
pub fn bond_price(f: &Curve, x: f64) -> Result<f64> {
    Ok((-f.integrate(x)?).exp())
}

/// r = f(0).
pub fn short_rate(f: &Curve) -> Result<f64> {
    f.eval(0.0)
}
