//! The weighted norm ‖h‖²_w = |h(0)|² + ∫₀^∞ |h′(x)|² e^{αx} dx.

use serde::{Deserialize, Serialize};

use super::{Curve, ExpPolyCurve, Tail};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub alpha: f64,
    #[serde(default = "default_tail_tolerance")]
    pub tail_tolerance: f64,
    #[serde(default = "default_x_cap")]
    pub x_cap: f64,
}

fn default_tail_tolerance() -> f64 {
    1e-14
}

fn default_x_cap() -> f64 {
    200.0
}

impl WeightSpec {
    pub fn new(alpha: f64) -> Result<Self> {
        Self {
            alpha,
            tail_tolerance: default_tail_tolerance(),
            x_cap: default_x_cap(),
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::invalid("weight exponent alpha must be positive"));
        }
        if !(self.tail_tolerance > 0.0) {
            return Err(Error::invalid("tail tolerance must be positive"));
        }
        if !(self.x_cap > 0.0) || !self.x_cap.is_finite() {
            return Err(Error::invalid("x_cap must be positive and finite"));
        }
        Ok(self)
    }
}

impl Default for WeightSpec {
    fn default() -> Self {
        WeightSpec {
            alpha: 1.0,
            tail_tolerance: default_tail_tolerance(),
            x_cap: default_x_cap(),
        }
    }
}

/// Spacing of the scan that locates the truncation point.
const TAIL_SCAN_STEP: f64 = 0.25;

/// ‖h‖_w, or `f64::INFINITY` when the weighted integral diverges.
///
/// Exponential polynomials are integrated in closed form. For other curves
/// the asymptotic tail decides divergence when it is known; the integral
/// is then truncated past the last scan point where the integrand still
/// reaches `tail_tolerance` (at most `x_cap`). A curve with unknown tail
/// whose integrand has not decayed by `x_cap` is reported divergent.
pub fn hw_norm(h: &Curve, w: &WeightSpec) -> Result<f64> {
    let w = w.validated()?;
    let h0 = h.eval(0.0)?;
    let d = h.derivative();
    if let Some(p) = d.as_exppoly() {
        return Ok(exppoly_weighted(p, w.alpha).map_or(f64::INFINITY, |i| (h0 * h0 + i).sqrt()));
    }
    let tail = d.tail();
    if tail_diverges(tail, w.alpha) {
        return Ok(f64::INFINITY);
    }
    let integrand = |x: f64| -> Result<f64> {
        let v = d.eval(x)?;
        Ok(v * v * (w.alpha * x).exp())
    };
    let mut last_big = None;
    let steps = (w.x_cap / TAIL_SCAN_STEP).ceil() as usize;
    for i in 0..=steps {
        let x = (i as f64 * TAIL_SCAN_STEP).min(w.x_cap);
        if integrand(x)? >= w.tail_tolerance {
            last_big = Some(i);
        }
    }
    let x_star = match last_big {
        None => 0.0,
        Some(i) if i == steps => {
            if matches!(tail, Tail::Unknown) {
                return Ok(f64::INFINITY);
            }
            w.x_cap
        }
        Some(i) => ((i + 1) as f64 * TAIL_SCAN_STEP).min(w.x_cap),
    };
    // unit panels keep the adaptive rule well-resolved on long intervals
    let mut total = 0.0;
    let mut a = 0.0;
    while a < x_star {
        let b = (a + 1.0).min(x_star);
        total += super::adaptive_integral(integrand, a, b)?;
        a = b;
    }
    Ok((h0 * h0 + total).sqrt())
}

fn tail_diverges(tail: Tail, alpha: f64) -> bool {
    match tail {
        Tail::Zero | Tail::Unknown => false,
        Tail::Exp { mu, degree } => {
            let e = 2.0 * mu + alpha;
            e > 1e-14 || (e.abs() <= 1e-14 && 2 * degree >= -1)
        }
    }
}

/// ∫₀^∞ p(x)² e^{αx} dx in closed form, `None` when divergent.
fn exppoly_weighted(p: &ExpPolyCurve, alpha: f64) -> Option<f64> {
    let integrand = p.mul(p).mul(&ExpPolyCurve::exponential(1.0, alpha));
    let mut total = 0.0;
    for term in integrand.terms() {
        if term.mu >= 0.0 {
            return None;
        }
        // ∫₀^∞ xⁿ e^{μx} dx = n! / (−μ)^{n+1}
        let rate = -term.mu;
        let mut moment = 1.0 / rate;
        for (n, c) in term.coeffs.iter().enumerate() {
            if n > 0 {
                moment *= n as f64 / rate;
            }
            total += c * moment;
        }
    }
    Some(total.max(0.0))
}
