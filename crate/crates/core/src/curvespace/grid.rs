//! Sampled curves with a monotone-preserving C¹ cubic Hermite interpolant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Behaviour beyond the last knot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extrapolation {
    /// Hold the last value; the end slope is clamped to zero.
    Constant,
    /// v_n · e^{−rate (x − x_n)}; the end slope is clamped to −rate·v_n.
    ExponentialDecay(f64),
}

/// C¹ cubic Hermite interpolant through `(knots, values)`.
///
/// Knot slopes are three-point estimates limited to the Fritsch–Carlson
/// region on monotone stretches (so monotone data stays monotone) and left
/// unlimited at strict local extrema of the data.
///
/// Before the first knot the curve continues linearly with the first slope,
/// which keeps it C¹ on [0, ∞).
#[derive(Debug, Clone, PartialEq)]
pub struct GridCurve {
    knots: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    extrapolation: Extrapolation,
    order: u8,
    // ∫ from the first knot to each knot of the undifferentiated interpolant
    cumulative: Vec<f64>,
}

impl GridCurve {
    pub fn new(knots: Vec<f64>, values: Vec<f64>, extrapolation: Extrapolation) -> Result<Self> {
        if knots.len() != values.len() || knots.len() < 2 {
            return Err(Error::invalid(format!(
                "grid needs >= 2 knots with matching values (got {} knots, {} values)",
                knots.len(),
                values.len()
            )));
        }
        if knots[0] < 0.0 || knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("grid knots must be nonnegative and strictly increasing"));
        }
        if knots.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::invalid("grid knots and values must be finite"));
        }
        if let Extrapolation::ExponentialDecay(rate) = extrapolation {
            if !(rate >= 0.0) || !rate.is_finite() {
                return Err(Error::invalid("exponential-decay rate must be finite and >= 0"));
            }
        }
        let slopes = monotone_slopes(&knots, &values, extrapolation);
        let mut g = GridCurve {
            knots,
            values,
            slopes,
            extrapolation,
            order: 0,
            cumulative: Vec::new(),
        };
        let mut cumulative = vec![0.0; g.knots.len()];
        for i in 1..g.knots.len() {
            cumulative[i] = cumulative[i - 1] + g.segment_integral(g.knots[i - 1], g.knots[i]);
        }
        g.cumulative = cumulative;
        Ok(g)
    }

    /// Samples `f` at `knots`.
    pub fn sample<F>(knots: Vec<f64>, f: F, extrapolation: Extrapolation) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let values = knots.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
        Self::new(knots, values, extrapolation)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn extrapolation(&self) -> Extrapolation {
        self.extrapolation
    }

    /// How many times the interpolant has been differentiated.
    pub fn derivative_order(&self) -> u8 {
        self.order
    }

    pub fn derivative(&self) -> Self {
        let mut d = self.clone();
        d.order = d.order.saturating_add(1);
        d
    }

    pub(crate) fn with_order(mut self, order: u8) -> Self {
        self.order = order;
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.order as i32;
        let n = self.knots.len();
        let (x0, xn) = (self.knots[0], self.knots[n - 1]);
        if x < x0 {
            return match k {
                0 => self.values[0] + self.slopes[0] * (x - x0),
                1 => self.slopes[0],
                _ => 0.0,
            };
        }
        if x > xn {
            let vn = self.values[n - 1];
            return match self.extrapolation {
                Extrapolation::Constant => {
                    if k == 0 {
                        vn
                    } else {
                        0.0
                    }
                }
                Extrapolation::ExponentialDecay(rate) => (-rate).powi(k) * vn * (-rate * (x - xn)).exp(),
            };
        }
        let i = match self.knots.binary_search_by(|t| t.total_cmp(&x)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i - 1,
        };
        let h = self.knots[i + 1] - self.knots[i];
        let t = (x - self.knots[i]) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        // Hermite basis derivatives in t, rescaled by h^{-k}
        let (h00, h10, h01, h11) = match k {
            0 => (
                2.0 * t.powi(3) - 3.0 * t * t + 1.0,
                t.powi(3) - 2.0 * t * t + t,
                -2.0 * t.powi(3) + 3.0 * t * t,
                t.powi(3) - t * t,
            ),
            1 => (
                6.0 * t * t - 6.0 * t,
                3.0 * t * t - 4.0 * t + 1.0,
                -6.0 * t * t + 6.0 * t,
                3.0 * t * t - 2.0 * t,
            ),
            2 => (12.0 * t - 6.0, 6.0 * t - 4.0, -12.0 * t + 6.0, 6.0 * t - 2.0),
            3 => (12.0, 6.0, -12.0, 6.0),
            _ => return 0.0,
        };
        (h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1) / h.powi(k)
    }

    /// ∫₀ˣ of the (possibly differentiated) interpolant, exact up to rounding.
    pub fn integrate(&self, x: f64) -> f64 {
        if self.order > 0 {
            let prev = self.clone().with_order(self.order - 1);
            return prev.eval(x) - prev.eval(0.0);
        }
        self.primitive(x) - self.primitive(0.0)
    }

    // ∫ from the first knot to x of the order-0 interpolant (negative for x below it)
    fn primitive(&self, x: f64) -> f64 {
        let n = self.knots.len();
        let (x0, xn) = (self.knots[0], self.knots[n - 1]);
        if x <= x0 {
            // linear piece: exact trapezoid
            let v = self.values[0] + self.slopes[0] * (x - x0);
            return -0.5 * (v + self.values[0]) * (x0 - x);
        }
        if x >= xn {
            let vn = self.values[n - 1];
            let dx = x - xn;
            let tail = match self.extrapolation {
                Extrapolation::ExponentialDecay(rate) if rate > 0.0 => vn * (-(-rate * dx).exp_m1()) / rate,
                _ => vn * dx,
            };
            return self.cumulative[n - 1] + tail;
        }
        let i = match self.knots.binary_search_by(|t| t.total_cmp(&x)) {
            Ok(i) => return self.cumulative[i],
            Err(i) => i - 1,
        };
        self.cumulative[i] + self.segment_integral(self.knots[i], x)
    }

    // 3-point Gauss–Legendre over part of one cubic segment (exact for degree 5)
    fn segment_integral(&self, a: f64, b: f64) -> f64 {
        let g = self.clone().with_order(0);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let r = (0.6f64).sqrt();
        half * (5.0 / 9.0 * g.eval(mid - half * r) + 8.0 / 9.0 * g.eval(mid) + 5.0 / 9.0 * g.eval(mid + half * r))
    }

    /// Points where the second derivative may jump.
    pub(crate) fn breakpoints(&self) -> &[f64] {
        &self.knots
    }
}

fn monotone_slopes(x: &[f64], y: &[f64], extrapolation: Extrapolation) -> Vec<f64> {
    let n = x.len();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
    let mut m = vec![0.0; n];
    m[0] = delta[0];
    for i in 1..n - 1 {
        let (dl, dr) = (delta[i - 1], delta[i]);
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        // three-point parabolic estimate
        let parabolic = (h1 * dl + h0 * dr) / (h0 + h1);
        m[i] = if dl * dr > 0.0 {
            // monotone stretch: limit to the Fritsch–Carlson region
            let bound = 3.0 * dl.abs().min(dr.abs());
            parabolic.signum() * parabolic.abs().min(bound)
        } else if dl == 0.0 || dr == 0.0 {
            0.0
        } else {
            // a strict local extremum of the data; keeping the smooth estimate
            // avoids a curvature jump at the knot
            parabolic
        };
    }
    m[n - 1] = match extrapolation {
        Extrapolation::Constant => 0.0,
        Extrapolation::ExponentialDecay(rate) => -rate * y[n - 1],
    };
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine_grid() -> GridCurve {
        let knots: Vec<f64> = (0..=200).map(|i| i as f64 * 0.05).collect();
        GridCurve::sample(knots, |x| Ok((0.7 * x).sin() + 0.1 * x), Extrapolation::Constant).unwrap()
    }

    #[test]
    fn interpolates_knots() {
        let g = sine_grid();
        for (x, v) in g.knots().iter().zip(g.values()) {
            assert!((g.eval(*x) - v).abs() < 1e-15);
        }
    }

    #[test]
    fn derivative_matches_finite_differences_on_interior_knots() {
        let g = sine_grid();
        let d = g.derivative();
        let h = 1e-5;
        for x in g.knots()[1..g.knots().len() - 1].iter().step_by(7) {
            let fd = (g.eval(x + h) - g.eval(x - h)) / (2.0 * h);
            assert!((d.eval(*x) - fd).abs() <= 1e-6, "x={x}");
        }
    }

    #[test]
    fn continuity_of_first_derivative_across_knots() {
        let g = sine_grid();
        let d = g.derivative();
        for x in g.knots()[1..g.knots().len() - 1].iter().step_by(13) {
            assert!((d.eval(x - 1e-10) - d.eval(x + 1e-10)).abs() < 1e-6);
        }
    }

    #[test]
    fn monotone_data_stays_monotone() {
        let g = GridCurve::new(
            vec![0.0, 1.0, 2.0, 3.0, 10.0],
            vec![0.0, 0.1, 0.1, 0.5, 0.6],
            Extrapolation::Constant,
        )
        .unwrap();
        let mut prev = g.eval(0.0);
        for i in 1..=1000 {
            let v = g.eval(i as f64 * 0.01);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn extrapolation_rules() {
        let g = GridCurve::new(vec![0.0, 1.0], vec![1.0, 2.0], Extrapolation::Constant).unwrap();
        assert_eq!(g.eval(5.0), 2.0);
        let e = GridCurve::new(vec![0.0, 1.0], vec![1.0, 2.0], Extrapolation::ExponentialDecay(0.5)).unwrap();
        assert!((e.eval(3.0) - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
        // slope is continuous at the last knot
        let d = e.derivative();
        assert!((d.eval(1.0 - 1e-12) - d.eval(1.0 + 1e-12)).abs() < 1e-9);
    }

    #[test]
    fn integral_matches_quadrature() {
        let g = GridCurve::new(
            vec![0.5, 1.0, 2.0, 4.0],
            vec![1.0, 0.3, 0.7, 0.2],
            Extrapolation::ExponentialDecay(0.3),
        )
        .unwrap();
        for &x in &[0.2, 0.5, 1.3, 2.0, 3.9, 7.0] {
            let brute = crate::quadrature::integrate_adaptive(|s| Ok(g.eval(s)), 0.0, x, 1e-13, 40).unwrap();
            assert!((g.integrate(x) - brute).abs() < 1e-11, "x={x}");
        }
        let d = g.derivative();
        assert!((d.integrate(3.0) - (g.eval(3.0) - g.eval(0.0))).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_knots() {
        assert!(GridCurve::new(vec![0.0], vec![1.0], Extrapolation::Constant).is_err());
        assert!(GridCurve::new(vec![0.0, 0.0], vec![1.0, 1.0], Extrapolation::Constant).is_err());
        assert!(GridCurve::new(vec![-1.0, 1.0], vec![1.0, 1.0], Extrapolation::Constant).is_err());
        assert!(GridCurve::new(vec![0.0, 1.0], vec![1.0], Extrapolation::Constant).is_err());
    }
}
