//! No-arbitrage drift in forward and discount coordinates, tangential
//! diffusions on a manifold, and the consistent factor drift for
//! matrix-form manifolds.

use serde::{Deserialize, Serialize};

use crate::curvespace::Curve;
use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::manifold::LinearRationalManifold;
use crate::projection::L2Grid;
use crate::transform::DiscountCurve;

/// β(x) = Σⱼ σⱼ(x) ∫₀ˣ σⱼ.
pub fn hjm_drift(sigma: &[Curve]) -> Curve {
    let terms: Vec<Curve> = sigma.iter().map(|s| s.mul(&s.antiderivative())).collect();
    let parts: Vec<(f64, &Curve)> = terms.iter().map(|t| (1.0, t)).collect();
    Curve::linear_combination(0.0, &parts)
}

/// β^h(x) = (h(x) − 1) h′(0).
pub fn h_drift(h: &DiscountCurve) -> Result<Curve> {
    let r = h.short_rate()?;
    Ok(Curve::linear_combination(-r, &[(r, h.curve())]))
}

/// Σ^h_j(x) = (1 − h(x)) ∫₀ˣ σⱼ.
pub fn h_sigma(sigma: &[Curve], h: &DiscountCurve) -> Vec<Curve> {
    let price = Curve::linear_combination(1.0, &[(-1.0, h.curve())]);
    sigma.iter().map(|s| price.mul(&s.antiderivative())).collect()
}

/// σⱼ(x) = ∂ₓ[e^{∫₀ˣ f} Σ^h_j(x)] = e^{∫₀ˣ f}(f Σ^h_j + Σ^h_j′).
pub fn sigma_from_h(f: &Curve, h_sigma: &[Curve]) -> Vec<Curve> {
    let growth = f.antiderivative().exp();
    h_sigma
        .iter()
        .map(|s| {
            if s.is_zero() {
                return Curve::zero();
            }
            growth.mul(&f.mul(s).add(&s.derivative()))
        })
        .collect()
}

/// Product over axes of a C² quintic ramp: 1 on the inner box, 0 outside the
/// outer box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BumpJson", into = "BumpJson")]
pub struct BumpFunction {
    inner_lower: Vec<f64>,
    inner_upper: Vec<f64>,
    outer_lower: Vec<f64>,
    outer_upper: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxJson {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BumpJson {
    inner: BoxJson,
    outer: BoxJson,
}

impl TryFrom<BumpJson> for BumpFunction {
    type Error = Error;

    fn try_from(j: BumpJson) -> Result<Self> {
        BumpFunction::new(j.inner.lower, j.inner.upper, j.outer.lower, j.outer.upper)
    }
}

impl From<BumpFunction> for BumpJson {
    fn from(b: BumpFunction) -> Self {
        BumpJson {
            inner: BoxJson {
                lower: b.inner_lower,
                upper: b.inner_upper,
            },
            outer: BoxJson {
                lower: b.outer_lower,
                upper: b.outer_upper,
            },
        }
    }
}

// 6t⁵ − 15t⁴ + 10t³: C² with vanishing first and second derivative at 0 and 1
fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (t * (6.0 * t - 15.0) + 10.0)
}

impl BumpFunction {
    pub fn new(
        inner_lower: Vec<f64>,
        inner_upper: Vec<f64>,
        outer_lower: Vec<f64>,
        outer_upper: Vec<f64>,
    ) -> Result<Self> {
        let d = inner_lower.len();
        if d == 0
            || [inner_upper.len(), outer_lower.len(), outer_upper.len()]
                .iter()
                .any(|&n| n != d)
        {
            return Err(Error::invalid("bump boxes must be non-empty and of equal dimension"));
        }
        for i in 0..d {
            let (ol, il, iu, ou) = (outer_lower[i], inner_lower[i], inner_upper[i], outer_upper[i]);
            if ![ol, il, iu, ou].iter().all(|v| v.is_finite()) {
                return Err(Error::invalid("bump boxes must be finite"));
            }
            if !(ol < il && il <= iu && iu < ou) {
                return Err(Error::invalid(format!(
                    "bump axis {i}: need outer lower < inner lower <= inner upper < outer upper, got {ol}, {il}, {iu}, {ou}"
                )));
            }
        }
        Ok(BumpFunction {
            inner_lower,
            inner_upper,
            outer_lower,
            outer_upper,
        })
    }

    pub fn dim(&self) -> usize {
        self.inner_lower.len()
    }

    pub fn inner(&self) -> (&[f64], &[f64]) {
        (&self.inner_lower, &self.inner_upper)
    }

    pub fn outer(&self) -> (&[f64], &[f64]) {
        (&self.outer_lower, &self.outer_upper)
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        let mut v = 1.0;
        for (i, &zi) in z.iter().enumerate().take(self.dim()) {
            let (ol, il, iu, ou) = (
                self.outer_lower[i],
                self.inner_lower[i],
                self.inner_upper[i],
                self.outer_upper[i],
            );
            let axis = if zi <= ol || zi >= ou {
                0.0
            } else if zi < il {
                smoothstep((zi - ol) / (il - ol))
            } else if zi > iu {
                smoothstep((ou - zi) / (ou - iu))
            } else {
                1.0
            };
            if axis == 0.0 {
                return 0.0;
            }
            v *= axis;
        }
        v
    }
}

/// Value of the bump at z.
pub fn bump_eval(b: &BumpFunction, z: &[f64]) -> f64 {
    b.eval(z)
}

/// JSON form of a diffusion: the pushforward matrix and the bump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffusionConfig {
    pub a: SquareMatrix,
    pub bump: BumpFunction,
}

/// Tangential diffusion Σⱼ(z) = φ(z) Σₖ a_{kj} ∂_{z_k}χ(z) on a manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionSpec {
    manifold: LinearRationalManifold,
    a: SquareMatrix,
    bump: BumpFunction,
}

impl DiffusionSpec {
    pub fn new(manifold: LinearRationalManifold, a: SquareMatrix, bump: BumpFunction) -> Result<Self> {
        let d = manifold.dim();
        if a.dim() != d || bump.dim() != d {
            return Err(Error::invalid(format!(
                "diffusion matrix is {}x{} and bump has dimension {}, manifold has {d}",
                a.dim(),
                a.dim(),
                bump.dim()
            )));
        }
        let (il, iu) = bump.inner();
        let (ol, ou) = bump.outer();
        if !manifold.domain().strictly_contains_box(il, iu) || !manifold.domain().strictly_contains_box(ol, ou) {
            return Err(Error::invalid("bump boxes must lie strictly inside the state domain"));
        }
        Ok(DiffusionSpec { manifold, a, bump })
    }

    pub fn from_config(manifold: LinearRationalManifold, config: DiffusionConfig) -> Result<Self> {
        Self::new(manifold, config.a, config.bump)
    }

    pub fn manifold(&self) -> &LinearRationalManifold {
        &self.manifold
    }

    pub fn a(&self) -> &SquareMatrix {
        &self.a
    }

    pub fn bump(&self) -> &BumpFunction {
        &self.bump
    }

    /// Factor volatility φ(z) a: column j drives z through dW_j.
    pub fn z_volatility(&self, z: &[f64]) -> SquareMatrix {
        self.a.scaled(self.bump.eval(z))
    }
}

/// Forward-curve diffusion columns at z.
pub fn tangential_sigma(spec: &DiffusionSpec, z: &[f64]) -> Result<Vec<Curve>> {
    let m = spec.manifold();
    m.domain().check(z)?;
    let d = m.dim();
    let phi = spec.bump.eval(z);
    if phi == 0.0 {
        return Ok(vec![Curve::zero(); d]);
    }
    let basis = m.tangent_basis(z)?;
    Ok((0..d)
        .map(|j| {
            let parts: Vec<(f64, &Curve)> = (0..d)
                .map(|k| (phi * spec.a.get(k, j), &basis[k]))
                .filter(|(w, _)| *w != 0.0)
                .collect();
            Curve::linear_combination(0.0, &parts)
        })
        .collect())
}

/// bⱼ(z) = (Mᵀw)_{j+1} − (Mᵀw)₁ zⱼ with w = (1, z): the coordinates of
/// ∂ₓh + β^h(h) in the basis u when h = c + ⟨z, u⟩.
pub fn consistent_z_drift(m: &LinearRationalManifold, z: &[f64]) -> Result<Vec<f64>> {
    let mat = m
        .matrix()
        .ok_or_else(|| Error::UnsupportedManifold("the consistent drift needs a generating matrix".into()))?;
    m.domain().check(z)?;
    Ok(z_drift_formula(mat, z))
}

pub(crate) fn z_drift_formula(mat: &SquareMatrix, z: &[f64]) -> Vec<f64> {
    let n = mat.dim();
    let w: Vec<f64> = std::iter::once(1.0).chain(z.iter().copied()).collect();
    let mtw: Vec<f64> = (0..n).map(|i| (0..n).map(|k| mat.get(k, i) * w[k]).sum()).collect();
    (0..n - 1).map(|j| mtw[j + 1] - mtw[0] * z[j]).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceResidual {
    /// L² norm of the part of ∂ₓh + β^h(h) orthogonal to span u.
    pub residual: f64,
    pub coefficients: Vec<f64>,
}

/// ξ = ∂ₓh + (h − 1)h′(0) for h = chart_h(z).
pub fn drift_curve(m: &LinearRationalManifold, z: &[f64]) -> Result<Curve> {
    let h = m.chart_h(z)?;
    Ok(h.curve().derivative().add(&h_drift(&h)?))
}

/// Projects ξ onto span{u₁, …, u_d} in L²([0, x_max]).
pub fn invariance_residual(m: &LinearRationalManifold, z: &[f64]) -> Result<InvarianceResidual> {
    if !m.is_normalized() {
        return Err(Error::UnsupportedManifold(
            "drift consistency is only defined for manifolds with c(0) = 0 and u(0) = 0".into(),
        ));
    }
    let xi = drift_curve(m, z)?;
    let grid = L2Grid::new(m.x_max());
    let target = grid.sample(&xi)?;
    let basis = m.u().iter().map(|u| grid.sample(u)).collect::<Result<Vec<_>>>()?;
    let p = grid.project(&target, &basis)?;
    Ok(InvarianceResidual {
        residual: p.residual,
        coefficients: p.coefficients,
    })
}

/// Largest L² residual of the diffusion columns projected onto the tangent space.
pub fn tangency_residual(spec: &DiffusionSpec, z: &[f64]) -> Result<f64> {
    let m = spec.manifold();
    let cols = tangential_sigma(spec, z)?;
    let grid = L2Grid::new(m.x_max().min(10.0));
    let basis = m
        .tangent_basis(z)?
        .iter()
        .map(|b| grid.sample(b))
        .collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0_f64;
    for c in &cols {
        let p = grid.project(&grid.sample(c)?, &basis)?;
        worst = worst.max(p.residual);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvespace::ExpPolyCurve;
    use crate::manifold::StateDomain;
    use crate::projection::project;
    use crate::transform::psi;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sq(rows: &[&[f64]]) -> SquareMatrix {
        SquareMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn two_rate() -> LinearRationalManifold {
        LinearRationalManifold::from_matrix(
            sq(&[&[-0.1, 0.0], &[0.2, -0.5]]),
            StateDomain::interval(Some(-2.0), Some(10.0)).unwrap(),
        )
        .unwrap()
    }

    fn nilpotent() -> LinearRationalManifold {
        LinearRationalManifold::from_matrix(
            sq(&[&[0.0, 0.0], &[1.0, 0.0]]),
            StateDomain::interval(Some(0.0), Some(10.0)).unwrap(),
        )
        .unwrap()
    }

    fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        crate::quadrature::integrate_adaptive(|x| Ok(f(x)), a, b, 1e-13, 40).unwrap()
    }

    #[test]
    fn drift_of_constant_and_exponential_columns() {
        let b = hjm_drift(&[Curve::constant(0.01)]);
        assert!((b.eval(3.0).unwrap() - 3e-4).abs() < 1e-18);
        let (s, k) = (0.02, 0.5);
        let b = hjm_drift(&[Curve::exponential(s, -k)]);
        let oracle = s * (-k).exp() * quad(|x| s * (-k * x).exp(), 0.0, 1.0);
        assert!((b.eval(1.0).unwrap() - oracle).abs() < 1e-15);
        let closed = s * s * (-k).exp() * (1.0 - (-k).exp()) / k;
        assert!((b.eval(1.0).unwrap() - closed).abs() < 1e-18);
        assert!((b.eval(1.0).unwrap() - 1.90921e-4).abs() < 1e-9);
    }

    #[test]
    fn drift_is_additive_and_a_half_derivative() {
        let s1 = Curve::exponential(0.02, -0.5);
        let s2 = Curve::from(ExpPolyCurve::polynomial(vec![0.01, 0.002]));
        let both = hjm_drift(&[s1.clone(), s2.clone()]);
        let sum = hjm_drift(std::slice::from_ref(&s1)).add(&hjm_drift(std::slice::from_ref(&s2)));
        let q = |x: f64| 0.5 * (s1.integrate(x).unwrap().powi(2) + s2.integrate(x).unwrap().powi(2));
        for x in [0.0, 0.7, 2.0, 9.0] {
            assert!((both.eval(x).unwrap() - sum.eval(x).unwrap()).abs() < 1e-12);
            if x > 0.0 {
                let fd = (q(x + 1e-5) - q(x - 1e-5)) / 2e-5;
                assert!((fd - both.eval(x).unwrap()).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn h_space_drift_and_volatility() {
        let zero = DiscountCurve::new(Curve::zero(), 50.0).unwrap();
        assert!(h_drift(&zero).unwrap().is_zero() || h_drift(&zero).unwrap().eval(2.0).unwrap() == 0.0);
        let r = 0.05;
        let h = DiscountCurve::new(
            Curve::from(ExpPolyCurve::linear_combination(
                1.0,
                &[(-1.0, &ExpPolyCurve::exponential(1.0, -r))],
            )),
            50.0,
        )
        .unwrap();
        let b = h_drift(&h).unwrap();
        for x in [0.0, 1.0, 10.0] {
            assert!((b.eval(x).unwrap() + 0.05 * (-r * x).exp()).abs() < 1e-15);
        }
        let sh = h_sigma(&[Curve::exponential(1.0, -1.0)], &h);
        for x in [1.0_f64, 5.0] {
            let oracle = (-0.05 * x).exp() * quad(|s: f64| (-s).exp(), 0.0, x);
            assert!((sh[0].eval(x).unwrap() - oracle).abs() < 1e-10);
        }
        let flat = h_sigma(&[Curve::constant(0.01)], &zero);
        assert!((flat[0].eval(4.0).unwrap() - 0.04).abs() < 1e-16);
        assert!(h_sigma(&[Curve::zero()], &h)[0].is_zero());
    }

    #[test]
    fn matrix_state_drift_uses_its_short_rate() {
        let m = two_rate();
        let z = [0.3];
        let h = m.chart_h(&z).unwrap();
        let r = m.matrix_short_rate(&z).unwrap();
        assert!((h.curve().derivative().eval(0.0).unwrap() - r).abs() < 1e-14);
        let b = h_drift(&h).unwrap();
        for x in [0.5, 3.0] {
            assert!((b.eval(x).unwrap() - (h.eval(x).unwrap() - 1.0) * r).abs() < 1e-15);
        }
    }

    fn roundtrip_error(f: &Curve, sigma: &Curve) -> f64 {
        let h = psi(f).unwrap();
        let back = sigma_from_h(f, &h_sigma(std::slice::from_ref(sigma), &h));
        (0..=100)
            .map(|i| i as f64 / 10.0)
            .map(|x| (back[0].eval(x).unwrap() - sigma.eval(x).unwrap()).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn sigma_roundtrip() {
        assert!(roundtrip_error(&Curve::constant(0.05), &Curve::constant(0.01)) < 1e-9);
        let example = LinearRationalManifold::from_curves(
            Curve::zero(),
            vec![Curve::exponential(1.0, -1.0)],
            StateDomain::interval(None, Some(0.0)).unwrap(),
        )
        .unwrap();
        let f = example.chart(&[-0.5]).unwrap();
        assert!(roundtrip_error(&f, &Curve::exponential(1.0, -1.0)) < 1e-7);
        let g = Curve::from(
            crate::curvespace::GridCurve::sample(
                (0..=40).map(|i| i as f64 * 0.25).collect::<Vec<_>>(),
                |x| Ok(0.03 + 0.01 * (-0.3 * x).exp()),
                crate::curvespace::Extrapolation::Constant,
            )
            .unwrap(),
        );
        assert!(roundtrip_error(&g, &Curve::exponential(0.01, -0.2)) < 1e-7);
        assert!(sigma_from_h(&f, &[Curve::zero()])[0].is_zero());
    }

    #[test]
    fn bump_shape_and_smoothness() {
        let b = BumpFunction::new(vec![-1.0], vec![1.5], vec![-1.5], vec![2.5]).unwrap();
        assert_eq!(bump_eval(&b, &[0.25]), 1.0);
        assert_eq!(bump_eval(&b, &[100.0]), 0.0);
        assert_eq!(bump_eval(&b, &[-1.5]), 0.0);
        let h = 1e-3;
        let delta2 = |z: f64| b.eval(&[z + h]) - 2.0 * b.eval(&[z]) + b.eval(&[z - h]);
        // φ‴ is bounded by 60/w³ on a ramp of width w; the narrowest here is 0.5
        let third_bound = 60.0 / 0.5_f64.powi(3);
        let mut z = -2.0;
        while z < 3.0 {
            let (a, c) = (delta2(z), delta2(z + h));
            assert!((c - a).abs() < 1e-4);
            // normalized second differences move by at most h·sup|φ‴|: no jump in φ″
            assert!((c - a).abs() / (h * h) <= 1.05 * h * third_bound, "jump at {z}");
            z += h;
        }
        // φ″ vanishes at every junction
        for z0 in [-1.5, -1.0, 1.5, 2.5] {
            assert!(delta2(z0).abs() / (h * h) < 0.5);
        }
        assert!(BumpFunction::new(vec![0.0], vec![1.0], vec![0.0], vec![2.0]).is_err());
        let json = r#"{"inner":{"lower":[-1.0],"upper":[1.5]},"outer":{"lower":[-1.5],"upper":[2.5]}}"#;
        let parsed: BumpFunction = serde_json::from_str(json).unwrap();
        assert_eq!(parsed, b);
        assert_eq!(serde_json::to_string(&b).unwrap(), json);
    }

    #[test]
    fn tangential_columns() {
        let m = two_rate();
        let bump = BumpFunction::new(vec![-1.0], vec![1.5], vec![-1.5], vec![2.5]).unwrap();
        let id = DiffusionSpec::new(m.clone(), SquareMatrix::identity(1), bump.clone()).unwrap();
        let cols = tangential_sigma(&id, &[0.5]).unwrap();
        assert_eq!(cols, m.tangent_basis(&[0.5]).unwrap());
        assert!(tangential_sigma(&id, &[5.0]).unwrap()[0].is_zero());
        let zero = DiffusionSpec::new(m.clone(), SquareMatrix::zeros(1), bump.clone()).unwrap();
        assert!(tangential_sigma(&zero, &[0.5]).unwrap()[0].is_zero());
        assert!(tangential_sigma(&id, &[20.0]).is_err());
        let scaled = DiffusionSpec::new(m.clone(), sq(&[&[0.3]]), bump).unwrap();
        for z in [-1.2, 0.0, 2.0] {
            assert!(tangency_residual(&scaled, &[z]).unwrap() <= 1e-9);
        }
        let config: DiffusionConfig = serde_json::from_str(
            r#"{"a":[[0.3]],"bump":{"inner":{"lower":[-1.0],"upper":[1.5]},"outer":{"lower":[-1.5],"upper":[2.5]}}}"#,
        )
        .unwrap();
        assert_eq!(DiffusionSpec::from_config(m.clone(), config).unwrap(), scaled);
        let too_wide = BumpFunction::new(vec![-1.0], vec![1.5], vec![-3.0], vec![2.5]).unwrap();
        assert!(DiffusionSpec::new(m, SquareMatrix::identity(1), too_wide).is_err());
    }

    #[test]
    fn nilpotent_drift_by_hand() {
        let m = nilpotent();
        assert_eq!(consistent_z_drift(&m, &[0.5]).unwrap(), vec![-0.25]);
        // ξ(x) = z²x = −z² u₁(x)
        let xi = drift_curve(&m, &[0.5]).unwrap();
        assert!((xi.eval(3.0).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn drift_formula_matches_projection_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut checked = 0;
        let mut fixtures = vec![(two_rate(), vec![0.3])];
        while fixtures.len() < 6 {
            let n = rng.random_range(2..=4);
            // lower-triangular with distinct negative diagonal: real spectrum
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| match j.cmp(&i) {
                            std::cmp::Ordering::Equal => -0.1 - 0.4 * i as f64 - rng.random_range(0.0..0.1),
                            std::cmp::Ordering::Less => rng.random_range(-0.5..0.5),
                            std::cmp::Ordering::Greater => 0.0,
                        })
                        .collect()
                })
                .collect();
            let d = n - 1;
            let domain = StateDomain::open_box(&vec![-0.2; d], &vec![0.2; d]).unwrap();
            if let Ok(m) = LinearRationalManifold::from_matrix(SquareMatrix::from_rows(&rows).unwrap(), domain) {
                let z: Vec<f64> = (0..d).map(|_| rng.random_range(-0.15..0.15)).collect();
                fixtures.push((m, z));
            }
        }
        for (m, z) in fixtures {
            let b = consistent_z_drift(&m, &z).unwrap();
            let oracle = project(&drift_curve(&m, &z).unwrap(), m.u(), m.x_max()).unwrap();
            assert!(oracle.residual <= 1e-8, "residual {}", oracle.residual);
            for (bj, pj) in b.iter().zip(&oracle.coefficients) {
                assert!((bj - pj).abs() <= 1e-8, "{bj} vs {pj}");
            }
            let ir = invariance_residual(&m, &z).unwrap();
            assert!(ir.residual <= 1e-8);
            checked += 1;
        }
        assert!(checked >= 3);
    }

    #[test]
    fn quadratic_family_is_not_invariant() {
        let u = vec![Curve::from(ExpPolyCurve::polynomial(vec![0.0, 0.0, 1.0]))];
        let m = LinearRationalManifold::from_curves_with_x_max(
            Curve::zero(),
            u,
            StateDomain::interval(Some(-1.0), Some(0.0)).unwrap(),
            10.0,
        )
        .unwrap();
        for k in 1..=20 {
            let z = -(k as f64) / 21.0;
            let ir = invariance_residual(&m, &[z]).unwrap();
            // ξ = 2zx projected onto x² on [0, 10] leaves |z| √(L³/12)
            let expected = z.abs() * (1000.0_f64 / 12.0).sqrt();
            assert!((ir.residual - expected).abs() < 1e-9 * expected.max(1.0));
            assert!(ir.residual > 0.05);
        }
        assert!(matches!(
            consistent_z_drift(&m, &[-0.5]),
            Err(Error::UnsupportedManifold(_))
        ));
    }

    #[test]
    fn stationary_state_and_unsupported_inputs() {
        let m = LinearRationalManifold::from_curves(
            Curve::zero(),
            vec![Curve::linear_combination(
                -1.0,
                &[(1.0, &Curve::exponential(1.0, -1.0))],
            )],
            StateDomain::interval(Some(-0.5), Some(0.5)).unwrap(),
        )
        .unwrap();
        let ir = invariance_residual(&m, &[0.0]).unwrap();
        assert!(ir.residual == 0.0 && ir.coefficients == vec![0.0]);
        let example = LinearRationalManifold::from_curves(
            Curve::zero(),
            vec![Curve::exponential(1.0, -1.0)],
            StateDomain::interval(None, Some(0.0)).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            invariance_residual(&example, &[-0.5]),
            Err(Error::UnsupportedManifold(_))
        ));
    }
}
