//! Manifolds and diffusions shared by the test suite, the CLI and the
//! acceptance run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Expectation;
use crate::curvespace::{Curve, ExpPolyCurve};
use crate::hjm::{BumpFunction, DiffusionSpec};
use crate::linalg::SquareMatrix;
use crate::manifold::{LinearRationalManifold, StateDomain};
use crate::simulate::SimulationConfig;

/// Polynomial tails keep f′ out of every H_w; (b) and (c) hold.
pub const POLYNOMIAL_TAIL: Expectation = Expectation {
    a: false,
    b: true,
    c: true,
};
/// The quadratic family: polynomial tails and no drift tangency.
pub const NOT_INVARIANT: Expectation = Expectation {
    a: false,
    b: true,
    c: false,
};
/// u(0) ≠ 0: the drift condition is not defined.
pub const NOT_NORMALIZED: Expectation = Expectation {
    a: true,
    b: true,
    c: false,
};

pub const DEMO_SEED: u64 = 20_240_917;

fn sq(rows: &[&[f64]]) -> SquareMatrix {
    SquareMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).expect("fixture matrix")
}

fn interval(lo: Option<f64>, hi: Option<f64>) -> StateDomain {
    StateDomain::interval(lo, hi).expect("fixture interval")
}

fn bump1(inner: (f64, f64), outer: (f64, f64)) -> BumpFunction {
    BumpFunction::new(vec![inner.0], vec![inner.1], vec![outer.0], vec![outer.1]).expect("fixture bump")
}

/// Generator of the demo model.
pub fn demo_matrix() -> SquareMatrix {
    sq(&[&[-0.1, 0.0], &[0.2, -0.5]])
}

/// One factor, u₁ = −0.5(e^{−0.1x} − e^{−0.5x}), U = (−2, 10).
pub fn demo() -> LinearRationalManifold {
    LinearRationalManifold::from_matrix(demo_matrix(), interval(Some(-2.0), Some(10.0))).expect("demo manifold")
}

pub fn demo_bump() -> BumpFunction {
    bump1((-1.0, 1.5), (-1.5, 2.5))
}

pub fn demo_diffusion(a: f64) -> DiffusionSpec {
    DiffusionSpec::new(demo(), sq(&[&[a]]), demo_bump()).expect("demo diffusion")
}

pub fn demo_simulation() -> SimulationConfig {
    SimulationConfig {
        z0: vec![0.3],
        horizon: 1.0,
        n_steps: 500,
        n_paths: 50_000,
        seed: DEMO_SEED,
        record_maturities: vec![1.0, 4.0, 9.0],
        record_stride: 100,
        threads: None,
    }
}

/// M = [[0,0],[1,0]]: c ≡ 0, u₁ = −x, U = (0, 10).
pub fn nilpotent() -> LinearRationalManifold {
    LinearRationalManifold::from_matrix(sq(&[&[0.0, 0.0], &[1.0, 0.0]]), interval(Some(0.0), Some(10.0)))
        .expect("nilpotent manifold")
}

pub fn nilpotent_diffusion() -> DiffusionSpec {
    DiffusionSpec::new(nilpotent(), sq(&[&[0.1]]), bump1((2.0, 6.0), (1.0, 8.0))).expect("nilpotent diffusion")
}

/// Distinct real spectrum {−0.2, −0.6, −1.1}, two factors.
pub fn diagonalizable() -> LinearRationalManifold {
    LinearRationalManifold::from_matrix(
        sq(&[&[-0.2, 0.0, 0.0], &[0.3, -0.6, 0.0], &[0.1, 0.2, -1.1]]),
        StateDomain::open_box(&[-0.5, -0.5], &[0.5, 0.5]).expect("box"),
    )
    .expect("diagonalizable manifold")
}

pub fn diagonalizable_diffusion() -> DiffusionSpec {
    let bump = BumpFunction::new(vec![-0.2, -0.2], vec![0.2, 0.2], vec![-0.4, -0.4], vec![0.4, 0.4]).expect("bump");
    DiffusionSpec::new(diagonalizable(), sq(&[&[0.05, 0.0], &[0.01, 0.03]]), bump).expect("diagonalizable diffusion")
}

/// Eigenvalues −0.3 and −0.3 − 10⁻¹⁰: evaluated through the matrix exponential.
pub fn near_defective() -> LinearRationalManifold {
    LinearRationalManifold::from_matrix(
        sq(&[&[-0.3, 0.0], &[0.5, -0.3 - 1e-10]]),
        interval(Some(0.0), Some(5.0)),
    )
    .expect("near-defective manifold")
}

pub fn near_defective_diffusion() -> DiffusionSpec {
    DiffusionSpec::new(near_defective(), sq(&[&[0.1]]), bump1((1.0, 3.0), (0.5, 4.0)))
        .expect("near-defective diffusion")
}

/// c ≡ 0, u₁ = x² on U = (−1, 0), with checks on [0, 10].
pub fn quadratic() -> LinearRationalManifold {
    LinearRationalManifold::from_curves_with_x_max(
        Curve::zero(),
        vec![Curve::from(ExpPolyCurve::polynomial(vec![0.0, 0.0, 1.0]))],
        interval(Some(-1.0), Some(0.0)),
        10.0,
    )
    .expect("quadratic manifold")
}

pub fn quadratic_diffusion() -> DiffusionSpec {
    DiffusionSpec::new(quadratic(), sq(&[&[0.1]]), bump1((-0.7, -0.3), (-0.9, -0.1))).expect("quadratic diffusion")
}

/// z = −k/21, k = 1..20.
pub fn quadratic_grid() -> Vec<Vec<f64>> {
    (1..=20).map(|k| vec![-(k as f64) / 21.0]).collect()
}

/// c ≡ 0, u₁ = e^{λx} on U = (−∞, 0).
pub fn example(lambda: f64) -> LinearRationalManifold {
    LinearRationalManifold::from_curves(
        Curve::zero(),
        vec![Curve::exponential(1.0, lambda)],
        interval(None, Some(0.0)),
    )
    .expect("example manifold")
}

pub fn example_diffusion(lambda: f64) -> DiffusionSpec {
    DiffusionSpec::new(example(lambda), sq(&[&[0.1]]), bump1((-2.0, -0.5), (-3.0, -0.2))).expect("example diffusion")
}

/// M = [[0,0],[1,−1]]: u₁ = e^{−x} − 1, r = −z; z = 0 is a fixed point with h ≡ 0.
pub fn saturating() -> LinearRationalManifold {
    LinearRationalManifold::from_matrix(sq(&[&[0.0, 0.0], &[1.0, -1.0]]), interval(Some(-0.5), Some(0.5)))
        .expect("saturating manifold")
}

pub fn saturating_diffusion(a: f64) -> DiffusionSpec {
    DiffusionSpec::new(saturating(), sq(&[&[a]]), bump1((-0.2, 0.2), (-0.4, 0.4))).expect("saturating diffusion")
}

/// Reproducible states in U (infinite sides replaced by a window of 2).
pub fn states(m: &LinearRationalManifold, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    m.domain().sample(&mut rng, n, 2.0)
}
