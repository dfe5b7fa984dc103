use serde::Serialize;

use super::{CheckResult, Relation, VerificationReport};
use crate::curvespace::{hw_norm, Curve, WeightSpec};
use crate::error::{Error, Result};
use crate::hjm::{invariance_residual, tangency_residual, DiffusionSpec};
use crate::manifold::LinearRationalManifold;
use crate::projection::L2Grid;
use crate::simulate::{simulate_with_fault, Fault, SimulationConfig};

pub const TANGENCY_TOL: f64 = 1e-9;
pub const DRIFT_TOL: f64 = 1e-8;
/// Gram eigenvalues below this fraction of the largest count as zero.
pub const RANK_REL: f64 = 1e-10;
/// Below this the deflated estimate of a volatility-free run must match.
pub const DETERMINISTIC_TOL: f64 = 1e-5;

/// Which of the three invariance conditions a fixture is expected to meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Expectation {
    pub a: bool,
    pub b: bool,
    pub c: bool,
}

impl Default for Expectation {
    fn default() -> Self {
        Expectation {
            a: true,
            b: true,
            c: true,
        }
    }
}

/// Conditions (a) f′ ∈ H_w on the manifold, (b) diffusion columns tangent,
/// (c) ∂ₓh + β^h(h) tangent, each checked at every sample state.
pub fn check_invariance_conditions(
    spec: &DiffusionSpec,
    z_samples: &[Vec<f64>],
    weight: &WeightSpec,
    expect: Expectation,
    label: &str,
) -> Result<VerificationReport> {
    if z_samples.is_empty() {
        return Err(Error::invalid("no sample states"));
    }
    let m = spec.manifold();
    let mut worst_a = 0.0_f64;
    let mut worst_b = 0.0_f64;
    let mut worst_c = 0.0_f64;
    let mut c_note = None;
    for z in z_samples {
        let df = m.chart(z)?.derivative();
        worst_a = worst_a.max(hw_norm(&df, weight)?);
        worst_b = worst_b.max(tangency_residual(spec, z)?);
        match invariance_residual(m, z) {
            Ok(ir) => worst_c = worst_c.max(ir.residual),
            Err(Error::UnsupportedManifold(msg)) => {
                worst_c = f64::INFINITY;
                c_note = Some(msg);
            }
            Err(e) => return Err(e),
        }
    }
    let n = z_samples.len();
    let mut report = VerificationReport::default();
    report.push(
        CheckResult::new(
            format!("{label}/domain"),
            "the manifold lies in the domain of the generator: f′ has finite H_w norm",
            worst_a,
            Relation::AtMost,
            f64::MAX,
            expect.a,
        )
        .with("samples", n)
        .with("alpha", weight.alpha),
    );
    report.push(
        CheckResult::new(
            format!("{label}/diffusion_tangency"),
            "diffusion columns lie in the tangent space",
            worst_b,
            Relation::AtMost,
            TANGENCY_TOL,
            expect.b,
        )
        .with("samples", n),
    );
    let mut c = CheckResult::new(
        format!("{label}/drift_tangency"),
        "∂ₓh + β^h(h) lies in the tangent space of the discount-curve image",
        worst_c,
        Relation::AtMost,
        DRIFT_TOL,
        expect.c,
    )
    .with("samples", n)
    .with("x_max", m.x_max());
    if let Some(msg) = c_note {
        c = c.with("note", msg);
    }
    report.push(c);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MartingaleResult {
    pub estimate: f64,
    pub std_error: f64,
    pub reference: f64,
    pub z_score: f64,
    pub paths_used: usize,
    pub paths_exited: usize,
}

/// Compares the mean of D_t P(t, T) at t = horizon with P(0, T).
///
/// With zero standard error (no volatility) the z-score is 0 when the
/// estimate is within [`DETERMINISTIC_TOL`] of the reference and ±∞ otherwise.
pub fn martingale_test(
    spec: &DiffusionSpec,
    cfg: &SimulationConfig,
    maturity: f64,
    fault: Option<Fault>,
) -> Result<MartingaleResult> {
    if !(maturity >= cfg.horizon) {
        return Err(Error::invalid(format!(
            "maturity {maturity} lies before the horizon {}",
            cfg.horizon
        )));
    }
    let run = SimulationConfig {
        record_maturities: vec![maturity - cfg.horizon],
        record_stride: cfg.n_steps,
        ..cfg.clone()
    };
    let paths = simulate_with_fault(spec, &run, fault)?;
    let (estimate, std_error) = paths.deflated_bond(0);
    let reference = spec.manifold().chart_h(&cfg.z0)?.price(maturity)?;
    let diff = estimate - reference;
    let z_score = if std_error > 0.0 {
        diff / std_error
    } else if diff.abs() <= DETERMINISTIC_TOL {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    };
    Ok(MartingaleResult {
        estimate,
        std_error,
        reference,
        z_score,
        paths_used: paths.complete_paths().count(),
        paths_exited: paths.n_exited(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerIndependence {
    pub rank: usize,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

/// Rank of the Gram matrix of g, g², …, g^N in L²([0, X]).
pub fn power_independence_test(g: &Curve, n: usize, x: f64) -> Result<PowerIndependence> {
    if n == 0 || !(x > 0.0) {
        return Err(Error::invalid("need N >= 1 and X > 0"));
    }
    let grid = L2Grid::new(x);
    let base = grid.sample(g)?;
    let mut powers = vec![base.clone()];
    for k in 1..n {
        let next: Vec<f64> = powers[k - 1].iter().zip(&base).map(|(a, b)| a * b).collect();
        powers.push(next);
    }
    let ev = crate::linalg::symmetric_eigenvalues(&grid.gram(&powers));
    let max = ev.last().copied().unwrap_or(0.0);
    let rank = if max > 0.0 {
        ev.iter().filter(|&&e| e > RANK_REL * max).count()
    } else {
        0
    };
    Ok(PowerIndependence {
        rank,
        min_eigenvalue: ev.first().copied().unwrap_or(0.0),
        max_eigenvalue: max,
    })
}

/// max over t of the L² distance of exp(−∫₀ˣ(h0 + t h1)) from span{1 − c, u}.
pub fn segment_degeneracy_test(m: &LinearRationalManifold, h0: &Curve, h1: &Curve, t_grid: &[f64]) -> Result<f64> {
    let grid = L2Grid::new(m.x_max());
    let one_minus_c = Curve::linear_combination(1.0, &[(-1.0, m.c())]);
    let mut basis = vec![grid.sample(&one_minus_c)?];
    for u in m.u() {
        basis.push(grid.sample(u)?);
    }
    let mut worst = 0.0_f64;
    for &t in t_grid {
        let f = Curve::linear_combination(0.0, &[(1.0, h0), (t, h1)]);
        let g: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&x| f.integrate(x).map(|v| (-v).exp()))
            .collect::<Result<_>>()?;
        worst = worst.max(grid.project(&g, &basis)?.residual);
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpanCondition {
    pub residual_x: f64,
    pub residuals_yy: Vec<Vec<f64>>,
}

/// Second state-derivatives of g(x, z) = h_z(x) projected onto the tangent
/// span (central differences of the tangent basis), and the drift remainder.
pub fn span_condition_test(m: &LinearRationalManifold, z: &[f64]) -> Result<SpanCondition> {
    if !m.is_normalized() {
        return Err(Error::UnsupportedManifold(
            "span conditions are checked on manifolds with c(0) = 0 and u(0) = 0".into(),
        ));
    }
    m.domain().check(z)?;
    let grid = L2Grid::new(m.x_max());
    let d = m.dim();
    let sample_all = |cs: &[Curve]| cs.iter().map(|c| grid.sample(c)).collect::<Result<Vec<_>>>();
    let tangent = sample_all(&m.h_tangent_basis(z)?)?;
    let mut yy = vec![vec![0.0; d]; d];
    for j in 0..d {
        let mut step = 1e-4 * z[j].abs().max(1.0);
        let (plus, minus) = loop {
            let mut zp = z.to_vec();
            let mut zm = z.to_vec();
            zp[j] += step;
            zm[j] -= step;
            if m.domain().contains(&zp) && m.domain().contains(&zm) {
                break (zp, zm);
            }
            step *= 0.5;
            if step < 1e-12 {
                return Err(Error::domain("state too close to the boundary for differencing"));
            }
        };
        let tp = sample_all(&m.h_tangent_basis(&plus)?)?;
        let tm = sample_all(&m.h_tangent_basis(&minus)?)?;
        for i in 0..d {
            let second: Vec<f64> = tp[i].iter().zip(&tm[i]).map(|(a, b)| (a - b) / (2.0 * step)).collect();
            yy[i][j] = grid.project(&second, &tangent)?.residual;
        }
    }
    Ok(SpanCondition {
        residual_x: invariance_residual(m, z)?.residual,
        residuals_yy: yy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::fixtures;

    #[test]
    fn powers_of_constants_and_exponentials() {
        assert_eq!(power_independence_test(&Curve::constant(0.7), 4, 10.0).unwrap().rank, 1);
        let e = power_independence_test(&Curve::exponential(1.0, -1.0), 4, 10.0).unwrap();
        assert_eq!(e.rank, 4);
        assert!(e.min_eigenvalue > 0.0);
        let shifted = Curve::linear_combination(1.0, &[(1.0, &Curve::exponential(1.0, -1.0))]);
        assert_eq!(power_independence_test(&shifted, 3, 10.0).unwrap().rank, 3);
        assert_eq!(power_independence_test(&Curve::zero(), 3, 10.0).unwrap().rank, 0);
    }

    #[test]
    fn segments() {
        let m = fixtures::nilpotent();
        let h0 = m.chart(&[0.5]).unwrap();
        let t = [0.0, 0.25, 0.5, 0.75, 1.0];
        assert!(segment_degeneracy_test(&m, &h0, &Curve::zero(), &t).unwrap() <= 1e-8);
        assert!(segment_degeneracy_test(&m, &h0, &Curve::exponential(0.1, -1.0), &t).unwrap() > 1e-3);
        // chord between two points of the manifold leaves it in between
        let d = fixtures::demo();
        let f0 = d.chart(&[0.3]).unwrap();
        let f1 = d.chart(&[3.0]).unwrap();
        let chord = f1.sub(&f0);
        assert!(segment_degeneracy_test(&d, &f0, &chord, &[0.0, 1.0]).unwrap() <= 1e-8);
        assert!(segment_degeneracy_test(&d, &f0, &chord, &t).unwrap() > 1e-6);
    }

    #[test]
    fn span_conditions() {
        let d = fixtures::demo();
        let s = span_condition_test(&d, &[0.3]).unwrap();
        assert!(s.residual_x <= 1e-8);
        assert!(s.residuals_yy[0][0] <= 1e-12);
        let q = fixtures::quadratic();
        let s = span_condition_test(&q, &[-0.5]).unwrap();
        assert!(s.residual_x > 0.05);
        assert!(s.residuals_yy[0][0] <= 1e-12);
        assert!(matches!(
            span_condition_test(&fixtures::example(-0.6), &[-0.5]),
            Err(Error::UnsupportedManifold(_))
        ));
    }

    #[test]
    fn invariance_conditions_by_fixture() {
        let weight = WeightSpec::new(0.5).unwrap();
        let spec = fixtures::demo_diffusion(0.05);
        let zs = fixtures::states(spec.manifold(), 10, 5);
        let r = check_invariance_conditions(&spec, &zs, &weight, Expectation::default(), "demo").unwrap();
        assert!(r.checks.iter().all(|c| c.passed), "{r:#?}");

        let nil = fixtures::nilpotent_diffusion();
        let zs = fixtures::states(nil.manifold(), 10, 6);
        let r = check_invariance_conditions(&nil, &zs, &weight, fixtures::POLYNOMIAL_TAIL, "nilpotent").unwrap();
        assert!(r.all_as_expected(), "{r:#?}");
        assert!(!r.checks[0].passed && r.checks[1].passed && r.checks[2].passed);

        let q = fixtures::quadratic_diffusion();
        let zs = fixtures::quadratic_grid();
        let r = check_invariance_conditions(&q, &zs, &weight, fixtures::NOT_INVARIANT, "quadratic").unwrap();
        assert!(r.all_as_expected(), "{r:#?}");
        assert!(r.checks[2].value() > 0.05);

        let ex = fixtures::example_diffusion(-0.6);
        let r = check_invariance_conditions(
            &ex,
            &[vec![-0.5]],
            &WeightSpec::new(1.0).unwrap(),
            fixtures::NOT_NORMALIZED,
            "example",
        )
        .unwrap();
        assert!(
            r.checks[0].passed && r.checks[1].passed && !r.checks[2].passed,
            "{r:#?}"
        );
        assert!(check_invariance_conditions(&ex, &[], &weight, Expectation::default(), "x").is_err());
    }

    #[test]
    fn deterministic_martingale_identity() {
        let spec = fixtures::demo_diffusion(0.0);
        let cfg = SimulationConfig {
            n_paths: 1,
            n_steps: 10_000,
            ..fixtures::demo_simulation()
        };
        let r = martingale_test(&spec, &cfg, 5.0, None).unwrap();
        assert!((r.estimate - r.reference).abs() <= 1e-5);
        assert_eq!(r.std_error, 0.0);
        assert_eq!(r.z_score, 0.0);
        let bad = martingale_test(&spec, &cfg, 5.0, Some(Fault::FlipDriftSign)).unwrap();
        assert!(bad.z_score.is_infinite());
        assert!(martingale_test(&spec, &cfg, 0.5, None).is_err());
    }

    #[test]
    fn degenerate_start_has_unit_reference() {
        let spec = fixtures::saturating_diffusion(0.05);
        let cfg = SimulationConfig {
            z0: vec![0.0],
            n_paths: 200,
            n_steps: 50,
            ..fixtures::demo_simulation()
        };
        let r = martingale_test(&spec, &cfg, 3.0, None).unwrap();
        assert_eq!(r.reference, 1.0);
        assert!(r.z_score.abs() <= 4.0);
    }
}
