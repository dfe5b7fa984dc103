//! The default verification suite over the shipped fixtures.

use serde::{Deserialize, Serialize};

use super::checks::{DETERMINISTIC_TOL, DRIFT_TOL};
use super::fixtures::{self, DEMO_SEED};
use super::{
    check_invariance_conditions, martingale_test, power_independence_test, segment_degeneracy_test,
    span_condition_test, CheckResult, Expectation, Relation, VerificationReport,
};
use crate::curvespace::{hw_norm, Curve, WeightSpec};
use crate::error::{Error, Result};
use crate::hjm::{consistent_z_drift, invariance_residual, DiffusionSpec};
use crate::simulate::{Fault, SimulationConfig};

pub const CHECK_GROUPS: [&str; 7] = [
    "invariance",
    "membership",
    "consistent_drift",
    "martingale",
    "power_independence",
    "segment_degeneracy",
    "span_condition",
];

pub const Z_SCORE_LIMIT: f64 = 3.0;
pub const FAULT_Z_SCORE: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    /// Groups to run; all when empty.
    pub checks: Vec<String>,
    pub seed: u64,
    pub n_paths: usize,
    pub n_steps: usize,
    pub threads: Option<usize>,
    /// Weight exponent for condition (a) on the matrix fixtures.
    pub alpha: f64,
    /// Corrupts the drift of every simulation in the suite.
    pub fault: Option<Fault>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            checks: Vec::new(),
            seed: DEMO_SEED,
            n_paths: 50_000,
            n_steps: 500,
            threads: None,
            alpha: 0.5,
            fault: None,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(bad) = self.checks.iter().find(|c| !CHECK_GROUPS.contains(&c.as_str())) {
            return Err(Error::invalid(format!(
                "unknown check \"{bad}\"; known checks: {}",
                CHECK_GROUPS.join(", ")
            )));
        }
        if self.n_paths < 2 || self.n_steps == 0 {
            return Err(Error::invalid("need at least 2 paths and 1 step"));
        }
        WeightSpec::new(self.alpha)?;
        Ok(())
    }

    fn selected(&self, group: &str) -> bool {
        self.checks.is_empty() || self.checks.iter().any(|c| c == group)
    }
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let mut report = VerificationReport::default();
    if cfg.selected("invariance") {
        report.extend(invariance(cfg)?);
    }
    if cfg.selected("membership") {
        report.extend(membership()?);
    }
    if cfg.selected("consistent_drift") {
        report.extend(consistent_drift()?);
    }
    if cfg.selected("martingale") {
        report.extend(martingale(cfg)?);
    }
    if cfg.selected("power_independence") {
        report.extend(powers()?);
    }
    if cfg.selected("segment_degeneracy") {
        report.extend(segments()?);
    }
    if cfg.selected("span_condition") {
        report.extend(spans()?);
    }
    Ok(report)
}

type InvarianceCase = (&'static str, DiffusionSpec, Vec<Vec<f64>>, WeightSpec, Expectation);

fn invariance(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let w = WeightSpec::new(cfg.alpha)?;
    let unit = WeightSpec::new(1.0)?;
    let cases: Vec<InvarianceCase> = vec![
        (
            "demo",
            fixtures::demo_diffusion(0.05),
            fixtures::states(&fixtures::demo(), 10, 1),
            w,
            Expectation::default(),
        ),
        (
            "nilpotent",
            fixtures::nilpotent_diffusion(),
            fixtures::states(&fixtures::nilpotent(), 10, 2),
            w,
            fixtures::POLYNOMIAL_TAIL,
        ),
        (
            "diagonalizable",
            fixtures::diagonalizable_diffusion(),
            fixtures::states(&fixtures::diagonalizable(), 10, 3),
            w,
            Expectation::default(),
        ),
        (
            "near_defective",
            fixtures::near_defective_diffusion(),
            fixtures::states(&fixtures::near_defective(), 10, 4),
            w,
            fixtures::POLYNOMIAL_TAIL,
        ),
        (
            "quadratic",
            fixtures::quadratic_diffusion(),
            fixtures::quadratic_grid(),
            w,
            fixtures::NOT_INVARIANT,
        ),
        (
            "example",
            fixtures::example_diffusion(-0.6),
            vec![vec![-0.5]],
            unit,
            fixtures::NOT_NORMALIZED,
        ),
    ];
    let mut report = VerificationReport::default();
    for (label, spec, zs, weight, expect) in cases {
        report.extend(check_invariance_conditions(
            &spec,
            &zs,
            &weight,
            expect,
            &format!("invariance/{label}"),
        )?);
    }
    Ok(report)
}

fn membership() -> Result<VerificationReport> {
    let mut report = VerificationReport::default();
    for (lambda, expected) in [(-0.6, true), (-0.4, false)] {
        let f = fixtures::example(lambda).chart(&[-0.5])?;
        let norm = hw_norm(&f, &WeightSpec::new(1.0)?)?;
        report.push(
            CheckResult::new(
                format!("membership/lambda_{lambda}"),
                "the exponential example lies in H_w with w = e^{αx} iff λ < −α/2",
                norm,
                Relation::AtMost,
                f64::MAX,
                expected,
            )
            .with("alpha", 1.0)
            .with("z", -0.5),
        );
    }
    Ok(report)
}

fn consistent_drift() -> Result<VerificationReport> {
    let mut report = VerificationReport::default();
    let cases = [
        ("nilpotent", fixtures::nilpotent(), 11),
        ("diagonalizable", fixtures::diagonalizable(), 12),
        ("near_defective", fixtures::near_defective(), 13),
        ("demo", fixtures::demo(), 14),
    ];
    for (label, m, seed) in cases {
        let mut worst_gap = 0.0_f64;
        let mut worst_res = 0.0_f64;
        for z in fixtures::states(&m, 10, seed) {
            let b = consistent_z_drift(&m, &z)?;
            let ir = invariance_residual(&m, &z)?;
            worst_res = worst_res.max(ir.residual);
            for (x, y) in b.iter().zip(&ir.coefficients) {
                worst_gap = worst_gap.max((x - y).abs());
            }
        }
        report.push(
            CheckResult::new(
                format!("consistent_drift/{label}/coefficients"),
                "the closed-form factor drift equals the projection coefficients of ∂ₓh + β^h(h)",
                worst_gap,
                Relation::AtMost,
                DRIFT_TOL,
                true,
            )
            .with("samples", 10),
        );
        report.push(
            CheckResult::new(
                format!("consistent_drift/{label}/residual"),
                "matrix-form manifolds satisfy the drift tangency condition",
                worst_res,
                Relation::AtMost,
                DRIFT_TOL,
                true,
            )
            .with("samples", 10),
        );
    }
    Ok(report)
}

fn martingale(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let anchor = "deflated bond prices are martingales under the no-arbitrage drift";
    let sim = SimulationConfig {
        n_paths: cfg.n_paths,
        n_steps: cfg.n_steps,
        seed: cfg.seed,
        threads: cfg.threads,
        ..fixtures::demo_simulation()
    };
    let maturity = 5.0;
    let spec = fixtures::demo_diffusion(0.05);
    let mut report = VerificationReport::default();

    let main = martingale_test(&spec, &sim, maturity, cfg.fault)?;
    report.push(
        CheckResult::new(
            "martingale/demo",
            anchor,
            main.z_score.abs(),
            Relation::AtMost,
            Z_SCORE_LIMIT,
            true,
        )
        .with("result", &main)
        .with("n_paths", sim.n_paths)
        .with("n_steps", sim.n_steps)
        .with("seed", sim.seed)
        .with("maturity", maturity)
        .with("fault", cfg.fault),
    );

    let flipped = martingale_test(&spec, &sim, maturity, Some(Fault::FlipDriftSign))?;
    report.push(
        CheckResult::new(
            "martingale/fault_detection",
            "a sign error in the factor drift breaks the martingale property",
            flipped.z_score.abs(),
            Relation::Above,
            FAULT_Z_SCORE,
            true,
        )
        .with("result", &flipped),
    );

    let quiet = SimulationConfig {
        n_paths: 1,
        n_steps: 10_000,
        ..sim
    };
    let still = martingale_test(&fixtures::demo_diffusion(0.0), &quiet, maturity, cfg.fault)?;
    report.push(
        CheckResult::new(
            "martingale/zero_volatility",
            "without volatility the deflated bond price is constant along the path",
            (still.estimate - still.reference).abs(),
            Relation::AtMost,
            DETERMINISTIC_TOL,
            true,
        )
        .with("result", &still),
    );
    Ok(report)
}

fn powers() -> Result<VerificationReport> {
    let anchor = "g, g², …, g^N are linearly dependent iff g is constant";
    let e = Curve::exponential(1.0, -1.0);
    let cases = [
        ("constant", Curve::constant(0.7), 4, 1),
        ("exponential", e.clone(), 4, 4),
        (
            "shifted_exponential",
            Curve::linear_combination(1.0, &[(1.0, &e)]),
            3,
            3,
        ),
    ];
    let mut report = VerificationReport::default();
    for (label, g, n, rank) in cases {
        let p = power_independence_test(&g, n, 10.0)?;
        report.push(
            CheckResult::new(
                format!("power_independence/{label}"),
                anchor,
                p.rank as f64,
                Relation::Equal,
                rank as f64,
                true,
            )
            .with("result", &p)
            .with("n", n),
        );
    }
    Ok(report)
}

fn segments() -> Result<VerificationReport> {
    let anchor = "a segment of forward curves stays in the manifold only if it is a single point";
    let t_grid = [0.0, 0.25, 0.5, 0.75, 1.0];
    let nil = fixtures::nilpotent();
    let h0 = nil.chart(&[0.5])?;
    let mut report = VerificationReport::default();
    let still = segment_degeneracy_test(&nil, &h0, &Curve::zero(), &t_grid)?;
    report.push(CheckResult::new(
        "segment_degeneracy/stationary",
        anchor,
        still,
        Relation::AtMost,
        1e-8,
        true,
    ));
    let moving = segment_degeneracy_test(&nil, &h0, &Curve::exponential(0.1, -1.0), &t_grid)?;
    report.push(CheckResult::new(
        "segment_degeneracy/perturbed",
        anchor,
        moving,
        Relation::Above,
        1e-3,
        true,
    ));
    let demo = fixtures::demo();
    let f0 = demo.chart(&[0.3])?;
    let f1 = demo.chart(&[3.0])?;
    let chord = segment_degeneracy_test(&demo, &f0, &f1.sub(&f0), &t_grid)?;
    report.push(
        CheckResult::new("segment_degeneracy/chord", anchor, chord, Relation::Above, 1e-6, true)
            .with("endpoints", [0.3, 3.0]),
    );
    Ok(report)
}

fn spans() -> Result<VerificationReport> {
    let mut report = VerificationReport::default();
    let demo = fixtures::demo();
    let s = span_condition_test(&demo, &[0.3])?;
    let yy = s.residuals_yy.iter().flatten().fold(0.0_f64, |a, &b| a.max(b));
    report.push(CheckResult::new(
        "span_condition/demo/second_order",
        "second state-derivatives of the discount chart lie in the tangent span",
        yy,
        Relation::AtMost,
        1e-12,
        true,
    ));
    report.push(CheckResult::new(
        "span_condition/demo/drift",
        "the maturity derivative plus drift lies in the tangent span",
        s.residual_x,
        Relation::AtMost,
        DRIFT_TOL,
        true,
    ));
    let q = span_condition_test(&fixtures::quadratic(), &[-0.5])?;
    report.push(CheckResult::new(
        "span_condition/quadratic/drift",
        "the quadratic family violates the drift span condition",
        q.residual_x,
        Relation::Above,
        0.05,
        true,
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_groups_are_rejected() {
        let cfg = SuiteConfig {
            checks: vec!["nope".into()],
            ..Default::default()
        };
        assert!(matches!(run_suite(&cfg), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn deterministic_groups_match_expectations() {
        let cfg = SuiteConfig {
            checks: CHECK_GROUPS
                .iter()
                .filter(|g| **g != "martingale")
                .map(|g| g.to_string())
                .collect(),
            ..Default::default()
        };
        let r = run_suite(&cfg).unwrap();
        let bad: Vec<_> = r.unexpected().collect();
        assert!(bad.is_empty(), "{bad:#?}");
        assert!(r.checks.len() > 20);
    }

    #[test]
    fn small_martingale_run() {
        let cfg = SuiteConfig {
            checks: vec!["martingale".into()],
            n_paths: 4000,
            n_steps: 100,
            ..Default::default()
        };
        let r = run_suite(&cfg).unwrap();
        assert!(r.get("martingale/zero_volatility").unwrap().passed);
        assert!(r.get("martingale/demo").unwrap().value() < 4.0);
    }
}
