//! Acceptance run: one line per criterion, nonzero exit if any fails.
//! Every tolerance and runtime budget is fixed here.

use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use lrts::curvespace::{hw_norm, Curve, ExpPolyCurve, ExpTerm, Extrapolation, GridCurve, WeightSpec};
use lrts::hjm::{consistent_z_drift, hjm_drift, invariance_residual};
use lrts::quadrature::integrate_adaptive;
use lrts::simulate::{simulate, Fault, SimulationConfig};
use lrts::transform::{psi, psi_inverse};
use lrts::verify::fixtures;
use lrts::verify::{martingale_test, power_independence_test, segment_degeneracy_test};

type Outcome = Result<(bool, String), String>;

struct Criterion {
    id: u8,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn psi_roundtrip() -> Outcome {
    const TOL: f64 = 1e-8;
    let exppoly = |terms: &[(&[f64], f64)]| -> Result<Curve, String> {
        let terms = terms.iter().map(|(c, mu)| ExpTerm::new(c.to_vec(), *mu)).collect();
        Ok(Curve::from(ExpPolyCurve::new(terms).map_err(err)?))
    };
    let grid = |knots: &[f64], values: &[f64], ex: Extrapolation| -> Result<Curve, String> {
        Ok(Curve::from(
            GridCurve::new(knots.to_vec(), values.to_vec(), ex).map_err(err)?,
        ))
    };
    let curves = vec![
        Curve::constant(0.05),
        exppoly(&[(&[0.03], 0.0), (&[0.02], -0.5)])?,
        exppoly(&[(&[0.01, 0.04], -1.0)])?,
        exppoly(&[(&[0.02, 0.003, -0.0001], 0.0)])?,
        fixtures::example(-1.0).chart(&[-0.5]).map_err(err)?,
        fixtures::demo().chart(&[0.3]).map_err(err)?,
        fixtures::diagonalizable().chart(&[0.2, -0.3]).map_err(err)?,
        grid(
            &[0.0, 1.0, 3.0, 10.0],
            &[0.01, 0.02, 0.03, 0.035],
            Extrapolation::Constant,
        )?,
        grid(
            &[0.0, 0.5, 2.0, 5.0, 7.0],
            &[0.04, 0.035, 0.03, 0.032, 0.033],
            Extrapolation::ExponentialDecay(0.1),
        )?,
        grid(
            &(0..=20).map(|k| k as f64 * 0.5).collect::<Vec<_>>(),
            &(0..=20)
                .map(|k| 0.02 + 0.01 * (k as f64 * 0.3).sin())
                .collect::<Vec<_>>(),
            Extrapolation::Constant,
        )?,
    ];
    let mut worst = 0.0_f64;
    for f in &curves {
        let back = psi_inverse(&psi(f).map_err(err)?);
        worst = worst.max(back.sup_distance(f, 0.0, 10.0, 1000).map_err(err)?);
    }
    Ok((
        worst <= TOL,
        format!("{} curves, sup error {worst:.3e} <= {TOL:e}", curves.len()),
    ))
}

fn matrix_drift() -> Outcome {
    const TOL: f64 = 1e-8;
    let cases = [
        ("nilpotent", fixtures::nilpotent(), 101),
        ("diagonalizable", fixtures::diagonalizable(), 102),
        ("near_defective", fixtures::near_defective(), 103),
    ];
    let mut worst_res = 0.0_f64;
    let mut worst_gap = 0.0_f64;
    for (_, m, seed) in &cases {
        for z in fixtures::states(m, 10, *seed) {
            let ir = invariance_residual(m, &z).map_err(err)?;
            let b = consistent_z_drift(m, &z).map_err(err)?;
            worst_res = worst_res.max(ir.residual);
            for (x, y) in b.iter().zip(&ir.coefficients) {
                worst_gap = worst_gap.max((x - y).abs());
            }
        }
    }
    Ok((
        worst_res <= TOL && worst_gap <= TOL,
        format!("3 matrices x 10 states, residual {worst_res:.3e}, coefficient gap {worst_gap:.3e} (<= {TOL:e})"),
    ))
}

fn quadratic_not_invariant() -> Outcome {
    const FLOOR: f64 = 0.05;
    let m = fixtures::quadratic();
    let grid = fixtures::quadratic_grid();
    let mut least = f64::INFINITY;
    for z in &grid {
        least = least.min(invariance_residual(&m, z).map_err(err)?.residual);
    }
    Ok((
        least > FLOOR,
        format!("{} states, smallest residual {least:.4} > {FLOOR}", grid.len()),
    ))
}

fn martingale() -> Outcome {
    const Z_LIMIT: f64 = 3.0;
    const FAULT_FLOOR: f64 = 10.0;
    const T: f64 = 5.0;
    let spec = fixtures::demo_diffusion(0.05);
    let cfg = fixtures::demo_simulation();
    let ok = martingale_test(&spec, &cfg, T, None).map_err(err)?;
    let bad = martingale_test(&spec, &cfg, T, Some(Fault::FlipDriftSign)).map_err(err)?;
    Ok((
        ok.z_score.abs() <= Z_LIMIT && bad.z_score.abs() > FAULT_FLOOR,
        format!(
            "{} paths x {} steps, |z| = {:.3} <= {Z_LIMIT}, flipped drift |z| = {:.1} > {FAULT_FLOOR}",
            cfg.n_paths,
            cfg.n_steps,
            ok.z_score.abs(),
            bad.z_score.abs()
        ),
    ))
}

fn zero_volatility() -> Outcome {
    const TOL: f64 = 1e-5;
    const T: f64 = 5.0;
    let spec = fixtures::demo_diffusion(0.0);
    let z0 = 0.3;
    let cfg = SimulationConfig {
        z0: vec![z0],
        horizon: 1.0,
        n_steps: 10_000,
        n_paths: 1,
        seed: fixtures::DEMO_SEED,
        record_maturities: vec![],
        record_stride: 100,
        threads: Some(1),
    };
    let ps = simulate(&spec, &cfg).map_err(err)?;
    let m = spec.manifold();
    let p0 = m.chart_h(&[z0]).map_err(err)?.price(T).map_err(err)?;
    let path = &ps.paths[0];
    let mut worst = 0.0_f64;
    for (k, &t) in ps.times.iter().enumerate() {
        let h = m.chart_h(&path.z[k..k + 1]).map_err(err)?;
        let v = path.deflator[k] * h.price(T - t).map_err(err)?;
        worst = worst.max((v - p0).abs());
    }
    Ok((
        worst <= TOL,
        format!(
            "{} recorded times, max |D_t P(t,T) - P(0,T)| = {worst:.3e} <= {TOL:e}",
            ps.times.len()
        ),
    ))
}

fn membership() -> Outcome {
    let w = WeightSpec::new(1.0).map_err(err)?;
    let norm = |lambda: f64| -> Result<f64, String> {
        let f = fixtures::example(lambda).chart(&[-0.5]).map_err(err)?;
        hw_norm(&f, &w).map_err(err)
    };
    let inside = norm(-0.6)?;
    let outside = norm(-0.4)?;
    Ok((
        inside.is_finite() && outside == f64::INFINITY,
        format!("alpha 1: norm(lambda=-0.6) = {inside:.6}, norm(lambda=-0.4) = {outside}"),
    ))
}

fn power_and_segment() -> Outcome {
    const STILL_TOL: f64 = 1e-8;
    const MOVING_FLOOR: f64 = 1e-3;
    let constant = power_independence_test(&Curve::constant(0.7), 4, 10.0).map_err(err)?;
    let expo = power_independence_test(&Curve::exponential(1.0, -1.0), 4, 10.0).map_err(err)?;
    let m = fixtures::nilpotent();
    let h0 = m.chart(&[0.5]).map_err(err)?;
    let t_grid = [0.0, 0.25, 0.5, 0.75, 1.0];
    let still = segment_degeneracy_test(&m, &h0, &Curve::zero(), &t_grid).map_err(err)?;
    let moving = segment_degeneracy_test(&m, &h0, &Curve::exponential(0.1, -1.0), &t_grid).map_err(err)?;
    Ok((
        constant.rank == 1 && expo.rank == 4 && still <= STILL_TOL && moving > MOVING_FLOOR,
        format!(
            "ranks {}/{} (want 1/4), segment residuals {still:.3e} <= {STILL_TOL:e} and {moving:.3e} > {MOVING_FLOOR:e}",
            constant.rank, expo.rank
        ),
    ))
}

fn determinism() -> Outcome {
    let config = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join("demo.json");
    let dir = tempfile::tempdir().map_err(err)?;
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("paths_{threads}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_lrts"))
            .arg("simulate")
            .arg("--config")
            .arg(&config)
            .args(["--threads", threads, "--out"])
            .arg(&out)
            .env("LRTS_LOG", "error")
            .status()
            .map_err(err)?;
        if !status.success() {
            return Err(format!("simulate exited with {status}"));
        }
        outputs.push(std::fs::read(&out).map_err(err)?);
    }
    let same = outputs[0] == outputs[1];
    Ok((
        same,
        format!("threads 1 vs 4, {} bytes, identical: {same}", outputs[0].len()),
    ))
}

fn drift_oracle() -> Outcome {
    const TOL: f64 = 1e-10;
    let sigma = Curve::exponential(0.02, -0.5);
    let beta = hjm_drift(std::slice::from_ref(&sigma));
    let mut worst = 0.0_f64;
    for x in [0.5, 1.0, 2.0, 5.0, 10.0] {
        let integral = integrate_adaptive(|s| sigma.eval(s), 0.0, x, 1e-14, 40).map_err(err)?;
        let oracle = sigma.eval(x).map_err(err)? * integral;
        worst = worst.max((beta.eval(x).map_err(err)? - oracle).abs());
    }
    Ok((worst <= TOL, format!("5 points, max error {worst:.3e} <= {TOL:e}")))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "psi roundtrip",
            budget: Duration::from_secs(1),
            run: psi_roundtrip,
        },
        Criterion {
            id: 2,
            name: "matrix-form drift consistency",
            budget: Duration::from_secs(5),
            run: matrix_drift,
        },
        Criterion {
            id: 3,
            name: "quadratic family not invariant",
            budget: Duration::from_secs(2),
            run: quadratic_not_invariant,
        },
        Criterion {
            id: 4,
            name: "martingale test and fault detection",
            budget: Duration::from_secs(60),
            run: martingale,
        },
        Criterion {
            id: 5,
            name: "zero-volatility identity",
            budget: Duration::from_secs(1),
            run: zero_volatility,
        },
        Criterion {
            id: 6,
            name: "H_w membership of the exponential example",
            budget: Duration::from_secs(1),
            run: membership,
        },
        Criterion {
            id: 7,
            name: "power independence and segment degeneracy",
            budget: Duration::from_secs(2),
            run: power_and_segment,
        },
        Criterion {
            id: 8,
            name: "simulate determinism across threads",
            budget: Duration::from_secs(120),
            run: determinism,
        },
        Criterion {
            id: 9,
            name: "hjm drift vs quadrature",
            budget: Duration::from_secs(1),
            run: drift_oracle,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let in_budget = elapsed < c.budget;
        let (ok, detail) = match outcome {
            Ok((ok, detail)) => (ok && in_budget, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "[{}] {} {}: {} ({:.2} s, budget {} s{})",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            detail,
            elapsed.as_secs_f64(),
            c.budget.as_secs(),
            if in_budget { "" } else { ", over budget" },
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
