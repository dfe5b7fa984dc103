//! Euler scheme for the factor process dZ = b(Z)dt + φ(Z) a dW on a
//! matrix-form manifold, with short rate, deflator and bond prices recorded
//! along each path.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvespace::Curve;
use crate::error::{Error, Result};
use crate::hjm::{z_drift_formula, DiffusionSpec};
use crate::manifold::LinearRationalManifold;

/// Simulation parameters. Maturities are times to maturity x, so the
/// recorded bond price at time t is P(t, t + x) = 1 − h_t(x).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub z0: Vec<f64>,
    pub horizon: f64,
    pub n_steps: usize,
    pub n_paths: usize,
    pub seed: u64,
    #[serde(default)]
    pub record_maturities: Vec<f64>,
    /// Record every `record_stride`-th step; the last step is always recorded.
    #[serde(default = "default_stride")]
    pub record_stride: usize,
    /// Worker threads; `None` uses the global pool.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

fn default_stride() -> usize {
    1
}

impl SimulationConfig {
    pub fn validate(&self, m: &LinearRationalManifold) -> Result<()> {
        m.domain().check(&self.z0)?;
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Error::invalid("horizon must be positive"));
        }
        if self.n_steps == 0 || self.n_paths == 0 || self.record_stride == 0 {
            return Err(Error::invalid("n_steps, n_paths and record_stride must be at least 1"));
        }
        if self.threads == Some(0) {
            return Err(Error::invalid("threads must be at least 1"));
        }
        if self.record_maturities.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
            return Err(Error::invalid("maturities must be non-negative"));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }

    /// Step indices that are recorded: 0, stride, 2·stride, …, n_steps.
    pub fn recorded_steps(&self) -> Vec<usize> {
        let mut s: Vec<usize> = (0..=self.n_steps).step_by(self.record_stride).collect();
        if s.last() != Some(&self.n_steps) {
            s.push(self.n_steps);
        }
        s
    }
}

/// Deliberate corruption of the drift, for checking that the tests notice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    FlipDriftSign,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Path {
    /// States at the recorded times (row-major, `dim` per time).
    pub z: Vec<f64>,
    pub r: Vec<f64>,
    pub deflator: Vec<f64>,
    /// Bond prices at the recorded times (row-major, one per maturity).
    pub bonds: Vec<f64>,
    /// First step at which the state left U; later records are absent.
    pub exit_step: Option<usize>,
}

impl Path {
    /// Number of recorded times on this path.
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSet {
    pub dim: usize,
    pub times: Vec<f64>,
    pub steps: Vec<usize>,
    pub maturities: Vec<f64>,
    pub paths: Vec<Path>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaturitySummary {
    pub maturity: f64,
    /// mean over paths of D_t P(t, t + x) at the horizon
    pub deflated_mean: f64,
    pub deflated_std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub n_paths: usize,
    pub n_exited: usize,
    pub horizon: f64,
    pub short_rate_mean: f64,
    pub short_rate_std: f64,
    pub deflator_mean: f64,
    pub bonds: Vec<MaturitySummary>,
}

// evaluates P(t, t + x) = 1 − c(x) − ⟨z, u(x)⟩ without rebuilding curves
struct BondTable {
    c: Vec<f64>,
    u: Vec<Vec<f64>>,
}

impl BondTable {
    fn new(m: &LinearRationalManifold, maturities: &[f64]) -> Result<Self> {
        Ok(BondTable {
            c: maturities.iter().map(|&x| m.c().eval(x)).collect::<Result<_>>()?,
            u: maturities
                .iter()
                .map(|&x| m.u().iter().map(|u| u.eval(x)).collect::<Result<Vec<_>>>())
                .collect::<Result<_>>()?,
        })
    }

    fn push(&self, z: &[f64], out: &mut Vec<f64>) {
        for (c, u) in self.c.iter().zip(&self.u) {
            out.push(1.0 - c - u.iter().zip(z).map(|(a, b)| a * b).sum::<f64>());
        }
    }
}

/// Simulates the paths.
pub fn simulate(spec: &DiffusionSpec, cfg: &SimulationConfig) -> Result<PathSet> {
    simulate_with_fault(spec, cfg, None)
}

pub fn simulate_with_fault(spec: &DiffusionSpec, cfg: &SimulationConfig, fault: Option<Fault>) -> Result<PathSet> {
    let m = spec.manifold();
    let mat = m
        .matrix()
        .ok_or_else(|| Error::UnsupportedManifold("simulation needs a generating matrix".into()))?;
    cfg.validate(m)?;
    let table = BondTable::new(m, &cfg.record_maturities)?;
    let steps = cfg.recorded_steps();
    let dt = cfg.dt();
    let sign = if fault == Some(Fault::FlipDriftSign) { -1.0 } else { 1.0 };
    let d = m.dim();
    let a = spec.a().as_matrix();
    let r_coef: Vec<f64> = (0..=d).map(|i| -mat.get(i, 0)).collect();
    let short_rate = |z: &[f64]| r_coef[0] + z.iter().zip(&r_coef[1..]).map(|(a, b)| a * b).sum::<f64>();

    let run_path = |p: usize| -> Path {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(p as u64);
        let n_rec = steps.len();
        let mut path = Path {
            z: Vec::with_capacity(n_rec * d),
            r: Vec::with_capacity(n_rec),
            deflator: Vec::with_capacity(n_rec),
            bonds: Vec::with_capacity(n_rec * table.c.len()),
            exit_step: None,
        };
        let mut z = cfg.z0.clone();
        let mut r = short_rate(&z);
        let mut log_defl = 0.0_f64;
        let mut dw = vec![0.0; d];
        let mut next = 0;
        let sq = dt.sqrt();
        for k in 0..=cfg.n_steps {
            if next < n_rec && steps[next] == k {
                path.z.extend_from_slice(&z);
                path.r.push(r);
                path.deflator.push((-log_defl).exp());
                table.push(&z, &mut path.bonds);
                next += 1;
            }
            if k == cfg.n_steps {
                break;
            }
            let b = z_drift_formula(mat, &z);
            let phi = spec.bump().eval(&z);
            for w in dw.iter_mut() {
                let n: f64 = StandardNormal.sample(&mut rng);
                *w = sq * n;
            }
            for i in 0..d {
                let mut inc = sign * b[i] * dt;
                if phi != 0.0 {
                    inc += phi * (0..d).map(|j| a[(i, j)] * dw[j]).sum::<f64>();
                }
                z[i] += inc;
            }
            let r_next = short_rate(&z);
            log_defl += 0.5 * (r + r_next) * dt;
            r = r_next;
            if !m.domain().contains(&z) {
                path.exit_step = Some(k + 1);
                break;
            }
        }
        path
    };

    let paths: Vec<Path> = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
            .install(|| (0..cfg.n_paths).into_par_iter().map(run_path).collect()),
        None => (0..cfg.n_paths).into_par_iter().map(run_path).collect(),
    };
    let exited = paths.iter().filter(|p| p.exit_step.is_some()).count();
    if exited > 0 {
        log::warn!(
            "{exited} of {} paths left the state domain and were truncated",
            cfg.n_paths
        );
    }
    Ok(PathSet {
        dim: d,
        times: steps.iter().map(|&k| k as f64 * dt).collect(),
        steps,
        maturities: cfg.record_maturities.clone(),
        paths,
    })
}

/// The forward curve at a simulated state.
pub fn reconstruct_forward(m: &LinearRationalManifold, z: &[f64]) -> Result<Curve> {
    m.chart(z)
}

impl PathSet {
    pub fn n_exited(&self) -> usize {
        self.paths.iter().filter(|p| p.exit_step.is_some()).count()
    }

    /// Paths that reached the horizon.
    pub fn complete_paths(&self) -> impl Iterator<Item = &Path> {
        let n = self.times.len();
        self.paths.iter().filter(move |p| p.len() == n)
    }

    /// Mean and standard error over complete paths of D_T P(T, T + x_i) at the horizon.
    pub fn deflated_bond(&self, maturity_index: usize) -> (f64, f64) {
        let nm = self.maturities.len();
        let last = self.times.len() - 1;
        mean_and_se(
            self.complete_paths()
                .map(|p| p.deflator[last] * p.bonds[last * nm + maturity_index]),
        )
    }

    pub fn summary(&self) -> SimulationSummary {
        let last = self.times.len() - 1;
        let (r_mean, r_se) = mean_and_se(self.complete_paths().map(|p| p.r[last]));
        let n_complete = self.complete_paths().count();
        let (defl_mean, _) = mean_and_se(self.complete_paths().map(|p| p.deflator[last]));
        SimulationSummary {
            n_paths: self.paths.len(),
            n_exited: self.n_exited(),
            horizon: self.times[last],
            short_rate_mean: r_mean,
            short_rate_std: r_se * (n_complete as f64).sqrt(),
            deflator_mean: defl_mean,
            bonds: (0..self.maturities.len())
                .map(|i| {
                    let (mean, se) = self.deflated_bond(i);
                    MaturitySummary {
                        maturity: self.maturities[i],
                        deflated_mean: mean,
                        deflated_std_error: se,
                    }
                })
                .collect(),
        }
    }

    /// CSV with header `t,path,z_1..z_d,r,D,P_T1..`, rows ordered by (path, t).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut header = vec!["t".to_string(), "path".to_string()];
        header.extend((1..=self.dim).map(|i| format!("z_{i}")));
        header.push("r".into());
        header.push("D".into());
        header.extend((1..=self.maturities.len()).map(|i| format!("P_T{i}")));
        writeln!(w, "{}", header.join(","))?;
        let nm = self.maturities.len();
        for (p, path) in self.paths.iter().enumerate() {
            for k in 0..path.len() {
                write!(w, "{:.16e},{p}", self.times[k])?;
                for v in &path.z[k * self.dim..(k + 1) * self.dim] {
                    write!(w, ",{v:.16e}")?;
                }
                write!(w, ",{:.16e},{:.16e}", path.r[k], path.deflator[k])?;
                for v in &path.bonds[k * nm..(k + 1) * nm] {
                    write!(w, ",{v:.16e}")?;
                }
                writeln!(w)?;
            }
        }
        Ok(())
    }
}

fn mean_and_se(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut n = 0usize;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for v in values {
        n += 1;
        let delta = v - mean;
        mean += delta / n as f64;
        m2 += delta * (v - mean);
    }
    if n < 2 {
        return (if n == 1 { mean } else { f64::NAN }, 0.0);
    }
    let var = m2 / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
