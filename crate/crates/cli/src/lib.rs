//! Batch front end: parses one JSON run configuration plus flag overrides,
//! dispatches to the library and writes CSV/JSON results.
//!
//! Exit codes: 0 success, 1 usage or schema error, 2 domain or invariant
//! violation, 3 verification mismatch.

pub mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use log::{info, warn};
use lrts::hjm::DiffusionSpec;
use lrts::manifold::LinearRationalManifold;
use lrts::simulate::{simulate_with_fault, Fault};
use lrts::verify::{run_suite, SuiteConfig};
use lrts::Error;
use serde::{Deserialize, Serialize};
use serde_json::json;

pub use config::RunConfig;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VIOLATION: u8 = 2;
pub const EXIT_MISMATCH: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: msg.into(),
        }
    }

    fn io(path: &Path, e: io::Error) -> Self {
        CliError::usage(format!("{}: {e}", path.display()))
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) => EXIT_USAGE,
            _ => EXIT_VIOLATION,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Debug, Parser)]
#[command(name = "lrts", version, about = "Linear-rational term-structure models")]
pub struct Cli {
    /// JSON run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Primary output file (report, CSV, fit result)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub paths: Option<usize>,
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Worker threads for simulation; results do not depend on it
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Test hook: corrupt the simulated drift
    #[arg(long, global = true, hide = true, value_enum)]
    pub inject_fault: Option<FaultArg>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FaultArg {
    FlipDriftSign,
}

impl From<FaultArg> for Fault {
    fn from(f: FaultArg) -> Self {
        match f {
            FaultArg::FlipDriftSign => Fault::FlipDriftSign,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a manifold and report its invariant checks
    Manifold {
        #[arg(value_parser = ["build"])]
        action: Option<String>,
        /// Same as --out
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Bond prices and forward rates at a state
    Price {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        z: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        maturities: Option<Vec<f64>>,
    },
    /// Monte Carlo simulation of the factor dynamics
    Simulate {
        /// summary.json location; defaults next to the paths CSV
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Run the verification suite
    Verify {
        /// Comma-separated check groups
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
    },
    /// Fit the state to observed bond prices
    Fit {
        /// CSV with header maturity,price
        #[arg(long)]
        observations: Option<PathBuf>,
    },
}

/// Parses arguments, runs, and reports errors on stderr.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

pub fn run(cli: &Cli) -> Result<u8, CliError> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(p) = &cli.out {
        config::check_output_path(p)?;
    }
    match &cli.command {
        Command::Manifold { report, .. } => cmd_manifold(cli, &cfg, report.as_deref()),
        Command::Price { z, maturities } => cmd_price(cli, &cfg, z.as_deref(), maturities.as_deref()),
        Command::Simulate { summary } => cmd_simulate(cli, &cfg, summary.as_deref()),
        Command::Verify { checks } => cmd_verify(cli, &cfg, checks.as_deref()),
        Command::Fit { observations } => cmd_fit(cli, &cfg, observations.as_deref()),
    }
}

fn pick<'a>(flag: Option<&'a Path>, cfg: Option<&'a PathBuf>) -> Option<&'a Path> {
    flag.or(cfg.map(PathBuf::as_path))
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), CliError> {
    let mut w = open_out(path)?;
    let write = |w: &mut Box<dyn Write>| -> io::Result<()> {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        w.flush()
    };
    write(&mut w).map_err(|e| CliError::usage(format!("writing output: {e}")))
}

fn build_manifold(cfg: &RunConfig) -> Result<LinearRationalManifold, CliError> {
    Ok(cfg.manifold_spec()?.build()?)
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Domain(_) => "domain",
        Error::Positivity { .. } | Error::PositivityWitness { .. } => "positivity",
        Error::Quadrature { .. } => "quadrature",
        Error::DegenerateManifold { .. } => "degenerate_manifold",
        Error::IllPosedFit(_) => "ill_posed_fit",
        Error::UnsupportedManifold(_) => "unsupported_manifold",
        Error::InvalidArgument(_) => "invalid_argument",
    }
}

pub fn cmd_manifold(cli: &Cli, cfg: &RunConfig, report: Option<&Path>) -> Result<u8, CliError> {
    let spec = cfg.manifold_spec()?;
    let out = pick(report.or(cli.out.as_deref()), cfg.output.report.as_ref());
    match spec.build() {
        Ok(m) => {
            info!("manifold of dimension {} built", m.dim());
            write_json(out, &json!({ "status": "ok", "checks": m.checks() }))?;
            Ok(EXIT_OK)
        }
        Err(e @ Error::InvalidArgument(_)) => Err(e.into()),
        Err(e) => {
            let mut body = json!({
                "status": "violation",
                "kind": error_kind(&e),
                "message": e.to_string(),
            });
            match &e {
                Error::PositivityWitness { z, x, value } => {
                    body["witness"] = json!({ "z": z, "x": x, "value": value });
                }
                Error::DegenerateManifold {
                    min_eigenvalue,
                    max_eigenvalue,
                } => {
                    body["gram_min_eigenvalue"] = json!(min_eigenvalue);
                    body["gram_max_eigenvalue"] = json!(max_eigenvalue);
                }
                _ => {}
            }
            write_json(out, &body)?;
            eprintln!("error: {e}");
            Ok(EXIT_VIOLATION)
        }
    }
}

pub fn cmd_price(cli: &Cli, cfg: &RunConfig, z: Option<&[f64]>, maturities: Option<&[f64]>) -> Result<u8, CliError> {
    let section = cfg.price.clone().unwrap_or_default();
    let z = z.map(<[f64]>::to_vec).unwrap_or(section.z);
    let maturities = maturities.map(<[f64]>::to_vec).unwrap_or(section.maturities);
    if maturities.is_empty() {
        return Err(CliError::usage("no maturities given"));
    }
    if let Some(bad) = maturities.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(CliError::usage(format!(
            "maturity {bad} is not a finite non-negative number"
        )));
    }
    let m = build_manifold(cfg)?;
    if z.len() != m.dim() {
        return Err(CliError::usage(format!(
            "state has {} coordinates, manifold dimension is {}",
            z.len(),
            m.dim()
        )));
    }
    m.domain().check(&z)?;
    let f = m.chart(&z)?;
    let h = m.chart_h(&z)?;
    let out = pick(cli.out.as_deref(), cfg.output.prices.as_ref());
    let mut w = open_out(out)?;
    let mut rows = String::from("maturity,price,forward_rate,discount_h\n");
    // `+ 0.0` turns −0 into 0
    for &x in &maturities {
        rows.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}\n",
            x,
            h.price(x)?,
            f.eval(x)? + 0.0,
            h.eval(x)? + 0.0
        ));
    }
    w.write_all(rows.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| CliError::usage(format!("writing prices: {e}")))?;
    Ok(EXIT_OK)
}

pub fn cmd_simulate(cli: &Cli, cfg: &RunConfig, summary: Option<&Path>) -> Result<u8, CliError> {
    let mut sim = cfg
        .simulation
        .clone()
        .ok_or_else(|| CliError::usage("config has no \"simulation\" section"))?;
    let diffusion = cfg
        .diffusion
        .clone()
        .ok_or_else(|| CliError::usage("config has no \"diffusion\" section"))?;
    if let Some(s) = cli.seed {
        sim.seed = s;
    }
    if let Some(n) = cli.paths {
        sim.n_paths = n;
    }
    if let Some(n) = cli.steps {
        sim.n_steps = n;
    }
    if cli.threads.is_some() {
        sim.threads = cli.threads;
    }
    let paths_out = pick(cli.out.as_deref(), cfg.output.paths.as_ref())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("paths.csv"));
    let summary_out = pick(summary, cfg.output.summary.as_ref())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| paths_out.with_file_name("summary.json"));
    config::check_output_path(&summary_out)?;

    let spec = DiffusionSpec::from_config(build_manifold(cfg)?, diffusion)?;
    let fault = cli.inject_fault.map(Fault::from);
    if fault.is_some() {
        warn!("drift fault injected");
    }
    let set = simulate_with_fault(&spec, &sim, fault)?;
    info!(
        "{} paths simulated, {} exited the domain",
        set.paths.len(),
        set.n_exited()
    );

    let mut w = open_out(Some(&paths_out))?;
    set.write_csv(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(&paths_out, e))?;
    write_json(Some(&summary_out), &set.summary())?;
    Ok(EXIT_OK)
}

pub fn cmd_verify(cli: &Cli, cfg: &RunConfig, checks: Option<&[String]>) -> Result<u8, CliError> {
    let mut suite = cfg.verify.clone().unwrap_or_default();
    if let Some(w) = &cfg.weight {
        suite.alpha = w.alpha;
    }
    if let Some(c) = checks {
        suite.checks = c.to_vec();
    }
    override_suite(cli, &mut suite);
    suite.validate()?;
    let report = run_suite(&suite)?;
    for c in &report.checks {
        info!("{:?} {}", c.verdict, c.name);
    }
    for c in report.unexpected() {
        eprintln!(
            "{:?}: {} (statistic {:?}, threshold {})",
            c.verdict, c.name, c.statistic, c.threshold
        );
    }
    let all = report.all_as_expected();
    let out = pick(cli.out.as_deref(), cfg.output.report.as_ref());
    write_json(
        out,
        &json!({ "all_as_expected": all, "config": suite, "checks": report.checks }),
    )?;
    Ok(if all { EXIT_OK } else { EXIT_MISMATCH })
}

fn override_suite(cli: &Cli, suite: &mut SuiteConfig) {
    if let Some(s) = cli.seed {
        suite.seed = s;
    }
    if let Some(n) = cli.paths {
        suite.n_paths = n;
    }
    if let Some(n) = cli.steps {
        suite.n_steps = n;
    }
    if cli.threads.is_some() {
        suite.threads = cli.threads;
    }
    if let Some(f) = cli.inject_fault {
        suite.fault = Some(f.into());
    }
}

#[derive(Debug, Deserialize)]
struct Observation {
    maturity: f64,
    price: f64,
}

pub fn read_observations(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let headers = rdr
        .headers()
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    if headers.iter().collect::<Vec<_>>() != ["maturity", "price"] {
        return Err(CliError::usage(format!(
            "{}: expected header maturity,price",
            path.display()
        )));
    }
    rdr.deserialize::<Observation>()
        .map(|r| {
            r.map(|o| (o.maturity, o.price))
                .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
        })
        .collect()
}

pub fn cmd_fit(cli: &Cli, cfg: &RunConfig, observations: Option<&Path>) -> Result<u8, CliError> {
    let obs_path = observations
        .or(cfg.fit.as_ref().map(|f| f.observations.as_path()))
        .ok_or_else(|| CliError::usage("no observations file given"))?;
    let obs = read_observations(obs_path)?;
    let m = build_manifold(cfg)?;
    let fit = m.fit_state(&obs)?;
    if !fit.in_domain {
        warn!("fitted state {:?} lies outside the domain", fit.z);
    }
    write_json(pick(cli.out.as_deref(), cfg.output.fit.as_ref()), &fit)?;
    Ok(EXIT_OK)
}
