//! The run configuration file: one JSON document with a section per
//! subcommand. Relative paths inside it are resolved against the file's
//! directory.

use std::fs;
use std::path::{Path, PathBuf};

use lrts::curvespace::WeightSpec;
use lrts::hjm::DiffusionConfig;
use lrts::manifold::ManifoldSpec;
use lrts::simulate::SimulationConfig;
use lrts::verify::SuiteConfig;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub weight: Option<WeightSpec>,
    pub manifold: Option<ManifoldSpec>,
    pub diffusion: Option<DiffusionConfig>,
    pub simulation: Option<SimulationConfig>,
    pub price: Option<PriceSection>,
    pub verify: Option<SuiteConfig>,
    pub fit: Option<FitSection>,
    #[serde(default)]
    pub output: OutputPaths,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceSection {
    #[serde(default)]
    pub z: Vec<f64>,
    #[serde(default)]
    pub maturities: Vec<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    pub observations: PathBuf,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub report: Option<PathBuf>,
    pub paths: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub prices: Option<PathBuf>,
    pub fit: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.resolve(&base);
        cfg.check_files()?;
        Ok(cfg)
    }

    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(f) = self.fit.as_mut() {
            fix(&mut f.observations);
        }
        let o = &mut self.output;
        for p in [&mut o.report, &mut o.paths, &mut o.summary, &mut o.prices, &mut o.fit]
            .into_iter()
            .flatten()
        {
            fix(p);
        }
    }

    fn check_files(&self) -> Result<(), CliError> {
        if let Some(f) = &self.fit {
            if !f.observations.is_file() {
                return Err(CliError::usage(format!(
                    "observations file {} does not exist",
                    f.observations.display()
                )));
            }
        }
        let o = &self.output;
        for p in [&o.report, &o.paths, &o.summary, &o.prices, &o.fit]
            .into_iter()
            .flatten()
        {
            check_output_path(p)?;
        }
        Ok(())
    }

    pub fn manifold_spec(&self) -> Result<&ManifoldSpec, CliError> {
        self.manifold
            .as_ref()
            .ok_or_else(|| CliError::usage("config has no \"manifold\" section"))
    }
}

/// Fails early when the directory of an output file is missing.
pub fn check_output_path(p: &Path) -> Result<(), CliError> {
    match p.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => Err(CliError::usage(format!(
            "output directory {} does not exist",
            dir.display()
        ))),
        _ => Ok(()),
    }
}
