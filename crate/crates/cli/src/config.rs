//! Experiment configuration: a TOML file of `key = value` lines with one
//! section per experiment. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use riccati_spectra::{DiffusionParams, NumericsConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Optional; must match the subcommand when present.
    pub experiment: Option<String>,
    pub seed: u64,
    /// Replica count; each experiment has its own default.
    pub replicas: Option<usize>,
    pub out: PathBuf,
    /// Worker threads, 0 = one per core.
    pub threads: usize,
    pub numerics: NumericsConfig,
    pub stationary_exit: StationaryExit,
    pub tw_gumbel: TwGumbel,
    pub kth_marginal: KthMarginal,
    pub hill: Hill,
    pub density: Density,
    pub quadrature_tables: QuadratureTables,
    pub tridiag: Tridiag,
    pub coupled_paths: CoupledPaths,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: None,
            seed: 0,
            replicas: None,
            out: PathBuf::from("out"),
            threads: 0,
            numerics: NumericsConfig::default(),
            stationary_exit: StationaryExit::default(),
            tw_gumbel: TwGumbel::default(),
            kth_marginal: KthMarginal::default(),
            hill: Hill::default(),
            density: Density::default(),
            quadrature_tables: QuadratureTables::default(),
            tridiag: Tridiag::default(),
            coupled_paths: CoupledPaths::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StationaryExit {
    pub a: f64,
    /// Horizon in units of the mean exit time `m(a)`.
    pub horizon_means: f64,
    /// Gaps used in the exponential fit (0 = all).
    pub gaps: usize,
    /// Disjoint unit intervals used in the dispersion test.
    pub intervals: usize,
}

impl Default for StationaryExit {
    fn default() -> Self {
        StationaryExit { a: 2.0, horizon_means: 600.0, gaps: 500, intervals: 50 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TwGumbel {
    pub beta: f64,
    pub x_grid: Vec<f64>,
    pub t_resc: f64,
    pub ci_level: f64,
}

impl Default for TwGumbel {
    fn default() -> Self {
        TwGumbel { beta: 1e-4, x_grid: vec![-1.0, 0.0, 1.0], t_resc: 8.0, ci_level: 0.95 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KthMarginal {
    pub beta: f64,
    pub x_grid: Vec<f64>,
    pub t_resc: f64,
    pub k: u32,
    pub ci_level: f64,
}

impl Default for KthMarginal {
    fn default() -> Self {
        KthMarginal { beta: 1e-4, x_grid: vec![-1.0, 0.0, 1.0], t_resc: 8.0, k: 1, ci_level: 0.95 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Hill {
    pub length: f64,
    pub x_grid: Vec<f64>,
    pub ci_level: f64,
}

impl Default for Hill {
    fn default() -> Self {
        Hill { length: 1e4, x_grid: vec![-1.0, 0.0, 1.0], ci_level: 0.95 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Density {
    pub beta: f64,
    pub ell_min: f64,
    pub ell_max: f64,
    pub points: usize,
}

impl Default for Density {
    fn default() -> Self {
        Density { beta: 1e-3, ell_min: -3.0, ell_max: 3.0, points: 61 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureTables {
    pub a: Vec<f64>,
}

impl Default for QuadratureTables {
    fn default() -> Self {
        QuadratureTables { a: vec![1.0, 2.0, 3.0] }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tridiag {
    pub n: Vec<usize>,
    /// `β_N = coefficient · N^{−exponent}`.
    pub beta_coefficient: f64,
    pub beta_exponent: f64,
}

impl Default for Tridiag {
    fn default() -> Self {
        Tridiag { n: vec![4096, 8192], beta_coefficient: 1.0, beta_exponent: 0.5 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoupledPaths {
    /// Family template; its level is replaced by each entry of `levels`.
    pub params: DiffusionParams,
    pub levels: Vec<f64>,
    pub horizon: f64,
    pub record_dt: f64,
}

impl Default for CoupledPaths {
    fn default() -> Self {
        CoupledPaths {
            params: DiffusionParams::Airy { lambda: 0.0, beta: 4.0 },
            levels: vec![-2.0, 0.0, 2.0],
            horizon: 10.0,
            record_dt: 1e-2,
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    /// Fill in defaults that depend on the experiment and check the name.
    pub fn resolve(mut self, experiment: &str, default_replicas: usize) -> Result<Self> {
        match &self.experiment {
            Some(name) if name != experiment => {
                bail!("config is for experiment `{name}` but `{experiment}` was requested")
            }
            _ => self.experiment = Some(experiment.to_string()),
        }
        if self.replicas == Some(0) {
            bail!("replicas must be at least 1");
        }
        self.replicas.get_or_insert(default_replicas);
        Ok(self)
    }

    pub fn replicas(&self) -> usize {
        self.replicas.unwrap_or(1)
    }

    /// SHA-256 of the resolved config in canonical JSON, ignoring `out` and
    /// `threads`, which do not affect results.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.out = PathBuf::new();
        canonical.threads = 0;
        let json = serde_json::to_vec(&canonical).expect("config serialises");
        format!("{:x}", Sha256::digest(json))
    }
}
