//! CSV and manifest output. Every CSV starts with `#` comment lines naming the
//! experiment and the config hash, followed by a mandatory header row.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::ExperimentConfig;

pub struct Artifacts {
    dir: PathBuf,
    experiment: String,
    hash: String,
    files: Vec<String>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    experiment: &'a str,
    version: &'a str,
    config_sha256: &'a str,
    outputs: &'a [String],
    config: &'a ExperimentConfig,
}

impl Artifacts {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        std::fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
        Ok(Artifacts {
            dir: cfg.out.clone(),
            experiment: cfg.experiment.clone().unwrap_or_default(),
            hash: cfg.hash(),
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Write `name` with the provenance header; `body` writes the header row and data.
    pub fn csv(&mut self, name: &str, body: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = format!("# experiment={}\n# config_sha256={}\n", self.experiment, self.hash).into_bytes();
        body(&mut buf)?;
        let path = self.dir.join(name);
        std::fs::write(&path, buf).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn finish(self, cfg: &ExperimentConfig) -> Result<()> {
        let manifest = Manifest {
            experiment: &self.experiment,
            version: env!("CARGO_PKG_VERSION"),
            config_sha256: &self.hash,
            outputs: &self.files,
            config: cfg,
        };
        let path = self.dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

/// Format an optional value, empty when absent or not finite.
pub fn opt(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => x.to_string(),
        _ => String::new(),
    }
}
