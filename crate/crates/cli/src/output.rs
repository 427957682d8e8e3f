//! Output directory bookkeeping and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::RunConfig;

pub const MANIFEST: &str = "manifest.json";
pub const CONFIG_ECHO: &str = "config_echo.toml";

/// Writes files into one directory and remembers what was written.
pub struct OutputDir {
    dir: PathBuf,
    files: Vec<String>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write_csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_text(name, &text)
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.path(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Writes the config echo and `manifest.json`, which lists every file.
    pub fn finish(mut self, command: &str, config: &RunConfig, threads: usize, started: f64) -> Result<Vec<String>> {
        self.write_text(CONFIG_ECHO, &config.to_toml())?;
        let mut outputs = self.files.clone();
        outputs.push(MANIFEST.to_string());
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            master_seed: config.seed,
            threads,
            started_unix: started,
            finished_unix: unix_now(),
            outputs: outputs.clone(),
            config: config.clone(),
        };
        self.write_json(MANIFEST, &manifest)?;
        Ok(outputs)
    }
}

#[derive(Debug, Serialize)]
struct RunManifest {
    tool: &'static str,
    version: &'static str,
    command: String,
    master_seed: u64,
    threads: usize,
    started_unix: f64,
    finished_unix: f64,
    outputs: Vec<String>,
    config: RunConfig,
}

pub fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}
