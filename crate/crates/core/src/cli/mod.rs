//! Experiment runner behind the `qusum` binary: scenario configuration,
//! one function per subcommand and the run manifest.
//!
//! Commands are pure functions of the configuration and return their output
//! files in memory; [`write_run`] puts them on disk next to a
//! `manifest.json` holding the config echo and a SHA-256 digest per file.

mod commands;
mod config;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use commands::{
    block_rate, classical_demo, divergences, simulate, BLOCK_RATE_HEADER, SIMULATE_HEADER, UNDETECTABLE_NOTE,
};
pub use config::{ConfigError, Measurement, ScenarioConfig, Source, KEYS, PRESETS};

pub const TOOL: &str = "qusum";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Divergences,
    BlockRate,
    Simulate,
    ClassicalDemo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Divergences => "divergences",
            Command::BlockRate => "block-rate",
            Command::Simulate => "simulate",
            Command::ClassicalDemo => "classical-demo",
        }
    }
}

/// Files produced by a command, in write order, plus a human summary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub files: Vec<(String, Vec<u8>)>,
    pub stdout: String,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),

    #[error("numerical non-convergence: {0}")]
    NotConverged(String),

    /// Results were computed but too many runs hit the cap; `partial` is
    /// still written.
    #[error("censoring: {message}")]
    Censored { message: String, partial: Box<RunOutput> },

    #[error(transparent)]
    Core(#[from] crate::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(crate::Error::InvalidParameter { .. }) => 2,
            CliError::NotConverged(_) | CliError::Core(crate::Error::NotConverged { .. }) => 3,
            CliError::Censored { .. } => 4,
            _ => 1,
        }
    }
}

pub fn run(command: Command, cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    cfg.validate()?;
    match command {
        Command::Divergences => divergences(cfg),
        Command::BlockRate => block_rate(cfg),
        Command::Simulate => simulate(cfg),
        Command::ClassicalDemo => classical_demo(cfg),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub timestamp: String,
    pub config: serde_json::Value,
    pub outputs: Vec<OutputDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn new(command: Command, cfg: &ScenarioConfig, output: &RunOutput) -> Self {
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            command,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            config: cfg.to_json(),
            outputs: output
                .files
                .iter()
                .map(|(name, bytes)| OutputDigest {
                    file: name.clone(),
                    bytes: bytes.len() as u64,
                    sha256: sha256_hex(bytes),
                })
                .collect(),
        }
    }

    /// Names of listed files in `dir` whose size or digest differs.
    pub fn verify(&self, dir: &Path) -> std::io::Result<Vec<String>> {
        let mut bad = Vec::new();
        for out in &self.outputs {
            let bytes = fs::read(dir.join(&out.file))?;
            if bytes.len() as u64 != out.bytes || sha256_hex(&bytes) != out.sha256 {
                bad.push(out.file.clone());
            }
        }
        Ok(bad)
    }
}

/// Writes every output file and the manifest into `dir`, creating it.
pub fn write_run(dir: &Path, command: Command, cfg: &ScenarioConfig, output: &RunOutput) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)?;
    for (name, bytes) in &output.files {
        fs::write(dir.join(name), bytes)?;
    }
    let manifest = RunManifest::new(command, cfg, output);
    let path = dir.join(MANIFEST_FILE);
    let mut text = serde_json::to_vec_pretty(&manifest).map_err(crate::Error::from)?;
    text.push(b'\n');
    fs::write(&path, text)?;
    Ok(path)
}
