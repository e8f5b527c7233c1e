//! Optional TOML run configuration. Command-line flags take precedence.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use trxsave::Error;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,

    pub cells: Option<usize>,
    pub days: Option<u32>,

    pub kpis: Option<PathBuf>,
    pub traffic: Option<PathBuf>,
    pub clusters: Option<PathBuf>,
    pub assignment: Option<PathBuf>,

    pub k: Option<usize>,
    pub restarts: Option<usize>,
    pub components: Option<usize>,
    pub policy: Option<Vec<u32>>,
    pub score: Option<String>,

    pub hysteresis: Option<u32>,
    pub off_target: Option<u32>,
    pub on_target: Option<u32>,
    pub off_delay: Option<u32>,
    pub on_offset: Option<u32>,
    pub cch: Option<u32>,
    pub settle_scans: Option<usize>,
    pub ps: Option<String>,
    pub demand: Option<String>,
    pub strategy: Option<String>,
}

impl RunConfig {
    pub fn load_optional(path: Option<&Path>) -> Result<Self, Error> {
        path.map_or_else(|| Ok(RunConfig::default()), Self::load)
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("config {}: {e}", path.display())))
    }
}

/// Flag value if given, else the config value, else the default.
pub fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}
