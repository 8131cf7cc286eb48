use std::path::{Path, PathBuf};

use approxdual::TruncationPolicy;
use serde::Deserialize;

use crate::Failure;

/// Contents of a `--config` TOML file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub policy: TruncationPolicy,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let cfg: Self = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.policy.validate().map_err(|e| e.to_string())?;
        if cfg.threads == Some(0) {
            return Err("threads must be positive".into());
        }
        Ok(cfg)
    }
}
