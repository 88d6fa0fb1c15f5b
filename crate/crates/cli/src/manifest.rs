use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use phasefront::landscape::write_atomic;

#[derive(Debug, Serialize)]
pub struct OutputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

/// Record written next to every primary output as `<out>.manifest.json`.
/// Its `parameters` object can be fed back through `--config`.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: Value,
    pub threads: usize,
    pub version: String,
    pub duration_seconds: f64,
    pub outputs: Vec<OutputDigest>,
}

pub fn digest(path: &Path) -> std::io::Result<String> {
    Ok(hex::encode(Sha256::digest(std::fs::read(path)?)))
}

impl RunManifest {
    pub fn new(
        subcommand: &str,
        parameters: Value,
        threads: usize,
        elapsed: Duration,
        outputs: &[PathBuf],
    ) -> std::io::Result<Self> {
        Ok(Self {
            subcommand: subcommand.to_string(),
            parameters,
            threads,
            version: env!("CARGO_PKG_VERSION").to_string(),
            duration_seconds: elapsed.as_secs_f64(),
            outputs: outputs
                .iter()
                .map(|p| Ok(OutputDigest { path: p.clone(), sha256: digest(p)? }))
                .collect::<std::io::Result<_>>()?,
        })
    }

    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
        name.push(".manifest.json");
        output.with_file_name(name)
    }

    pub fn write(&self, output: &Path) -> phasefront::Result<PathBuf> {
        let path = Self::path_for(output);
        let json = serde_json::to_vec_pretty(self).expect("manifest serializes");
        write_atomic(&path, &json)?;
        Ok(path)
    }
}
