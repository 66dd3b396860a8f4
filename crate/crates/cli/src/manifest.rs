use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::Context;
use serde::{Deserialize, Serialize};

/// Everything needed to rerun a command, written next to each output file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name, replayable as given.
    pub args: Vec<String>,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub outputs: Vec<PathBuf>,
    pub started_unix: u64,
    pub wall_clock_seconds: f64,
}

pub struct Recorder {
    command: &'static str,
    args: Vec<String>,
    parameters: serde_json::Value,
    seed: Option<u64>,
    started_unix: u64,
    clock: Instant,
}

impl Recorder {
    pub fn start(
        command: &'static str,
        args: &[String],
        parameters: impl Serialize,
        seed: Option<u64>,
    ) -> anyhow::Result<Self> {
        let started_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Ok(Self {
            command,
            args: args.to_vec(),
            parameters: serde_json::to_value(parameters)?,
            seed,
            started_unix,
            clock: Instant::now(),
        })
    }

    /// Writes `<primary>.manifest.json` listing `outputs`.
    pub fn finish(self, primary: &Path, outputs: &[PathBuf]) -> anyhow::Result<()> {
        let manifest = RunManifest {
            command: self.command.to_string(),
            args: self.args,
            parameters: self.parameters,
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: outputs.to_vec(),
            started_unix: self.started_unix,
            wall_clock_seconds: self.clock.elapsed().as_secs_f64(),
        };
        let path = manifest_path(primary);
        std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

pub fn manifest_path(primary: &Path) -> PathBuf {
    let mut name = primary.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub fn read(path: &Path) -> anyhow::Result<RunManifest> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text)?)
}
