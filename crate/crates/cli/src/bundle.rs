use anyhow::{Context, Result};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Collects the files a command writes, hashes them, and closes with a
/// manifest. Data files are byte-deterministic for a fixed config and
/// seed; only the manifest carries wall-clock timings.
pub struct Bundle {
    command: String,
    out_dir: PathBuf,
    config_echo: Value,
    files: Vec<(String, String, usize)>,
    start: Instant,
}

impl Bundle {
    pub fn new(command: &str, out_dir: &Path, config_echo: Value) -> Result<Self> {
        std::fs::create_dir_all(out_dir)
            .with_context(|| format!("creating output directory {}", out_dir.display()))?;
        Ok(Bundle {
            command: command.into(),
            out_dir: out_dir.to_owned(),
            config_echo,
            files: Vec::new(),
            start: Instant::now(),
        })
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.out_dir.join(name);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        let hash = format!("{:x}", Sha256::digest(text.as_bytes()));
        self.files.push((name.into(), hash, text.len()));
        Ok(())
    }

    /// JSON output with the resolved config embedded for reproducibility.
    pub fn write_json(&mut self, name: &str, payload: Value) -> Result<()> {
        let doc = json!({
            "command": self.command,
            "config": self.config_echo,
            "data": payload,
        });
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        self.write_text(name, &text)
    }

    /// Writes the manifest and returns its path.
    pub fn finish(self) -> Result<PathBuf> {
        let manifest = json!({
            "command": self.command,
            "config": self.config_echo,
            "files": self
                .files
                .iter()
                .map(|(name, sha, bytes)| json!({"name": name, "sha256": sha, "bytes": bytes}))
                .collect::<Vec<_>>(),
            "timing_seconds": self.start.elapsed().as_secs_f64(),
        });
        let path = self.out_dir.join("report.json");
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}
