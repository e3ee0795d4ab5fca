use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use gldpc::Result;

/// Where artifacts go and how they are named.
pub struct Artifacts {
    dir: PathBuf,
    stem: String,
    config: Value,
    written: Vec<PathBuf>,
}

impl Artifacts {
    pub fn new(dir: &Path, stem: String, config: Value) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            stem,
            config,
            written: Vec::new(),
        })
    }

    fn path(&mut self, suffix: &str) -> PathBuf {
        let p = self.dir.join(format!("{}{suffix}", self.stem));
        self.written.push(p.clone());
        p
    }

    /// `{tool, version, config, result}` as pretty JSON.
    pub fn json(&mut self, result: &impl Serialize) -> Result<PathBuf> {
        let doc = json!({
            "tool": "gldpc",
            "version": gldpc::VERSION,
            "config": self.config,
            "result": serde_json::to_value(result).map_err(std::io::Error::other)?,
        });
        let path = self.path(".json");
        let mut f = BufWriter::new(File::create(&path)?);
        serde_json::to_writer_pretty(&mut f, &doc).map_err(std::io::Error::other)?;
        writeln!(f)?;
        f.flush()?;
        Ok(path)
    }

    /// CSV whose first line is a `#` comment carrying the version and config.
    pub fn csv(&mut self, suffix: &str, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<PathBuf> {
        let path = self.path(&format!("{suffix}.csv"));
        let mut f = BufWriter::new(File::create(&path)?);
        writeln!(f, "# gldpc {} {}", gldpc::VERSION, self.config)?;
        body(&mut f)?;
        f.flush()?;
        Ok(path)
    }

    /// Run metadata: config, version, extra fields and a timestamp.
    pub fn metadata(&mut self, extra: &impl Serialize) -> Result<PathBuf> {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let doc = json!({
            "tool": "gldpc",
            "version": gldpc::VERSION,
            "config": self.config,
            "run": serde_json::to_value(extra).map_err(std::io::Error::other)?,
            "timestamp_unix": secs,
        });
        let path = self.path(".meta.json");
        let mut f = BufWriter::new(File::create(&path)?);
        serde_json::to_writer_pretty(&mut f, &doc).map_err(std::io::Error::other)?;
        writeln!(f)?;
        f.flush()?;
        Ok(path)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}
