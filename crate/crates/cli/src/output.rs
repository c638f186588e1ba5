//! Output directory handling: CSV tables, JSON documents and the manifest.

use crate::config::RunConfig;
use crate::Failure;
use serde::Serialize;
use serde_json::{json, Value};
use std::sync::Mutex;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub struct OutDir {
    root: PathBuf,
    config: Value,
    hash: String,
    written: Mutex<Vec<String>>,
}

impl OutDir {
    pub fn new(root: PathBuf, cfg: &RunConfig) -> Self {
        Self {
            root,
            config: serde_json::to_value(cfg).expect("configuration serializes"),
            hash: cfg.hash(),
            written: Mutex::new(Vec::new()),
        }
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Opens `name` for writing and records it in the manifest.
    pub fn create(&self, name: &str) -> Result<BufWriter<File>, Failure> {
        let path = self.path(name);
        let file = File::create(&path).map_err(|e| io_failure(&path, e))?;
        self.written.lock().expect("output list").push(name.to_string());
        Ok(BufWriter::new(file))
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), Failure> {
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| io_failure(&self.path(name), e))?;
        w.write_all(b"\n").map_err(|e| io_failure(&self.path(name), e))?;
        w.flush().map_err(|e| io_failure(&self.path(name), e))
    }

    /// Writes `manifest.json`: the command, the resolved configuration and its
    /// hash, the command's results and every file written so far.
    pub fn manifest(&self, command: &str, results: Value) -> Result<(), Failure> {
        let mut outputs = self.written.lock().expect("output list").clone();
        outputs.push("manifest.json".into());
        let doc = json!({
            "command": command,
            "config_hash": self.hash,
            "config": self.config,
            "results": results,
            "outputs": outputs,
        });
        self.write_json("manifest.json", &doc)
    }
}

pub fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::config(format!("io: {}: {e}", path.display()))
}

/// Maps a core error from a writer onto the output path.
pub fn write_failure(path: &Path) -> impl Fn(sobe_core::Error) -> Failure + '_ {
    move |e| io_failure(path, e)
}
