//! Run manifests: every invocation records its resolved configuration, the
//! digests of the files it read, and the files it wrote.

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub digest: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub inputs: Vec<InputRecord>,
    pub outputs: Vec<String>,
}

/// Tracks inputs and outputs of one run and writes the manifest at the end.
/// Output paths are recorded relative to the output directory so identical
/// runs produce identical manifests wherever they land.
pub struct RunTracker {
    out_dir: PathBuf,
    inputs: Vec<InputRecord>,
    outputs: Vec<String>,
}

pub fn sha256_hex(path: &Path) -> Result<String> {
    let mut file =
        File::open(path).with_context(|| format!("cannot open input {}", path.display()))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(format!("{:x}", hasher.finalize()))
}

impl RunTracker {
    pub fn new(out_dir: &Path) -> Result<Self> {
        fs::create_dir_all(out_dir)
            .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
        Ok(RunTracker { out_dir: out_dir.to_path_buf(), inputs: Vec::new(), outputs: Vec::new() })
    }

    pub fn out_dir(&self) -> &Path {
        &self.out_dir
    }

    /// Record (and digest) a file this run reads.
    pub fn input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(InputRecord {
            path: path.display().to_string(),
            digest: sha256_hex(path)?,
        });
        Ok(())
    }

    /// Open a named output file in the output directory.
    pub fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.out_dir.join(name);
        let file = File::create(&path)
            .with_context(|| format!("cannot create output {}", path.display()))?;
        self.outputs.push(name.to_string());
        Ok(BufWriter::new(file))
    }

    pub fn path_of(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    /// Write `manifest_<command>.json` and consume the tracker.
    pub fn finish(self, command: &str, config: serde_json::Value) -> Result<()> {
        let manifest = RunManifest {
            command: command.to_string(),
            config,
            inputs: self.inputs,
            outputs: self.outputs,
        };
        let path = self.out_dir.join(format!("manifest_{command}.json"));
        let file = File::create(&path)
            .with_context(|| format!("cannot create manifest {}", path.display()))?;
        let mut writer = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut writer, &manifest)?;
        writer.write_all(b"\n")?;
        Ok(())
    }
}
