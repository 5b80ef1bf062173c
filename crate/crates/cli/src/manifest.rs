//! Run manifests: what was run, on which bytes, with which outcome.
//!
//! `config_digest` and every file digest depend only on the configuration and
//! the bytes involved. `runtime` holds everything that may legitimately vary
//! between reruns (wall time, thread count, throughput).

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Read};
use std::path::Path;

use anyhow::Context;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

pub fn digest_file(path: &Path) -> anyhow::Result<FileDigest> {
    let mut f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut hasher = Sha256::new();
    let bytes = io::copy(&mut f, &mut hasher)?;
    Ok(FileDigest {
        path: path.display().to_string(),
        bytes,
        sha256: hex::encode(hasher.finalize()),
    })
}

pub fn digest_bytes(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: Value,
    pub config_digest: String,
    pub inputs: BTreeMap<String, FileDigest>,
    pub outputs: BTreeMap<String, FileDigest>,
    pub counts: Value,
    pub runtime: BTreeMap<&'static str, Value>,
}

impl Manifest {
    pub fn new(command: &'static str, config: impl Serialize) -> anyhow::Result<Self> {
        let config = serde_json::to_value(config)?;
        let config_digest = digest_bytes(serde_json::to_string(&config)?.as_bytes());
        Ok(Manifest {
            tool: "cdgraph",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            config_digest,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            counts: Value::Null,
            runtime: BTreeMap::new(),
        })
    }

    pub fn input(&mut self, name: &str, path: &Path) -> anyhow::Result<()> {
        self.inputs.insert(name.to_string(), digest_file(path)?);
        Ok(())
    }

    pub fn output(&mut self, name: &str, path: &Path) -> anyhow::Result<()> {
        self.outputs.insert(name.to_string(), digest_file(path)?);
        Ok(())
    }

    pub fn runtime(&mut self, key: &'static str, value: impl Serialize) {
        self.runtime.insert(key, serde_json::to_value(value).expect("serialisable"));
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serialisable");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        std::fs::write(path, self.to_json()).with_context(|| format!("writing manifest {}", path.display()))
    }
}

/// Peak resident set size of this process in KiB, where the OS reports it.
pub fn peak_rss_kib() -> Option<u64> {
    let mut status = String::new();
    File::open("/proc/self/status").ok()?.read_to_string(&mut status).ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}
