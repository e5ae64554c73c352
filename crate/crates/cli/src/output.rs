//! Output helpers: every file carries the config hash and toolkit version.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use tlf_core::Result;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub struct OutputCtx {
    dir: PathBuf,
    hash: u64,
}

impl OutputCtx {
    pub fn new(dir: &Path, hash: u64) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(OutputCtx {
            dir: dir.to_path_buf(),
            hash,
        })
    }

    pub fn hash_hex(&self) -> String {
        format!("{:016x}", self.hash)
    }

    pub fn hash(&self) -> u64 {
        self.hash
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Writes a JSON object with `config_hash` and `version` injected.
    pub fn write_json(&self, name: &str, body: serde_json::Value) -> Result<PathBuf> {
        let mut obj = serde_json::Map::new();
        obj.insert("config_hash".to_string(), self.hash_hex().into());
        obj.insert("version".to_string(), VERSION.into());
        if let serde_json::Value::Object(map) = body {
            obj.extend(map);
        }
        let path = self.path(name);
        let file = File::create(&path)?;
        let mut w = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut w, &serde_json::Value::Object(obj))
            .map_err(|e| tlf_core::Error::Parse(format!("serializing {name}: {e}")))?;
        writeln!(w)?;
        Ok(path)
    }

    /// Opens a CSV file and writes the provenance comment line.
    pub fn csv_writer(&self, name: &str) -> Result<(BufWriter<File>, PathBuf)> {
        let path = self.path(name);
        let mut w = BufWriter::new(File::create(&path)?);
        writeln!(w, "# tlf version={VERSION} config_hash={}", self.hash_hex())?;
        Ok((w, path))
    }
}
