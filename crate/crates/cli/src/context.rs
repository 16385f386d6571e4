//! Run-wide plumbing: the `--config` fallback store, provenance blocks,
//! and atomic artifact writes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use helix_waves_core::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::args::{Cli, Format};

/// Global options plus the parsed `--config` file.
///
/// Lookup precedence for every value is: explicit flag, config-file key
/// (named after the long flag), documented default. Command modules express
/// that as `flag.or(ctx.f64("key")?).unwrap_or(DEFAULT)`.
pub struct Ctx {
    values: serde_json::Map<String, serde_json::Value>,
    pub output_dir: PathBuf,
    pub format: Option<Format>,
}

impl Ctx {
    pub fn new(cli: &Cli) -> Result<Self> {
        let values = match &cli.config {
            None => serde_json::Map::new(),
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                let value: serde_json::Value =
                    serde_json::from_str(&text).map_err(|e| {
                        Error::InvalidInput(format!(
                            "{} is not valid JSON: {e}",
                            path.display()
                        ))
                    })?;
                match value {
                    serde_json::Value::Object(map) => map,
                    _ => {
                        return Err(Error::InvalidInput(format!(
                            "{} must hold a JSON object of flag values",
                            path.display()
                        )))
                    }
                }
            }
        };
        Ok(Self {
            values,
            output_dir: cli.output_dir.clone().unwrap_or_else(|| PathBuf::from(".")),
            format: cli.format,
        })
    }

    fn get(&self, key: &str) -> Option<&serde_json::Value> {
        self.values.get(key)
    }

    fn type_error(key: &str, expected: &str) -> Error {
        Error::InvalidInput(format!("config key `{key}` must be {expected}"))
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| Self::type_error(key, "a number")),
        }
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(Some)
                .ok_or_else(|| Self::type_error(key, "a non-negative integer")),
        }
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>> {
        Ok(self.u64(key)?.map(|v| v as usize))
    }

    pub fn string(&self, key: &str) -> Result<Option<String>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_str()
                .map(|s| Some(s.to_string()))
                .ok_or_else(|| Self::type_error(key, "a string")),
        }
    }

    pub fn bool(&self, key: &str) -> Result<Option<bool>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_bool()
                .map(Some)
                .ok_or_else(|| Self::type_error(key, "a boolean")),
        }
    }

    pub fn path(&self, key: &str) -> Result<Option<PathBuf>> {
        Ok(self.string(key)?.map(PathBuf::from))
    }

    /// Default location for an artifact: `<output-dir>/<name>`.
    pub fn default_out(&self, name: &str) -> PathBuf {
        self.output_dir.join(name)
    }

    /// Echo `text` to stdout when `--format` matches `format`.
    pub fn echo(&self, format: Format, text: &str) {
        if self.format == Some(format) {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
        }
    }
}

/// Reproducibility block embedded in every artifact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub schema: u32,
    pub tool_version: String,
    /// First 16 hex digits of the SHA-256 of the resolved configuration.
    pub config_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Provenance {
    /// Hash the fully resolved (flags + config + defaults) parameter set so
    /// identical runs carry identical provenance.
    pub fn of<T: Serialize>(resolved: &T, seed: Option<u64>) -> Self {
        let canonical = serde_json::to_string(resolved)
            .expect("resolved configuration serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut hash = String::with_capacity(16);
        for byte in &digest[..8] {
            let _ = write!(hash, "{byte:02x}");
        }
        Self {
            schema: 1,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: hash,
            seed,
        }
    }

    /// The block as `# key: value` comment lines for TSV artifacts.
    pub fn comment_block(&self) -> String {
        let mut out = format!(
            "# schema: {}\n# tool_version: {}\n# config_hash: {}\n",
            self.schema, self.tool_version, self.config_hash
        );
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "# seed: {seed}");
        }
        out
    }
}

/// Write `bytes` to `path` atomically: a temporary file in the same
/// directory is filled first and then renamed over the target, so readers
/// never observe a half-written artifact.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

/// Serialize a JSON artifact (pretty, trailing newline) and write it
/// atomically. Returns the rendered text so callers can echo it.
pub fn write_json<T: Serialize>(path: &Path, artifact: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(artifact)
        .map_err(|e| Error::InvalidInput(format!("cannot serialize artifact: {e}")))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())?;
    Ok(text)
}
