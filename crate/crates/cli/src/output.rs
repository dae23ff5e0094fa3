//! Output files. Every file carries the tool version and the resolved
//! configuration; nothing time-dependent is written.

use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn tool() -> String {
    format!("qfs {VERSION}")
}

pub struct Output {
    pub dir: PathBuf,
    pub config: Value,
}

impl Output {
    pub fn new(dir: PathBuf, config: Value) -> Result<Self, CliError> {
        std::fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        Ok(Self { dir, config })
    }

    /// Relative paths land in the output directory.
    pub fn path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.dir.join(p)
        }
    }

    pub fn preamble(&self) -> String {
        format!(
            "# tool: {}\n# config: {}\n",
            tool(),
            serde_json::to_string(&self.config).expect("config is plain JSON")
        )
    }

    pub fn write_csv(&self, name: &Path, body: &str) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let text = format!("{}{body}", self.preamble());
        std::fs::write(&path, text).map_err(|e| io_err(&path, e))?;
        Ok(path)
    }

    /// Adds `tool` and `config` keys to a JSON object and writes it pretty.
    pub fn write_json(&self, name: &Path, body: Value) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let mut obj = match body {
            Value::Object(m) => m,
            other => {
                let mut m = Map::new();
                m.insert("data".into(), other);
                m
            }
        };
        obj.insert("tool".into(), Value::from(tool()));
        obj.insert("config".into(), self.config.clone());
        let mut text = serde_json::to_string_pretty(&Value::Object(obj))
            .map_err(|e| CliError::Compute(e.into()))?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| io_err(&path, e))?;
        Ok(path)
    }
}

pub fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Compute(anyhow::anyhow!("{}: {e}", path.display()))
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Compute(anyhow::anyhow!("{}: {e}", path.display())))
}
