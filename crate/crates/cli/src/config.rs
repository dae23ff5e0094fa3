//! Flag/config-file merging. Command-line values win over the file, the
//! file wins over built-in defaults, and every value read is recorded.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

pub struct Resolver {
    file: Map<String, Value>,
    resolved: Map<String, Value>,
}

impl Resolver {
    pub fn empty() -> Self {
        Self {
            file: Map::new(),
            resolved: Map::new(),
        }
    }

    /// Reads a JSON object; keys use the long flag names with `_` for `-`.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::empty());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        match serde_json::from_str(&text) {
            Ok(Value::Object(file)) => Ok(Self {
                file,
                resolved: Map::new(),
            }),
            Ok(_) => Err(CliError::Usage(
                "config file must hold a JSON object".into(),
            )),
            Err(e) => Err(CliError::Usage(format!(
                "bad config {}: {e}",
                path.display()
            ))),
        }
    }

    pub fn optional<T: Serialize + DeserializeOwned>(
        &mut self,
        key: &str,
        flag: Option<T>,
    ) -> Result<Option<T>, CliError> {
        let v = match flag {
            Some(v) => Some(v),
            None => match self.file.get(key) {
                Some(Value::Null) | None => None,
                Some(raw) => Some(
                    serde_json::from_value(raw.clone())
                        .map_err(|e| CliError::Usage(format!("config key `{key}`: {e}")))?,
                ),
            },
        };
        let recorded = match &v {
            Some(v) => serde_json::to_value(v).map_err(|e| CliError::Usage(e.to_string()))?,
            None => Value::Null,
        };
        self.resolved.insert(key.to_string(), recorded);
        Ok(v)
    }

    /// Drops a key from the record, for values that do not affect results.
    pub fn forget(&mut self, key: &str) {
        self.resolved.remove(key);
    }

    pub fn value<T: Serialize + DeserializeOwned>(
        &mut self,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> Result<T, CliError> {
        match self.optional(key, flag)? {
            Some(v) => Ok(v),
            None => {
                let v = default;
                self.resolved.insert(
                    key.to_string(),
                    serde_json::to_value(&v).map_err(|e| CliError::Usage(e.to_string()))?,
                );
                Ok(v)
            }
        }
    }

    /// Boolean switches: set by the flag or by `true` in the file.
    pub fn switch(&mut self, key: &str, flag: bool) -> Result<bool, CliError> {
        self.value(key, flag.then_some(true), false)
    }

    pub fn required_path(&mut self, key: &str, flag: Option<PathBuf>) -> Result<PathBuf, CliError> {
        self.optional(key, flag)?
            .ok_or_else(|| CliError::Usage(format!("missing --{}", key.replace('_', "-"))))
    }

    pub fn resolved(&self) -> Value {
        Value::Object(self.resolved.clone())
    }
}

/// Comma-separated list such as `0,1,2`.
pub fn parse_list(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("expected a comma-separated list, got `{text}`")))
}
