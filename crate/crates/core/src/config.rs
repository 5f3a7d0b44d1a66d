//! Flat `key = value` configuration text. `#` starts a comment; keys are
//! lowercase ASCII letters, digits, `_` and `-` (dashes normalize to
//! underscores); each key may appear once.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, (String, usize)>,
}

impl ConfigFile {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    /// Line on which `key` was set.
    pub fn line_of(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|(_, l)| *l)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parses `key` with `FromStr`, reporting the line on failure.
    pub fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<T>().map(Some).map_err(|_| Error::Parse {
                line: *line,
                message: format!("invalid value `{v}` for `{key}`"),
            }),
        }
    }
}

pub fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let mut entries = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Parse {
                line,
                message: format!("expected `key = value`, found `{content}`"),
            });
        };
        let key = normalize_key(key);
        if key.is_empty() || !key.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_') {
            return Err(Error::Parse {
                line,
                message: format!("invalid key `{key}`"),
            });
        }
        let value = value.trim();
        if value.is_empty() {
            return Err(Error::Parse {
                line,
                message: format!("missing value for `{key}`"),
            });
        }
        if let Some((_, first)) = entries.get(&key) {
            return Err(Error::Parse {
                line,
                message: format!("`{key}` already set on line {first}"),
            });
        }
        entries.insert(key, (value.to_string(), line));
    }
    Ok(ConfigFile { entries })
}

pub fn load_config(path: &Path) -> Result<ConfigFile> {
    parse_config(&std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?)
}
