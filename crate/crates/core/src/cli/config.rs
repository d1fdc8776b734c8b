//! Plain-text `key = value` configuration files. Keys are flag names
//! without the leading dashes; `#` starts a comment.

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

pub const KNOWN_KEYS: &[&str] = &[
    "p",
    "k",
    "beta-min",
    "beta-min-sq",
    "gamma",
    "n",
    "trials",
    "seed",
    "ensemble",
    "restricted",
    "out",
    "format",
    "variable",
    "values",
    "start",
    "stop",
    "count",
    "spacing",
    "scope",
    "family",
    "p-values",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::usage(format!("config line {}: expected 'key = value'", lineno + 1)))?;
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(Error::usage(format!("config line {}: unknown key '{key}'", lineno + 1)));
            }
            if entries.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(Error::usage(format!("config line {}: duplicate key '{key}'", lineno + 1)));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|_| Error::usage(format!("config key '{key}': cannot parse '{v}'"))))
            .transpose()
    }

    /// Keeps an explicit flag value, otherwise falls back to the file.
    pub fn fill<T: FromStr>(&self, slot: &mut Option<T>, key: &str) -> Result<()> {
        if slot.is_none() {
            *slot = self.get(key)?;
        }
        Ok(())
    }
}
