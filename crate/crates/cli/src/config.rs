//! `key = value` config files whose keys are long flag names.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};

pub const KEYS: &[&str] = &[
    "problem",
    "model",
    "replay",
    "provider",
    "base-url",
    "api-key-env",
    "iterations",
    "samples",
    "temperature",
    "demos",
    "timeout",
    "cores",
    "seed",
    "out",
    "suite",
    "refs",
    "runner",
    "price-in",
    "price-out",
    "uncapped",
    "keep-artifacts",
];

#[derive(Debug, Default)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        FileConfig::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<FileConfig> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("line {}: expected `key = value`", n + 1);
            };
            let k = k.trim().trim_start_matches("--").replace('_', "-");
            if !KEYS.contains(&k.as_str()) {
                bail!("line {}: unknown key `{k}`", n + 1);
            }
            values.insert(k, v.trim().to_string());
        }
        Ok(FileConfig { values })
    }

    /// The command-line value if given, else the parsed config value.
    pub fn or<T>(&self, cli: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| anyhow::anyhow!("config key `{key}`: invalid value `{v}`: {e}")),
        }
    }

    pub fn flag(&self, cli: bool, key: &str) -> Result<bool> {
        Ok(cli || self.or::<bool>(None, key)?.unwrap_or(false))
    }
}
