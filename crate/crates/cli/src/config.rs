//! Resolved experiment configuration.
//!
//! Values come from three layers: built-in defaults, an optional `key=value`
//! document, and command-line flags, later layers winning. The document
//! parser strips a leading `#` and skips lines without `=`, so the header of
//! any output file can be fed back as a configuration.

use std::collections::BTreeMap;
use std::path::Path;

use sha2::{Digest, Sha256};

use qmc_hyperinterp::{GammaRule, ProductWeights};

use crate::error::CliError;

/// Keys written into headers that are not configuration inputs.
const DERIVED_KEYS: [&str; 1] = ["config_hash"];

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    command: String,
    values: BTreeMap<String, String>,
}

pub fn parse_document(text: &str) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for line in text.lines() {
        let line = line.trim().trim_start_matches('#').trim();
        if let Some((k, v)) = line.split_once('=') {
            let key = k.trim();
            if key.is_empty() || key.contains(char::is_whitespace) || key.contains(',') {
                continue;
            }
            out.insert(key.to_string(), v.trim().to_string());
        }
    }
    out
}

impl Config {
    /// Layers defaults, the document at `file` and explicit flags.
    pub fn resolve(
        command: &str,
        defaults: &[(&str, &str)],
        file: Option<&Path>,
        flags: Vec<(&str, Option<String>)>,
    ) -> Result<Config, CliError> {
        let mut values: BTreeMap<String, String> =
            defaults.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
            for (k, v) in parse_document(&text) {
                if DERIVED_KEYS.contains(&k.as_str()) {
                    continue;
                }
                if k == "command" {
                    if v != command {
                        return Err(CliError::Config(format!(
                            "config is for command `{v}`, not `{command}`"
                        )));
                    }
                    continue;
                }
                if !values.contains_key(&k) {
                    return Err(CliError::Config(format!("unknown key `{k}` for {command}")));
                }
                values.insert(k, v);
            }
        }
        for (k, v) in flags {
            if let Some(v) = v {
                debug_assert!(values.contains_key(k), "flag {k} lacks a default");
                values.insert(k.to_string(), v);
            }
        }
        Ok(Config { command: command.to_string(), values })
    }

    pub fn command(&self) -> &str {
        &self.command
    }

    pub fn get(&self, key: &str) -> Result<&str, CliError> {
        self.values
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| CliError::Config(format!("missing key `{key}`")))
    }

    pub fn set(&mut self, key: &str, value: String) {
        self.values.insert(key.to_string(), value);
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T, CliError> {
        let raw = self.get(key)?;
        raw.parse()
            .map_err(|_| CliError::Config(format!("cannot parse `{key}={raw}`")))
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        self.parse(key)
    }

    pub fn u64(&self, key: &str) -> Result<u64, CliError> {
        self.parse(key)
    }

    pub fn u32(&self, key: &str) -> Result<u32, CliError> {
        self.parse(key)
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        self.parse(key)
    }

    pub fn list_u64(&self, key: &str) -> Result<Vec<u64>, CliError> {
        let raw = self.get(key)?;
        if raw.is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|t| t.trim().parse().map_err(|_| CliError::Config(format!("bad entry `{t}` in `{key}`"))))
            .collect()
    }

    pub fn list_f64(&self, key: &str) -> Result<Vec<f64>, CliError> {
        let raw = self.get(key)?;
        raw.split(',')
            .map(|t| t.trim().parse().map_err(|_| CliError::Config(format!("bad entry `{t}` in `{key}`"))))
            .collect()
    }

    pub fn gamma(&self, key: &str) -> Result<GammaRule, CliError> {
        Ok(self.get(key)?.parse()?)
    }

    /// Weights from the `alpha` and `gamma` keys.
    pub fn weights(&self) -> Result<ProductWeights, CliError> {
        Ok(ProductWeights::new(self.f64("alpha")?, self.gamma("gamma")?)?)
    }

    /// `key=value` lines in key order.
    pub fn canonical(&self) -> String {
        let mut out = format!("command={}\n", self.command);
        for (k, v) in &self.values {
            out.push_str(&format!("{k}={v}\n"));
        }
        out
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }

    /// Comment block stamping the resolved configuration and its hash.
    pub fn header(&self) -> String {
        let mut out = String::new();
        for line in self.canonical().lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&format!("# config_hash={}\n", self.hash()));
        out
    }
}
