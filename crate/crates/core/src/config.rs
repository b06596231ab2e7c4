//! Flat `key = value` configuration with `[section]` headers.
//!
//! ```text
//! # comment
//! workers = 4
//!
//! [recur.scan]
//! f = liouville
//! quad = 6,3,6,2
//! n = 1000000
//! ```
//!
//! Keys before the first header belong to the unnamed section `""`. Values
//! run to the end of the line and are trimmed; there is no quoting or nesting.

use std::collections::BTreeMap;
use std::path::Path;

use crate::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Config {
    sections: BTreeMap<String, Vec<(String, String)>>,
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|c| c.is_ascii_alphanumeric() || matches!(c, b'_' | b'-' | b'.'))
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let mut sections: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
        let mut current = String::new();
        sections.insert(current.clone(), Vec::new());
        let mut offset = 0;
        for raw in text.split_inclusive('\n') {
            let line_start = offset;
            offset += raw.len();
            let line = raw.trim_end_matches(['\n', '\r']);
            let lead = line.len() - line.trim_start().len();
            let body = line.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let at = line_start + lead;
            if let Some(rest) = body.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| parse_error(at, "section header is missing ']'"))?
                    .trim();
                if !valid_name(name) {
                    return Err(parse_error(at, format!("invalid section name '{name}'")));
                }
                current = name.to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| parse_error(at, "expected 'key = value'"))?;
            let key = key.trim();
            if !valid_name(key) {
                return Err(parse_error(at, format!("invalid key '{key}'")));
            }
            let entries = sections.get_mut(&current).expect("current section exists");
            if entries.iter().any(|(k, _)| k == key) {
                return Err(parse_error(at, format!("duplicate key '{key}' in section '{current}'")));
            }
            entries.push((key.to_string(), value.trim().to_string()));
        }
        Ok(Config { sections })
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read config {}: {e}", path.display())))?;
        Config::parse(&text)
    }

    /// Entries of a section in file order.
    pub fn section(&self, name: &str) -> &[(String, String)] {
        self.sections.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn sections(&self) -> impl Iterator<Item = &str> {
        self.sections.keys().map(String::as_str)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.section(section)
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Parsed value, with a diagnostic naming the key on failure.
    pub fn get_parsed<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<Option<T>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::invalid(format!("[{section}] {key} = '{v}' is malformed"))),
        }
    }
}

fn parse_error(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        offset,
        message: message.into(),
    }
}
