//! Line-oriented experiment config.
//!
//! Grammar (one item per line, surrounding whitespace ignored):
//!
//! ```text
//! file     := line*
//! line     := blank | comment | section | entry
//! comment  := ('#' | ';') any*
//! section  := '[' name ']'
//! entry    := key '=' value
//! name,key := [A-Za-z0-9_.-]+
//! value    := any* (trimmed; lists are comma-separated)
//! ```
//!
//! Entries before the first section belong to the section `""`. Repeating a
//! key within a section is an error.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{config_err, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigFile {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'))
}

impl ConfigFile {
    pub fn parse(src: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current = String::new();
        for (i, raw) in src.lines().enumerate() {
            let line = raw.trim();
            let lineno = i + 1;
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| config_err(format!("line {lineno}: unterminated section")))?
                    .trim();
                if !valid_name(name) {
                    return Err(config_err(format!("line {lineno}: bad section name {name:?}")));
                }
                current = name.to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_err(format!("line {lineno}: expected key = value")))?;
            let key = key.trim();
            if !valid_name(key) {
                return Err(config_err(format!("line {lineno}: bad key {key:?}")));
            }
            let section = sections.entry(current.clone()).or_default();
            if section
                .insert(key.to_string(), value.trim().to_string())
                .is_some()
            {
                return Err(config_err(format!("line {lineno}: duplicate key {key:?}")));
            }
        }
        Ok(Self { sections })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        Self::parse(&src)
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    pub fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| config_err(format!("[{section}] {key} = {v:?} is not valid"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, section: &str, key: &str, default: T) -> Result<T> {
        Ok(self.get(section, key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, section: &str, key: &str) -> Result<T> {
        self.get(section, key)?
            .ok_or_else(|| config_err(format!("[{section}] {key} is required")))
    }

    pub fn list<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<Vec<T>>> {
        let Some(v) = self.raw(section, key) else {
            return Ok(None);
        };
        v.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|_| config_err(format!("[{section}] {key}: bad item {s:?}")))
            })
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }

    /// Rejects keys outside `allowed` so typos surface as config errors.
    pub fn check_keys(&self, section: &str, allowed: &[&str]) -> Result<()> {
        if let Some(entries) = self.sections.get(section) {
            for key in entries.keys() {
                if !allowed.contains(&key.as_str()) {
                    return Err(config_err(format!("[{section}] unknown key {key:?}")));
                }
            }
        }
        Ok(())
    }

    pub fn check_sections(&self, allowed: &[&str]) -> Result<()> {
        for s in self.sections.keys() {
            if !allowed.contains(&s.as_str()) {
                return Err(config_err(format!("unknown section [{s}]")));
            }
        }
        Ok(())
    }
}
