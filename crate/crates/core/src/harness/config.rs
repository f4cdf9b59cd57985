//! Plain `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Recognised keys are
//! listed in [`KNOWN_KEYS`]; anything else is rejected so typos surface early.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

pub const KNOWN_KEYS: &[&str] = &[
    "problem",
    "eos",
    "gamma",
    "degree",
    "cells",
    "tfinal",
    "safety",
    "safety_factor",
    "cfl",
    "cfl_table",
    "alpha_max",
    "indicator.a",
    "indicator.c",
    "indicator.s",
    "indicator.alpha_min",
    "indicator.enabled",
    "correction",
    "scaling",
    "flux_correction",
    "zhang_shu",
    "jet.pressure",
    "out",
    "threads",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            let key = k.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::Config(format!("line {}: unknown key '{key}'", n + 1)));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| parse_f64(key, v)).transpose()
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        self.get(key)
            .map(|v| v.parse().map_err(|_| Error::Config(format!("{key}: expected an integer, got '{v}'"))))
            .transpose()
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>> {
        self.get(key)
            .map(|v| match v.to_ascii_lowercase().as_str() {
                "true" | "yes" | "on" | "1" => Ok(true),
                "false" | "no" | "off" | "0" => Ok(false),
                _ => Err(Error::Config(format!("{key}: expected a boolean, got '{v}'"))),
            })
            .transpose()
    }
}

pub fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: expected a number, got '{v}'")))
}

/// Comma-separated list of cell counts; in 2-D an entry may be `NX` or `NXxNY`.
pub fn parse_cells(v: &str) -> Result<Vec<[usize; 2]>> {
    v.split(',')
        .map(|item| {
            let item = item.trim();
            let bad = || Error::Config(format!("cells: cannot parse '{item}'"));
            match item.split_once(['x', 'X']) {
                Some((a, b)) => Ok([a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?]),
                None => {
                    let n: usize = item.parse().map_err(|_| bad())?;
                    Ok([n, n])
                }
            }
        })
        .collect()
}

/// One resolution: `NX`, `NX,NY` or `NXxNY`. A single number is used on both axes.
pub fn parse_resolution(v: &str) -> Result<[usize; 2]> {
    let parts: Vec<&str> = v.split([',', 'x', 'X']).map(str::trim).collect();
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Config(format!("cells: cannot parse '{v}'")))
    };
    match parts.as_slice() {
        [n] => {
            let n = num(n)?;
            Ok([n, n])
        }
        [a, b] => Ok([num(a)?, num(b)?]),
        _ => Err(Error::Config(format!("cells: expected NX or NX,NY, got '{v}'"))),
    }
}

pub fn parse_list_f64(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|s| parse_f64(key, s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_reject() {
        let c = ConfigFile::parse("# comment\nproblem = rp1\n\ncells= 500\nindicator.enabled = off\n").unwrap();
        assert_eq!(c.get("problem"), Some("rp1"));
        assert_eq!(c.get_usize("cells").unwrap(), Some(500));
        assert_eq!(c.get_bool("indicator.enabled").unwrap(), Some(false));
        assert!(ConfigFile::parse("bogus = 1").is_err());
        assert!(ConfigFile::parse("problem rp1").is_err());
        assert!(c.get_f64("problem").is_err());
    }

    #[test]
    fn cell_lists() {
        assert_eq!(parse_cells("8,16").unwrap(), vec![[8, 8], [16, 16]]);
        assert_eq!(parse_cells("120x125").unwrap(), vec![[120, 125]]);
        assert!(parse_cells("8,a").is_err());
        assert_eq!(parse_resolution("120,125").unwrap(), [120, 125]);
        assert_eq!(parse_resolution("64").unwrap(), [64, 64]);
        assert!(parse_resolution("1,2,3").is_err());
    }
}
