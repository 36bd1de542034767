//! `key = value` run configuration. Keys mirror the long flag names; flags
//! given on the command line take precedence.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use clap::ValueEnum;

use crate::CliError;

const KNOWN_KEYS: &[&str] = &[
    "kappa",
    "nbar",
    "chi",
    "omega",
    "format",
    "output",
    "level",
    "regime",
    "t-end",
    "points",
    "n-max",
    "seed",
    "n-samples",
    "bins",
    "summary",
    "tau-max",
    "nbar-list",
    "chi-over-kappa",
    "axis",
    "values",
];

#[derive(Debug, Default, Clone)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Usage(format!("config {}: {e}", p.display())))?;
                Self::parse(&text)
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected key = value", lineno + 1))
            })?;
            let key = k.trim().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!(
                    "config line {}: unknown key `{key}`",
                    lineno + 1
                )));
            }
            entries.insert(key, v.trim().to_string());
        }
        Ok(Self { entries })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Flag value if given, else the config entry, else `None`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|s| {
                s.parse::<T>()
                    .map_err(|e| CliError::Usage(format!("config `{key}` = `{s}`: {e}")))
            })
            .transpose()
    }

    pub fn pick_enum<T: ValueEnum>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|s| {
                T::from_str(s, true)
                    .map_err(|e| CliError::Usage(format!("config `{key}` = `{s}`: {e}")))
            })
            .transpose()
    }

    /// Comma-separated list; a non-empty flag list wins.
    pub fn pick_list(&self, flag: Vec<f64>, key: &str) -> Result<Vec<f64>, CliError> {
        if !flag.is_empty() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(Vec::new()),
            Some(s) if s.trim().is_empty() => Ok(Vec::new()),
            Some(s) => s
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|e| CliError::Usage(format!("config `{key}` entry `{v}`: {e}")))
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prefers_flags() {
        let c = Config::parse("# run\nkappa = 2\nt_end=4.5\n\nvalues = 1, 2,3\n").unwrap();
        assert_eq!(c.pick::<f64>(None, "kappa").unwrap(), Some(2.0));
        assert_eq!(c.pick(Some(3.0), "kappa").unwrap(), Some(3.0));
        assert_eq!(c.pick::<f64>(None, "t-end").unwrap(), Some(4.5));
        assert_eq!(c.pick::<f64>(None, "nbar").unwrap(), None);
        assert_eq!(c.pick_list(vec![], "values").unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(c.pick_list(vec![7.0], "values").unwrap(), vec![7.0]);
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(Config::parse("kappa 2"), Err(CliError::Usage(_))));
        assert!(matches!(Config::parse("colour = red"), Err(CliError::Usage(_))));
        let c = Config::parse("kappa = fast").unwrap();
        assert!(matches!(c.pick::<f64>(None, "kappa"), Err(CliError::Usage(_))));
    }
}
