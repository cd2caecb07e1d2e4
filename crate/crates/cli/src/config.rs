//! `key = value` settings files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys may use `-` or
//! `_` interchangeably. Every key must be consumed by the command that loads
//! the file; leftovers are reported as usage errors.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

#[derive(Debug, Default)]
pub struct Settings {
    source: String,
    entries: BTreeMap<String, (usize, String)>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl Settings {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, source: &str) -> CliResult<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::usage(format!("{source}:{}: expected key = value", i + 1))
            })?;
            let key = normalize(key);
            if key.is_empty() {
                return Err(CliError::usage(format!("{source}:{}: empty key", i + 1)));
            }
            if entries
                .insert(key.clone(), (i + 1, value.trim().to_string()))
                .is_some()
            {
                return Err(CliError::usage(format!(
                    "{source}:{}: duplicate key {key}",
                    i + 1
                )));
            }
        }
        Ok(Self {
            source: source.to_string(),
            entries,
        })
    }

    /// Removes and parses `key`.
    pub fn take<T>(&mut self, key: &str) -> CliResult<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((line, value)) => value.parse().map(Some).map_err(|e| {
                CliError::usage(format!("{}:{line}: bad value for {key}: {e}", self.source))
            }),
        }
    }

    /// Removes and parses a comma-separated list.
    pub fn take_list<T>(&mut self, key: &str) -> CliResult<Option<Vec<T>>>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((line, value)) => value
                .split(',')
                .map(|v| v.trim().parse())
                .collect::<Result<Vec<T>, _>>()
                .map(Some)
                .map_err(|e| {
                    CliError::usage(format!("{}:{line}: bad value for {key}: {e}", self.source))
                }),
        }
    }

    /// Flag value if given, otherwise the file value.
    pub fn pick<T>(&mut self, flag: Option<T>, key: &str) -> CliResult<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        let from_file = self.take(key)?;
        Ok(flag.or(from_file))
    }

    pub fn pick_list<T>(&mut self, flag: Vec<T>, key: &str) -> CliResult<Vec<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        let from_file = self.take_list(key)?;
        Ok(if flag.is_empty() {
            from_file.unwrap_or_default()
        } else {
            flag
        })
    }

    pub fn pick_bool(&mut self, flag: bool, key: &str) -> CliResult<bool> {
        Ok(flag || self.take::<bool>(key)?.unwrap_or(false))
    }

    pub fn finish(self) -> CliResult<()> {
        match self.entries.iter().next() {
            None => Ok(()),
            Some((key, (line, _))) => Err(CliError::usage(format!(
                "{}:{line}: unknown key {key}",
                self.source
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let mut s = Settings::parse("mu-q = 2.0\n# comment\n\nlambda=0.5, 1.0\n", "t").unwrap();
        assert_eq!(s.pick(Some(1.0), "mu_q").unwrap(), Some(1.0));
        assert_eq!(
            s.pick_list(Vec::<f64>::new(), "lambda").unwrap(),
            vec![0.5, 1.0]
        );
        s.finish().unwrap();
    }

    #[test]
    fn file_fills_missing_flags() {
        let mut s = Settings::parse("seed = 7", "t").unwrap();
        assert_eq!(s.pick::<u64>(None, "seed").unwrap(), Some(7));
    }

    #[test]
    fn rejects_leftovers_and_garbage() {
        let s = Settings::parse("typo = 1", "t").unwrap();
        assert!(s
            .finish()
            .unwrap_err()
            .to_string()
            .contains("unknown key typo"));
        assert!(Settings::parse("novalue", "t").is_err());
        assert!(Settings::parse("a=1\na=2", "t").is_err());
        let mut s = Settings::parse("seed = x", "t").unwrap();
        assert!(s.take::<u64>("seed").is_err());
    }
}
