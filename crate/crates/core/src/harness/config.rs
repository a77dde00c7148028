//! Flat `key = value` configuration files. Keys mirror long CLI flags
//! (`starts`, `iters`, `seed`, ...); `#` starts a comment.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = k.trim().trim_start_matches("--").to_string();
            if key.is_empty() {
                return Err(Error::Parse { line: i + 1, msg: "empty key".into() });
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Config { values })
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Typed lookup; `Ok(None)` when absent.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Domain(format!("config key `{key}`: cannot parse `{v}`"))),
        }
    }

    /// Flag value if given, else config value, else `default`.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.get(key)?.unwrap_or(default)),
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let cfg = Config::parse("# attack\nstarts = 8\n--seed=3\n\niters = 10 # inline\n").unwrap();
        assert_eq!(cfg.resolve(None, "starts", 64usize).unwrap(), 8);
        assert_eq!(cfg.resolve(Some(2), "starts", 64usize).unwrap(), 2);
        assert_eq!(cfg.resolve(None, "seed", 0u64).unwrap(), 3);
        assert_eq!(cfg.resolve(None, "iters", 0usize).unwrap(), 10);
        assert_eq!(cfg.resolve(None, "epsilon", 1.0f64).unwrap(), 1.0);
        assert!(cfg.get::<usize>("missing").unwrap().is_none());
    }

    #[test]
    fn malformed() {
        assert!(Config::parse("starts 8").is_err());
        assert!(Config::parse("= 8").is_err());
        let cfg = Config::parse("starts = many").unwrap();
        assert!(cfg.resolve(None, "starts", 1usize).is_err());
    }
}
