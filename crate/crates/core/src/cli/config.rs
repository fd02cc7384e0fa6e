use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

const KNOWN_KEYS: &[&str] = &[
    "kt-min",
    "kt-max",
    "kt-steps",
    "phi-min",
    "phi-max",
    "phi-steps",
    "omega0-khz",
    "omega1-khz",
    "noise-q",
    "beta-internal",
    "out",
];

/// Flat `key = value` file. Blank lines and `#` comments are ignored; keys are
/// the sweep flag names without the leading dashes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Argument(format!("config line {}: expected key=value", i + 1)))?;
            let key = key.trim().trim_start_matches("--");
            if !KNOWN_KEYS.contains(&key) {
                return Err(Error::Argument(format!("config line {}: unknown key `{key}`", i + 1)));
            }
            entries.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get_parsed<V: FromStr>(&self, key: &str) -> Result<Option<V>> {
        self.get(key)
            .map(|v| v.parse().map_err(|_| Error::Argument(format!("config key `{key}`: cannot parse `{v}`"))))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_pairs() {
        let cfg = ConfigFile::parse("# sweep\nkt-min = 2.6\n--kt-max=13.8 # top\n\nbeta-internal=true\n").unwrap();
        assert_eq!(cfg.get_parsed::<f64>("kt-min").unwrap(), Some(2.6));
        assert_eq!(cfg.get_parsed::<f64>("kt-max").unwrap(), Some(13.8));
        assert_eq!(cfg.get_parsed::<bool>("beta-internal").unwrap(), Some(true));
        assert_eq!(cfg.get_parsed::<usize>("kt-steps").unwrap(), None);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(ConfigFile::parse("kt-min 2.6").is_err());
        assert!(ConfigFile::parse("temperature=3").is_err());
        let cfg = ConfigFile::parse("kt-steps=three").unwrap();
        assert!(cfg.get_parsed::<usize>("kt-steps").is_err());
    }
}
