//! Flat `key = value` files mirroring the long command-line flags.

use std::collections::BTreeMap;
use std::path::Path;

use crate::CliError;

pub const KEYS: &[&str] = &[
    "preset", "gamma", "kappa", "kappa1", "tau", "kappa-tau", "phi", "tmax", "steps-per-delay", "modes", "models",
    "out",
];

/// Parses `key = value` lines. `#` starts a comment; keys accept `_` for `-`.
pub fn parse(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
        let key = key.trim().replace('_', "-").to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            return Err(format!("line {}: unknown key `{key}`", n + 1));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

pub fn load(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
    parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_pairs_and_comments() {
        let map = parse("# run\ngamma = 1.5\nsteps_per_delay=200 # fine\n\nphi = pi\n").unwrap();
        assert_eq!(map["gamma"], "1.5");
        assert_eq!(map["steps-per-delay"], "200");
        assert_eq!(map["phi"], "pi");
    }

    #[test]
    fn rejects_unknown_or_malformed() {
        assert!(parse("colour = red").is_err());
        assert!(parse("gamma 1").is_err());
    }
}
