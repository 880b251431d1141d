//! Flat `key = value` configuration files.
//!
//! One pair per line, `#` starts a comment, blank lines ignored. Values
//! are kept as strings; the caller parses them per key and rejects keys it
//! does not know.

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::path::Path;

/// Parse a config file into an ordered key/value map.
pub fn load_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, &path.display().to_string())
}

pub fn parse_config(text: &str, origin: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config {
                path: origin.to_string(),
                line: i + 1,
                reason: "expected `key = value`".into(),
            });
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(Error::Config {
                path: origin.to_string(),
                line: i + 1,
                reason: "empty key or value".into(),
            });
        }
        if out.insert(key.to_string(), value.to_string()).is_some() {
            return Err(Error::Config {
                path: origin.to_string(),
                line: i + 1,
                reason: format!("duplicate key `{key}`"),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert!(parse_config("", "test").unwrap().is_empty());
        assert!(parse_config("# only a comment\n\n", "test")
            .unwrap()
            .is_empty());
    }

    #[test]
    fn pairs_and_comments() {
        let map = parse_config("k = 4\nseed= 9 # trailing\n", "test").unwrap();
        assert_eq!(map.get("k").unwrap(), "4");
        assert_eq!(map.get("seed").unwrap(), "9");
    }

    #[test]
    fn malformed_lines_name_their_line_number() {
        let err = parse_config("k = 4\nnonsense\n", "cfg").unwrap_err();
        match err {
            Error::Config { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        assert!(parse_config("k = 4\nk = 5\n", "cfg").is_err());
    }
}
