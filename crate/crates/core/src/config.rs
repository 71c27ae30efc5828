//! Flat `key = value` configuration files. Blank lines and `#` comments are ignored.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{invalid, Result};

pub(crate) fn parse(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return invalid(format!("config line {}: expected key = value", i + 1));
        };
        let key = key.trim().trim_start_matches("--").to_string();
        if key.is_empty() {
            return invalid(format!("config line {}: empty key", i + 1));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

pub(crate) fn load(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .or_else(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
    parse(&text)
}
