//! TOML configuration with `key=value` overrides.
//!
//! Overrides use dotted keys (`solver.t_max=200`); the value is parsed as
//! a TOML value and falls back to a plain string.

use serde::de::DeserializeOwned;
use serde::Serialize;
use toml::{Table, Value};

use crate::error::{Error, Result};

pub fn parse_table(text: &str) -> Result<Table> {
    text.parse::<Table>().map_err(|e| Error::Config(e.to_string()))
}

pub fn parse_value(raw: &str) -> Value {
    match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| Value::String(raw.to_string())),
        Err(_) => Value::String(raw.to_string()),
    }
}

/// Applies one `dotted.key=value` override.
pub fn apply_override(table: &mut Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{assignment}' is not key=value")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(Error::Config(format!("override '{assignment}' has an empty key")));
    }
    let parts: Vec<&str> = key.split('.').collect();
    let mut cur = table;
    for part in &parts[..parts.len() - 1] {
        let entry = cur
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("'{part}' in '{key}' is not a table")))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), parse_value(raw.trim()));
    Ok(())
}

/// Recursively overlays `top` onto `base`.
pub fn merge(base: &mut Table, top: Table) {
    for (k, v) in top {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(t)) => merge(b, t),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

pub fn to_table<T: Serialize>(value: &T) -> Result<Table> {
    match Value::try_from(value).map_err(|e| Error::Config(e.to_string()))? {
        Value::Table(t) => Ok(t),
        _ => Err(Error::Config("expected a table".into())),
    }
}

pub fn from_table<T: DeserializeOwned>(table: Table) -> Result<T> {
    Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(e.to_string()))
}
