//! Experiment configs: a TOML or JSON file naming a command and its options.
//!
//! The file is turned into command-line arguments placed before the real ones, so
//! an explicit flag always overrides the file.

use std::ffi::OsString;
use std::path::Path;

use clap::Parser;
use serde_json::Value;

use crate::{Cli, CliError};

const GLOBAL_WITH_VALUE: [&str; 4] = ["--config", "--format", "--out", "--precision-cap"];
const POSITIONAL_KEYS: [&str; 3] = ["action", "verb", "command"];

pub fn load(path: &Path) -> Result<serde_json::Map<String, Value>, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
    } else {
        let t: toml::Table = toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::to_value(t).map_err(|e| CliError::Config(e.to_string()))?
    };
    match value {
        Value::Object(m) => Ok(m),
        _ => Err(CliError::Config("config must be a table of options".into())),
    }
}

fn scalar(key: &str, v: &Value) -> Result<Option<String>, CliError> {
    Ok(match v {
        Value::Bool(false) | Value::Null => None,
        Value::Bool(true) => Some(String::new()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) => {
            let parts: Result<Vec<String>, CliError> = items
                .iter()
                .map(|x| match x {
                    Value::Number(n) => Ok(n.to_string()),
                    Value::String(s) => Ok(s.clone()),
                    _ => Err(CliError::Config(format!("option {key:?} must be a flat list"))),
                })
                .collect();
            Some(parts?.join(","))
        }
        Value::Object(_) => return Err(CliError::Config(format!("option {key:?} cannot be a table"))),
    })
}

/// Arguments synthesized from a config: the command, its positional word, then `--key value` pairs.
pub fn to_args(cfg: &serde_json::Map<String, Value>) -> Result<(String, Vec<String>), CliError> {
    let command = match cfg.get("command") {
        Some(Value::String(s)) => s.clone(),
        _ => return Err(CliError::Config("config needs a string `command`".into())),
    };
    let mut args = Vec::new();
    for key in ["action", "verb"] {
        if let Some(v) = cfg.get(key) {
            args.extend(scalar(key, v)?);
        }
    }
    for (k, v) in cfg {
        if POSITIONAL_KEYS.contains(&k.as_str()) || k == "config" {
            continue;
        }
        let Some(val) = scalar(k, v)? else { continue };
        args.push(format!("--{}", k.replace('_', "-")));
        if !matches!(v, Value::Bool(true)) {
            args.push(val);
        }
    }
    Ok((command, args))
}

/// Index of the subcommand token in `raw`, skipping global options and their values.
fn command_index(raw: &[OsString]) -> Option<usize> {
    let mut i = 1;
    while i < raw.len() {
        let a = raw[i].to_string_lossy();
        if GLOBAL_WITH_VALUE.contains(&a.as_ref()) {
            i += 2;
        } else if a.starts_with('-') {
            i += 1;
        } else {
            return Some(i);
        }
    }
    None
}

fn parse(args: Vec<OsString>) -> Cli {
    match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 2 } else { 0 });
        }
    }
}

pub fn resolve(raw: Vec<OsString>) -> Result<Cli, CliError> {
    let cli = parse(raw.clone());
    let Some(path) = cli.config.clone() else {
        return Ok(cli);
    };
    let (command, cfg_args) = to_args(&load(&path)?)?;
    let mut merged: Vec<OsString> = vec![raw[0].clone()];
    let mut rest: Vec<OsString> = Vec::new();
    let split = command_index(&raw);
    let mut i = 1;
    while i < raw.len() {
        let a = raw[i].to_string_lossy().to_string();
        if Some(i) == split {
            if a != command {
                return Err(CliError::Config(format!(
                    "command {a:?} on the command line conflicts with {command:?} in the config"
                )));
            }
        } else if a == "--config" {
            i += 1;
        } else if !a.starts_with("--config=") {
            rest.push(raw[i].clone());
        }
        i += 1;
    }
    merged.push(command.into());
    merged.extend(cfg_args.into_iter().map(OsString::from));
    merged.extend(rest);
    Ok(parse(merged))
}
