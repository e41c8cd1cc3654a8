//! `--config` files: flat `key=value` lines or a JSON object whose keys are
//! flag names. Config values are spliced into the argument list for every
//! flag not given on the command line, so flags win over config and config
//! wins over defaults.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;

use clap::{ArgAction, CommandFactory};

use crate::CliError;

/// Keys that may not appear in a config file.
const RESERVED: [&str; 3] = ["config", "help", "version"];

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let normalize = |k: &str| k.trim().replace('_', "-");
    let mut out = BTreeMap::new();
    if text.trim_start().starts_with('{') {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config is not valid JSON: {e}")))?;
        let object = value.as_object().ok_or_else(|| CliError::Usage("config JSON must be an object".into()))?;
        for (key, v) in object {
            let text = match v {
                serde_json::Value::Null => continue,
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Array(items) => items
                    .iter()
                    .map(|x| x.as_str().map_or_else(|| x.to_string(), str::to_string))
                    .collect::<Vec<_>>()
                    .join(","),
                other => other.to_string(),
            };
            out.insert(normalize(key), text);
        }
    } else {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
            out.insert(normalize(key), value.trim().to_string());
        }
    }
    Ok(out)
}

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(path) = a.strip_prefix("--config=") {
            return Some(path.to_string());
        }
    }
    None
}

/// Returns `args` with config entries appended as flags.
pub fn splice_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let text: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let Some(path) = config_path(&text) else {
        return Ok(args);
    };
    let contents = fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("cannot read config {path}: {e}")))?;
    let entries = parse_config(&contents)?;

    let root = crate::Cli::command();
    let Some(sub) = text.iter().skip(1).find_map(|a| root.find_subcommand(a)) else {
        return Ok(args);
    };
    let flags: BTreeMap<String, ArgAction> = sub
        .get_arguments()
        .chain(root.get_arguments().filter(|a| a.is_global_set()))
        .filter_map(|a| a.get_long().map(|l| (l.to_string(), a.get_action().clone())))
        .filter(|(l, _)| !RESERVED.contains(&l.as_str()))
        .collect();

    let mut out = args;
    for (key, value) in entries {
        let Some(action) = flags.get(&key) else {
            let valid: Vec<&str> = flags.keys().map(String::as_str).collect();
            return Err(CliError::Usage(format!(
                "unknown config key `{key}` for `{}`; valid keys: {}",
                sub.get_name(),
                valid.join(", ")
            )));
        };
        let flag = format!("--{key}");
        let given = text.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if given {
            continue;
        }
        match action {
            ArgAction::SetTrue => match value.as_str() {
                "true" | "1" | "yes" => out.push(flag.into()),
                "false" | "0" | "no" => {}
                _ => return Err(CliError::Usage(format!("config key `{key}` expects true or false"))),
            },
            _ => {
                out.push(flag.into());
                out.push(value.into());
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_and_json_forms_agree() {
        let flat = parse_config("# sweep\nhost = empty\nn=9\ngrid=0.1,0.5\n").unwrap();
        let json = parse_config(r#"{"host": "empty", "n": 9, "grid": [0.1, 0.5]}"#).unwrap();
        assert_eq!(flat, json);
    }

    #[test]
    fn underscores_become_dashes() {
        let c = parse_config("max_inconclusive=0.1").unwrap();
        assert_eq!(c.get("max-inconclusive").map(String::as_str), Some("0.1"));
    }

    #[test]
    fn malformed_lines_are_usage_errors() {
        assert!(matches!(parse_config("just words"), Err(CliError::Usage(_))));
        assert!(matches!(parse_config("[1, 2]"), Err(CliError::Usage(_))));
    }
}
