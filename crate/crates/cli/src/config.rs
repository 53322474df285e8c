//! Optional JSON config files whose keys mirror the command-line flags.
//!
//! `{"cycles": 4, "format": "json"}` is expanded to `--cycles 4 --format json`
//! (lists become comma-separated values) and placed before the flags given on the command line, so explicit flags
//! win.

use std::ffi::OsString;

use serde_json::Value;

fn config_path(args: &[OsString]) -> Option<(usize, usize, OsString)> {
    for (i, a) in args.iter().enumerate() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return args.get(i + 1).map(|p| (i, 2, p.clone()));
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some((i, 1, OsString::from(p)));
        }
    }
    None
}

fn flags_from(value: &Value) -> Result<Vec<OsString>, String> {
    let obj = value
        .as_object()
        .ok_or("config file must hold a JSON object")?;
    let mut out = Vec::new();
    for (key, v) in obj {
        let flag = format!("--{}", key.replace('_', "-"));
        match v {
            Value::Bool(true) => out.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                let parts = items
                    .iter()
                    .map(|i| scalar(i, key))
                    .collect::<Result<Vec<_>, _>>()?;
                out.push(flag.into());
                out.push(parts.join(",").into());
            }
            other => {
                out.push(flag.into());
                out.push(scalar(other, key)?.into());
            }
        }
    }
    Ok(out)
}

fn scalar(v: &Value, key: &str) -> Result<String, String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        _ => Err(format!(
            "config key '{key}' must be a scalar or a list of scalars"
        )),
    }
}

/// Expands `--config FILE` in place. The config flags are inserted right
/// after the subcommand name.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some((at, width, path)) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| format!("cannot read config {}: {e}", path.to_string_lossy()))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| format!("config {}: {e}", path.to_string_lossy()))?;
    let injected = flags_from(&value)?;

    let mut rest: Vec<OsString> = args;
    rest.drain(at..at + width);
    let sub = rest
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|p| p + 2)
        .unwrap_or(rest.len());
    rest.splice(sub..sub, injected);
    Ok(rest)
}
