//! JSON run configs, translated into the equivalent command line.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::Value;

fn scalar(key: &str, v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => bail!("config key `{key}` must be a string or number"),
    }
}

/// `{"subcommand": "qec", "input": "iz", "no-correct": true}` becomes
/// `spinops qec --input iz --no-correct`. Arrays are joined with commas.
pub fn to_argv(text: &str) -> Result<Vec<String>> {
    let value: Value = serde_json::from_str(text).context("parsing config JSON")?;
    let Value::Object(map) = value else {
        bail!("config must be a JSON object");
    };
    let sub = match map.get("subcommand") {
        Some(Value::String(s)) => s.clone(),
        _ => bail!("config needs a string `subcommand`"),
    };
    let mut argv = vec!["spinops".to_string(), sub];
    for (key, v) in &map {
        if key == "subcommand" {
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        match v {
            Value::Bool(true) => argv.push(flag),
            Value::Bool(false) => {}
            Value::Array(items) => {
                let parts = items.iter().map(|x| scalar(key, x)).collect::<Result<Vec<_>>>()?;
                argv.push(flag);
                argv.push(parts.join(","));
            }
            other => {
                argv.push(flag);
                argv.push(scalar(key, other)?);
            }
        }
    }
    Ok(argv)
}

pub fn load(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim().is_empty() {
        bail!("config file {} is empty", path.display());
    }
    to_argv(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_from_object() {
        let argv = to_argv(r#"{"subcommand":"qec","input":"iz","tmax":2,"no_correct":true,"x":false}"#).unwrap();
        assert_eq!(argv, ["spinops", "qec", "--input", "iz", "--no-correct", "--tmax", "2"]);
    }

    #[test]
    fn rejects_non_objects() {
        assert!(to_argv("[1]").is_err());
        assert!(to_argv(r#"{"input":"iz"}"#).is_err());
        assert!(to_argv(r#"{"subcommand":"qec","input":null}"#).is_err());
    }
}
