//! `--config FILE`: a flat JSON object whose keys are long flag names of
//! the invoked command. Values become flags appended to the command line
//! unless the flag is already given there.

use std::ffi::OsString;
use std::fs;

use clap::Command;
use serde_json::Value;

use crate::failure::Failure;

fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(v.into());
        }
    }
    None
}

/// Long flag names accepted by the subcommand named in `argv`, including
/// global flags.
fn accepted_flags(argv: &[OsString], root: &Command) -> Vec<String> {
    let mut flags: Vec<String> = root
        .get_arguments()
        .filter_map(|a| a.get_long().map(String::from))
        .collect();
    let mut current = root;
    for a in argv.iter().skip(1) {
        let s = a.to_string_lossy();
        if let Some(sub) = current.find_subcommand(s.as_ref()) {
            current = sub;
            flags.extend(current.get_arguments().filter_map(|a| a.get_long().map(String::from)));
        }
    }
    flags
}

fn given(argv: &[OsString], flag: &str) -> bool {
    let long = format!("--{flag}");
    let prefix = format!("--{flag}=");
    argv.iter().any(|a| {
        let s = a.to_string_lossy();
        s == long.as_str() || s.starts_with(&prefix)
    })
}

fn scalar(key: &str, v: &Value) -> Result<String, Failure> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(Failure::Usage(format!(
            "config key {key:?}: expected a string or number"
        ))),
    }
}

pub fn merge_config(mut argv: Vec<OsString>, root: &Command) -> Result<Vec<OsString>, Failure> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).map_err(|e| Failure::data(format!("{}: {e}", path.to_string_lossy())))?;
    let doc: Value =
        serde_json::from_str(&text).map_err(|e| Failure::data(format!("{}: {e}", path.to_string_lossy())))?;
    let Value::Object(map) = doc else {
        return Err(Failure::data(format!(
            "{}: expected a JSON object",
            path.to_string_lossy()
        )));
    };
    let accepted = accepted_flags(&argv, root);
    // Keep flags before a `--` terminator.
    let tail = argv.iter().position(|a| a == "--").map(|i| argv.split_off(i));
    let mut extra = Vec::new();
    for (key, value) in &map {
        if key == "config" || given(&argv, key) {
            continue;
        }
        if !accepted.iter().any(|f| f == key) {
            log::debug!("config key {key:?} does not apply to this command");
            continue;
        }
        let flag = OsString::from(format!("--{key}"));
        match value {
            Value::Bool(true) => extra.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                for item in items {
                    extra.push(flag.clone());
                    extra.push(scalar(key, item)?.into());
                }
            }
            other => {
                extra.push(flag);
                extra.push(scalar(key, other)?.into());
            }
        }
    }
    argv.extend(extra);
    argv.extend(tail.unwrap_or_default());
    Ok(argv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn flags_from_file_fill_gaps_only() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.json");
        fs::write(&cfg, r#"{"codec": "nysiis", "seed": 4, "letters": true, "dim": 9}"#).unwrap();
        let argv = os(&[
            "phonetic-mt",
            "encode",
            "--codec",
            "soundex",
            "--config",
            cfg.to_str().unwrap(),
        ]);
        let merged = merge_config(argv, &crate::args::Cli::command()).unwrap();
        let merged: Vec<String> = merged.iter().map(|a| a.to_string_lossy().into_owned()).collect();
        assert_eq!(merged.iter().filter(|a| *a == "--codec").count(), 1);
        assert!(merged.windows(2).any(|w| w[0] == "--seed" && w[1] == "4"));
        assert!(merged.contains(&"--letters".to_string()));
        // `dim` belongs to `geometry embed`, not `encode`.
        assert!(!merged.contains(&"--dim".to_string()));
    }

    #[test]
    fn without_config_argv_is_untouched() {
        let argv = os(&["phonetic-mt", "eval", "vocab", "--input", "x"]);
        assert_eq!(merge_config(argv.clone(), &crate::args::Cli::command()).unwrap(), argv);
    }
}
