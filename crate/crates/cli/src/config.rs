//! Flat `key=value` configuration files merged into the command line.
//!
//! Keys are flag names without the leading dashes, plus `command` for the
//! subcommand. Flags given on the command line win over the file. List-valued
//! flags take comma-separated values, and boolean flags take `true` or
//! `false`.

use std::path::Path;

use anyhow::{bail, Context, Result};

pub const SUBCOMMANDS: [&str; 8] = [
    "bessel-check",
    "hankel-selftest",
    "ortho-scan",
    "sobolev-check",
    "propagate",
    "maximal-scan",
    "tnu-bound",
    "counterexample",
];

const SWITCHES: [&str; 1] = ["check"];

/// Parse `key=value` lines; blank lines and lines starting with `#` are skipped.
pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected key=value, got {line:?}", i + 1);
        };
        let key = key.trim();
        if key.is_empty() {
            bail!("config line {}: empty key", i + 1);
        }
        entries.push((key.to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn given(args: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    let prefix = format!("--{key}=");
    args.iter().any(|a| *a == flag || a.starts_with(&prefix))
}

/// The command line with the entries of the `--config` file, if any,
/// inserted after the subcommand. A subcommand named only in the file goes
/// right after the program name.
pub fn merge(args: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path)).with_context(|| format!("reading config file {path}"))?;
    let entries = parse(&text)?;
    let mut args = args;
    let position = match args.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) {
        Some(p) => p,
        None => match entries.iter().find(|(k, _)| k == "command") {
            Some((_, command)) => {
                args.insert(1, command.clone());
                1
            }
            None => return Ok(args),
        },
    };
    let mut extra = Vec::new();
    for (key, value) in entries {
        if key == "command" || key == "config" || given(&args, &key) {
            continue;
        }
        if SWITCHES.contains(&key.as_str()) {
            match value.as_str() {
                "true" => extra.push(format!("--{key}")),
                "false" => {}
                _ => bail!("config key {key}: expected true or false, got {value:?}"),
            }
        } else {
            extra.push(format!("--{key}"));
            extra.push(value);
        }
    }
    args.splice(position + 1..position + 1, extra);
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn comments_and_blanks_are_skipped() {
        let entries = parse("# run\n\nn = 3\na=1\n").unwrap();
        assert_eq!(entries, vec![("n".into(), "3".into()), ("a".into(), "1".into())]);
        assert!(parse("n 3").is_err());
    }

    #[test]
    fn flags_override_the_file() {
        let dir = std::env::temp_dir().join(format!("invsq-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "command=hankel-selftest\nn=3\na=2\ncheck=true\n").unwrap();
        let args = strings(&["invsq", "--config", path.to_str().unwrap(), "--a", "0.5"]);
        let merged = merge(args).unwrap();
        let head: Vec<&str> = merged[1..5].iter().map(String::as_str).collect();
        assert_eq!(head, ["hankel-selftest", "--n", "3", "--check"]);
        assert_eq!(merged[5..], strings(&["--config", path.to_str().unwrap(), "--a", "0.5"]));
        std::fs::remove_dir_all(dir).unwrap();
    }
}
