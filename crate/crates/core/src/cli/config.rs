//! Flat `key = value` files merged into the command line.
//!
//! Each key is a long flag name without the leading dashes. Flags given on
//! the command line win over the file. `true` turns a key into a bare switch
//! and `false` drops it.

use std::path::Path;

pub fn load(path: &Path) -> Result<Vec<(String, String)>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn parse(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("line {}: expected key=value", lineno + 1));
        };
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
            return Err(format!("line {}: invalid key `{key}`", lineno + 1));
        }
        if key == "config" {
            return Err(format!(
                "line {}: nested config files are not supported",
                lineno + 1
            ));
        }
        out.push((key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}

/// Removes `--config PATH` from `argv` and appends the file's entries that the
/// command line does not already set.
pub fn expand(argv: &[String]) -> Result<Vec<String>, String> {
    let mut args = Vec::with_capacity(argv.len());
    let mut config = None;
    let mut iter = argv.iter();
    while let Some(arg) = iter.next() {
        if arg == "--config" {
            match iter.next() {
                Some(p) => config = Some(p.clone()),
                None => return Err("--config requires a path".into()),
            }
        } else if let Some(p) = arg.strip_prefix("--config=") {
            config = Some(p.to_string());
        } else {
            args.push(arg.clone());
        }
    }
    let Some(path) = config else {
        return Ok(args);
    };
    let given = |key: &str| {
        let flag = format!("--{key}");
        args.iter()
            .any(|a| *a == flag || a.starts_with(&format!("{flag}=")))
    };
    let mut extra = Vec::new();
    for (key, value) in load(Path::new(&path))? {
        if given(&key) {
            continue;
        }
        match value.as_str() {
            "true" => extra.push(format!("--{key}")),
            "false" => {}
            _ => extra.push(format!("--{key}={value}")),
        }
    }
    args.extend(extra);
    Ok(args)
}
