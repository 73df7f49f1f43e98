//! `key = value` configuration files.
//!
//! Each non-blank line is `key = value`; `#` starts a comment. Keys are long
//! flag names with or without the leading dashes, and `_` may stand for `-`.
//! Values `true` and `false` switch boolean flags on or off.
//!
//! Config entries are spliced into the argument list right after the
//! subcommand path, ahead of the user's own flags. Since later occurrences of a
//! flag override earlier ones, flags on the command line win over the file and
//! the file wins over built-in defaults.

use std::path::Path;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

pub fn parse(text: &str) -> CliResult<Vec<Entry>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected `key = value`", i + 1))
        })?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", i + 1)));
        }
        out.push(Entry {
            line: i + 1,
            key,
            value: value.trim().to_string(),
        });
    }
    Ok(out)
}

fn to_args(entries: &[Entry]) -> Vec<String> {
    let mut args = Vec::new();
    for e in entries {
        match e.value.as_str() {
            "true" => args.push(format!("--{}", e.key)),
            "false" => {}
            v => {
                args.push(format!("--{}", e.key));
                args.push(v.to_string());
            }
        }
    }
    args
}

/// Finds `--config FILE` (or `--config=FILE`) in `argv`.
fn config_path(argv: &[String]) -> CliResult<Option<String>> {
    let mut found = None;
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--" {
            break;
        }
        if a == "--config" {
            let v = it
                .next()
                .ok_or_else(|| CliError::Usage("--config needs a file argument".into()))?;
            found = Some(v.clone());
        } else if let Some(v) = a.strip_prefix("--config=") {
            found = Some(v.to_string());
        }
    }
    Ok(found)
}

/// Number of leading subcommand tokens (`bench success-rate` is two).
fn subcommand_depth(argv: &[String]) -> usize {
    let nested = ["bench", "diag"];
    match argv.get(1).map(String::as_str) {
        Some(c) if nested.contains(&c) => match argv.get(2) {
            Some(s) if !s.starts_with('-') => 2,
            _ => 1,
        },
        Some(c) if !c.starts_with('-') => 1,
        _ => 0,
    }
}

/// Returns `argv` with the entries of the config file, if any, spliced in.
pub fn expand(argv: Vec<String>) -> CliResult<Vec<String>> {
    let Some(path) = config_path(&argv)? else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(Path::new(&path), e))?;
    let entries = parse(&text)?;
    if let Some(e) = entries.iter().find(|e| e.key == "config") {
        return Err(CliError::Usage(format!(
            "config line {}: config files cannot include other config files",
            e.line
        )));
    }
    let at = 1 + subcommand_depth(&argv);
    let mut out = argv[..at].to_vec();
    out.extend(to_args(&entries));
    out.extend_from_slice(&argv[at..]);
    Ok(out)
}
