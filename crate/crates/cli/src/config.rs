//! Flat `key = value` configuration files. Entries become `--key value`
//! arguments placed right after the subcommand name, ahead of the user's own
//! flags, so that later flags override them.

use std::ffi::OsString;
use std::path::Path;

use crate::error::CliError;

const SUBCOMMANDS: [&str; 5] = ["renorm-flow", "stationary", "gyro-sim", "admissibility", "selfcheck"];

/// Parse a config file into argument tokens. `#` starts a comment; boolean
/// values `true`/`false` turn a flag on or leave it off.
pub fn parse_config(text: &str) -> Result<Vec<String>, CliError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("config line {}: expected key = value", ln + 1)))?;
        let k = k.trim().trim_start_matches("--");
        let v = v.trim();
        if k.is_empty() || k.contains(char::is_whitespace) {
            return Err(CliError::usage(format!("config line {}: bad key '{k}'", ln + 1)));
        }
        if k == "config" {
            return Err(CliError::usage("config files cannot include other config files"));
        }
        match v {
            "true" => out.push(format!("--{k}")),
            "false" => {}
            _ => out.push(format!("--{k}={v}")),
        }
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

/// Command line with config-file entries spliced in after the subcommand.
pub fn merged_args(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", Path::new(&path).display())))?;
    let extra = parse_config(&text)?;
    let pos = args
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
        .ok_or_else(|| CliError::usage("--config needs a subcommand"))?;
    let mut out: Vec<OsString> = args[..=pos].to_vec();
    out.extend(extra.into_iter().map(OsString::from));
    out.extend(args[pos + 1..].iter().cloned());
    Ok(out)
}
