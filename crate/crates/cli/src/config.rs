//! Flag defaults from a file.
//!
//! Two formats are accepted: flat text with one `key = value` per line
//! (`#` starts a comment, keys may use `-` or `_`), or a run manifest, whose
//! `parameters` object is replayed. Either way the entries become ordinary
//! flags placed before the ones given on the command line, so explicit flags
//! win.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use serde_json::Value;

pub fn read_pairs(path: &Path) -> Result<Vec<(String, String)>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    if text.trim_start().starts_with('{') {
        let json: Value = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let params = json
            .get("parameters")
            .and_then(Value::as_object)
            .ok_or_else(|| format!("{}: JSON config needs a `parameters` object", path.display()))?;
        let mut pairs = Vec::new();
        for (key, value) in params {
            let value = match value {
                Value::Null => continue,
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                Value::Bool(b) => b.to_string(),
                other => return Err(format!("{}: unsupported value for `{key}`: {other}", path.display())),
            };
            pairs.push((key.clone(), value));
        }
        return Ok(pairs);
    }
    let mut pairs = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| format!("{}:{}: expected `key = value`", path.display(), no + 1))?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

/// Flags for `pairs`, spelled as on the command line.
pub fn as_flags(pairs: &[(String, String)]) -> Vec<OsString> {
    let mut out = Vec::with_capacity(2 * pairs.len());
    for (key, value) in pairs {
        out.push(format!("--{}", key.replace('_', "-")).into());
        out.push(value.into());
    }
    out
}

/// `argv` with `extra` inserted right after the subcommand token. Values of
/// the global options are skipped when looking for the token.
pub fn splice_after_subcommand(argv: &[OsString], subcommand: &str, extra: Vec<OsString>) -> Vec<OsString> {
    let mut i = 1;
    while i < argv.len() {
        let arg = argv[i].to_string_lossy();
        if arg == "--config" || arg == "--threads" {
            i += 2;
            continue;
        }
        if arg == subcommand {
            let mut out = argv[..=i].to_vec();
            out.extend(extra);
            out.extend_from_slice(&argv[i + 1..]);
            return out;
        }
        i += 1;
    }
    argv.to_vec()
}
