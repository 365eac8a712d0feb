//! Flat `key = value` config files.
//!
//! Keys are long flag names without the leading dashes. The file's entries
//! are spliced in right after the subcommand so that anything given on the
//! command line, which comes later, overrides them.

use std::fs;

/// Parses `key = value` lines; `#` starts a comment, blank lines are
/// ignored.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", i + 1))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(format!("line {}: empty key", i + 1));
        }
        entries.push((key.to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

/// Converts config entries to flag tokens. `true` becomes a bare flag and
/// `false` is dropped.
pub fn to_args(entries: &[(String, String)]) -> Vec<String> {
    let mut args = Vec::new();
    for (key, value) in entries {
        match value.as_str() {
            "true" => args.push(format!("--{key}")),
            "false" => {}
            _ => {
                args.push(format!("--{key}"));
                args.push(value.clone());
            }
        }
    }
    args
}

/// Removes `--config <path>` / `--config=<path>` from `args` and splices the
/// file's entries in after the subcommand.
pub fn expand(args: Vec<String>) -> Result<Vec<String>, String> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        if arg == "--config" {
            path = Some(it.next().ok_or("--config needs a path")?);
        } else if let Some(p) = arg.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let injected = to_args(&parse(&text)?);
    // position of the subcommand: first token after the binary name that is
    // not a flag
    let at = rest
        .iter()
        .skip(1)
        .position(|a| !a.starts_with('-'))
        .map(|p| p + 2)
        .unwrap_or(rest.len());
    let tail = rest.split_off(at.min(rest.len()));
    rest.extend(injected);
    rest.extend(tail);
    Ok(rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blanks() {
        let entries = parse("# header\n\nomega-t0 = 0.5  # interval\ngamma-t1=0.3\n").unwrap();
        assert_eq!(
            entries,
            vec![
                ("omega-t0".to_string(), "0.5".to_string()),
                ("gamma-t1".to_string(), "0.3".to_string())
            ]
        );
        assert!(parse("novalue\n").is_err());
        assert!(parse(" = 3\n").is_err());
    }

    #[test]
    fn booleans_become_flags() {
        let args = to_args(&[
            ("compare-static".into(), "true".into()),
            ("quiet".into(), "false".into()),
        ]);
        assert_eq!(args, vec!["--compare-static".to_string()]);
    }

    #[test]
    fn injection_follows_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "omega-t0 = 0.5\n").unwrap();
        let args: Vec<String> = [
            "fpt",
            "classify",
            "--config",
            path.to_str().unwrap(),
            "--gamma-t1",
            "0.3",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let out = expand(args).unwrap();
        assert_eq!(
            out,
            vec!["fpt", "classify", "--omega-t0", "0.5", "--gamma-t1", "0.3"]
        );
    }
}
