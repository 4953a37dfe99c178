//! `--config FILE`: a flat TOML table whose keys are long flag names of the
//! chosen subcommand. File values are inserted ahead of the command-line
//! flags, so flags given on the command line win.

use std::path::Path;

use crate::error::CliError;

/// Expands `--config FILE` (or `--config=FILE`) given after the subcommand
/// path into the equivalent flags, placed right after that path.
pub fn expand(args: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let (path, consumed) = match args[pos].strip_prefix("--config=") {
        Some(p) => (p.to_string(), 1),
        None => match args.get(pos + 1) {
            Some(p) => (p.clone(), 2),
            None => return Err(CliError::Usage("--config needs a file path".into())),
        },
    };
    let flags = flags_from_file(Path::new(&path))?;
    let sub = (1 + args[1..pos].iter().take_while(|a| !a.starts_with('-')).count()).min(pos);
    let mut out: Vec<String> = args[..sub].to_vec();
    out.extend(flags);
    out.extend(args[sub..pos].iter().cloned());
    out.extend(args[pos + consumed..].iter().cloned());
    Ok(out)
}

fn flags_from_file(path: &Path) -> Result<Vec<String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let table: toml::Table = text.parse().map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let mut flags = Vec::new();
    for (key, value) in table {
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            toml::Value::Boolean(true) => flags.push(flag),
            toml::Value::Boolean(false) => {}
            toml::Value::Array(items) => {
                flags.push(flag);
                for v in items {
                    flags.push(scalar(&key, v)?);
                }
            }
            v => {
                flags.push(flag);
                flags.push(scalar(&key, v)?);
            }
        }
    }
    Ok(flags)
}

fn scalar(key: &str, v: toml::Value) -> Result<String, CliError> {
    match v {
        toml::Value::String(s) => Ok(s),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) => Ok(f.to_string()),
        toml::Value::Boolean(b) => Ok(b.to_string()),
        _ => Err(CliError::Usage(format!("config key {key:?}: nested values are not supported"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn file_flags_come_before_command_line_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "algo = \"nsga2\"\nevals = 500\nref = [2.0, 3.5]\nquiet = true\n").unwrap();
        let got = expand(args(&format!("pareto-tour solve --config {} --evals 100", path.display()))).unwrap();
        assert_eq!(got, args("pareto-tour solve --algo nsga2 --evals 500 --quiet --ref 2 3.5 --evals 100"));
    }

    #[test]
    fn no_config_is_identity() {
        assert_eq!(expand(args("pareto-tour gen euclidean --n 5")).unwrap(), args("pareto-tour gen euclidean --n 5"));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "n = 9\n").unwrap();
        let got = expand(args(&format!("pareto-tour gen euclidean --seed 1 --config={}", path.display()))).unwrap();
        assert_eq!(got, args("pareto-tour gen euclidean --n 9 --seed 1"));
        assert!(expand(args("pareto-tour solve --config")).is_err());
    }
}
