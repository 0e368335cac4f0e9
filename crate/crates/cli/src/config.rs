//! `--config FILE` support: `key = value` lines become long flags.

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};

use crate::Cli;

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

/// Flags contributed by a config file, skipping keys already on the command
/// line.
pub fn config_flags(text: &str, args: &[String]) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected `key = value`", idx + 1))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key.is_empty() || key == "config" {
            return Err(format!("config line {}: bad key", idx + 1));
        }
        let flag = format!("--{key}");
        let given = args.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if given {
            continue;
        }
        match value {
            "true" => out.push(flag),
            "false" => {}
            _ => {
                out.push(flag);
                out.push(value.to_string());
            }
        }
    }
    Ok(out)
}

pub fn parse_with_config(mut args: Vec<String>) -> Result<Cli, clap::Error> {
    if let Some(path) = config_path(&args) {
        let mut cmd = Cli::command();
        let text = std::fs::read_to_string(&path)
            .map_err(|e| cmd.error(ErrorKind::Io, format!("cannot read config `{path}`: {e}")))?;
        let extra = config_flags(&text, &args).map_err(|e| cmd.error(ErrorKind::InvalidValue, e))?;
        args.extend(extra);
    }
    Cli::try_parse_from(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &[&str]) -> Vec<String> {
        s.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn command_line_wins() {
        let flags = config_flags("seed = 7\n# note\nsamples=3\njson = true\n", &args(&["verify", "--seed", "1"])).unwrap();
        assert_eq!(flags, args(&["--samples", "3", "--json"]));
    }

    #[test]
    fn rejects_lines_without_equals() {
        assert!(config_flags("seed 7", &[]).is_err());
    }

    #[test]
    fn config_file_supplies_flags() {
        let dir = std::env::temp_dir().join(format!("cmtrace-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.conf");
        std::fs::write(&path, "suite = table64\nseed = 9\n").unwrap();
        let cli = parse_with_config(args(&["cmtrace", "verify", "--config", path.to_str().unwrap()])).unwrap();
        match cli.command {
            crate::Command::Verify { suite, seed, .. } => {
                assert_eq!(suite, "table64");
                assert_eq!(seed, 9);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
