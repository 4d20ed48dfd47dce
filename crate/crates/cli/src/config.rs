//! Flat `key=value` configuration files and run manifests.
//!
//! Both share one format: one `key=value` pair per line, `#` comments and
//! blank lines ignored. A configuration file supplies values that explicit
//! command-line flags override. A run manifest is the same format written
//! next to a command's outputs with the fully resolved configuration (every
//! default made explicit), plus `command`, `version`, and `out` entries —
//! re-running the command with the manifest as its `--config` reproduces the
//! outputs bitwise.
//!
//! Unknown keys are ignored so manifests of one command can share plumbing
//! keys, with one exception: a `command` entry naming a different subcommand
//! is a usage error, which stops a manifest from silently driving the wrong
//! command.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// File name a run manifest is written under, inside the output directory.
pub const MANIFEST_FILE: &str = "manifest.txt";

/// Key-value pairs loaded from a configuration or manifest file.
#[derive(Debug, Default, Clone)]
struct KeyValues {
    map: BTreeMap<String, String>,
}

impl KeyValues {
    fn load(path: &Path, command: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|err| {
            CliError::Runtime(anyhow::anyhow!("cannot read config {}: {err}", path.display()))
        })?;
        let mut map = BTreeMap::new();
        for (index, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::usage(format!(
                    "{}:{}: expected key=value, got {line:?}",
                    path.display(),
                    index + 1
                )));
            };
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        if let Some(written_for) = map.get("command") {
            if written_for != command {
                return Err(CliError::usage(format!(
                    "config {} was written for command '{written_for}', not '{command}'",
                    path.display()
                )));
            }
        }
        Ok(Self { map })
    }
}

/// Resolves each setting as flag > configuration file > default, recording
/// the winning value so the run manifest lists the complete configuration.
#[derive(Debug)]
pub struct Resolver {
    file: KeyValues,
    resolved: BTreeMap<String, String>,
}

impl Resolver {
    /// Loads the optional configuration file for `command`.
    pub fn new(config: Option<&Path>, command: &str) -> Result<Self, CliError> {
        let file = match config {
            Some(path) => KeyValues::load(path, command)?,
            None => KeyValues::default(),
        };
        Ok(Self { file, resolved: BTreeMap::new() })
    }

    fn parse<T>(&self, key: &str, raw: &str) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        raw.parse().map_err(|err| {
            CliError::usage(format!("config key {key}={raw:?} is invalid: {err}"))
        })
    }

    /// Setting with a default. The resolved value is recorded for the manifest.
    pub fn value<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr + ToString,
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => v,
            None => match self.file.map.get(key) {
                Some(raw) => self.parse(key, raw)?,
                None => default,
            },
        };
        self.resolved.insert(key.to_string(), value.to_string());
        Ok(value)
    }

    /// Setting with no default; absent everywhere is fine. Present values are
    /// recorded for the manifest.
    pub fn optional<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr + ToString,
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => Some(v),
            None => match self.file.map.get(key) {
                Some(raw) => Some(self.parse(key, raw)?),
                None => None,
            },
        };
        if let Some(v) = &value {
            self.resolved.insert(key.to_string(), v.to_string());
        }
        Ok(value)
    }

    /// Setting that must be present as a flag or configuration entry.
    pub fn required<T>(&mut self, key: &str, flag: Option<T>) -> Result<T, CliError>
    where
        T: FromStr + ToString,
        T::Err: Display,
    {
        self.optional(key, flag)?
            .ok_or_else(|| CliError::usage(format!("missing required setting --{}", key.replace('_', "-"))))
    }

    /// Records a derived value (e.g. statistics computed from a data file) so
    /// replays use the recorded number instead of re-deriving it.
    pub fn record(&mut self, key: &str, value: impl ToString) {
        self.resolved.insert(key.to_string(), value.to_string());
    }

    /// Writes the run manifest into `out_dir`.
    pub fn write_manifest(&self, command: &str, out_dir: &Path) -> Result<(), CliError> {
        write_manifest_map(self.resolved.clone(), command, out_dir)
    }
}

/// Writes `map` (plus `command`, `version`, `out` entries) as a manifest file
/// in `out_dir`.
pub fn write_manifest_map(
    mut map: BTreeMap<String, String>,
    command: &str,
    out_dir: &Path,
) -> Result<(), CliError> {
    map.insert("command".to_string(), command.to_string());
    map.insert("version".to_string(), env!("CARGO_PKG_VERSION").to_string());
    map.insert("out".to_string(), out_dir.display().to_string());
    let mut text = String::new();
    for (key, value) in &map {
        writeln!(text, "{key}={value}").expect("string write");
    }
    let path = out_dir.join(MANIFEST_FILE);
    std::fs::write(&path, text).map_err(|err| {
        CliError::Runtime(anyhow::anyhow!("cannot write manifest {}: {err}", path.display()))
    })
}

/// Parses a comma-separated list such as `0.01,0.02` or `1,2,4`.
pub fn parse_list<T>(key: &str, raw: &str) -> Result<Vec<T>, CliError>
where
    T: FromStr,
    T::Err: Display,
{
    raw.split(',')
        .map(str::trim)
        .filter(|part| !part.is_empty())
        .map(|part| {
            part.parse::<T>().map_err(|err| {
                CliError::usage(format!("{key} entry {part:?} is invalid: {err}"))
            })
        })
        .collect()
}
