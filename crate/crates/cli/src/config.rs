//! Layered settings: command-line flag > `QCOH_<KEY>` environment variable >
//! `--config` key=value file > built-in default.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

pub const ENV_PREFIX: &str = "QCOH_";

/// Every key accepted from the environment or a config file. Keys use the
/// long-flag spelling; underscores are accepted and normalized to dashes.
pub const KNOWN_KEYS: &[&str] = &[
    "channel",
    "measure",
    "c1",
    "c2",
    "c3",
    "mu-list",
    "p-start",
    "p-stop",
    "p-count",
    "gamma",
    "t-grid",
    "literal-text-probs",
    "strict",
    "out",
    "workers",
    "grid",
    "kind",
    "p",
    "mu",
    "bell-basis",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Source {
    Env,
    File,
}

#[derive(Debug, Default)]
pub struct Layers {
    env: BTreeMap<String, String>,
    file: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('_', "-")
}

fn check_known(key: &str, origin: &str) -> Result<(), CliError> {
    if KNOWN_KEYS.contains(&key) {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "unknown setting '{key}' in {origin}"
        )))
    }
}

impl Layers {
    /// Collects `QCOH_*` variables from `vars` and, if given, parses the config file.
    pub fn load<I>(vars: I, config: Option<&Path>) -> Result<Self, CliError>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut layers = Layers::default();
        for (name, value) in vars {
            let Some(rest) = name.strip_prefix(ENV_PREFIX) else {
                continue;
            };
            let key = normalize(rest);
            check_known(&key, &format!("environment variable {name}"))?;
            layers.env.insert(key, value);
        }
        if let Some(path) = config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
            layers.file = parse_config(&text, &path.display().to_string())?;
        }
        Ok(layers)
    }

    fn lookup(&self, key: &str) -> Option<(&str, Source)> {
        debug_assert!(KNOWN_KEYS.contains(&key), "unregistered key {key}");
        self.env
            .get(key)
            .map(|v| (v.as_str(), Source::Env))
            .or_else(|| self.file.get(key).map(|v| (v.as_str(), Source::File)))
    }

    /// Resolves `key`: the flag wins, then env, then config file.
    pub fn get<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.lookup(key) {
            None => Ok(None),
            Some((raw, source)) => raw.trim().parse::<T>().map(Some).map_err(|e| {
                let origin = match source {
                    Source::Env => {
                        format!("{ENV_PREFIX}{}", key.replace('-', "_").to_ascii_uppercase())
                    }
                    Source::File => "config file".to_string(),
                };
                CliError::Usage(format!("invalid value '{raw}' for {key} ({origin}): {e}"))
            }),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.get(key, flag)?.unwrap_or(default))
    }

    /// Boolean switch; a set flag is `true`, otherwise env/file decide.
    pub fn switch(&self, key: &str, flag: bool) -> Result<bool, CliError> {
        if flag {
            return Ok(true);
        }
        Ok(self.get::<Switch>(key, None)?.is_some_and(|s| s.0))
    }
}

struct Switch(bool);

impl FromStr for Switch {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "1" | "true" | "yes" | "on" => Ok(Switch(true)),
            "0" | "false" | "no" | "off" | "" => Ok(Switch(false)),
            _ => Err("expected true/false".into()),
        }
    }
}

/// `key = value` lines; `#` starts a comment.
fn parse_config(text: &str, origin: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{origin}:{}: expected key = value", n + 1)))?;
        let key = normalize(key);
        check_known(&key, &format!("{origin}:{}", n + 1))?;
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

/// Comma-separated list of reals.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatList(pub Vec<f64>);

impl FromStr for FloatList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| format!("'{}': {e}", t.trim()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(FloatList)
    }
}

/// `start,stop,count` for the time axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl FromStr for TimeGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [start, stop, count] = parts[..] else {
            return Err("expected start,stop,count".into());
        };
        Ok(TimeGrid {
            start: start.parse().map_err(|e| format!("start: {e}"))?,
            stop: stop.parse().map_err(|e| format!("stop: {e}"))?,
            count: count.parse().map_err(|e| format!("count: {e}"))?,
        })
    }
}
