//! Config-file loading and the flag > file > environment > default
//! resolution order for run settings.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use thermowalk_core::{Error, Result};

/// Environment variable consulted for the seed when neither the flag nor
/// the config file sets one.
pub const SEED_ENV: &str = "THERMOWALK_SEED";

/// Default seed when nothing else specifies one.
pub const DEFAULT_SEED: u64 = 42;

/// Key=value pairs from a config file. Lines starting with `#` and blank
/// lines are ignored; keys use the long flag names with `-` replaced by
/// `_` (e.g. `t_final=1000`).
#[derive(Debug, Default)]
pub struct Settings {
    map: BTreeMap<String, String>,
}

impl Settings {
    pub fn empty() -> Self {
        Settings::default()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "{}:{}: expected key=value, got '{line}'",
                    path.display(),
                    lineno + 1
                ))
            })?;
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Settings { map })
    }

    /// Load the file when a path is given, otherwise an empty table.
    pub fn load_optional(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Settings::load(p),
            None => Ok(Settings::empty()),
        }
    }

    pub fn get_raw(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    /// Parse a key's value; absent keys are None, unparseable values are
    /// config errors.
    pub fn get<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.map.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|e| {
                Error::Config(format!("config key {key}={raw}: {e}"))
            }),
        }
    }
}

/// Flag value, else config-file value, else the given default.
pub fn resolve<T>(flag: Option<T>, settings: &Settings, key: &str, default: T) -> Result<T>
where
    T: FromStr,
    T::Err: Display,
{
    match flag {
        Some(v) => Ok(v),
        None => Ok(settings.get(key)?.unwrap_or(default)),
    }
}

/// Flag value, else config-file value, else None.
pub fn resolve_opt<T>(flag: Option<T>, settings: &Settings, key: &str) -> Result<Option<T>>
where
    T: FromStr,
    T::Err: Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => settings.get(key),
    }
}

/// Like [`resolve_opt`] but the setting must come from somewhere.
pub fn require<T>(flag: Option<T>, settings: &Settings, key: &str) -> Result<T>
where
    T: FromStr,
    T::Err: Display,
{
    resolve_opt(flag, settings, key)?
        .ok_or_else(|| Error::Config(format!("missing required setting: {key}")))
}

/// Seed resolution: flag, config file, THERMOWALK_SEED, then 42.
pub fn resolve_seed(flag: Option<u64>, settings: &Settings) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(s) = settings.get::<u64>("seed")? {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(raw) => {
            let raw = raw.trim();
            if raw.is_empty() {
                return Ok(DEFAULT_SEED);
            }
            raw.parse::<u64>()
                .map_err(|e| Error::Config(format!("{SEED_ENV}={raw}: {e}")))
        }
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Parse "n" or "nx,ny" into per-axis cell counts for the given
/// dimension; a single value means a square grid in 2D.
pub fn parse_cells(raw: &str, dim: usize) -> Result<[usize; 2]> {
    let parts: Vec<&str> = raw.split(',').map(|s| s.trim()).collect();
    let parse = |s: &str| -> Result<usize> {
        let n: usize =
            s.parse().map_err(|_| Error::Config(format!("bad cell count '{s}'")))?;
        if n == 0 {
            return Err(Error::Config(String::from("cell counts must be positive")));
        }
        Ok(n)
    };
    match (dim, parts.as_slice()) {
        (1, [n]) => Ok([parse(n)?, 1]),
        (2, [n]) => {
            let n = parse(n)?;
            Ok([n, n])
        }
        (2, [nx, ny]) => Ok([parse(nx)?, parse(ny)?]),
        _ => Err(Error::Config(format!(
            "cell counts '{raw}' do not fit a {dim}D domain"
        ))),
    }
}

/// Parse "a,b" into the (offset, slope) of a linear profile.
pub fn parse_linear(raw: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = raw.split(',').map(|s| s.trim()).collect();
    if parts.len() != 2 {
        return Err(Error::Config(format!("expected 'a,b', got '{raw}'")));
    }
    let a: f64 =
        parts[0].parse().map_err(|_| Error::Config(format!("bad number '{}'", parts[0])))?;
    let b: f64 =
        parts[1].parse().map_err(|_| Error::Config(format!("bad number '{}'", parts[1])))?;
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Config(String::from("linear profile values must be finite")));
    }
    Ok((a, b))
}
