//! INI configuration with one section per command. Flags override file
//! values; unknown sections and keys are rejected before anything runs.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use ini::Ini;

use crate::error::CliError;

pub const SEED_ENV: &str = "DOODLER_SEED";

/// Recognized keys of every command section.
pub const KNOWN_KEYS: &[(&str, &[&str])] = &[
    (
        "train",
        &[
            "data",
            "model",
            "loss_log",
            "holdout",
            "seed",
            "epochs",
            "batch_size",
            "learning_rate",
            "beta1",
            "beta2",
            "eps_adam",
            "convergence_eps",
            "max_steps",
            "hidden",
            "latent_dim",
        ],
    ),
    (
        "fit",
        &["model", "id_data", "ood_data", "stats", "id_tail", "ood_tail", "p_id", "hist_dir", "bins"],
    ),
    ("detect", &["model", "stats", "input", "t_p", "p_id", "out"]),
    ("segment", &["model", "stats", "input", "index", "out", "png", "recon", "p_id"]),
    ("stream", &["model", "stats", "source", "n", "significance", "seed"]),
    ("eval", &["model", "id_data", "ood_data", "noise", "noise_count", "seed", "out_dir"]),
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let ini = Ini::load_from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let mut sections = BTreeMap::new();
        for (name, props) in ini.iter() {
            let Some(name) = name else {
                if let Some((key, _)) = props.iter().next() {
                    return Err(CliError::Config(format!("key `{key}` outside any [command] section")));
                }
                continue;
            };
            let known = KNOWN_KEYS
                .iter()
                .find(|(s, _)| *s == name)
                .map(|(_, keys)| *keys)
                .ok_or_else(|| CliError::Config(format!("unknown section [{name}]")))?;
            let mut values = BTreeMap::new();
            for (key, value) in props.iter() {
                if !known.contains(&key) {
                    return Err(CliError::Config(format!("unknown key `{key}` in [{name}]")));
                }
                if values.insert(key.to_string(), value.to_string()).is_some() {
                    return Err(CliError::Config(format!("duplicate key `{key}` in [{name}]")));
                }
            }
            if sections.insert(name.to_string(), values).is_some() {
                return Err(CliError::Config(format!("duplicate section [{name}]")));
            }
        }
        Ok(Self { sections })
    }

    pub fn section(&self, name: &'static str) -> Settings {
        Settings {
            section: name,
            values: self.sections.get(name).cloned().unwrap_or_default(),
        }
    }
}

/// The configuration values of one command.
#[derive(Debug, Clone)]
pub struct Settings {
    section: &'static str,
    values: BTreeMap<String, String>,
}

impl Settings {
    /// The flag value if given, else the parsed config value.
    pub fn get<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.values
            .get(key)
            .map(|raw| {
                raw.trim().parse::<T>().map_err(|e| {
                    CliError::Config(format!("[{}] {key} = {raw:?}: {e}", self.section))
                })
            })
            .transpose()
    }

    pub fn or<T: FromStr>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.get(key, flag)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key, flag)?.ok_or_else(|| {
            CliError::Usage(format!(
                "missing `{key}`: pass --{} or set it under [{}]",
                key.replace('_', "-"),
                self.section
            ))
        })
    }

    /// Seed from the flag, the config file, then `DOODLER_SEED`, then 0.
    pub fn seed(&self, flag: Option<u64>) -> Result<u64, CliError> {
        if let Some(s) = self.get("seed", flag)? {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(raw) => raw
                .trim()
                .parse()
                .map_err(|e| CliError::Config(format!("{SEED_ENV}={raw:?}: {e}"))),
            Err(_) => Ok(0),
        }
    }

    /// Comma-separated list; an empty value is an empty list.
    pub fn list(&self, key: &str, flag: Option<String>) -> Result<Vec<String>, CliError> {
        Ok(self
            .get::<String>(key, flag)?
            .map(|raw| {
                raw.split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect()
            })
            .unwrap_or_default())
    }
}

/// Parses `name=path` or a bare path (named after its file name).
pub fn named_source(item: &str) -> (String, String) {
    match item.split_once('=') {
        Some((name, path)) => (name.trim().to_string(), path.trim().to_string()),
        None => {
            let name = Path::new(item)
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| item.to_string());
            (name, item.to_string())
        }
    }
}
