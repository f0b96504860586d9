//! TOML config files and their merge with command-line flags.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::SECTIONS;
use crate::CliError;

#[derive(Debug, Default)]
pub struct ConfigFile {
    globals: Map<String, Value>,
    sections: Map<String, Value>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let table: toml::Table = toml::from_str(text).map_err(|e| e.to_string())?;
        let Value::Object(all) = serde_json::to_value(table).map_err(|e| e.to_string())? else {
            unreachable!("a TOML document is a table");
        };
        let mut cfg = ConfigFile::default();
        for (key, value) in all {
            if SECTIONS.contains(&key.as_str()) {
                if !value.is_object() {
                    return Err(format!("`{key}` must be a table"));
                }
                cfg.sections.insert(key, value);
            } else {
                cfg.globals.insert(key, value);
            }
        }
        Ok(cfg)
    }

    pub fn globals(&self) -> &Map<String, Value> {
        &self.globals
    }

    pub fn section(&self, name: &str) -> Map<String, Value> {
        match self.sections.get(name) {
            Some(Value::Object(m)) => m.clone(),
            _ => Map::new(),
        }
    }
}

/// Fill the unset fields of `flags` from `file`. Unknown keys and ill-typed
/// values are usage errors naming the key.
pub fn merge<T>(flags: &T, file: &Map<String, Value>, scope: &str) -> Result<T, CliError>
where
    T: Serialize + DeserializeOwned + Default,
{
    let to_map = |t: &T| match serde_json::to_value(t) {
        Ok(Value::Object(m)) => m,
        _ => unreachable!("argument structs serialize to objects"),
    };
    let known = to_map(&T::default());
    let mut merged = to_map(flags);
    for (key, value) in file {
        if !known.contains_key(key) {
            return Err(CliError::Usage(format!("config [{scope}]: unknown key `{key}`")));
        }
        let single: Map<String, Value> = [(key.clone(), value.clone())].into_iter().collect();
        serde_json::from_value::<T>(Value::Object(single))
            .map_err(|e| CliError::Usage(format!("config [{scope}] key `{key}`: {e}")))?;
        if merged.get(key).map_or(true, Value::is_null) {
            merged.insert(key.clone(), value.clone());
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Usage(format!("config [{scope}]: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::{GlobalArgs, SurvivalArgs};

    const TEXT: &str = r#"
seed = 7
format = "json"

[survival]
lambda = [2.0, 3.0]
d = [4]
trials = 50
"#;

    #[test]
    fn flags_override_file() {
        let cfg = ConfigFile::parse(TEXT).unwrap();
        let flags = SurvivalArgs { trials: Some(9), ..Default::default() };
        let merged = merge(&flags, &cfg.section("survival"), "survival").unwrap();
        assert_eq!(merged.trials, Some(9));
        assert_eq!(merged.lambda, Some(vec![2.0, 3.0]));
        assert_eq!(merged.d, Some(vec![4]));
        let g = merge(&GlobalArgs::default(), cfg.globals(), "top level").unwrap();
        assert_eq!(g.seed, Some(7));
    }

    #[test]
    fn unknown_and_ill_typed_keys_name_the_field() {
        let cfg = ConfigFile::parse("[survival]\ntrails = 3\n").unwrap();
        let err = merge(&SurvivalArgs::default(), &cfg.section("survival"), "survival").unwrap_err();
        assert!(err.to_string().contains("trails"));
        let cfg = ConfigFile::parse("[survival]\ntrials = \"many\"\n").unwrap();
        let err = merge(&SurvivalArgs::default(), &cfg.section("survival"), "survival").unwrap_err();
        assert!(err.to_string().contains("trials"));
        assert!(ConfigFile::parse("survival = 3").is_err());
    }
}
