//! Plain-text record of a run, written next to its outputs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    /// Complete argument list, every default spelled out.
    pub args: Vec<String>,
    pub parameters: BTreeMap<String, String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    /// Builds the manifest from `(flag, values)` pairs in command-line order.
    pub fn new(command: &str, resolved: &[(&str, Vec<String>)]) -> Self {
        let mut args = vec![command.to_string()];
        let mut parameters = BTreeMap::new();
        for (flag, values) in resolved {
            args.push(format!("--{flag}"));
            args.extend(values.iter().cloned());
            parameters.insert(flag.to_string(), values.join(" "));
        }
        Self {
            command: command.to_string(),
            version: icfp::VERSION.to_string(),
            args,
            parameters,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest fields are plain strings")
    }

    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}

/// `<output>.manifest.toml`, in the directory of the output.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.toml");
    output.with_file_name(name)
}
