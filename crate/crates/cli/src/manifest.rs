use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::args::OptimizerArgs;

/// Everything needed to rerun a command; contains no timestamps or host data
/// so that identical inputs give identical output bytes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub parameters: BTreeMap<&'static str, Value>,
    pub inputs: Vec<InputFile>,
    pub overrides: OptimizerArgs,
    pub output: Option<String>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputFile {
    pub path: String,
    pub sha256: String,
}

impl RunManifest {
    pub fn new(command: &'static str, overrides: &OptimizerArgs, output: Option<&Path>) -> Self {
        RunManifest {
            tool: "ncdegree",
            version: env!("CARGO_PKG_VERSION"),
            command,
            parameters: BTreeMap::new(),
            inputs: Vec::new(),
            overrides: overrides.clone(),
            output: output.map(|p| p.display().to_string()),
            seed: overrides.seed(),
        }
    }

    pub fn with(mut self, key: &'static str, value: impl Serialize) -> Self {
        self.parameters
            .insert(key, serde_json::to_value(value).expect("serializable parameter"));
        self
    }

    pub fn with_input(mut self, path: &Path, contents: &str) -> Self {
        self.inputs.push(InputFile {
            path: path.display().to_string(),
            sha256: sha256_hex(contents.as_bytes()),
        });
        self
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
