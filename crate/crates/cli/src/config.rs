//! Config-file defaults. A config JSON supplies values for flags the user
//! did not pass; explicit flags always win.

use std::path::Path;

use fockcap::{Error, Result};

#[derive(Debug, Default, Clone)]
pub struct Defaults {
    pub n_max: Option<usize>,
    pub choices: Option<usize>,
    pub seed: Option<u64>,
    pub backend_name: Option<String>,
    pub etas: Option<String>,
    pub iterations: Option<usize>,
    pub efficiency: Option<f64>,
    pub renormalize: Option<bool>,
    pub threads: Option<usize>,
}

impl Defaults {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::Parse {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
        let as_usize = |key: &str| value.get(key).and_then(|v| v.as_u64()).map(|v| v as usize);
        Ok(Self {
            n_max: as_usize("n_max"),
            choices: as_usize("choices"),
            seed: value.get("seed").and_then(|v| v.as_u64()),
            backend_name: value
                .get("backend")
                .and_then(|v| v.as_str())
                .map(str::to_string),
            etas: value
                .get("etas")
                .and_then(|v| v.as_str())
                .map(str::to_string),
            iterations: as_usize("iterations"),
            efficiency: value.get("efficiency").and_then(|v| v.as_f64()),
            renormalize: value.get("renormalize").and_then(|v| v.as_bool()),
            threads: as_usize("threads"),
        })
    }
}
