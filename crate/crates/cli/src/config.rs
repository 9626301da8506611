//! Config file schema. Every key is optional; flags override the file.
//!
//! ```toml
//! seed = 7          # default seed for every command
//! workers = 4
//! out = "results"
//!
//! [build]
//! radius = 6
//! mode = "combinatorial"
//!
//! [enumerate]
//! n = 10
//!
//! [sample]
//! n = 12
//! sampler = "pivot"
//! samples = 10000
//!
//! [verify]          # fields of VerifyConfig
//! n = 6
//!
//! [experiment]      # fields of ExperimentConfig
//! pivot_ns = [16, 32]
//!
//! [render]
//! n = 8
//! mirror = 4
//! ```

use std::path::{Path, PathBuf};

use heptasaw::analysis::report::ExperimentConfig;
use heptasaw::analysis::verify::VerifyConfig;
use heptasaw::lattice::hull::HullMode;
use heptasaw::lattice::BuildMode;
use heptasaw::saw::MoveSet;
use serde::{Deserialize, Serialize};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub build: BuildSection,
    #[serde(default)]
    pub enumerate: EnumerateSection,
    #[serde(default)]
    pub sample: SampleSection,
    /// Kept raw so that a table without `seed` can inherit the top-level one.
    pub verify: Option<toml::Table>,
    pub experiment: Option<toml::Table>,
    #[serde(default)]
    pub render: RenderSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildSection {
    pub radius: Option<u32>,
    pub mode: Option<BuildMode>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnumerateSection {
    pub n: Option<usize>,
    pub radius: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSection {
    pub n: Option<usize>,
    pub radius: Option<u32>,
    pub sampler: Option<Sampler>,
    pub samples: Option<usize>,
    pub chains: Option<usize>,
    pub burn_in: Option<u64>,
    pub thin: Option<u64>,
    pub moves: Option<MoveSet>,
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderSection {
    pub n: Option<usize>,
    pub radius: Option<u32>,
    pub mirror: Option<usize>,
    pub hull: Option<HullMode>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Sampler {
    Exact,
    Pivot,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }

    fn section<T: for<'de> Deserialize<'de> + Default>(&self, table: &Option<toml::Table>) -> Result<T, String> {
        let mut t = table.clone().unwrap_or_default();
        if let (Some(seed), false) = (self.seed, t.contains_key("seed")) {
            t.insert("seed".into(), toml::Value::Integer(seed as i64));
        }
        t.try_into().map_err(|e: toml::de::Error| e.to_string())
    }

    pub fn verify(&self) -> Result<VerifyConfig, String> {
        self.section(&self.verify).map_err(|e| format!("[verify]: {e}"))
    }

    pub fn experiment(&self) -> Result<ExperimentConfig, String> {
        self.section(&self.experiment).map_err(|e| format!("[experiment]: {e}"))
    }
}
