//! Artifact directory shared by the pipeline stages.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use revaudit::dataset::io::{load_venue_config, save_venue_config};
use revaudit::dataset::{load_dataset, save_dataset, ReviewDataset, VenueConfig};

use crate::error::{CliError, CliResult};

pub const VENUE: &str = "venue.json";
pub const DATASET: &str = "dataset";
pub const GROUND_TRUTH: &str = "ground_truth.json";
pub const GENERATOR: &str = "generator.json";
pub const CITATIONS: &str = "citations.json";
pub const FILTER_REPORT: &str = "filter_report.json";
pub const ANALYSIS: &str = "analysis.json";
pub const PARAMETRIC: &str = "parametric.json";
pub const NONPARAMETRIC: &str = "nonparametric.json";
pub const TRIPLES: &str = "triples.csv";

pub struct Workdir {
    root: PathBuf,
    venue_override: Option<PathBuf>,
}

impl Workdir {
    pub fn new(root: PathBuf, venue_override: Option<PathBuf>) -> Self {
        Self { root, venue_override }
    }

    pub fn has_venue_override(&self) -> bool {
        self.venue_override.is_some()
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn ensure(&self) -> CliResult<()> {
        fs::create_dir_all(&self.root).map_err(|e| CliError::io(&self.root, e))
    }

    /// Path of an upstream artifact, or a missing-artifact error naming the
    /// stage that produces it.
    pub fn require(&self, name: &str, stage: &'static str) -> CliResult<PathBuf> {
        let p = self.path(name);
        if p.exists() {
            Ok(p)
        } else {
            Err(CliError::MissingArtifact {
                artifact: name.to_owned(),
                stage,
            })
        }
    }

    pub fn venue(&self) -> CliResult<VenueConfig> {
        match &self.venue_override {
            Some(p) => Ok(load_venue_config(p)?),
            None => Ok(load_venue_config(&self.require(VENUE, "ingest")?)?),
        }
    }

    pub fn save_venue(&self, cfg: &VenueConfig) -> CliResult<()> {
        Ok(save_venue_config(cfg, &self.path(VENUE))?)
    }

    pub fn dataset(&self) -> CliResult<ReviewDataset> {
        let dir = self.require(DATASET, "ingest")?;
        Ok(load_dataset(&dir, self.venue()?)?)
    }

    pub fn save_dataset(&self, dataset: &ReviewDataset) -> CliResult<()> {
        self.save_venue(&dataset.config)?;
        Ok(save_dataset(dataset, &self.path(DATASET))?)
    }

    pub fn read_json<T: DeserializeOwned>(&self, name: &str, stage: &'static str) -> CliResult<T> {
        let p = self.require(name, stage)?;
        read_json(&p)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value).expect("artifact serializes");
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn write(&self, name: &str, bytes: &[u8]) -> CliResult<()> {
        let p = self.path(name);
        fs::write(&p, bytes).map_err(|e| CliError::io(&p, e))
    }

    /// Buffer a CSV writer's output and store it under `name`.
    pub fn write_with<F>(&self, name: &str, f: F) -> CliResult<()>
    where
        F: FnOnce(&mut Vec<u8>) -> revaudit::Result<()>,
    {
        let mut buf = Vec::new();
        f(&mut buf)?;
        self.write(name, &buf)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Core(revaudit::Error::Parse {
            file: path.display().to_string(),
            line: e.line(),
            message: e.to_string(),
        })
    })
}

pub fn open(path: &Path) -> CliResult<fs::File> {
    fs::File::open(path).map_err(|e| CliError::io(path, e))
}
