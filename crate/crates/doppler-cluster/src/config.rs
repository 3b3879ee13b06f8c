//! Pipeline configuration: one TOML or JSON document (or CLI flags) that
//! fully determines a run. The resolved form is written to every output
//! directory as `provenance.json`, and re-running any command from that file
//! reproduces byte-identical outputs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::clustering::{ClusterMethod, ClustererConfig};
use crate::data::{self, DataLayout, Dataset, SynthConfig};
use crate::error::{Error, Result};
use crate::features::ExtractorConfig;
use crate::manifold::ManifoldMethod;
use crate::seeds::{self, tags};
use crate::validity::{sweep_k, KSweepReport, SweepConfig};

/// Requested cluster count: a fixed number or "auto" (resolved by the
/// validity-index sweep on the raw feature vectors).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "KChoiceRepr", into = "KChoiceRepr")]
pub enum KChoice {
    Auto,
    Fixed(usize),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum KChoiceRepr {
    Int(usize),
    Str(String),
}

impl TryFrom<KChoiceRepr> for KChoice {
    type Error = String;
    fn try_from(r: KChoiceRepr) -> std::result::Result<Self, String> {
        match r {
            KChoiceRepr::Int(k) => Ok(KChoice::Fixed(k)),
            KChoiceRepr::Str(s) if s == "auto" => Ok(KChoice::Auto),
            KChoiceRepr::Str(s) => Err(format!("k must be an integer or \"auto\", got {s:?}")),
        }
    }
}

impl From<KChoice> for KChoiceRepr {
    fn from(k: KChoice) -> Self {
        match k {
            KChoice::Auto => KChoiceRepr::Str("auto".into()),
            KChoice::Fixed(v) => KChoiceRepr::Int(v),
        }
    }
}

impl std::str::FromStr for KChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(KChoice::Auto);
        }
        s.parse::<usize>()
            .map(KChoice::Fixed)
            .map_err(|_| Error::Config(format!("k must be an integer or \"auto\", got {s:?}")))
    }
}

/// Synthetic generator parameters without a seed; the seed is derived from
/// the pipeline root seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    #[serde(default = "default_subjects")]
    pub subjects: u32,
    #[serde(default = "default_reps")]
    pub reps: u32,
    #[serde(default = "default_activities")]
    pub activities: u32,
    #[serde(default = "default_noise")]
    pub noise: f64,
}

fn default_subjects() -> u32 {
    4
}
fn default_reps() -> u32 {
    10
}
fn default_activities() -> u32 {
    5
}
fn default_noise() -> f64 {
    0.05
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            subjects: default_subjects(),
            reps: default_reps(),
            activities: default_activities(),
            noise: default_noise(),
        }
    }
}

/// Where the dataset comes from: a CSV path or the synthetic generator.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<DataLayout>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SynthSpec>,
}

/// Clusterer entry in the evaluation grid; k and seeds come from the
/// pipeline level.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClustererSpec {
    pub kind: ClusterMethod,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
}

fn default_max_iter() -> usize {
    300
}
fn default_tol() -> f64 {
    1e-6
}
fn default_restarts() -> usize {
    5
}

impl ClustererSpec {
    pub fn new(kind: ClusterMethod) -> Self {
        Self {
            kind,
            max_iter: default_max_iter(),
            tol: default_tol(),
            restarts: default_restarts(),
        }
    }

    pub fn to_clusterer(&self, k: usize, seed: u64) -> ClustererConfig {
        ClustererConfig {
            method: self.kind,
            k,
            seed,
            max_iter: self.max_iter,
            tol: self.tol,
            restarts: self.restarts,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default = "default_ks")]
    pub ks: Vec<usize>,
    #[serde(default = "default_sweep_restarts")]
    pub restarts: usize,
}

fn default_ks() -> Vec<usize> {
    (2..=10).collect()
}
fn default_sweep_restarts() -> usize {
    8
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { ks: default_ks(), restarts: default_sweep_restarts() }
    }
}

/// Which feature matrix the `embed` command projects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSource {
    /// The raw 6400-dimensional sample vectors.
    Raw,
    /// The first configured extractor, fitted on the whole dataset.
    Extractor,
}

impl std::str::FromStr for FeatureSource {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(FeatureSource::Raw),
            "extractor" => Ok(FeatureSource::Extractor),
            other => Err(Error::Config(format!(
                "unknown feature source {other:?}; valid sources: raw, extractor"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbedSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<ManifoldMethod>,
    #[serde(default = "default_feature_source")]
    pub features: FeatureSource,
    #[serde(default = "default_perplexity")]
    pub perplexity: f64,
    #[serde(default = "default_embed_iters")]
    pub iters: usize,
    #[serde(default = "default_neighbors")]
    pub neighbors: usize,
    #[serde(default = "default_reg")]
    pub reg: f64,
}

fn default_feature_source() -> FeatureSource {
    FeatureSource::Raw
}
fn default_perplexity() -> f64 {
    15.0
}
fn default_embed_iters() -> usize {
    1000
}
fn default_neighbors() -> usize {
    10
}
fn default_reg() -> f64 {
    1e-3
}

impl Default for EmbedSection {
    fn default() -> Self {
        Self {
            method: None,
            features: default_feature_source(),
            perplexity: default_perplexity(),
            iters: default_embed_iters(),
            neighbors: default_neighbors(),
            reg: default_reg(),
        }
    }
}

/// The full pipeline configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_k")]
    pub k: KChoice,
    #[serde(default)]
    pub dataset: DatasetSource,
    #[serde(default = "default_extractors", rename = "extractor")]
    pub extractors: Vec<ExtractorConfig>,
    #[serde(default = "default_clusterers", rename = "clusterer")]
    pub clusterers: Vec<ClustererSpec>,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub embed: EmbedSection,
}

fn default_k() -> KChoice {
    KChoice::Auto
}
fn default_extractors() -> Vec<ExtractorConfig> {
    vec![ExtractorConfig::new(crate::features::ExtractorKind::LocalDct)]
}
fn default_clusterers() -> Vec<ClustererSpec> {
    vec![ClustererSpec::new(ClusterMethod::KMeans)]
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            k: default_k(),
            dataset: DatasetSource::default(),
            extractors: default_extractors(),
            clusterers: default_clusterers(),
            sweep: SweepSection::default(),
            embed: EmbedSection::default(),
        }
    }
}

impl PipelineConfig {
    /// Loads a TOML or JSON config file (JSON detected by extension or
    /// leading brace).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e == "json")
            || text.trim_start().starts_with('{');
        if is_json {
            serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("bad JSON config {}: {e}", path.display())))
        } else {
            toml::from_str(&text)
                .map_err(|e| Error::Config(format!("bad TOML config {}: {e}", path.display())))
        }
    }

    /// Checks cross-field constraints; called after flag overrides.
    pub fn validate(&self) -> Result<()> {
        match (&self.dataset.path, &self.dataset.synthetic) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "dataset: specify either `path` or `synthetic`, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Config(
                    "dataset: a CSV `path` or a `synthetic` section is required".into(),
                ))
            }
            _ => {}
        }
        if let Some(path) = &self.dataset.path {
            if !path.exists() {
                return Err(Error::Config(format!(
                    "dataset path {} does not exist",
                    path.display()
                )));
            }
        }
        if self.extractors.is_empty() {
            return Err(Error::Config("at least one extractor is required".into()));
        }
        if self.clusterers.is_empty() {
            return Err(Error::Config("at least one clusterer is required".into()));
        }
        if let KChoice::Fixed(k) = self.k {
            if k == 0 {
                return Err(Error::Config("k must be >= 1".into()));
            }
        }
        Ok(())
    }

    /// Loads the dataset from its configured source. The synthetic seed is
    /// derived from the root seed.
    pub fn load_dataset(&self) -> Result<Dataset> {
        if let Some(path) = &self.dataset.path {
            let layout = self.dataset.layout.unwrap_or(DataLayout::Vector6400);
            return data::load_dataset(path, layout);
        }
        let spec = self
            .dataset
            .synthetic
            .as_ref()
            .expect("validate() ensures a source");
        data::generate_synthetic(&SynthConfig {
            n_subjects: spec.subjects,
            reps_per_activity: spec.reps,
            n_activities: spec.activities,
            noise_level: spec.noise,
            seed: seeds::split(self.seed, tags::SYNTH),
        })
    }

    /// The validity-index sweep over the raw feature vectors.
    pub fn run_sweep(&self, ds: &Dataset) -> Result<KSweepReport> {
        let raw = ds.to_matrix();
        let cfg = SweepConfig {
            candidate_ks: self.sweep.ks.clone(),
            seed: seeds::split(self.seed, tags::SWEEP),
            restarts: self.sweep.restarts,
            ..SweepConfig::default()
        };
        sweep_k(&raw.view(), &cfg)
    }

    /// Resolves `k`: fixed value, or the sweep's recommendation for "auto".
    pub fn resolve_k(&self, ds: &Dataset) -> Result<usize> {
        match self.k {
            KChoice::Fixed(k) => Ok(k),
            KChoice::Auto => Ok(self.run_sweep(ds)?.recommended_k),
        }
    }

    /// Serializes the resolved config for the output directory.
    pub fn provenance_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
