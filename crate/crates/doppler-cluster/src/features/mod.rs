//! Feature extraction from 80x80 spectrogram images.
//!
//! Five extractors are available: local 2D DCT (patch chosen by a Dunn-index
//! search), raw DCT (the full 80x80 image as a single patch), local entropy
//! (patching strategy chosen by the same search), PCA on the flattened
//! 6400-vectors, and 2DPCA on the image matrices.
//!
//! The selection searches cluster each candidate's features with a
//! deterministic farthest-first K-Means and score the partition with Dunn's
//! index, so the chosen plan depends only on the training data, not on sample
//! order or a random seed.

pub mod dct;
pub mod entropy;
pub mod pca;
pub mod pca2d;

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use dct::{
    dct2, extract_local_dct, idct2, zigzag_order, zigzag_select, DctPatchPlan, PatchSize,
    COEFFS_PER_SUBPATCH, DCT_FEATURE_LEN, SUB_GRID,
};
pub use entropy::{
    entropy, extract_entropy_features, EntropyPatching, EntropyStrategy, DEFAULT_ENTROPY_BINS,
};
pub use pca::{pca_fit, pca_transform, PcaModel};
pub use pca2d::{covariance_2d, pca2d_fit, pca2d_transform, Pca2dModel};

use crate::clustering;
use crate::data::{flatten_image, IMAGE_SIDE, SAMPLE_LEN};
use crate::error::{Error, Result};
use crate::validity::{self, SpreadMode};

/// Settings for the Dunn-scored candidate search used by the `select_*`
/// operations.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionConfig {
    /// Number of clusters K-Means is run with while scoring candidates.
    pub k: usize,
    #[serde(default = "default_sel_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_sel_tol")]
    pub tol: f64,
    #[serde(default = "default_spread")]
    pub spread: SpreadMode,
}

fn default_sel_max_iter() -> usize {
    300
}
fn default_sel_tol() -> f64 {
    1e-6
}
fn default_spread() -> SpreadMode {
    SpreadMode::Sum
}

impl SelectionConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            max_iter: default_sel_max_iter(),
            tol: default_sel_tol(),
            spread: default_spread(),
        }
    }
}

/// Dunn score of the deterministic K-Means partition of `features`.
/// A partition whose clusters all have zero spread is degenerate-perfect and
/// scores +inf, which keeps full-tie inputs comparable instead of erroring.
fn dunn_score(features: &Array2<f64>, cfg: &SelectionConfig) -> Result<f64> {
    let model =
        clustering::kmeans_fit_deterministic(&features.view(), cfg.k, cfg.max_iter, cfg.tol)?;
    let labels = clustering::assign(&model, &features.view())?;
    match validity::dunn_with_spread(&features.view(), &labels, &model.centers.view(), cfg.spread)
    {
        Ok(v) => Ok(v),
        Err(Error::ZeroSpread) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

fn validate_selection_input(
    train_images: &[Array2<f64>],
    cfg: &SelectionConfig,
) -> Result<()> {
    if cfg.k < 2 {
        return Err(Error::InvalidArgument(
            "selection requires k >= 2 for Dunn scoring".into(),
        ));
    }
    if train_images.len() < 2 * cfg.k {
        return Err(Error::InvalidArgument(format!(
            "selection requires at least 2k = {} training images, got {}",
            2 * cfg.k,
            train_images.len()
        )));
    }
    for im in train_images {
        if im.nrows() != IMAGE_SIDE || im.ncols() != IMAGE_SIDE {
            return Err(Error::DimensionMismatch {
                expected: IMAGE_SIDE,
                got: im.nrows().max(im.ncols()),
            });
        }
    }
    Ok(())
}

fn dct_feature_matrix(images: &[Array2<f64>], plan: &DctPatchPlan) -> Result<Array2<f64>> {
    let rows: Vec<Vec<f64>> = images
        .par_iter()
        .map(|im| extract_local_dct(&im.view(), plan))
        .collect::<Result<_>>()?;
    rows_to_matrix(rows)
}

fn rows_to_matrix(rows: Vec<Vec<f64>>) -> Result<Array2<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    let mut out = Array2::<f64>::zeros((n, m));
    for (i, row) in rows.into_iter().enumerate() {
        if row.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: row.len() });
        }
        for (j, v) in row.into_iter().enumerate() {
            out[[i, j]] = v;
        }
    }
    Ok(out)
}

/// Scores every (size, location) candidate patch by clustering its 54-dim
/// DCT features and returns the plan with the highest Dunn index.
/// Ties break to the smaller patch index, then the smaller size.
pub fn select_best_dct_patch(
    train_images: &[Array2<f64>],
    candidate_sizes: &[PatchSize],
    cfg: &SelectionConfig,
) -> Result<DctPatchPlan> {
    validate_selection_input(train_images, cfg)?;
    if candidate_sizes.is_empty() {
        return Err(Error::InvalidArgument("no candidate patch sizes".into()));
    }
    let mut candidates = Vec::new();
    for &size in candidate_sizes {
        for idx in 0..size.patch_count() {
            candidates.push(DctPatchPlan { patch_size: size, patch_index: idx });
        }
    }
    let scored: Vec<(DctPatchPlan, f64)> = candidates
        .into_par_iter()
        .map(|plan| {
            let features = dct_feature_matrix(train_images, &plan)?;
            Ok((plan, dunn_score(&features, cfg)?))
        })
        .collect::<Result<_>>()?;

    let mut best: Option<(DctPatchPlan, f64)> = None;
    for (plan, score) in scored {
        let better = match &best {
            None => true,
            Some((bp, bs)) => {
                score > *bs
                    || (score == *bs
                        && (plan.patch_index, plan.patch_size.len())
                            < (bp.patch_index, bp.patch_size.len()))
            }
        };
        if better {
            best = Some((plan, score));
        }
    }
    Ok(best.expect("at least one candidate").0)
}

/// Scores the three entropy patching strategies by the same Dunn search and
/// returns the best one. Ties break to declaration order.
pub fn select_best_entropy_strategy(
    train_images: &[Array2<f64>],
    bins: usize,
    cfg: &SelectionConfig,
) -> Result<EntropyStrategy> {
    validate_selection_input(train_images, cfg)?;
    let scored: Vec<(EntropyStrategy, f64)> = EntropyPatching::ALL
        .into_par_iter()
        .map(|patching| {
            let strategy = EntropyStrategy::new(patching, bins);
            let rows: Vec<Vec<f64>> = train_images
                .iter()
                .map(|im| extract_entropy_features(&im.view(), &strategy))
                .collect::<Result<_>>()?;
            let features = rows_to_matrix(rows)?;
            Ok((strategy, dunn_score(&features, cfg)?))
        })
        .collect::<Result<_>>()?;

    let mut best: Option<(EntropyStrategy, f64)> = None;
    for (strategy, score) in scored {
        // Strict improvement only: earlier strategies win ties.
        if best.as_ref().is_none_or(|(_, bs)| score > *bs) {
            best = Some((strategy, score));
        }
    }
    Ok(best.expect("three candidates").0)
}

/// Which feature extractor to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractorKind {
    LocalDct,
    RawDct,
    Entropy,
    Pca,
    Pca2d,
}

impl ExtractorKind {
    pub const ALL: [ExtractorKind; 5] = [
        ExtractorKind::LocalDct,
        ExtractorKind::RawDct,
        ExtractorKind::Entropy,
        ExtractorKind::Pca,
        ExtractorKind::Pca2d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExtractorKind::LocalDct => "local_dct",
            ExtractorKind::RawDct => "raw_dct",
            ExtractorKind::Entropy => "entropy",
            ExtractorKind::Pca => "pca",
            ExtractorKind::Pca2d => "pca2d",
        }
    }
}

impl std::fmt::Display for ExtractorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl std::str::FromStr for ExtractorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ExtractorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let valid: Vec<&str> = ExtractorKind::ALL.iter().map(|k| k.name()).collect();
                Error::Config(format!(
                    "unknown extractor {s:?}; valid extractors: {}",
                    valid.join(", ")
                ))
            })
    }
}

/// Extractor selection plus its parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractorConfig {
    pub kind: ExtractorKind,
    /// Candidate patch sizes for the local DCT search.
    #[serde(default = "default_dct_sizes")]
    pub dct_sizes: Vec<PatchSize>,
    /// Histogram bins for entropy features.
    #[serde(default = "default_bins")]
    pub entropy_bins: usize,
    /// Cumulative explained-variance target for PCA / 2DPCA.
    #[serde(default = "default_variance_target")]
    pub variance_target: f64,
}

fn default_dct_sizes() -> Vec<PatchSize> {
    PatchSize::ALL.to_vec()
}
fn default_bins() -> usize {
    DEFAULT_ENTROPY_BINS
}
fn default_variance_target() -> f64 {
    0.95
}

impl ExtractorConfig {
    pub fn new(kind: ExtractorKind) -> Self {
        Self {
            kind,
            dct_sizes: default_dct_sizes(),
            entropy_bins: default_bins(),
            variance_target: default_variance_target(),
        }
    }
}

/// A fitted extractor, ready to transform train or test images.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "extractor", rename_all = "snake_case")]
pub enum FittedExtractor {
    LocalDct { plan: DctPatchPlan },
    RawDct { plan: DctPatchPlan },
    Entropy { strategy: EntropyStrategy },
    Pca { model: PcaModel },
    Pca2d { model: Pca2dModel },
}

/// Fits an extractor on training images only. `sel` drives the Dunn-scored
/// patch / strategy searches; PCA variants ignore it.
pub fn fit_extractor(
    cfg: &ExtractorConfig,
    train_images: &[Array2<f64>],
    sel: &SelectionConfig,
) -> Result<FittedExtractor> {
    match cfg.kind {
        ExtractorKind::LocalDct => Ok(FittedExtractor::LocalDct {
            plan: select_best_dct_patch(train_images, &cfg.dct_sizes, sel)?,
        }),
        ExtractorKind::RawDct => Ok(FittedExtractor::RawDct {
            plan: DctPatchPlan::new(PatchSize::P80, 0).expect("80x80 has one patch"),
        }),
        ExtractorKind::Entropy => Ok(FittedExtractor::Entropy {
            strategy: select_best_entropy_strategy(train_images, cfg.entropy_bins, sel)?,
        }),
        ExtractorKind::Pca => {
            let x = images_to_flat_matrix(train_images)?;
            Ok(FittedExtractor::Pca {
                model: pca_fit(&x.view(), cfg.variance_target)?,
            })
        }
        ExtractorKind::Pca2d => Ok(FittedExtractor::Pca2d {
            model: pca2d_fit(train_images, cfg.variance_target)?,
        }),
    }
}

fn images_to_flat_matrix(images: &[Array2<f64>]) -> Result<Array2<f64>> {
    let mut x = Array2::<f64>::zeros((images.len(), SAMPLE_LEN));
    for (i, im) in images.iter().enumerate() {
        let flat = flatten_image(im)?;
        x.row_mut(i).assign(&flat);
    }
    Ok(x)
}

impl FittedExtractor {
    pub fn kind(&self) -> ExtractorKind {
        match self {
            FittedExtractor::LocalDct { .. } => ExtractorKind::LocalDct,
            FittedExtractor::RawDct { .. } => ExtractorKind::RawDct,
            FittedExtractor::Entropy { .. } => ExtractorKind::Entropy,
            FittedExtractor::Pca { .. } => ExtractorKind::Pca,
            FittedExtractor::Pca2d { .. } => ExtractorKind::Pca2d,
        }
    }

    /// JSON summary of what was fitted (patch plan, strategy, components).
    pub fn detail(&self) -> serde_json::Value {
        match self {
            FittedExtractor::LocalDct { plan } | FittedExtractor::RawDct { plan } => {
                serde_json::json!({
                    "patch_size": plan.patch_size.len(),
                    "patch_index": plan.patch_index,
                })
            }
            FittedExtractor::Entropy { strategy } => serde_json::json!({
                "patching": strategy.patching.to_string(),
                "bins": strategy.bins,
            }),
            FittedExtractor::Pca { model } => serde_json::json!({
                "components": model.n_components(),
            }),
            FittedExtractor::Pca2d { model } => serde_json::json!({
                "components": model.n_components(),
            }),
        }
    }

    /// Extracts features for a batch of images (data-parallel, order
    /// preserving) and packages them with provenance.
    pub fn transform(&self, images: &[Array2<f64>], seed: u64) -> Result<FeatureMatrix> {
        let (data, columns) = match self {
            FittedExtractor::LocalDct { plan } | FittedExtractor::RawDct { plan } => {
                let data = dct_feature_matrix(images, plan)?;
                let columns = (0..SUB_GRID * SUB_GRID)
                    .flat_map(|s| (0..COEFFS_PER_SUBPATCH).map(move |c| format!("dct_{s}_{c}")))
                    .collect();
                (data, columns)
            }
            FittedExtractor::Entropy { strategy } => {
                let rows: Vec<Vec<f64>> = images
                    .par_iter()
                    .map(|im| extract_entropy_features(&im.view(), strategy))
                    .collect::<Result<_>>()?;
                let data = rows_to_matrix(rows)?;
                let columns = (0..strategy.feature_len())
                    .map(|i| format!("entropy_{i}"))
                    .collect();
                (data, columns)
            }
            FittedExtractor::Pca { model } => {
                let x = images_to_flat_matrix(images)?;
                let data = pca_transform(model, &x.view())?;
                let columns = (0..model.n_components()).map(|i| format!("pc_{i}")).collect();
                (data, columns)
            }
            FittedExtractor::Pca2d { model } => {
                let rows: Vec<Vec<f64>> = images
                    .par_iter()
                    .map(|im| pca2d_transform(model, im).map(|a| a.to_vec()))
                    .collect::<Result<_>>()?;
                let data = rows_to_matrix(rows)?;
                let columns = (0..model.n_components())
                    .flat_map(|c| (0..IMAGE_SIDE).map(move |r| format!("pc2d_{c}_{r}")))
                    .collect();
                (data, columns)
            }
        };
        Ok(FeatureMatrix {
            data,
            columns,
            provenance: FeatureProvenance {
                extractor: self.kind().name().to_string(),
                detail: self.detail(),
                seed,
            },
        })
    }
}

/// How a feature matrix was produced; written next to CSV exports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureProvenance {
    pub extractor: String,
    pub detail: serde_json::Value,
    pub seed: u64,
}

/// An n x m matrix of extracted features with column names and provenance.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    pub data: Array2<f64>,
    pub columns: Vec<String>,
    pub provenance: FeatureProvenance,
}

impl FeatureMatrix {
    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.data.view()
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.columns)?;
        for row in self.data.rows() {
            w.write_record(row.iter().map(|v| format!("{v}")))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes the JSON sidecar describing extractor, plan/strategy, and seed.
    pub fn write_sidecar(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(&self.provenance)?)?;
        Ok(())
    }
}
