//! Local entropy feature extraction.
//!
//! Shannon entropy (base 2) of the normalized histogram of a patch, computed
//! for one of three fixed patching geometries of the 80x80 image:
//! two vertical halves (80x40), two horizontal halves (40x80), or a
//! 2 x 5 grid of 40x16 patches.

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::data::IMAGE_SIDE;
use crate::error::{Error, Result};

pub const DEFAULT_ENTROPY_BINS: usize = 32;

/// Patching geometry identifier, in declaration (tie-break) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyPatching {
    HalvesVertical,
    HalvesHorizontal,
    Grid10,
}

impl EntropyPatching {
    pub const ALL: [EntropyPatching; 3] = [
        EntropyPatching::HalvesVertical,
        EntropyPatching::HalvesHorizontal,
        EntropyPatching::Grid10,
    ];
}

impl std::fmt::Display for EntropyPatching {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EntropyPatching::HalvesVertical => write!(f, "halves_vertical"),
            EntropyPatching::HalvesHorizontal => write!(f, "halves_horizontal"),
            EntropyPatching::Grid10 => write!(f, "grid10"),
        }
    }
}

/// An entropy extraction strategy: patch geometry plus histogram bin count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntropyStrategy {
    pub patching: EntropyPatching,
    pub bins: usize,
}

impl EntropyStrategy {
    pub fn new(patching: EntropyPatching, bins: usize) -> Self {
        Self { patching, bins }
    }

    /// Patch rectangles as (row, col, height, width), in feature order.
    pub fn rectangles(&self) -> Vec<(usize, usize, usize, usize)> {
        let s = IMAGE_SIDE;
        match self.patching {
            EntropyPatching::HalvesVertical => {
                vec![(0, 0, s, s / 2), (0, s / 2, s, s / 2)]
            }
            EntropyPatching::HalvesHorizontal => {
                vec![(0, 0, s / 2, s), (s / 2, 0, s / 2, s)]
            }
            EntropyPatching::Grid10 => {
                // 2 rows x 5 columns of 40x16 patches, row-major.
                let (h, w) = (s / 2, s / 5);
                let mut rects = Vec::with_capacity(10);
                for r in 0..2 {
                    for c in 0..5 {
                        rects.push((r * h, c * w, h, w));
                    }
                }
                rects
            }
        }
    }

    /// Feature vector length: 2 for the halves strategies, 10 for the grid.
    pub fn feature_len(&self) -> usize {
        self.rectangles().len()
    }
}

/// Shannon entropy in bits of the histogram of `patch` over `bins`
/// equal-width bins spanning [0, 1]. Empty histogram bins contribute zero
/// (the 0 log 0 = 0 convention).
pub fn entropy(patch: &ArrayView2<f64>, bins: usize) -> Result<f64> {
    if patch.is_empty() {
        return Err(Error::InvalidArgument("empty patch for entropy".into()));
    }
    if bins < 2 {
        return Err(Error::InvalidArgument("entropy needs bins >= 2".into()));
    }
    let mut hist = vec![0usize; bins];
    for &v in patch.iter() {
        let idx = ((v * bins as f64) as usize).min(bins - 1);
        hist[idx] += 1;
    }
    let total = patch.len() as f64;
    let mut h = 0.0;
    for &count in &hist {
        if count > 0 {
            let p = count as f64 / total;
            h -= p * p.log2();
        }
    }
    Ok(h)
}

/// Per-patch entropies of `image` under `strategy`, concatenated in the
/// strategy's declared patch order.
pub fn extract_entropy_features(
    image: &ArrayView2<f64>,
    strategy: &EntropyStrategy,
) -> Result<Vec<f64>> {
    if image.nrows() != IMAGE_SIDE || image.ncols() != IMAGE_SIDE {
        return Err(Error::DimensionMismatch {
            expected: IMAGE_SIDE,
            got: image.nrows().max(image.ncols()),
        });
    }
    strategy
        .rectangles()
        .into_iter()
        .map(|(r, c, h, w)| {
            let patch = image.slice(ndarray::s![r..r + h, c..c + w]);
            entropy(&patch, strategy.bins)
        })
        .collect()
}
