//! Local 2D DCT feature extraction.
//!
//! An 80x80 spectrogram image is tiled into non-overlapping square patches
//! (10, 20, 40, or the full 80). The selected patch is split into a 3x3
//! sub-patch grid, each sub-patch is transformed with the orthonormal type-II
//! 2D DCT, and the first 6 coefficients in JPEG zig-zag order are kept,
//! giving a fixed 9 x 6 = 54-dimensional feature vector per image.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::data::IMAGE_SIDE;
use crate::error::{Error, Result};

/// Sub-patch grid is fixed at 3x3.
pub const SUB_GRID: usize = 3;
/// Zig-zag coefficients kept per sub-patch.
pub const COEFFS_PER_SUBPATCH: usize = 6;
/// Local DCT feature length: 9 sub-patches x 6 coefficients.
pub const DCT_FEATURE_LEN: usize = SUB_GRID * SUB_GRID * COEFFS_PER_SUBPATCH;

/// Admissible square patch sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub enum PatchSize {
    P10,
    P20,
    P40,
    P80,
}

impl PatchSize {
    pub const ALL: [PatchSize; 4] = [PatchSize::P10, PatchSize::P20, PatchSize::P40, PatchSize::P80];

    pub fn len(self) -> usize {
        match self {
            PatchSize::P10 => 10,
            PatchSize::P20 => 20,
            PatchSize::P40 => 40,
            PatchSize::P80 => 80,
        }
    }

    /// Non-overlapping patches per image: (80 / size)^2.
    pub fn patch_count(self) -> usize {
        let per_side = IMAGE_SIDE / self.len();
        per_side * per_side
    }
}

impl TryFrom<usize> for PatchSize {
    type Error = String;
    fn try_from(v: usize) -> std::result::Result<Self, Self::Error> {
        match v {
            10 => Ok(PatchSize::P10),
            20 => Ok(PatchSize::P20),
            40 => Ok(PatchSize::P40),
            80 => Ok(PatchSize::P80),
            other => Err(format!("patch size must be one of 10, 20, 40, 80, got {other}")),
        }
    }
}

impl From<PatchSize> for usize {
    fn from(p: PatchSize) -> usize {
        p.len()
    }
}

/// Which patch of which size the local DCT features come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DctPatchPlan {
    pub patch_size: PatchSize,
    /// Row-major index among the non-overlapping patches of that size.
    pub patch_index: usize,
}

impl DctPatchPlan {
    pub fn new(patch_size: PatchSize, patch_index: usize) -> Result<Self> {
        if patch_index >= patch_size.patch_count() {
            return Err(Error::InvalidArgument(format!(
                "patch index {patch_index} out of range for size {} ({} patches)",
                patch_size.len(),
                patch_size.patch_count()
            )));
        }
        Ok(Self { patch_size, patch_index })
    }

    /// Top-left corner (row, col) of the patch in the 80x80 image.
    pub fn origin(&self) -> (usize, usize) {
        let per_side = IMAGE_SIDE / self.patch_size.len();
        let r = self.patch_index / per_side;
        let c = self.patch_index % per_side;
        (r * self.patch_size.len(), c * self.patch_size.len())
    }
}

/// Orthonormal 1-D DCT-II basis matrix of order `n` (rows are basis vectors).
fn dct_basis(n: usize) -> Array2<f64> {
    let mut c = Array2::<f64>::zeros((n, n));
    let norm0 = (1.0 / n as f64).sqrt();
    let norm = (2.0 / n as f64).sqrt();
    for p in 0..n {
        for i in 0..n {
            let angle = std::f64::consts::PI * (2 * i + 1) as f64 * p as f64 / (2 * n) as f64;
            c[[p, i]] = if p == 0 { norm0 } else { norm * angle.cos() };
        }
    }
    c
}

/// Orthonormal type-II 2D DCT of a u x v block.
///
/// `F[p][q] = (2 / sqrt(u v)) a_p a_q sum_ij f[i][j]
///  cos(pi (2i+1) p / 2u) cos(pi (2j+1) q / 2v)` with `a_0 = 1/sqrt(2)`,
/// computed separably. Linear, orthonormal (energy preserving), invertible.
pub fn dct2(block: &ArrayView2<f64>) -> Result<Array2<f64>> {
    let (u, v) = (block.nrows(), block.ncols());
    if u == 0 || v == 0 {
        return Err(Error::InvalidArgument("empty matrix for dct2".into()));
    }
    let cu = dct_basis(u);
    let cv = dct_basis(v);
    Ok(cu.dot(block).dot(&cv.t()))
}

/// Inverse of [`dct2`].
pub fn idct2(coeffs: &ArrayView2<f64>) -> Result<Array2<f64>> {
    let (u, v) = (coeffs.nrows(), coeffs.ncols());
    if u == 0 || v == 0 {
        return Err(Error::InvalidArgument("empty matrix for idct2".into()));
    }
    let cu = dct_basis(u);
    let cv = dct_basis(v);
    Ok(cu.t().dot(coeffs).dot(&cv))
}

/// (row, col) positions of a rows x cols matrix in JPEG zig-zag order,
/// starting at (0, 0) and walking anti-diagonals.
pub fn zigzag_order(rows: usize, cols: usize) -> Vec<(usize, usize)> {
    let mut order = Vec::with_capacity(rows * cols);
    for s in 0..rows + cols - 1 {
        let lo = s.saturating_sub(cols - 1);
        let hi = s.min(rows - 1);
        if s % 2 == 1 {
            // Walking down-left: row ascending.
            for r in lo..=hi {
                order.push((r, s - r));
            }
        } else {
            // Walking up-right: row descending.
            for r in (lo..=hi).rev() {
                order.push((r, s - r));
            }
        }
    }
    order
}

/// First `k` coefficients of `coeffs` in zig-zag order.
pub fn zigzag_select(coeffs: &ArrayView2<f64>, k: usize) -> Result<Vec<f64>> {
    let (rows, cols) = (coeffs.nrows(), coeffs.ncols());
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument("empty matrix for zigzag_select".into()));
    }
    if k > rows * cols {
        return Err(Error::InvalidArgument(format!(
            "zig-zag count {k} exceeds matrix size {}",
            rows * cols
        )));
    }
    Ok(zigzag_order(rows, cols)
        .into_iter()
        .take(k)
        .map(|(r, c)| coeffs[[r, c]])
        .collect())
}

/// Splits `len` into three contiguous segments: floor(len/3), floor(len/3),
/// and the remainder, so every pixel is covered.
pub(crate) fn thirds(len: usize) -> [(usize, usize); 3] {
    let f = len / 3;
    [(0, f), (f, f), (2 * f, len - 2 * f)]
}

/// Extracts the 54 local DCT features of `image` for the given plan: the
/// patch is split into a 3x3 sub-patch grid, each sub-patch transformed with
/// [`dct2`], and 6 zig-zag coefficients per sub-patch concatenated in
/// row-major sub-patch order.
pub fn extract_local_dct(image: &ArrayView2<f64>, plan: &DctPatchPlan) -> Result<Vec<f64>> {
    if image.nrows() != IMAGE_SIDE || image.ncols() != IMAGE_SIDE {
        return Err(Error::DimensionMismatch {
            expected: IMAGE_SIDE,
            got: image.nrows().max(image.ncols()),
        });
    }
    if plan.patch_index >= plan.patch_size.patch_count() {
        return Err(Error::InvalidArgument(format!(
            "patch index {} out of range for size {}",
            plan.patch_index,
            plan.patch_size.len()
        )));
    }
    let (r0, c0) = plan.origin();
    let len = plan.patch_size.len();
    let rows = thirds(len);
    let cols = thirds(len);
    let mut features = Vec::with_capacity(DCT_FEATURE_LEN);
    for &(ro, rl) in &rows {
        for &(co, cl) in &cols {
            let block = image.slice(ndarray::s![r0 + ro..r0 + ro + rl, c0 + co..c0 + co + cl]);
            let coeffs = dct2(&block)?;
            features.extend(zigzag_select(&coeffs.view(), COEFFS_PER_SUBPATCH)?);
        }
    }
    debug_assert_eq!(features.len(), DCT_FEATURE_LEN);
    Ok(features)
}
