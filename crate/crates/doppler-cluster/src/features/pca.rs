//! Linear projection onto the principal components explaining a target
//! fraction (default 95%) of the variance.
//!
//! When the feature dimension exceeds the sample count the eigendecomposition
//! runs on the n x n Gram matrix instead of the m x m covariance; the nonzero
//! spectra coincide and the basis is recovered by back-projection.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// A fitted PCA projection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Array1<f64>,
    /// m x s projection basis with orthonormal columns.
    pub basis: Array2<f64>,
    /// Covariance eigenvalues of the retained components (length s).
    pub explained_variance: Array1<f64>,
    /// Eigenvalues divided by the total variance (length s).
    pub explained_variance_ratio: Array1<f64>,
}

impl PcaModel {
    pub fn n_components(&self) -> usize {
        self.basis.ncols()
    }
}

fn validate(x: &ArrayView2<f64>, variance_target: f64) -> Result<()> {
    if x.nrows() < 2 {
        return Err(Error::InvalidArgument(
            "pca requires at least 2 samples".into(),
        ));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite input value".into()));
    }
    if !(variance_target > 0.0 && variance_target <= 1.0) {
        return Err(Error::InvalidArgument(
            "variance target must be in (0, 1]".into(),
        ));
    }
    Ok(())
}

/// Fits PCA, retaining the minimal number of components whose cumulative
/// explained variance reaches `variance_target`.
pub fn pca_fit(x: &ArrayView2<f64>, variance_target: f64) -> Result<PcaModel> {
    validate(x, variance_target)?;
    let n = x.nrows();
    let m = x.ncols();
    let mean = x.mean_axis(Axis(0)).expect("n >= 2");
    let centered = x.to_owned() - &mean.view().insert_axis(Axis(0));
    let denom = (n - 1) as f64;
    let total_variance: f64 = centered.iter().map(|v| v * v).sum::<f64>() / denom;
    if total_variance <= 0.0 {
        return Err(Error::ZeroVariance(
            "all rows are identical; covariance is zero".into(),
        ));
    }

    // (eigenvalue, basis column) pairs, descending.
    let (eigenvalues, basis_full): (Array1<f64>, Array2<f64>) = if m <= n {
        let cov = centered.t().dot(&centered) / denom;
        let (vals, vecs) = linalg::eigh(&cov)?;
        (vals, vecs)
    } else {
        let gram = centered.dot(&centered.t()) / denom;
        let (vals, u) = linalg::eigh(&gram)?;
        // w_i = X_c^T u_i / sqrt((n-1) lambda_i), orthonormal for lambda > 0.
        let mut w = Array2::<f64>::zeros((m, vals.len()));
        for i in 0..vals.len() {
            if vals[i] > 0.0 {
                let col = centered.t().dot(&u.column(i)) / (denom * vals[i]).sqrt();
                w.column_mut(i).assign(&col);
            }
        }
        (vals, w)
    };

    let floor = eigenvalues[0].max(0.0) * 1e-12;
    let kept: Vec<usize> = (0..eigenvalues.len())
        .filter(|&i| eigenvalues[i] > floor && eigenvalues[i] > 0.0)
        .collect();
    if kept.is_empty() {
        return Err(Error::ZeroVariance("no positive eigenvalues".into()));
    }

    let mut s = kept.len();
    let mut cumulative = 0.0;
    for (count, &i) in kept.iter().enumerate() {
        cumulative += eigenvalues[i] / total_variance;
        if cumulative >= variance_target {
            s = count + 1;
            break;
        }
    }

    let mut basis = Array2::<f64>::zeros((m, s));
    let mut variance = Array1::<f64>::zeros(s);
    let mut ratio = Array1::<f64>::zeros(s);
    for (dst, &src) in kept[..s].iter().enumerate() {
        basis.column_mut(dst).assign(&basis_full.column(src));
        variance[dst] = eigenvalues[src];
        ratio[dst] = eigenvalues[src] / total_variance;
    }
    Ok(PcaModel {
        mean,
        basis,
        explained_variance: variance,
        explained_variance_ratio: ratio,
    })
}

/// Projects rows of `x` onto the retained components: (x - mean) W.
pub fn pca_transform(model: &PcaModel, x: &ArrayView2<f64>) -> Result<Array2<f64>> {
    if x.ncols() != model.mean.len() {
        return Err(Error::DimensionMismatch {
            expected: model.mean.len(),
            got: x.ncols(),
        });
    }
    let centered = x.to_owned() - &model.mean.view().insert_axis(Axis(0));
    Ok(centered.dot(&model.basis))
}
