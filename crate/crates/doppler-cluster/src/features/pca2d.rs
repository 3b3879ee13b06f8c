//! 2DPCA: principal components of the column covariance of 2-D images.
//!
//! The covariance is computed directly on the 80x80 image matrices,
//! `V = (1/n) sum_i (X_i - mean)^T (X_i - mean)`, so it stays 80x80 no matter
//! how many pixels a flattened sample would have. Images are projected as
//! `Y = (X - mean) W` and the 80 x d projection is flattened component-major
//! for use as a clustering feature vector.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// A fitted 2DPCA projection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Pca2dModel {
    pub mean_image: Array2<f64>,
    /// side x d basis with orthonormal columns.
    pub basis: Array2<f64>,
    pub explained_variance: Array1<f64>,
    pub explained_variance_ratio: Array1<f64>,
}

impl Pca2dModel {
    pub fn n_components(&self) -> usize {
        self.basis.ncols()
    }

    /// Length of the flattened feature vector: rows x d.
    pub fn feature_len(&self) -> usize {
        self.mean_image.nrows() * self.basis.ncols()
    }
}

/// Column covariance of a set of same-shaped images.
pub fn covariance_2d(images: &[Array2<f64>]) -> Result<Array2<f64>> {
    if images.len() < 2 {
        return Err(Error::InvalidArgument(
            "2dpca requires at least 2 images".into(),
        ));
    }
    let shape = images[0].dim();
    if images.iter().any(|im| im.dim() != shape) {
        return Err(Error::InvalidArgument("images differ in shape".into()));
    }
    let n = images.len() as f64;
    let mut mean = Array2::<f64>::zeros(shape);
    for im in images {
        mean += im;
    }
    mean /= n;
    let mut cov = Array2::<f64>::zeros((shape.1, shape.1));
    for im in images {
        let c = im - &mean;
        cov += &c.t().dot(&c);
    }
    cov /= n;
    Ok(cov)
}

/// Fits 2DPCA, retaining the minimal number of components whose cumulative
/// explained variance reaches `variance_target`.
pub fn pca2d_fit(images: &[Array2<f64>], variance_target: f64) -> Result<Pca2dModel> {
    if !(variance_target > 0.0 && variance_target <= 1.0) {
        return Err(Error::InvalidArgument(
            "variance target must be in (0, 1]".into(),
        ));
    }
    let cov = covariance_2d(images)?;
    let total_variance: f64 = (0..cov.nrows()).map(|i| cov[[i, i]]).sum();
    if total_variance <= 0.0 {
        return Err(Error::ZeroVariance(
            "all images are identical; covariance is zero".into(),
        ));
    }
    let shape = images[0].dim();
    let n = images.len() as f64;
    let mut mean = Array2::<f64>::zeros(shape);
    for im in images {
        mean += im;
    }
    mean /= n;

    let (eigenvalues, vectors) = linalg::eigh(&cov)?;
    let floor = eigenvalues[0].max(0.0) * 1e-12;
    let kept: Vec<usize> = (0..eigenvalues.len())
        .filter(|&i| eigenvalues[i] > floor && eigenvalues[i] > 0.0)
        .collect();
    if kept.is_empty() {
        return Err(Error::ZeroVariance("no positive eigenvalues".into()));
    }
    let mut d = kept.len();
    let mut cumulative = 0.0;
    for (count, &i) in kept.iter().enumerate() {
        cumulative += eigenvalues[i] / total_variance;
        if cumulative >= variance_target {
            d = count + 1;
            break;
        }
    }

    let mut basis = Array2::<f64>::zeros((shape.1, d));
    let mut variance = Array1::<f64>::zeros(d);
    let mut ratio = Array1::<f64>::zeros(d);
    for (dst, &src) in kept[..d].iter().enumerate() {
        basis.column_mut(dst).assign(&vectors.column(src));
        variance[dst] = eigenvalues[src];
        ratio[dst] = eigenvalues[src] / total_variance;
    }
    Ok(Pca2dModel {
        mean_image: mean,
        basis,
        explained_variance: variance,
        explained_variance_ratio: ratio,
    })
}

/// Projects one image: `Y = (X - mean) W`, flattened component-major
/// (all rows of component 0, then component 1, ...).
pub fn pca2d_transform(model: &Pca2dModel, image: &Array2<f64>) -> Result<Array1<f64>> {
    if image.dim() != model.mean_image.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.mean_image.nrows(),
            got: image.nrows(),
        });
    }
    let projected = (image - &model.mean_image).dot(&model.basis);
    let mut out = Array1::<f64>::zeros(model.feature_len());
    let rows = projected.nrows();
    for j in 0..projected.ncols() {
        for i in 0..rows {
            out[j * rows + i] = projected[[i, j]];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_image(side: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
        let mut im = Array2::<f64>::zeros((side, side));
        for v in im.iter_mut() {
            *v = rng.random_range(0.0..1.0);
        }
        im
    }

    #[test]
    fn identical_images_error_with_zero_variance() {
        let images = vec![Array2::<f64>::from_elem((8, 8), 0.3); 4];
        assert!(matches!(
            pca2d_fit(&images, 0.95),
            Err(Error::ZeroVariance(_))
        ));
    }

    #[test]
    fn covariance_matches_naive_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let images: Vec<Array2<f64>> = (0..5).map(|_| random_image(8, &mut rng)).collect();
        let cov = covariance_2d(&images).unwrap();

        // Naive evaluation: mean image, then per-entry triple loop.
        let n = images.len() as f64;
        let mut mean = Array2::<f64>::zeros((8, 8));
        for im in &images {
            mean += im;
        }
        mean /= n;
        for a in 0..8 {
            for b in 0..8 {
                let mut acc = 0.0;
                for im in &images {
                    for r in 0..8 {
                        acc += (im[[r, a]] - mean[[r, a]]) * (im[[r, b]] - mean[[r, b]]);
                    }
                }
                assert_abs_diff_eq!(cov[[a, b]], acc / n, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn rank_one_images_give_one_component_proportional_to_coefficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let side = 8;
        let base = random_image(side, &mut rng);
        let u: Vec<f64> = (0..side).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..side).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut cs: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let c_mean: f64 = cs.iter().sum::<f64>() / cs.len() as f64;
        for c in &mut cs {
            *c -= c_mean; // zero-mean so `base` is exactly the average image
        }
        let images: Vec<Array2<f64>> = cs
            .iter()
            .map(|&c| {
                let mut im = base.clone();
                for r in 0..side {
                    for col in 0..side {
                        im[[r, col]] += c * u[r] * v[col];
                    }
                }
                im
            })
            .collect();
        let model = pca2d_fit(&images, 0.95).unwrap();
        assert_eq!(model.n_components(), 1);

        let features: Vec<Array1<f64>> = images
            .iter()
            .map(|im| pca2d_transform(&model, im).unwrap())
            .collect();
        // feature_i = c_i * kappa * u, so ratios of projections match ratios
        // of coefficients.
        let norm0: f64 = features[0].dot(&features[0]);
        for (i, f) in features.iter().enumerate() {
            let ratio = f.dot(&features[0]) / norm0;
            assert_abs_diff_eq!(ratio, cs[i] / cs[0], epsilon = 1e-6);
        }
    }

    #[test]
    fn transform_rejects_shape_mismatch() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let images: Vec<Array2<f64>> = (0..4).map(|_| random_image(8, &mut rng)).collect();
        let model = pca2d_fit(&images, 0.95).unwrap();
        let bad = random_image(9, &mut rng);
        assert!(pca2d_transform(&model, &bad).is_err());
    }
}
