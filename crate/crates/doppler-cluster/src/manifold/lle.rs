//! Locally linear embedding: per-point sum-to-one reconstruction weights
//! from the p nearest neighbors, then the bottom non-trivial eigenvectors of
//! (I - W)^T (I - W) as the low-dimensional coordinates.

use ndarray::{Array1, Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

use super::{Embedding, ManifoldMethod};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LleConfig {
    #[serde(default = "default_neighbors")]
    pub n_neighbors: usize,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_reg")]
    pub reg: f64,
}

fn default_neighbors() -> usize {
    10
}
fn default_dim() -> usize {
    2
}
fn default_reg() -> f64 {
    1e-3
}

impl Default for LleConfig {
    fn default() -> Self {
        Self { n_neighbors: default_neighbors(), dim: default_dim(), reg: default_reg() }
    }
}

fn sq_dist_rows(z: &ArrayView2<f64>, a: usize, b: usize) -> f64 {
    z.row(a)
        .iter()
        .zip(z.row(b).iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}

/// Per-point neighbor indices and sum-to-one reconstruction weights solving
/// the constrained least squares over each neighborhood. Near-singular Gram
/// matrices (and any neighborhood with more neighbors than input dimensions)
/// get `reg * trace(G) / p` added to the diagonal before solving.
pub fn lle_weights(
    z: &ArrayView2<f64>,
    n_neighbors: usize,
    reg: f64,
) -> Result<(Vec<Vec<usize>>, Vec<Vec<f64>>)> {
    let n = z.nrows();
    let m = z.ncols();
    let p = n_neighbors;
    if p == 0 || p >= n {
        return Err(Error::InvalidArgument(format!(
            "n_neighbors must satisfy 1 <= p < n (p = {p}, n = {n})"
        )));
    }
    if !(reg.is_finite() && reg >= 0.0) {
        return Err(Error::InvalidArgument("reg must be finite and >= 0".into()));
    }

    let mut all_neighbors = Vec::with_capacity(n);
    let mut all_weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        order.sort_by(|&a, &b| {
            sq_dist_rows(z, i, a)
                .partial_cmp(&sq_dist_rows(z, i, b))
                .expect("finite distances")
                .then(a.cmp(&b))
        });
        let neighbors: Vec<usize> = order.into_iter().take(p).collect();

        // Local Gram matrix of the neighbor offsets.
        let mut gram = Array2::<f64>::zeros((p, p));
        for (a, &ja) in neighbors.iter().enumerate() {
            for (b, &jb) in neighbors.iter().enumerate() {
                let mut dot = 0.0;
                for c in 0..m {
                    dot += (z[[i, c]] - z[[ja, c]]) * (z[[i, c]] - z[[jb, c]]);
                }
                gram[[a, b]] = dot;
            }
        }
        let ones = Array1::<f64>::ones(p);
        let trace: f64 = (0..p).map(|a| gram[[a, a]]).sum();
        let solve_regularized = |gram: &Array2<f64>| -> Result<Array1<f64>> {
            let mut g = gram.clone();
            let bump = if trace > 0.0 { reg * trace / p as f64 } else { reg.max(1e-12) };
            for a in 0..p {
                g[[a, a]] += bump;
            }
            linalg::solve(&g, &ones)
        };
        let raw = if p > m {
            solve_regularized(&gram)?
        } else {
            match linalg::solve(&gram, &ones) {
                Ok(w) if w.iter().all(|v| v.is_finite()) => w,
                _ => solve_regularized(&gram)?,
            }
        };
        let sum: f64 = raw.iter().sum();
        if sum == 0.0 || !sum.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "degenerate neighborhood at sample {i}: weights do not normalize"
            )));
        }
        all_weights.push(raw.iter().map(|v| v / sum).collect());
        all_neighbors.push(neighbors);
    }
    Ok((all_neighbors, all_weights))
}

/// Reconstruction residual of the weights: sum_i |x_i - sum_j W_ij x_j|^2.
pub fn reconstruction_error(
    z: &ArrayView2<f64>,
    neighbors: &[Vec<usize>],
    weights: &[Vec<f64>],
) -> f64 {
    let n = z.nrows();
    let m = z.ncols();
    let mut total = 0.0;
    for i in 0..n {
        for c in 0..m {
            let mut recon = 0.0;
            for (&j, &w) in neighbors[i].iter().zip(weights[i].iter()) {
                recon += w * z[[j, c]];
            }
            let diff = z[[i, c]] - recon;
            total += diff * diff;
        }
    }
    total
}

/// Embeds `z` into `cfg.dim` dimensions: the bottom `dim` eigenvectors of
/// (I - W)^T (I - W) after excluding the constant one, scaled by sqrt(n) so
/// the output columns have unit covariance.
pub fn lle(z: &ArrayView2<f64>, cfg: &LleConfig) -> Result<Embedding> {
    let n = z.nrows();
    if cfg.dim == 0 {
        return Err(Error::InvalidArgument("embedding dimension must be >= 1".into()));
    }
    if cfg.n_neighbors < cfg.dim {
        return Err(Error::InvalidArgument(format!(
            "n_neighbors ({}) must be >= embedding dim ({})",
            cfg.n_neighbors, cfg.dim
        )));
    }
    if n < cfg.dim + 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least dim + 2 = {} samples, got {n}",
            cfg.dim + 2
        )));
    }
    let (neighbors, weights) = lle_weights(z, cfg.n_neighbors, cfg.reg)?;

    // M = (I - W)^T (I - W) with W in dense form.
    let mut w_dense = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for (&j, &w) in neighbors[i].iter().zip(weights[i].iter()) {
            w_dense[[i, j]] = w;
        }
    }
    let mut i_minus_w = -w_dense;
    for i in 0..n {
        i_minus_w[[i, i]] += 1.0;
    }
    let m_matrix = i_minus_w.t().dot(&i_minus_w);

    let (_, vectors) = linalg::eigh(&m_matrix)?;
    // eigh sorts descending; the last column is the near-zero constant mode.
    let mut coords = Array2::<f64>::zeros((n, cfg.dim));
    let scale = (n as f64).sqrt();
    for d in 0..cfg.dim {
        let src = n - 2 - d;
        for i in 0..n {
            coords[[i, d]] = vectors[[i, src]] * scale;
        }
    }

    // Final embedded cost: sum_i |y_i - sum_j W_ij y_j|^2.
    let final_loss = reconstruction_error(&coords.view(), &neighbors, &weights);
    Ok(Embedding {
        coords,
        method: ManifoldMethod::Lle,
        final_loss,
        iterations: 0,
        seed: 0,
        loss_trace: vec![final_loss],
    })
}
