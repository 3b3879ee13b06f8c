//! t-SNE: Gaussian input affinities with per-point bandwidths binary-searched
//! to a target perplexity, Student-t output affinities, gradient descent on
//! the KL divergence with momentum and an early-exaggeration phase.

use ndarray::{Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Embedding, ManifoldMethod};

const P_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TsneConfig {
    #[serde(default = "default_perplexity")]
    pub perplexity: f64,
    #[serde(default = "default_iters")]
    pub iters: usize,
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "default_exaggeration")]
    pub early_exaggeration: f64,
    #[serde(default = "default_exaggeration_iters")]
    pub exaggeration_iters: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_perplexity() -> f64 {
    15.0
}
fn default_iters() -> usize {
    1000
}
fn default_learning_rate() -> f64 {
    100.0
}
fn default_exaggeration() -> f64 {
    4.0
}
fn default_exaggeration_iters() -> usize {
    100
}

impl Default for TsneConfig {
    fn default() -> Self {
        Self {
            perplexity: default_perplexity(),
            iters: default_iters(),
            learning_rate: default_learning_rate(),
            early_exaggeration: default_exaggeration(),
            exaggeration_iters: default_exaggeration_iters(),
            seed: 0,
        }
    }
}

fn pairwise_sq_dists(z: &ArrayView2<f64>) -> Array2<f64> {
    let n = z.nrows();
    let mut d2 = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in i + 1..n {
            let d = z
                .row(i)
                .iter()
                .zip(z.row(j).iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>();
            d2[[i, j]] = d;
            d2[[j, i]] = d;
        }
    }
    d2
}

/// Conditional Gaussian affinities with per-row bandwidth found by binary
/// search so that each row's entropy matches log2(perplexity) bits.
/// Returns the row-stochastic conditional matrix and the per-row entropies
/// achieved (bits).
pub(crate) fn conditional_affinities(
    d2: &Array2<f64>,
    perplexity: f64,
) -> (Array2<f64>, Vec<f64>) {
    let n = d2.nrows();
    let target = perplexity.log2();
    let mut p = Array2::<f64>::zeros((n, n));
    let mut entropies = vec![0.0; n];
    for i in 0..n {
        let mut beta = 1.0f64;
        let mut beta_min = f64::NEG_INFINITY;
        let mut beta_max = f64::INFINITY;
        // Shift distances for numerical stability of the exponentials.
        let d_min = (0..n)
            .filter(|&j| j != i)
            .map(|j| d2[[i, j]])
            .fold(f64::INFINITY, f64::min);
        let mut row = vec![0.0f64; n];
        let mut entropy_bits = 0.0;
        for _ in 0..100 {
            let mut sum = 0.0;
            for (j, r) in row.iter_mut().enumerate() {
                *r = if j == i {
                    0.0
                } else {
                    (-beta * (d2[[i, j]] - d_min)).exp()
                };
                sum += *r;
            }
            // Entropy in nats of the normalized row, then to bits.
            let mut h_nats = 0.0;
            for (j, r) in row.iter_mut().enumerate() {
                *r /= sum;
                if j != i && *r > 0.0 {
                    h_nats -= *r * r.ln();
                }
            }
            entropy_bits = h_nats / std::f64::consts::LN_2;
            let diff = entropy_bits - target;
            if diff.abs() < 1e-9 {
                break;
            }
            if diff > 0.0 {
                beta_min = beta;
                beta = if beta_max.is_finite() {
                    0.5 * (beta + beta_max)
                } else {
                    beta * 2.0
                };
            } else {
                beta_max = beta;
                beta = if beta_min.is_finite() {
                    0.5 * (beta + beta_min)
                } else {
                    beta * 0.5
                };
            }
        }
        for (j, &r) in row.iter().enumerate() {
            p[[i, j]] = r;
        }
        entropies[i] = entropy_bits;
    }
    (p, entropies)
}

/// Symmetrized joint affinities: (P + P^T) / 2n, floored at 1e-12.
pub(crate) fn joint_affinities(conditional: &Array2<f64>) -> Array2<f64> {
    let n = conditional.nrows();
    let mut p = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            if i != j {
                p[[i, j]] =
                    ((conditional[[i, j]] + conditional[[j, i]]) / (2.0 * n as f64)).max(P_FLOOR);
            }
        }
    }
    p
}

/// Embeds `z` into 2-D.
pub fn tsne(z: &ArrayView2<f64>, cfg: &TsneConfig) -> Result<Embedding> {
    let n = z.nrows();
    if n < 4 {
        return Err(Error::InvalidArgument("tsne requires at least 4 samples".into()));
    }
    if !(cfg.perplexity >= 2.0 && cfg.perplexity < n as f64) {
        return Err(Error::InvalidArgument(format!(
            "perplexity must satisfy 2 <= perplexity < n = {n}"
        )));
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite input value".into()));
    }

    let d2 = pairwise_sq_dists(z);
    // Every row identical: the uniform affinities make any isometric
    // configuration stationary, so return the coincident fixed point.
    if d2.iter().all(|&d| d == 0.0) {
        return Ok(Embedding {
            coords: Array2::zeros((n, 2)),
            method: ManifoldMethod::Tsne,
            final_loss: 0.0,
            iterations: 0,
            seed: cfg.seed,
            loss_trace: vec![0.0],
        });
    }

    let (conditional, _) = conditional_affinities(&d2, cfg.perplexity);
    let p = joint_affinities(&conditional);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut y = Array2::<f64>::zeros((n, 2));
    for v in y.iter_mut() {
        let g: f64 = StandardNormal.sample(&mut rng);
        *v = 1e-4 * g;
    }
    let mut velocity = Array2::<f64>::zeros((n, 2));
    let mut trace = Vec::with_capacity(cfg.iters);

    let mut w = Array2::<f64>::zeros((n, n));
    for t in 0..cfg.iters {
        // Student-t kernel and its normalizer.
        let mut w_sum = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let dx = y[[i, 0]] - y[[j, 0]];
                let dy = y[[i, 1]] - y[[j, 1]];
                let v = 1.0 / (1.0 + dx * dx + dy * dy);
                w[[i, j]] = v;
                w[[j, i]] = v;
                w_sum += 2.0 * v;
            }
        }
        let exaggeration = if t < cfg.exaggeration_iters {
            cfg.early_exaggeration
        } else {
            1.0
        };
        let momentum = if t < 250 { 0.5 } else { 0.8 };

        let mut kl = 0.0;
        for i in 0..n {
            let mut gx = 0.0;
            let mut gy = 0.0;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let q = (w[[i, j]] / w_sum).max(P_FLOOR);
                let coeff = 4.0 * (exaggeration * p[[i, j]] - q) * w[[i, j]];
                gx += coeff * (y[[i, 0]] - y[[j, 0]]);
                gy += coeff * (y[[i, 1]] - y[[j, 1]]);
                kl += p[[i, j]] * (p[[i, j]] / q).ln();
            }
            velocity[[i, 0]] = momentum * velocity[[i, 0]] - cfg.learning_rate * gx;
            velocity[[i, 1]] = momentum * velocity[[i, 1]] - cfg.learning_rate * gy;
        }
        y += &velocity;
        // Keep the embedding centered.
        for c in 0..2 {
            let mean = y.column(c).sum() / n as f64;
            for i in 0..n {
                y[[i, c]] -= mean;
            }
        }
        trace.push(kl);
    }

    let final_loss = kl_divergence(&p, &y);
    trace.push(final_loss);
    Ok(Embedding {
        coords: y,
        method: ManifoldMethod::Tsne,
        final_loss,
        iterations: cfg.iters,
        seed: cfg.seed,
        loss_trace: trace,
    })
}

fn kl_divergence(p: &Array2<f64>, y: &Array2<f64>) -> f64 {
    let n = y.nrows();
    let mut w = Array2::<f64>::zeros((n, n));
    let mut w_sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let dx = y[[i, 0]] - y[[j, 0]];
            let dy = y[[i, 1]] - y[[j, 1]];
            let v = 1.0 / (1.0 + dx * dx + dy * dy);
            w[[i, j]] = v;
            w[[j, i]] = v;
            w_sum += 2.0 * v;
        }
    }
    let mut kl = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let q = (w[[i, j]] / w_sum).max(P_FLOOR);
                kl += p[[i, j]] * (p[[i, j]] / q).ln();
            }
        }
    }
    kl
}

#[cfg(test)]
pub(crate) fn two_blob_data(per_blob: usize, separation: f64, seed: u64) -> Array2<f64> {
    use rand::RngExt;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = Array2::<f64>::zeros((2 * per_blob, 5));
    for i in 0..2 * per_blob {
        let offset = if i < per_blob { 0.0 } else { separation };
        for c in 0..5 {
            z[[i, c]] = offset + rng.random_range(-0.1..0.1);
        }
    }
    z
}
