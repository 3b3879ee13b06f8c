//! Metric MDS by SMACOF majorization: each Guttman transform is guaranteed
//! not to increase the stress, so the loss trace is monotone by construction.

use ndarray::{Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

use super::{Embedding, ManifoldMethod};

fn euclidean_distances(z: &ArrayView2<f64>) -> Array2<f64> {
    let n = z.nrows();
    let mut d = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in i + 1..n {
            let v = z
                .row(i)
                .iter()
                .zip(z.row(j).iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            d[[i, j]] = v;
            d[[j, i]] = v;
        }
    }
    d
}

fn stress(d: &Array2<f64>, y: &Array2<f64>) -> f64 {
    let n = y.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let dx = y[[i, 0]] - y[[j, 0]];
                let dy = y[[i, 1]] - y[[j, 1]];
                let rho = (dx * dx + dy * dy).sqrt();
                let diff = d[[i, j]] - rho;
                s += diff * diff;
            }
        }
    }
    s
}

/// Embeds `z` into 2-D by minimizing the raw stress
/// `sum_{i != j} (d_ij - |y_i - y_j|)^2` with SMACOF iterations from a
/// seeded random start.
pub fn mds(z: &ArrayView2<f64>, iters: usize, seed: u64) -> Result<Embedding> {
    let n = z.nrows();
    if n < 3 {
        return Err(Error::InvalidArgument("mds requires at least 3 samples".into()));
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite input value".into()));
    }
    let d = euclidean_distances(z);
    let d_max = d.iter().fold(0.0f64, |m, &v| m.max(v));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = Array2::<f64>::zeros((n, 2));
    let scale = if d_max > 0.0 { d_max } else { 1.0 };
    for v in y.iter_mut() {
        let g: f64 = StandardNormal.sample(&mut rng);
        *v = 0.1 * scale * g;
    }

    let mut trace = vec![stress(&d, &y)];
    let mut iterations = 0usize;
    for _ in 0..iters {
        // Guttman transform: y <- (1/n) B(y) y.
        let mut b = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let dx = y[[i, 0]] - y[[j, 0]];
                let dy = y[[i, 1]] - y[[j, 1]];
                let rho = (dx * dx + dy * dy).sqrt();
                if rho > 0.0 {
                    b[[i, j]] = -d[[i, j]] / rho;
                }
            }
        }
        for i in 0..n {
            let row_sum: f64 = (0..n).filter(|&j| j != i).map(|j| b[[i, j]]).sum();
            b[[i, i]] = -row_sum;
        }
        y = b.dot(&y) / n as f64;
        iterations += 1;
        let s = stress(&d, &y);
        let prev = *trace.last().expect("seeded with initial stress");
        trace.push(s);
        if s <= 1e-30 || (prev - s).abs() <= 1e-15 * prev.max(f64::MIN_POSITIVE) {
            break;
        }
    }

    let final_loss = *trace.last().expect("non-empty");
    Ok(Embedding {
        coords: y,
        method: ManifoldMethod::Mds,
        final_loss,
        iterations,
        seed,
        loss_trace: trace,
    })
}
