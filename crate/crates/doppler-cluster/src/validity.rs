//! Cluster-count estimation and clustering-quality indices: distortion
//! (Elbow curve), Silhouette, Davies-Bouldin, and Dunn's index, plus the
//! K-sweep that scores a candidate range and votes on the best K.
//!
//! Distance conventions: Silhouette uses plain Euclidean distances; the
//! centroid-based spread and separation used by Davies-Bouldin and Dunn use
//! squared Euclidean. Cluster spread is the *sum* of squared member-to-center
//! distances by default; [`SpreadMode::Mean`] switches to the per-member
//! average.

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{self, sq_dist, ClusterModel};
use crate::error::{Error, Result};
use crate::seeds;

/// How the within-cluster spread Δ is aggregated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpreadMode {
    /// Sum of squared member-to-center distances.
    Sum,
    /// Mean of squared member-to-center distances.
    Mean,
}

fn validate_labels(z: &ArrayView2<f64>, labels: &[usize], k: usize) -> Result<()> {
    if labels.len() != z.nrows() {
        return Err(Error::DimensionMismatch {
            expected: z.nrows(),
            got: labels.len(),
        });
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
        return Err(Error::InvalidArgument(format!(
            "label {bad} out of range for {k} clusters"
        )));
    }
    Ok(())
}

fn cluster_members(labels: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut members = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        members[l].push(i);
    }
    members
}

/// Mean squared distance of each point to its nearest center.
pub fn distortion(
    z: &ArrayView2<f64>,
    labels: &[usize],
    centers: &ArrayView2<f64>,
) -> Result<f64> {
    validate_labels(z, labels, centers.nrows())?;
    if z.ncols() != centers.ncols() {
        return Err(Error::DimensionMismatch {
            expected: z.ncols(),
            got: centers.ncols(),
        });
    }
    let n = z.nrows();
    let total: f64 = (0..n)
        .map(|i| {
            centers
                .rows()
                .into_iter()
                .map(|c| sq_dist(z.row(i), c))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Ok(total / n as f64)
}

/// Mean silhouette coefficient over all samples; plain Euclidean distances.
/// Samples in singleton clusters contribute 0.
pub fn silhouette(z: &ArrayView2<f64>, labels: &[usize]) -> Result<f64> {
    let n = z.nrows();
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: labels.len(),
        });
    }
    let k = labels.iter().copied().max().map_or(0, |m| m + 1);
    validate_labels(z, labels, k)?;
    let members = cluster_members(labels, k);
    let occupied = members.iter().filter(|m| !m.is_empty()).count();
    if occupied < 2 {
        return Err(Error::SingleCluster(occupied));
    }

    let dist = |a: usize, b: usize| sq_dist(z.row(a), z.row(b)).sqrt();
    let mut acc = 0.0;
    for i in 0..n {
        let own = &members[labels[i]];
        if own.len() == 1 {
            continue; // contributes 0
        }
        let a: f64 = own
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| dist(i, j))
            .sum::<f64>()
            / (own.len() - 1) as f64;
        let b = members
            .iter()
            .enumerate()
            .filter(|(c, m)| *c != labels[i] && !m.is_empty())
            .map(|(_, m)| m.iter().map(|&j| dist(i, j)).sum::<f64>() / m.len() as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            acc += (b - a) / denom;
        }
    }
    Ok(acc / n as f64)
}

fn spreads(
    z: &ArrayView2<f64>,
    members: &[Vec<usize>],
    centers: &ArrayView2<f64>,
    mode: SpreadMode,
) -> Vec<f64> {
    members
        .iter()
        .enumerate()
        .map(|(j, m)| {
            let sum: f64 = m.iter().map(|&i| sq_dist(z.row(i), centers.row(j))).sum();
            match mode {
                SpreadMode::Sum => sum,
                SpreadMode::Mean => {
                    if m.is_empty() {
                        0.0
                    } else {
                        sum / m.len() as f64
                    }
                }
            }
        })
        .collect()
}

/// Davies-Bouldin index: average over clusters of the worst-case ratio of
/// combined spreads to squared centroid separation. Lower is better.
pub fn davies_bouldin(
    z: &ArrayView2<f64>,
    labels: &[usize],
    centers: &ArrayView2<f64>,
) -> Result<f64> {
    davies_bouldin_with_spread(z, labels, centers, SpreadMode::Sum)
}

pub fn davies_bouldin_with_spread(
    z: &ArrayView2<f64>,
    labels: &[usize],
    centers: &ArrayView2<f64>,
    mode: SpreadMode,
) -> Result<f64> {
    let k = centers.nrows();
    if k < 2 {
        return Err(Error::SingleCluster(k));
    }
    validate_labels(z, labels, k)?;
    let members = cluster_members(labels, k);
    let delta = spreads(z, &members, centers, mode);
    let mut acc = 0.0;
    for i in 0..k {
        let mut worst = f64::NEG_INFINITY;
        for j in 0..k {
            if i == j {
                continue;
            }
            let lambda = sq_dist(centers.row(i), centers.row(j));
            if lambda == 0.0 {
                return Err(Error::CoincidentCentroids { a: i.min(j), b: i.max(j) });
            }
            worst = worst.max((delta[i] + delta[j]) / lambda);
        }
        acc += worst;
    }
    Ok(acc / k as f64)
}

/// Dunn's index: minimum squared centroid separation divided by the maximum
/// within-cluster spread. Higher is better.
pub fn dunn(
    z: &ArrayView2<f64>,
    labels: &[usize],
    centers: &ArrayView2<f64>,
) -> Result<f64> {
    dunn_with_spread(z, labels, centers, SpreadMode::Sum)
}

pub fn dunn_with_spread(
    z: &ArrayView2<f64>,
    labels: &[usize],
    centers: &ArrayView2<f64>,
    mode: SpreadMode,
) -> Result<f64> {
    let k = centers.nrows();
    if k < 2 {
        return Err(Error::SingleCluster(k));
    }
    validate_labels(z, labels, k)?;
    let members = cluster_members(labels, k);
    let delta = spreads(z, &members, centers, mode);
    let max_delta = delta.iter().fold(0.0f64, |m, &d| m.max(d));
    if max_delta == 0.0 {
        return Err(Error::ZeroSpread);
    }
    let mut min_lambda = f64::INFINITY;
    for i in 0..k {
        for j in i + 1..k {
            min_lambda = min_lambda.min(sq_dist(centers.row(i), centers.row(j)));
        }
    }
    Ok(min_lambda / max_delta)
}

/// K-sweep settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_ks")]
    pub candidate_ks: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_sweep_restarts")]
    pub restarts: usize,
    #[serde(default = "default_sweep_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_sweep_tol")]
    pub tol: f64,
}

fn default_ks() -> Vec<usize> {
    (2..=10).collect()
}
fn default_sweep_restarts() -> usize {
    8
}
fn default_sweep_max_iter() -> usize {
    300
}
fn default_sweep_tol() -> f64 {
    1e-9
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            candidate_ks: default_ks(),
            seed: 0,
            restarts: default_sweep_restarts(),
            max_iter: default_sweep_max_iter(),
            tol: default_sweep_tol(),
        }
    }
}

/// Per-K metric table plus the voted cluster-count recommendation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KSweepReport {
    pub candidate_ks: Vec<usize>,
    pub distortion: Vec<f64>,
    pub silhouette: Vec<f64>,
    pub davies_bouldin: Vec<f64>,
    /// 1 / Davies-Bouldin, so that "highest is best" holds for every stored
    /// vote metric.
    pub inv_davies_bouldin: Vec<f64>,
    pub dunn: Vec<f64>,
    /// (metric name, K it voted for). Distortion is reported as a curve for
    /// visual Elbow inspection but does not vote.
    pub votes: Vec<(String, usize)>,
    pub recommended_k: usize,
}

impl KSweepReport {
    /// One row per candidate K.
    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([
            "k",
            "distortion",
            "silhouette",
            "davies_bouldin",
            "inv_davies_bouldin",
            "dunn",
        ])?;
        for (i, &k) in self.candidate_ks.iter().enumerate() {
            w.write_record([
                k.to_string(),
                format!("{}", self.distortion[i]),
                format!("{}", self.silhouette[i]),
                format!("{}", self.davies_bouldin[i]),
                format!("{}", self.inv_davies_bouldin[i]),
                format!("{}", self.dunn[i]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Fits K-Means for every candidate K (best of `restarts` seeded starts plus
/// a warm start grown from the previous K's best centers, which makes the
/// distortion curve non-increasing in K), records all four metrics, and
/// votes on a recommended K with Silhouette, inverse Davies-Bouldin, and
/// Dunn argmaxes. Vote ties go to the smaller K.
pub fn sweep_k(z: &ArrayView2<f64>, cfg: &SweepConfig) -> Result<KSweepReport> {
    if cfg.candidate_ks.is_empty() {
        return Err(Error::InvalidArgument("empty candidate K list".into()));
    }
    let n = z.nrows();
    let mut ks = cfg.candidate_ks.clone();
    ks.sort_unstable();
    ks.dedup();
    if ks[0] < 2 {
        return Err(Error::InvalidArgument(
            "candidate K values must be >= 2".into(),
        ));
    }
    if *ks.last().expect("non-empty") > n {
        return Err(Error::KTooLarge {
            k: *ks.last().expect("non-empty"),
            n,
        });
    }

    // Ascending pass with warm starts; per-K restarts run in parallel.
    let mut by_k: std::collections::BTreeMap<usize, (ClusterModel, Metrics)> =
        std::collections::BTreeMap::new();
    let mut prev_best: Option<ClusterModel> = None;
    for &k in &ks {
        let k_seed = seeds::split(cfg.seed, k as u64);
        let mut candidates: Vec<ClusterModel> = (0..cfg.restarts)
            .into_par_iter()
            .map(|r| {
                clustering::kmeans_fit(
                    z,
                    k,
                    seeds::split(k_seed, r as u64),
                    cfg.max_iter,
                    cfg.tol,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(prev) = &prev_best {
            candidates.push(warm_start(z, prev, k, cfg)?);
        }
        let best = candidates
            .into_iter()
            .min_by(|a, b| {
                a.objective
                    .partial_cmp(&b.objective)
                    .expect("finite objectives")
            })
            .expect("at least one restart");
        let metrics = compute_metrics(z, &best)?;
        prev_best = Some(best.clone());
        by_k.insert(k, (best, metrics));
    }

    // Report rows follow the caller's candidate order.
    let order = cfg.candidate_ks.clone();
    let mut distortion_v = Vec::new();
    let mut silhouette_v = Vec::new();
    let mut db_v = Vec::new();
    let mut inv_db_v = Vec::new();
    let mut dunn_v = Vec::new();
    for &k in &order {
        let (_, m) = &by_k[&k];
        distortion_v.push(m.distortion);
        silhouette_v.push(m.silhouette);
        db_v.push(m.davies_bouldin);
        inv_db_v.push(1.0 / m.davies_bouldin);
        dunn_v.push(m.dunn);
    }

    // Argmax over ascending K with strict improvement = ties to smaller K.
    let argmax = |values: &[f64]| -> usize {
        let mut best_k = ks[0];
        let mut best = f64::NEG_INFINITY;
        for &k in &ks {
            let idx = order.iter().position(|&o| o == k).expect("k from order");
            let v = values[idx];
            if v > best {
                best = v;
                best_k = k;
            }
        }
        best_k
    };
    let votes = vec![
        ("silhouette".to_string(), argmax(&silhouette_v)),
        ("inv_davies_bouldin".to_string(), argmax(&inv_db_v)),
        ("dunn".to_string(), argmax(&dunn_v)),
    ];
    let mut counts: std::collections::BTreeMap<usize, usize> = std::collections::BTreeMap::new();
    for (_, k) in &votes {
        *counts.entry(*k).or_insert(0) += 1;
    }
    let recommended_k = counts
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))) // most votes, then smaller K
        .map(|(&k, _)| k)
        .expect("votes non-empty");

    Ok(KSweepReport {
        candidate_ks: order,
        distortion: distortion_v,
        silhouette: silhouette_v,
        davies_bouldin: db_v,
        inv_davies_bouldin: inv_db_v,
        dunn: dunn_v,
        votes,
        recommended_k,
    })
}

struct Metrics {
    distortion: f64,
    silhouette: f64,
    davies_bouldin: f64,
    dunn: f64,
}

fn compute_metrics(z: &ArrayView2<f64>, model: &ClusterModel) -> Result<Metrics> {
    let labels = clustering::assign(model, z)?;
    Ok(Metrics {
        distortion: distortion(z, &labels, &model.centers.view())?,
        silhouette: silhouette(z, &labels)?,
        davies_bouldin: davies_bouldin(z, &labels, &model.centers.view())?,
        dunn: dunn(z, &labels, &model.centers.view())?,
    })
}

/// Grows the previous best solution to `k` centers by repeatedly appending
/// the point farthest from its nearest center, then runs Lloyd. Adding
/// centers can only lower the objective, so this candidate guarantees the
/// distortion curve never rises between consecutive candidate Ks.
fn warm_start(
    z: &ArrayView2<f64>,
    prev: &ClusterModel,
    k: usize,
    cfg: &SweepConfig,
) -> Result<ClusterModel> {
    let mut centers = Array2::<f64>::zeros((k, z.ncols()));
    for j in 0..prev.centers.nrows().min(k) {
        centers.row_mut(j).assign(&prev.centers.row(j));
    }
    for j in prev.centers.nrows()..k {
        let mut far_idx = 0usize;
        let mut far_d = -1.0f64;
        for i in 0..z.nrows() {
            let d = (0..j)
                .map(|c| sq_dist(z.row(i), centers.row(c)))
                .fold(f64::INFINITY, f64::min);
            if d > far_d {
                far_d = d;
                far_idx = i;
            }
        }
        centers.row_mut(j).assign(&z.row(far_idx));
    }
    Ok(clustering::lloyd(z, centers, cfg.max_iter, cfg.tol, prev.seed))
}
