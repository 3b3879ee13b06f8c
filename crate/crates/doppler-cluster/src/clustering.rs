//! Distance-based partitioning: K-Means and K-Medoids.
//!
//! Both methods use squared Euclidean distance throughout, k-means++ style
//! seeding driven by an explicit seed, and deterministic tie-breaks (nearest
//! center wins; ties go to the lowest cluster index). Empty clusters are
//! repaired by promoting the point farthest from its assigned center to a
//! singleton center, which keeps K constant without losing monotonicity of
//! the objective.

use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClusterMethod {
    #[serde(rename = "kmeans")]
    KMeans,
    #[serde(rename = "kmedoids")]
    KMedoids,
}

impl std::fmt::Display for ClusterMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClusterMethod::KMeans => write!(f, "kmeans"),
            ClusterMethod::KMedoids => write!(f, "kmedoids"),
        }
    }
}

impl std::str::FromStr for ClusterMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kmeans" => Ok(ClusterMethod::KMeans),
            "kmedoids" => Ok(ClusterMethod::KMedoids),
            other => Err(Error::Config(format!(
                "unknown clusterer {other:?}; valid clusterers: kmeans, kmedoids"
            ))),
        }
    }
}

/// A fitted partitioning model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterModel {
    pub method: ClusterMethod,
    /// K x m centers: centroids for K-Means, medoid rows for K-Medoids.
    pub centers: Array2<f64>,
    /// Training-row index of each center (K-Medoids only).
    pub medoid_indices: Option<Vec<usize>>,
    /// Sum of squared distances of every training point to its assigned
    /// center, recomputed from the final centers.
    pub objective: f64,
    pub iterations: usize,
    pub seed: u64,
    /// Objective value after each iteration (not serialized).
    #[serde(skip)]
    pub objective_trace: Vec<f64>,
}

impl ClusterModel {
    pub fn k(&self) -> usize {
        self.centers.nrows()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

pub(crate) fn sq_dist(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}

fn validate_input(z: &ArrayView2<f64>, k: usize) -> Result<()> {
    let n = z.nrows();
    if n == 0 || z.ncols() == 0 {
        return Err(Error::InvalidArgument("empty input matrix".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    if k > n {
        return Err(Error::KTooLarge { k, n });
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite input value".into()));
    }
    Ok(())
}

/// Nearest-center labels; ties go to the lowest cluster index.
fn nearest_labels(z: &ArrayView2<f64>, centers: &Array2<f64>) -> Vec<usize> {
    (0..z.nrows())
        .map(|i| {
            let row = z.row(i);
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (j, c) in centers.rows().into_iter().enumerate() {
                let d = sq_dist(row, c);
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            best
        })
        .collect()
}

fn objective_value(z: &ArrayView2<f64>, labels: &[usize], centers: &Array2<f64>) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| sq_dist(z.row(i), centers.row(l)))
        .sum()
}

/// Re-seeds empty clusters with the point currently farthest from its
/// assigned center (ties to the lowest row index). `exclude` marks rows that
/// must not be chosen (existing medoids).
fn fix_empty_clusters(
    z: &ArrayView2<f64>,
    centers: &mut Array2<f64>,
    labels: &mut [usize],
    exclude: Option<&[usize]>,
) {
    let k = centers.nrows();
    loop {
        let mut counts = vec![0usize; k];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let mut donor: Option<(usize, f64)> = None;
        for i in 0..z.nrows() {
            if counts[labels[i]] < 2 {
                continue;
            }
            if exclude.is_some_and(|ex| ex.contains(&i)) {
                continue;
            }
            let d = sq_dist(z.row(i), centers.row(labels[i]));
            if donor.is_none_or(|(_, best)| d > best) {
                donor = Some((i, d));
            }
        }
        let (idx, _) = donor.expect("k <= n guarantees a donatable point");
        for c in 0..z.ncols() {
            centers[[empty, c]] = z[[idx, c]];
        }
        labels[idx] = empty;
    }
}

/// k-means++ seeding with greedy local trials: the first center is uniform,
/// each following one is the best of a few distance-squared weighted
/// candidates (the one minimizing the resulting potential). Falls back to the
/// lowest-index unchosen row when all weights vanish, so the returned indices
/// are always distinct.
fn kmeanspp_indices(z: &ArrayView2<f64>, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = z.nrows();
    let trials = 2 + (k as f64).ln().floor() as usize;
    let mut chosen = Vec::with_capacity(k);
    chosen.push(rng.random_range(0..n));
    let mut d2: Vec<f64> = (0..n)
        .map(|i| sq_dist(z.row(i), z.row(chosen[0])))
        .collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut best: Option<(usize, f64)> = None;
            for _ in 0..trials {
                let mut r = rng.random::<f64>() * total;
                let mut pick = None;
                for (i, &w) in d2.iter().enumerate() {
                    if w <= 0.0 {
                        continue;
                    }
                    r -= w;
                    if r <= 0.0 {
                        pick = Some(i);
                        break;
                    }
                }
                let cand = pick.unwrap_or_else(|| {
                    d2.iter()
                        .rposition(|&w| w > 0.0)
                        .expect("total > 0 implies a positive weight")
                });
                let potential: f64 = (0..n)
                    .map(|i| d2[i].min(sq_dist(z.row(i), z.row(cand))))
                    .sum();
                if best.is_none_or(|(_, bp)| potential < bp) {
                    best = Some((cand, potential));
                }
            }
            best.expect("at least one trial").0
        } else {
            (0..n)
                .find(|i| !chosen.contains(i))
                .expect("k <= n leaves an unchosen row")
        };
        chosen.push(next);
        for i in 0..n {
            d2[i] = d2[i].min(sq_dist(z.row(i), z.row(next)));
        }
    }
    chosen
}

/// Farthest-first seeding with value-based choices only: the first center is
/// the point farthest from the data mean, each next one maximizes the
/// distance to the chosen set. Independent of row order for distinct data.
fn farthest_first_indices(z: &ArrayView2<f64>, k: usize) -> Vec<usize> {
    let n = z.nrows();
    let m = z.ncols();
    let mut mean = vec![0.0f64; m];
    for i in 0..n {
        for c in 0..m {
            mean[c] += z[[i, c]];
        }
    }
    for v in &mut mean {
        *v /= n as f64;
    }
    let first = (0..n)
        .max_by(|&a, &b| {
            let da: f64 = (0..m).map(|c| (z[[a, c]] - mean[c]).powi(2)).sum();
            let db: f64 = (0..m).map(|c| (z[[b, c]] - mean[c]).powi(2)).sum();
            da.partial_cmp(&db)
                .expect("finite")
                .then(b.cmp(&a)) // tie: lowest index
        })
        .expect("non-empty");
    let mut chosen = vec![first];
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(z.row(i), z.row(first))).collect();
    while chosen.len() < k {
        let mut best = 0usize;
        let mut best_d = -1.0;
        for (i, &d) in d2.iter().enumerate() {
            if d > best_d && !chosen.contains(&i) {
                best_d = d;
                best = i;
            }
        }
        chosen.push(best);
        for i in 0..n {
            d2[i] = d2[i].min(sq_dist(z.row(i), z.row(best)));
        }
    }
    chosen
}

fn centers_from_indices(z: &ArrayView2<f64>, idx: &[usize]) -> Array2<f64> {
    let mut c = Array2::<f64>::zeros((idx.len(), z.ncols()));
    for (j, &i) in idx.iter().enumerate() {
        c.row_mut(j).assign(&z.row(i));
    }
    c
}

/// Lloyd iterations from explicit initial centers.
pub(crate) fn lloyd(
    z: &ArrayView2<f64>,
    mut centers: Array2<f64>,
    max_iter: usize,
    tol: f64,
    seed: u64,
) -> ClusterModel {
    let k = centers.nrows();
    let mut labels = nearest_labels(z, &centers);
    fix_empty_clusters(z, &mut centers, &mut labels, None);

    let mut trace = Vec::new();
    let mut iterations = 0usize;
    let mut prev_obj = f64::INFINITY;
    loop {
        // Update step: centers become the means of their clusters.
        let mut sums = Array2::<f64>::zeros((k, z.ncols()));
        let mut counts = vec![0usize; k];
        for (i, &l) in labels.iter().enumerate() {
            counts[l] += 1;
            for c in 0..z.ncols() {
                sums[[l, c]] += z[[i, c]];
            }
        }
        for j in 0..k {
            for c in 0..z.ncols() {
                centers[[j, c]] = sums[[j, c]] / counts[j] as f64;
            }
        }
        // Assignment step.
        let mut new_labels = nearest_labels(z, &centers);
        fix_empty_clusters(z, &mut centers, &mut new_labels, None);
        let obj = objective_value(z, &new_labels, &centers);
        trace.push(obj);
        iterations += 1;

        let stable = new_labels == labels;
        let converged = prev_obj.is_finite()
            && (prev_obj - obj).abs() <= tol * prev_obj.max(f64::MIN_POSITIVE);
        labels = new_labels;
        prev_obj = obj;
        if stable || converged || iterations >= max_iter {
            break;
        }
    }

    // Final objective from scratch against the final centers.
    let final_labels = nearest_labels(z, &centers);
    let objective = objective_value(z, &final_labels, &centers);
    trace.push(objective);
    ClusterModel {
        method: ClusterMethod::KMeans,
        centers,
        medoid_indices: None,
        objective,
        iterations,
        seed,
        objective_trace: trace,
    }
}

/// Fits K-Means with k-means++ seeding.
pub fn kmeans_fit(
    z: &ArrayView2<f64>,
    k: usize,
    seed: u64,
    max_iter: usize,
    tol: f64,
) -> Result<ClusterModel> {
    validate_input(z, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init = kmeanspp_indices(z, k, &mut rng);
    Ok(lloyd(z, centers_from_indices(z, &init), max_iter, tol, seed))
}

/// Fits K-Means with deterministic farthest-first seeding. The result is
/// independent of sample order when the rows are distinct, which makes it
/// suitable for scoring feature-extraction candidates.
pub fn kmeans_fit_deterministic(
    z: &ArrayView2<f64>,
    k: usize,
    max_iter: usize,
    tol: f64,
) -> Result<ClusterModel> {
    validate_input(z, k)?;
    let init = farthest_first_indices(z, k);
    Ok(lloyd(z, centers_from_indices(z, &init), max_iter, tol, 0))
}

/// Fits K-Medoids: alternates medoid selection (the in-cluster point
/// minimizing the summed squared distance to its cluster) and nearest-medoid
/// reassignment until the medoid set is stable.
pub fn kmedoids_fit(
    z: &ArrayView2<f64>,
    k: usize,
    seed: u64,
    max_iter: usize,
) -> Result<ClusterModel> {
    validate_input(z, k)?;
    let n = z.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut medoids = kmeanspp_indices(z, k, &mut rng);

    let mut trace = Vec::new();
    let mut iterations = 0usize;
    loop {
        // Assignment: nearest medoid, ties to the lowest cluster index, with
        // each medoid pinned to its own cluster so no cluster can empty out.
        let centers = centers_from_indices(z, &medoids);
        let mut labels = nearest_labels(z, &centers);
        for (j, &mi) in medoids.iter().enumerate() {
            labels[mi] = j;
        }
        // Medoid update per cluster; ties to the lower row index.
        let mut new_medoids = medoids.clone();
        for j in 0..k {
            let members: Vec<usize> =
                (0..n).filter(|&i| labels[i] == j).collect();
            let mut best = members[0];
            let mut best_cost = f64::INFINITY;
            for &cand in &members {
                let cost: f64 = members
                    .iter()
                    .map(|&p| sq_dist(z.row(cand), z.row(p)))
                    .sum();
                if cost < best_cost {
                    best_cost = cost;
                    best = cand;
                }
            }
            new_medoids[j] = best;
        }
        let obj: f64 = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| sq_dist(z.row(i), z.row(new_medoids[l])))
            .sum();
        trace.push(obj);
        iterations += 1;

        let stable = new_medoids == medoids;
        medoids = new_medoids;
        if stable || iterations >= max_iter {
            break;
        }
    }

    let centers = centers_from_indices(z, &medoids);
    let final_labels = nearest_labels(z, &centers);
    let objective = objective_value(z, &final_labels, &centers);
    trace.push(objective);
    Ok(ClusterModel {
        method: ClusterMethod::KMedoids,
        centers,
        medoid_indices: Some(medoids),
        objective,
        iterations,
        seed,
        objective_trace: trace,
    })
}

/// Labels each row of `z` with its nearest center (squared Euclidean);
/// ties go to the lowest cluster index.
pub fn assign(model: &ClusterModel, z: &ArrayView2<f64>) -> Result<Vec<usize>> {
    if z.nrows() == 0 {
        return Ok(Vec::new());
    }
    if z.ncols() != model.centers.ncols() {
        return Err(Error::DimensionMismatch {
            expected: model.centers.ncols(),
            got: z.ncols(),
        });
    }
    Ok(nearest_labels(z, &model.centers))
}

/// Clusterer settings shared by the evaluation harness and the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClustererConfig {
    pub method: ClusterMethod,
    pub k: usize,
    pub seed: u64,
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

impl ClustererConfig {
    pub fn new(method: ClusterMethod, k: usize, seed: u64) -> Self {
        Self {
            method,
            k,
            seed,
            max_iter: default_max_iter(),
            tol: default_tol(),
            restarts: default_restarts(),
        }
    }

    /// Fits `restarts` seeded runs and keeps the lowest objective
    /// (ties to the earliest restart).
    pub fn fit(&self, z: &ArrayView2<f64>) -> Result<ClusterModel> {
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be >= 1".into()));
        }
        let mut best: Option<ClusterModel> = None;
        for r in 0..self.restarts {
            let seed = seeds::split(self.seed, r as u64);
            let model = match self.method {
                ClusterMethod::KMeans => {
                    kmeans_fit(z, self.k, seed, self.max_iter, self.tol)?
                }
                ClusterMethod::KMedoids => {
                    kmedoids_fit(z, self.k, seed, self.max_iter)?
                }
            };
            if best
                .as_ref()
                .is_none_or(|b| model.objective < b.objective)
            {
                best = Some(model);
            }
        }
        Ok(best.expect("restarts >= 1"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn col(values: &[f64]) -> Array2<f64> {
        Array2::from_shape_vec((values.len(), 1), values.to_vec()).unwrap()
    }

    #[test]
    fn kmeans_two_far_pairs_reaches_global_optimum() {
        let z = col(&[0.0, 1.0, 10.0, 11.0]);
        let model = kmeans_fit(&z.view(), 2, 3, 300, 1e-6).unwrap();
        let mut centers: Vec<f64> = model.centers.iter().copied().collect();
        centers.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_abs_diff_eq!(centers[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(centers[1], 10.5, epsilon = 1e-12);
        assert_abs_diff_eq!(model.objective, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn kmeans_k_equals_n_gives_zero_objective() {
        let z = col(&[0.0, 1.0, 2.0, 5.0]);
        let model = kmeans_fit(&z.view(), 4, 0, 300, 1e-6).unwrap();
        assert_abs_diff_eq!(model.objective, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn kmeans_k1_center_is_mean() {
        let z = col(&[0.0, 2.0, 4.0]);
        let model = kmeans_fit(&z.view(), 1, 0, 300, 1e-6).unwrap();
        assert_abs_diff_eq!(model.centers[[0, 0]], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(model.objective, 8.0, epsilon = 1e-12);
    }

    #[test]
    fn kmeans_rejects_k_above_n() {
        let z = col(&[0.0, 1.0]);
        assert!(matches!(
            kmeans_fit(&z.view(), 3, 0, 300, 1e-6),
            Err(Error::KTooLarge { k: 3, n: 2 })
        ));
    }

    #[test]
    fn kmedoids_two_far_pairs_ties_to_lower_index() {
        let z = col(&[0.0, 1.0, 10.0, 11.0]);
        let model = kmedoids_fit(&z.view(), 2, 11, 300).unwrap();
        let mut medoids = model.medoid_indices.clone().unwrap();
        medoids.sort_unstable();
        assert_eq!(medoids, vec![0, 2]);
        assert_abs_diff_eq!(model.objective, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn kmedoids_k_equals_n() {
        let z = col(&[0.0, 3.0, 9.0]);
        let model = kmedoids_fit(&z.view(), 3, 0, 300).unwrap();
        assert_abs_diff_eq!(model.objective, 0.0, epsilon = 1e-15);
        let mut medoids = model.medoid_indices.unwrap();
        medoids.sort_unstable();
        assert_eq!(medoids, vec![0, 1, 2]);
    }

    #[test]
    fn kmedoids_all_duplicate_rows_terminates() {
        let z = col(&[0.5; 6]);
        let model = kmedoids_fit(&z.view(), 2, 4, 300).unwrap();
        assert_abs_diff_eq!(model.objective, 0.0, epsilon = 1e-15);
        let medoids = model.medoid_indices.unwrap();
        assert_ne!(medoids[0], medoids[1]);
    }

    #[test]
    fn kmedoids_centers_are_data_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut z = Array2::<f64>::zeros((12, 3));
        for v in z.iter_mut() {
            *v = rng.random_range(-2.0..2.0);
        }
        let model = kmedoids_fit(&z.view(), 3, 1, 300).unwrap();
        for (j, &mi) in model.medoid_indices.as_ref().unwrap().iter().enumerate() {
            for c in 0..3 {
                assert_eq!(model.centers[[j, c]], z[[mi, c]]);
            }
        }
    }

    #[test]
    fn assign_breaks_ties_to_lowest_cluster() {
        let model = ClusterModel {
            method: ClusterMethod::KMeans,
            centers: array![[0.0], [5.0], [2.0]],
            medoid_indices: None,
            objective: 0.0,
            iterations: 0,
            seed: 0,
            objective_trace: vec![],
        };
        // 1.0 is equidistant to centers 0 and 2.
        let z = array![[1.0]];
        assert_eq!(assign(&model, &z.view()).unwrap(), vec![0]);
    }

    #[test]
    fn assign_empty_query_gives_empty_labels() {
        let model = ClusterModel {
            method: ClusterMethod::KMeans,
            centers: array![[0.0], [5.0]],
            medoid_indices: None,
            objective: 0.0,
            iterations: 0,
            seed: 0,
            objective_trace: vec![],
        };
        let z = Array2::<f64>::zeros((0, 1));
        assert!(assign(&model, &z.view()).unwrap().is_empty());
    }

    #[test]
    fn assign_rejects_dimension_mismatch() {
        let model = ClusterModel {
            method: ClusterMethod::KMeans,
            centers: array![[0.0, 0.0]],
            medoid_indices: None,
            objective: 0.0,
            iterations: 0,
            seed: 0,
            objective_trace: vec![],
        };
        let z = array![[1.0]];
        assert!(assign(&model, &z.view()).is_err());
    }

    #[test]
    fn objective_traces_are_monotone_on_random_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..20 {
            let n = rng.random_range(5..30);
            let m = rng.random_range(1..4);
            let mut z = Array2::<f64>::zeros((n, m));
            for v in z.iter_mut() {
                *v = rng.random_range(-3.0..3.0);
            }
            let k = rng.random_range(1..=n.min(4));
            for model in [
                kmeans_fit(&z.view(), k, trial, 300, 1e-9).unwrap(),
                kmedoids_fit(&z.view(), k, trial, 300).unwrap(),
            ] {
                for w in model.objective_trace.windows(2) {
                    assert!(
                        w[1] <= w[0] + 1e-12,
                        "objective increased: {} -> {}",
                        w[0],
                        w[1]
                    );
                }
            }
        }
    }

    #[test]
    fn kmeans_centroids_equal_cluster_means_at_convergence() {
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let mut z = Array2::<f64>::zeros((40, 2));
        for v in z.iter_mut() {
            *v = rng.random_range(-5.0..5.0);
        }
        let model = kmeans_fit(&z.view(), 4, 7, 300, 1e-12).unwrap();
        let labels = assign(&model, &z.view()).unwrap();
        for j in 0..4 {
            let members: Vec<usize> = (0..40).filter(|&i| labels[i] == j).collect();
            if members.is_empty() {
                continue;
            }
            for c in 0..2 {
                let mean: f64 =
                    members.iter().map(|&i| z[[i, c]]).sum::<f64>() / members.len() as f64;
                assert_abs_diff_eq!(model.centers[[j, c]], mean, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn stored_objective_matches_recompute() {
        let mut rng = ChaCha8Rng::seed_from_u64(321);
        let mut z = Array2::<f64>::zeros((25, 3));
        for v in z.iter_mut() {
            *v = rng.random_range(0.0..1.0);
        }
        for model in [
            kmeans_fit(&z.view(), 3, 5, 300, 1e-6).unwrap(),
            kmedoids_fit(&z.view(), 3, 5, 300).unwrap(),
        ] {
            let labels = assign(&model, &z.view()).unwrap();
            let recompute: f64 = labels
                .iter()
                .enumerate()
                .map(|(i, &l)| sq_dist(z.row(i), model.centers.row(l)))
                .sum();
            assert_abs_diff_eq!(model.objective, recompute, epsilon = 1e-8);
        }
    }

    #[test]
    fn deterministic_fit_is_invariant_to_row_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 20;
        let mut z = Array2::<f64>::zeros((n, 2));
        for v in z.iter_mut() {
            *v = rng.random_range(-1.0..1.0);
        }
        let perm: Vec<usize> = {
            let mut p: Vec<usize> = (0..n).collect();
            // Fisher-Yates with the same rng.
            for i in (1..n).rev() {
                let j = rng.random_range(0..=i);
                p.swap(i, j);
            }
            p
        };
        let mut zp = Array2::<f64>::zeros((n, 2));
        for (dst, &src) in perm.iter().enumerate() {
            zp.row_mut(dst).assign(&z.row(src));
        }
        let m1 = kmeans_fit_deterministic(&z.view(), 3, 300, 1e-9).unwrap();
        let m2 = kmeans_fit_deterministic(&zp.view(), 3, 300, 1e-9).unwrap();
        let l1 = assign(&m1, &z.view()).unwrap();
        let l2 = assign(&m2, &zp.view()).unwrap();
        for (dst, &src) in perm.iter().enumerate() {
            assert_eq!(l2[dst], l1[src]);
        }
    }

    #[test]
    fn model_json_round_trip() {
        let z = col(&[0.0, 1.0, 10.0, 11.0]);
        let model = kmedoids_fit(&z.view(), 2, 11, 300).unwrap();
        let json = model.to_json().unwrap();
        let back = ClusterModel::from_json(&json).unwrap();
        assert_eq!(back.method, model.method);
        assert_eq!(back.medoid_indices, model.medoid_indices);
        assert_eq!(back.centers, model.centers);
        assert_eq!(back.objective, model.objective);
        assert_eq!(back.seed, model.seed);
    }
}
