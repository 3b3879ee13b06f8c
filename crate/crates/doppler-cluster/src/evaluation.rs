//! Leave-one-subject-out evaluation with best-match label alignment.
//!
//! Clustering output is permutation-ambiguous, so accuracy is computed after
//! finding the cluster-to-class bijection that maximizes agreement on the
//! K x K contingency table (exhaustive search for K <= 8, Hungarian
//! assignment above). The mapping is always learned on training predictions
//! and reused for the held-out subject; ground-truth labels enter nothing but
//! this final alignment and counting step.

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{assign, ClustererConfig};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::features::{fit_extractor, ExtractorConfig, SelectionConfig};
use crate::seeds::{self, tags};

/// Guard on the matching problem size; configurable via
/// [`match_labels_with_limit`].
pub const DEFAULT_MAX_MATCH_K: usize = 20;
/// Largest K handled by exhaustive permutation search.
const EXHAUSTIVE_MATCH_K: usize = 8;

/// One cross-validation fold: indices into the dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub held_out_subject: u32,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// One fold per subject: test = that subject's samples, train = the rest.
/// Folds are ordered by ascending subject ID.
pub fn loocv_split(ds: &Dataset) -> Result<Vec<Fold>> {
    let subjects = ds.subject_ids();
    if subjects.len() < 2 {
        return Err(Error::InvalidArgument(
            "leave-one-subject-out needs at least 2 subjects".into(),
        ));
    }
    Ok(subjects
        .into_iter()
        .map(|subject| {
            let (test, train): (Vec<usize>, Vec<usize>) =
                (0..ds.len()).partition(|&i| ds.samples()[i].subject_id == subject);
            Fold { held_out_subject: subject, train, test }
        })
        .collect())
}

fn contingency(pred: &[usize], truth: &[usize], k: usize) -> Result<Array2<u64>> {
    if pred.len() != truth.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), got: pred.len() });
    }
    let mut table = Array2::<u64>::zeros((k, k));
    for (&p, &t) in pred.iter().zip(truth.iter()) {
        if p >= k || t >= k {
            return Err(Error::InvalidArgument(format!(
                "label out of range for k = {k}: pred {p}, truth {t}"
            )));
        }
        table[[t, p]] += 1;
    }
    Ok(table)
}

/// Exhaustive search over all K! cluster-to-class bijections in
/// lexicographic order, keeping the first maximum (= the lexicographically
/// smallest optimal permutation).
fn exhaustive_match(table: &Array2<u64>, k: usize) -> Vec<usize> {
    fn rec(
        table: &Array2<u64>,
        k: usize,
        cluster: usize,
        used: &mut Vec<bool>,
        current: &mut Vec<usize>,
        best: &mut Option<(u64, Vec<usize>)>,
        score: u64,
    ) {
        if cluster == k {
            if best.as_ref().is_none_or(|(b, _)| score > *b) {
                *best = Some((score, current.clone()));
            }
            return;
        }
        for class in 0..k {
            if used[class] {
                continue;
            }
            used[class] = true;
            current.push(class);
            rec(table, k, cluster + 1, used, current, best, score + table[[class, cluster]]);
            current.pop();
            used[class] = false;
        }
    }
    let mut best = None;
    rec(table, k, 0, &mut vec![false; k], &mut Vec::new(), &mut best, 0);
    best.expect("k >= 1").1
}

/// Minimum-cost assignment on a square matrix via shortest augmenting paths
/// with potentials (O(K^3)). Returns the column assigned to each row.
fn hungarian_min_cost(cost: &Array2<i64>) -> Vec<usize> {
    let n = cost.nrows();
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut matched = vec![0usize; n + 1]; // matched[j] = row owning column j (1-based)
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[[i0 - 1, j - 1]] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched[j0] = matched[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if matched[j] > 0 {
            assignment[matched[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Finds the cluster-to-class bijection maximizing the matched sample count.
/// `mapping[cluster] = class`.
pub fn match_labels(pred: &[usize], truth: &[usize], k: usize) -> Result<Vec<usize>> {
    match_labels_with_limit(pred, truth, k, DEFAULT_MAX_MATCH_K)
}

/// As [`match_labels`] with an explicit guard on K.
pub fn match_labels_with_limit(
    pred: &[usize],
    truth: &[usize],
    k: usize,
    max_k: usize,
) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    if k > max_k {
        return Err(Error::InvalidArgument(format!(
            "matching guard: k = {k} exceeds the configured limit {max_k}"
        )));
    }
    let table = contingency(pred, truth, k)?;
    if k <= EXHAUSTIVE_MATCH_K {
        return Ok(exhaustive_match(&table, k));
    }
    // Maximize matched count == minimize (max - benefit).
    let max_benefit = *table.iter().max().expect("non-empty table") as i64;
    let mut cost = Array2::<i64>::zeros((k, k));
    for cluster in 0..k {
        for class in 0..k {
            cost[[cluster, class]] = max_benefit - table[[class, cluster]] as i64;
        }
    }
    Ok(hungarian_min_cost(&cost))
}

/// Applies `mapping` to the predictions and counts: returns the accuracy and
/// the K x K confusion matrix (rows = true class, columns = mapped cluster).
pub fn accuracy_and_confusion(
    pred: &[usize],
    truth: &[usize],
    mapping: &[usize],
) -> Result<(f64, Array2<u64>)> {
    let k = mapping.len();
    let mut seen = vec![false; k];
    for &class in mapping {
        if class >= k || seen[class] {
            return Err(Error::InvalidArgument(
                "mapping is not a bijection onto 0..k".into(),
            ));
        }
        seen[class] = true;
    }
    if pred.is_empty() {
        return Err(Error::InvalidArgument("empty prediction set".into()));
    }
    let mapped: Vec<usize> = {
        let mut out = Vec::with_capacity(pred.len());
        for &p in pred {
            if p >= k {
                return Err(Error::InvalidArgument(format!(
                    "prediction {p} out of range for k = {k}"
                )));
            }
            out.push(mapping[p]);
        }
        out
    };
    let confusion = contingency(&mapped, truth, k)?;
    let correct: u64 = (0..k).map(|i| confusion[[i, i]]).sum();
    let total: u64 = confusion.iter().sum();
    Ok((correct as f64 / total as f64, confusion))
}

/// Per-fold outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldResult {
    pub held_out_subject: u32,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    /// Rows = true class, columns = predicted class after matching.
    pub confusion: Vec<Vec<u64>>,
    /// Cluster-to-class bijection learned on the training split.
    pub mapping: Vec<usize>,
    /// What the extractor fit chose on this fold (patch, strategy, ...).
    pub selected: serde_json::Value,
}

/// Full leave-one-subject-out result for one (extractor, clusterer) pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub extractor: ExtractorConfig,
    pub clusterer: ClustererConfig,
    pub seed: u64,
    pub folds: Vec<FoldResult>,
    pub mean_train_accuracy: f64,
    pub std_train_accuracy: f64,
    pub mean_test_accuracy: f64,
    pub std_test_accuracy: f64,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Runs the full leave-one-subject-out experiment. Per fold, the extractor is
/// fitted on the training subjects only, the clusterer is fitted on the
/// training features, the cluster-to-class mapping is learned on training
/// predictions, and the held-out subject is scored with that mapping.
/// Deterministic for a fixed seed; `clusterer.seed` is ignored in favor of
/// per-fold seeds derived from `seed`.
pub fn run_experiment(
    ds: &Dataset,
    extractor: &ExtractorConfig,
    clusterer: &ClustererConfig,
    seed: u64,
) -> Result<ExperimentReport> {
    let k = clusterer.k;
    let labels = ds.labels().ok_or_else(|| {
        Error::InvalidArgument("evaluation requires a fully labeled dataset".into())
    })?;
    let n_classes = ds.n_activities().expect("labels present");
    if n_classes != k {
        return Err(Error::InvalidArgument(format!(
            "clusterer k = {k} must equal the number of activity classes ({n_classes}) \
             for best-match evaluation"
        )));
    }
    let class_of: Vec<usize> = labels
        .iter()
        .map(|&l| {
            let c = (l - 1) as usize;
            if c >= k {
                return Err(Error::InvalidArgument(format!(
                    "label {l} outside 1..={k}; labels must be contiguous from 1"
                )));
            }
            Ok(c)
        })
        .collect::<Result<_>>()?;

    let folds = loocv_split(ds)?;
    let images = ds.images();
    let exp_seed = seeds::split(seed, tags::EXPERIMENT);

    let fold_results: Vec<FoldResult> = folds
        .par_iter()
        .enumerate()
        .map(|(fold_idx, fold)| {
            run_fold(
                fold,
                &images,
                &class_of,
                extractor,
                clusterer,
                seeds::split(exp_seed, fold_idx as u64),
                seed,
            )
            .map_err(|e| Error::Fold {
                subject: fold.held_out_subject,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let train: Vec<f64> = fold_results.iter().map(|f| f.train_accuracy).collect();
    let test: Vec<f64> = fold_results.iter().map(|f| f.test_accuracy).collect();
    let (mean_train, std_train) = mean_std(&train);
    let (mean_test, std_test) = mean_std(&test);
    Ok(ExperimentReport {
        extractor: extractor.clone(),
        clusterer: clusterer.clone(),
        seed,
        folds: fold_results,
        mean_train_accuracy: mean_train,
        std_train_accuracy: std_train,
        mean_test_accuracy: mean_test,
        std_test_accuracy: std_test,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_fold(
    fold: &Fold,
    images: &[ndarray::Array2<f64>],
    class_of: &[usize],
    extractor: &ExtractorConfig,
    clusterer: &ClustererConfig,
    fold_seed: u64,
    pipeline_seed: u64,
) -> Result<FoldResult> {
    let k = clusterer.k;
    let train_images: Vec<ndarray::Array2<f64>> =
        fold.train.iter().map(|&i| images[i].clone()).collect();
    let test_images: Vec<ndarray::Array2<f64>> =
        fold.test.iter().map(|&i| images[i].clone()).collect();

    let sel = SelectionConfig::new(k);
    let fitted = fit_extractor(extractor, &train_images, &sel)?;
    let train_features = fitted.transform(&train_images, pipeline_seed)?;
    let test_features = fitted.transform(&test_images, pipeline_seed)?;

    let mut clu = clusterer.clone();
    clu.seed = seeds::split(fold_seed, tags::CLUSTER);
    let model = clu.fit(&train_features.view())?;

    let train_pred = assign(&model, &train_features.view())?;
    let train_truth: Vec<usize> = fold.train.iter().map(|&i| class_of[i]).collect();
    let mapping = match_labels(&train_pred, &train_truth, k)?;
    let (train_accuracy, _) = accuracy_and_confusion(&train_pred, &train_truth, &mapping)?;

    let test_pred = assign(&model, &test_features.view())?;
    let test_truth: Vec<usize> = fold.test.iter().map(|&i| class_of[i]).collect();
    let (test_accuracy, confusion) = accuracy_and_confusion(&test_pred, &test_truth, &mapping)?;

    Ok(FoldResult {
        held_out_subject: fold.held_out_subject,
        train_accuracy,
        test_accuracy,
        confusion: confusion
            .rows()
            .into_iter()
            .map(|r| r.to_vec())
            .collect(),
        mapping,
        selected: fitted.detail(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::ClusterMethod;
    use crate::data::{generate_synthetic, SpectrogramSample, SynthConfig, SAMPLE_LEN};
    use crate::features::ExtractorKind;
    use approx::assert_abs_diff_eq;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn loocv_four_subjects_fifty_each() {
        let ds = generate_synthetic(&SynthConfig {
            n_subjects: 4,
            reps_per_activity: 10,
            n_activities: 5,
            noise_level: 0.02,
            seed: 1,
        })
        .unwrap();
        let folds = loocv_split(&ds).unwrap();
        assert_eq!(folds.len(), 4);
        for fold in &folds {
            assert_eq!(fold.train.len(), 150);
            assert_eq!(fold.test.len(), 50);
        }
        // Disjoint and covering.
        let mut all: Vec<usize> = folds.iter().flat_map(|f| f.test.clone()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..200).collect::<Vec<_>>());
    }

    #[test]
    fn loocv_two_subjects_and_unequal_counts() {
        let mut samples = Vec::new();
        for (subject, count) in [(1u32, 3usize), (2, 5)] {
            for _ in 0..count {
                samples.push(
                    SpectrogramSample::new(vec![0.5; SAMPLE_LEN], subject, Some(1)).unwrap(),
                );
            }
        }
        let ds = Dataset::new(samples).unwrap();
        let folds = loocv_split(&ds).unwrap();
        assert_eq!(folds.len(), 2);
        assert_eq!(folds[0].test.len(), 3);
        assert_eq!(folds[0].train.len(), 5);
        assert_eq!(folds[1].test.len(), 5);
    }

    #[test]
    fn loocv_rejects_single_subject() {
        let samples = vec![
            SpectrogramSample::new(vec![0.1; SAMPLE_LEN], 1, Some(1)).unwrap();
            4
        ];
        let ds = Dataset::new(samples).unwrap();
        assert!(loocv_split(&ds).is_err());
    }

    #[test]
    fn match_identity_and_permutation_recovery() {
        let truth: Vec<usize> = (0..40).map(|i| i % 4).collect();
        let mapping = match_labels(&truth, &truth, 4).unwrap();
        assert_eq!(mapping, vec![0, 1, 2, 3]);
        let (acc, _) = accuracy_and_confusion(&truth, &truth, &mapping).unwrap();
        assert_abs_diff_eq!(acc, 1.0);

        // pred = sigma(truth) recovers sigma^-1 and accuracy 1.
        let sigma = [2usize, 0, 3, 1];
        let pred: Vec<usize> = truth.iter().map(|&t| sigma[t]).collect();
        let mapping = match_labels(&pred, &truth, 4).unwrap();
        for (t, &s) in sigma.iter().enumerate() {
            assert_eq!(mapping[s], t);
        }
        let (acc, _) = accuracy_and_confusion(&pred, &truth, &mapping).unwrap();
        assert_abs_diff_eq!(acc, 1.0);
    }

    /// Independent oracle: walk every permutation (lexicographic) and track
    /// the best matched count.
    fn oracle_best_count(pred: &[usize], truth: &[usize], k: usize) -> u64 {
        fn rec(
            table: &Array2<u64>,
            k: usize,
            cluster: usize,
            used: &mut Vec<bool>,
            score: u64,
            best: &mut u64,
        ) {
            if cluster == k {
                *best = (*best).max(score);
                return;
            }
            for class in 0..k {
                if !used[class] {
                    used[class] = true;
                    rec(table, k, cluster + 1, used, score + table[[class, cluster]], best);
                    used[class] = false;
                }
            }
        }
        let table = contingency(pred, truth, k).unwrap();
        let mut best = 0;
        rec(&table, k, 0, &mut vec![false; k], 0, &mut best);
        best
    }

    #[test]
    fn match_labels_agrees_with_exhaustive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        for _ in 0..200 {
            let k = rng.random_range(2..=6);
            let n = rng.random_range(k..40);
            let pred: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
            let truth: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
            let mapping = match_labels(&pred, &truth, k).unwrap();
            let matched: u64 = pred
                .iter()
                .zip(&truth)
                .filter(|&(&p, &t)| mapping[p] == t)
                .count() as u64;
            assert_eq!(matched, oracle_best_count(&pred, &truth, k));
        }
    }

    #[test]
    fn hungarian_path_matches_exhaustive_count_at_k9() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..20 {
            let k = 9usize; // forces the Hungarian path (> 8)
            let n = 120;
            let pred: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
            let truth: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
            let mapping = match_labels(&pred, &truth, k).unwrap();
            let table = contingency(&pred, &truth, k).unwrap();
            let exhaustive = exhaustive_match(&table, k);
            let count = |m: &[usize]| -> u64 {
                (0..k).map(|cluster| table[[m[cluster], cluster]]).sum()
            };
            assert_eq!(count(&mapping), count(&exhaustive));
        }
    }

    #[test]
    fn match_labels_rejects_large_k() {
        let pred = vec![0usize; 30];
        let truth = vec![0usize; 30];
        assert!(match_labels(&pred, &truth, 21).is_err());
        assert!(match_labels_with_limit(&pred, &truth, 21, 25).is_ok());
    }

    #[test]
    fn accuracy_hand_case_with_off_diagonal() {
        // 3 classes, 9 samples; cluster 0 -> class 0 etc. with two mistakes.
        let truth = vec![0, 0, 0, 1, 1, 1, 2, 2, 2];
        let pred = vec![0, 0, 1, 1, 1, 1, 2, 2, 0];
        let mapping = vec![0, 1, 2];
        let (acc, confusion) = accuracy_and_confusion(&pred, &truth, &mapping).unwrap();
        assert_abs_diff_eq!(acc, 7.0 / 9.0, epsilon = 1e-12);
        assert_eq!(confusion[[0, 0]], 2);
        assert_eq!(confusion[[0, 1]], 1);
        assert_eq!(confusion[[1, 1]], 3);
        assert_eq!(confusion[[2, 2]], 2);
        assert_eq!(confusion[[2, 0]], 1);
    }

    #[test]
    fn all_points_one_cluster_balanced_truth() {
        let truth: Vec<usize> = (0..50).map(|i| i % 5).collect();
        let pred = vec![0usize; 50];
        let mapping = match_labels(&pred, &truth, 5).unwrap();
        let (acc, _) = accuracy_and_confusion(&pred, &truth, &mapping).unwrap();
        assert_abs_diff_eq!(acc, 0.2, epsilon = 1e-12);
    }

    #[test]
    fn accuracy_rejects_non_bijection() {
        let r = accuracy_and_confusion(&[0, 1], &[0, 1], &[0, 0]);
        assert!(r.is_err());
    }

    /// Dataset whose samples encode their class as a disjoint bright block:
    /// perfectly separable by construction.
    fn one_hot_dataset(subjects: u32, reps: u32, k: usize) -> Dataset {
        let mut samples = Vec::new();
        for subject in 1..=subjects {
            for class in 0..k {
                for _ in 0..reps {
                    let mut values = vec![0.0f64; SAMPLE_LEN];
                    for v in values[class * 400..(class + 1) * 400].iter_mut() {
                        *v = 1.0;
                    }
                    samples.push(
                        SpectrogramSample::new(values, subject, Some(class as u32 + 1)).unwrap(),
                    );
                }
            }
        }
        Dataset::new(samples).unwrap()
    }

    #[test]
    fn perfectly_separable_dataset_scores_exactly_one() {
        let ds = one_hot_dataset(3, 4, 3);
        let extractor = ExtractorConfig::new(ExtractorKind::RawDct);
        let clusterer = ClustererConfig::new(ClusterMethod::KMeans, 3, 0);
        let report = run_experiment(&ds, &extractor, &clusterer, 9).unwrap();
        assert_abs_diff_eq!(report.mean_train_accuracy, 1.0);
        assert_abs_diff_eq!(report.mean_test_accuracy, 1.0);
        assert_abs_diff_eq!(report.std_test_accuracy, 0.0);
    }

    #[test]
    fn run_experiment_is_deterministic() {
        let ds = generate_synthetic(&SynthConfig {
            n_subjects: 3,
            reps_per_activity: 4,
            n_activities: 3,
            noise_level: 0.05,
            seed: 5,
        })
        .unwrap();
        let extractor = ExtractorConfig::new(ExtractorKind::Entropy);
        let clusterer = ClustererConfig::new(ClusterMethod::KMedoids, 3, 0);
        let a = run_experiment(&ds, &extractor, &clusterer, 33).unwrap();
        let b = run_experiment(&ds, &extractor, &clusterer, 33).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn relabeling_classes_changes_nothing_but_reporting() {
        let ds = generate_synthetic(&SynthConfig {
            n_subjects: 3,
            reps_per_activity: 4,
            n_activities: 3,
            noise_level: 0.05,
            seed: 6,
        })
        .unwrap();
        // Permute the class labels: 1 -> 2 -> 3 -> 1.
        let relabeled = Dataset::new(
            ds.samples()
                .iter()
                .map(|s| {
                    let new_label = s.label.map(|l| l % 3 + 1);
                    SpectrogramSample::new(
                        s.values().to_vec(),
                        s.subject_id,
                        new_label,
                    )
                    .unwrap()
                })
                .collect(),
        )
        .unwrap();
        let extractor = ExtractorConfig::new(ExtractorKind::RawDct);
        let clusterer = ClustererConfig::new(ClusterMethod::KMeans, 3, 0);
        let a = run_experiment(&ds, &extractor, &clusterer, 7).unwrap();
        let b = run_experiment(&relabeled, &extractor, &clusterer, 7).unwrap();
        for (fa, fb) in a.folds.iter().zip(b.folds.iter()) {
            assert_abs_diff_eq!(fa.train_accuracy, fb.train_accuracy, epsilon = 1e-12);
            assert_abs_diff_eq!(fa.test_accuracy, fb.test_accuracy, epsilon = 1e-12);
        }
    }

    #[test]
    fn mean_std_recomputable_from_folds() {
        let ds = one_hot_dataset(3, 3, 2);
        let extractor = ExtractorConfig::new(ExtractorKind::Pca);
        let clusterer = ClustererConfig::new(ClusterMethod::KMeans, 2, 0);
        let report = run_experiment(&ds, &extractor, &clusterer, 1).unwrap();
        let test: Vec<f64> = report.folds.iter().map(|f| f.test_accuracy).collect();
        let (mean, std) = mean_std(&test);
        assert_abs_diff_eq!(report.mean_test_accuracy, mean, epsilon = 1e-12);
        assert_abs_diff_eq!(report.std_test_accuracy, std, epsilon = 1e-12);
        for fold in &report.folds {
            let total: u64 = fold.confusion.iter().flatten().sum();
            let diag: u64 = (0..2).map(|i| fold.confusion[i][i]).sum();
            assert_eq!(total as usize, 6);
            assert_abs_diff_eq!(
                fold.test_accuracy,
                diag as f64 / total as f64,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn run_experiment_rejects_k_mismatch() {
        let ds = one_hot_dataset(2, 2, 3);
        let extractor = ExtractorConfig::new(ExtractorKind::RawDct);
        let clusterer = ClustererConfig::new(ClusterMethod::KMeans, 4, 0);
        assert!(run_experiment(&ds, &extractor, &clusterer, 0).is_err());
    }
}
