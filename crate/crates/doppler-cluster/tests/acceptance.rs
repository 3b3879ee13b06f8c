//! Acceptance suite: one test per release criterion, each printing a
//! `criterion N: PASS` line and enforcing its runtime budget. Oracles in this
//! file are written from the defining formulas, independent of the library's
//! implementation paths.

use std::path::Path;
use std::time::{Duration, Instant};

use ndarray::{Array2, ArrayView2};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use doppler_cluster::clustering::{kmeans_fit, kmedoids_fit};
use doppler_cluster::data::{generate_synthetic, SynthConfig, IMAGE_SIDE};
use doppler_cluster::evaluation::{accuracy_and_confusion, match_labels, run_experiment};
use doppler_cluster::features::{
    dct2, select_best_dct_patch, ExtractorConfig, ExtractorKind, PatchSize, SelectionConfig,
};
use doppler_cluster::manifold::{lle_weights, mds, reconstruction_error, tsne, TsneConfig};
use doppler_cluster::validity::{davies_bouldin, dunn, silhouette, sweep_k, SweepConfig};

fn assert_budget(elapsed: Duration, budget: Duration, label: &str) {
    assert!(
        elapsed <= budget,
        "{label} exceeded its runtime budget: {elapsed:?} > {budget:?}"
    );
}

// --- criterion 1 -----------------------------------------------------------

/// Direct double-sum 2D DCT evaluation.
fn dct2_naive(f: &ArrayView2<f64>) -> Array2<f64> {
    let (u, v) = (f.nrows(), f.ncols());
    let mut out = Array2::<f64>::zeros((u, v));
    for p in 0..u {
        for q in 0..v {
            let ap = if p == 0 { std::f64::consts::FRAC_1_SQRT_2 } else { 1.0 };
            let aq = if q == 0 { std::f64::consts::FRAC_1_SQRT_2 } else { 1.0 };
            let mut acc = 0.0;
            for i in 0..u {
                for j in 0..v {
                    acc += f[[i, j]]
                        * (std::f64::consts::PI * (2 * i + 1) as f64 * p as f64 / (2 * u) as f64)
                            .cos()
                        * (std::f64::consts::PI * (2 * j + 1) as f64 * q as f64 / (2 * v) as f64)
                            .cos();
                }
            }
            out[[p, q]] = 2.0 / ((u * v) as f64).sqrt() * ap * aq * acc;
        }
    }
    out
}

#[test]
fn criterion_1_dct_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xD_C7);
    for _ in 0..100 {
        let u = rng.random_range(2..=14);
        let v = rng.random_range(2..=13);
        let mut block = Array2::<f64>::zeros((u, v));
        for x in block.iter_mut() {
            *x = rng.random_range(-1.0..1.0);
        }
        let fast = dct2(&block.view()).unwrap();
        let naive = dct2_naive(&block.view());
        for (a, b) in fast.iter().zip(naive.iter()) {
            assert!((a - b).abs() < 1e-10, "dct2 {a} vs naive {b}");
        }
        let e_in: f64 = block.iter().map(|x| x * x).sum();
        let e_out: f64 = fast.iter().map(|x| x * x).sum();
        assert!((e_in - e_out).abs() < 1e-8, "energy {e_in} vs {e_out}");
    }
    assert_budget(start.elapsed(), Duration::from_secs(5), "criterion 1");
    println!("criterion 1: PASS (dct2 matches the direct double sum on 100 random blocks)");
}

// --- criterion 2 -----------------------------------------------------------

fn dist(z: &ArrayView2<f64>, a: usize, b: usize) -> f64 {
    z.row(a)
        .iter()
        .zip(z.row(b).iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn silhouette_brute(z: &ArrayView2<f64>, labels: &[usize], k: usize) -> f64 {
    let n = z.nrows();
    let mut total = 0.0;
    for i in 0..n {
        let own: Vec<usize> = (0..n).filter(|&j| labels[j] == labels[i]).collect();
        if own.len() == 1 {
            continue;
        }
        let a = own
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| dist(z, i, j))
            .sum::<f64>()
            / (own.len() - 1) as f64;
        let mut b = f64::INFINITY;
        for c in 0..k {
            if c == labels[i] {
                continue;
            }
            let members: Vec<usize> = (0..n).filter(|&j| labels[j] == c).collect();
            if members.is_empty() {
                continue;
            }
            let mean =
                members.iter().map(|&j| dist(z, i, j)).sum::<f64>() / members.len() as f64;
            b = b.min(mean);
        }
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    total / n as f64
}

fn centroids_of(z: &ArrayView2<f64>, labels: &[usize], k: usize) -> Array2<f64> {
    let mut c = Array2::<f64>::zeros((k, z.ncols()));
    for cluster in 0..k {
        let members: Vec<usize> = (0..z.nrows()).filter(|&i| labels[i] == cluster).collect();
        for col in 0..z.ncols() {
            c[[cluster, col]] =
                members.iter().map(|&i| z[[i, col]]).sum::<f64>() / members.len() as f64;
        }
    }
    c
}

fn spread_sum(z: &ArrayView2<f64>, labels: &[usize], centers: &Array2<f64>, c: usize) -> f64 {
    (0..z.nrows())
        .filter(|&i| labels[i] == c)
        .map(|i| {
            z.row(i)
                .iter()
                .zip(centers.row(c).iter())
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
        })
        .sum()
}

fn davies_bouldin_brute(
    z: &ArrayView2<f64>,
    labels: &[usize],
    centers: &Array2<f64>,
    k: usize,
) -> f64 {
    let delta: Vec<f64> = (0..k).map(|c| spread_sum(z, labels, centers, c)).collect();
    let lambda = |i: usize, j: usize| -> f64 {
        centers
            .row(i)
            .iter()
            .zip(centers.row(j).iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    };
    (0..k)
        .map(|i| {
            (0..k)
                .filter(|&j| j != i)
                .map(|j| (delta[i] + delta[j]) / lambda(i, j))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum::<f64>()
        / k as f64
}

fn dunn_brute(z: &ArrayView2<f64>, labels: &[usize], centers: &Array2<f64>, k: usize) -> f64 {
    let delta: Vec<f64> = (0..k).map(|c| spread_sum(z, labels, centers, c)).collect();
    let max_delta = delta.iter().fold(0.0f64, |m, &d| m.max(d));
    let mut min_lambda = f64::INFINITY;
    for i in 0..k {
        for j in i + 1..k {
            let l: f64 = centers
                .row(i)
                .iter()
                .zip(centers.row(j).iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            min_lambda = min_lambda.min(l);
        }
    }
    min_lambda / max_delta
}

#[test]
fn criterion_2_validity_index_oracles() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7A1);
    let mut checked = 0;
    while checked < 200 {
        let n = rng.random_range(4..=12usize);
        let k = rng.random_range(2..=3usize).min(n - 1);
        let m = rng.random_range(1..=3usize);
        let mut z = Array2::<f64>::zeros((n, m));
        for v in z.iter_mut() {
            *v = rng.random_range(-5.0..5.0);
        }
        // Every cluster non-empty by construction, then shuffled.
        let mut labels: Vec<usize> = (0..n).map(|i| i % k).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            labels.swap(i, j);
        }
        let centers = centroids_of(&z.view(), &labels, k);

        let tol = |v: f64| 1e-12 * v.abs().max(1.0);
        let s = silhouette(&z.view(), &labels).unwrap();
        let s_oracle = silhouette_brute(&z.view(), &labels, k);
        assert!((s - s_oracle).abs() <= tol(s_oracle), "silhouette {s} vs {s_oracle}");

        let db = davies_bouldin(&z.view(), &labels, &centers.view()).unwrap();
        let db_oracle = davies_bouldin_brute(&z.view(), &labels, &centers, k);
        assert!((db - db_oracle).abs() <= tol(db_oracle), "db {db} vs {db_oracle}");

        let d = dunn(&z.view(), &labels, &centers.view()).unwrap();
        let d_oracle = dunn_brute(&z.view(), &labels, &centers, k);
        assert!((d - d_oracle).abs() <= tol(d_oracle), "dunn {d} vs {d_oracle}");
        checked += 1;
    }
    assert_budget(start.elapsed(), Duration::from_secs(10), "criterion 2");
    println!("criterion 2: PASS (silhouette/davies-bouldin/dunn match brute force on 200 instances)");
}

// --- criterion 3 -----------------------------------------------------------

fn kmeans_global_objective(z: &ArrayView2<f64>, k: usize) -> f64 {
    let n = z.nrows();
    let mut best = f64::INFINITY;
    let total = k.pow(n as u32);
    'outer: for code in 0..total {
        let mut labels = vec![0usize; n];
        let mut c = code;
        for l in labels.iter_mut() {
            *l = c % k;
            c /= k;
        }
        let mut counts = vec![0usize; k];
        for &l in &labels {
            counts[l] += 1;
        }
        for &cnt in &counts {
            if cnt == 0 {
                continue 'outer;
            }
        }
        let centers = centroids_of(z, &labels, k);
        let obj: f64 = (0..n)
            .map(|i| {
                z.row(i)
                    .iter()
                    .zip(centers.row(labels[i]).iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
            })
            .sum();
        best = best.min(obj);
    }
    best
}

fn kmedoids_global_objective(z: &ArrayView2<f64>, k: usize) -> f64 {
    let n = z.nrows();
    let mut best = f64::INFINITY;
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        let obj: f64 = (0..n)
            .map(|i| {
                combo
                    .iter()
                    .map(|&m| {
                        z.row(i)
                            .iter()
                            .zip(z.row(m).iter())
                            .map(|(a, b)| (a - b) * (a - b))
                            .sum::<f64>()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .sum();
        best = best.min(obj);
        // Next k-combination of 0..n.
        let mut i = k;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if combo[i] != i + n - k {
                break;
            }
        }
        combo[i] += 1;
        for j in i + 1..k {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

#[test]
fn criterion_3_micro_scale_clustering_optimality() {
    use doppler_cluster::clustering::{ClusterMethod, ClustererConfig};
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC3);
    let mut kmeans_hits = 0usize;
    let mut kmedoids_hits = 0usize;
    let instances = 50usize;
    for instance in 0..instances as u64 {
        let n = rng.random_range(4..=8usize);
        let k = rng.random_range(2..=3usize).min(n);
        let m = rng.random_range(1..=2usize);
        let mut z = Array2::<f64>::zeros((n, m));
        for v in z.iter_mut() {
            *v = rng.random_range(-4.0..4.0);
        }
        let global_means = kmeans_global_objective(&z.view(), k);
        let global_medoids = kmedoids_global_objective(&z.view(), k);

        // Monotonicity must hold on every individual seeded run.
        for restart in 0..5 {
            let seed = instance * 100 + restart;
            let km = kmeans_fit(&z.view(), k, seed, 300, 1e-12).unwrap();
            let kd = kmedoids_fit(&z.view(), k, seed, 300).unwrap();
            for model in [&km, &kd] {
                for w in model.objective_trace.windows(2) {
                    assert!(w[1] <= w[0] + 1e-12, "objective rose: {} -> {}", w[0], w[1]);
                }
            }
        }

        // Optimality is judged on the production path: the best of 5 seeded
        // restarts per instance.
        let kmeans_cfg = ClustererConfig {
            restarts: 5,
            ..ClustererConfig::new(ClusterMethod::KMeans, k, instance)
        };
        let kmedoids_cfg = ClustererConfig {
            restarts: 5,
            ..ClustererConfig::new(ClusterMethod::KMedoids, k, instance)
        };
        if kmeans_cfg.fit(&z.view()).unwrap().objective
            <= global_means + 1e-9 * global_means.max(1.0)
        {
            kmeans_hits += 1;
        }
        if kmedoids_cfg.fit(&z.view()).unwrap().objective
            <= global_medoids + 1e-9 * global_medoids.max(1.0)
        {
            kmedoids_hits += 1;
        }
    }
    let km_rate = kmeans_hits as f64 / instances as f64;
    let kd_rate = kmedoids_hits as f64 / instances as f64;
    assert!(km_rate >= 0.9, "kmeans global-optimum rate {km_rate}");
    assert!(kd_rate >= 0.9, "kmedoids global-optimum rate {kd_rate}");
    assert_budget(start.elapsed(), Duration::from_secs(30), "criterion 3");
    println!(
        "criterion 3: PASS (global optimum rate kmeans {km_rate:.3}, kmedoids {kd_rate:.3}, \
         monotone objectives)"
    );
}

// --- criterion 4 -----------------------------------------------------------

fn five_blobs(seed: u64) -> Array2<f64> {
    let centers = [(0.0, 0.0), (10.0, 0.0), (0.0, 10.0), (10.0, 10.0), (20.0, 20.0)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_blob = 20;
    let mut z = Array2::<f64>::zeros((centers.len() * per_blob, 2));
    let mut row = 0;
    for &(cx, cy) in &centers {
        for _ in 0..per_blob {
            let gx: f64 = StandardNormal.sample(&mut rng);
            let gy: f64 = StandardNormal.sample(&mut rng);
            z[[row, 0]] = cx + 0.1 * gx;
            z[[row, 1]] = cy + 0.1 * gy;
            row += 1;
        }
    }
    z
}

#[test]
fn criterion_4_k_estimation_recommends_five_blobs() {
    let start = Instant::now();
    let mut wins = 0;
    for seed in 0..10u64 {
        let z = five_blobs(seed);
        let cfg = SweepConfig {
            candidate_ks: (2..=10).collect(),
            seed,
            ..SweepConfig::default()
        };
        let report = sweep_k(&z.view(), &cfg).unwrap();
        if report.recommended_k == 5 {
            wins += 1;
        }
    }
    assert!(wins >= 9, "recommended k=5 for only {wins}/10 seeds");
    assert_budget(start.elapsed(), Duration::from_secs(60), "criterion 4");
    println!("criterion 4: PASS (k=5 recommended for {wins}/10 seeds)");
}

// --- criterion 5 -----------------------------------------------------------

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
    let mut table = Array2::<u64>::zeros((k, k));
    for (&p, &t) in pred.iter().zip(truth.iter()) {
        table[[t, p]] += 1;
    }
    let mut best = 0;
    rec(&table, k, 0, &mut vec![false; k], 0, &mut best);
    best
}

#[test]
fn criterion_5_label_matching_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x1AB);
    for _ in 0..500 {
        let k = rng.random_range(2..=6usize);
        let n = rng.random_range(k..=60usize);
        let pred: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let truth: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let mapping = match_labels(&pred, &truth, k).unwrap();
        let matched = pred
            .iter()
            .zip(&truth)
            .filter(|&(&p, &t)| mapping[p] == t)
            .count() as u64;
        assert_eq!(matched, oracle_best_count(&pred, &truth, k));
    }
    // Any permuted-truth input scores exactly 1.0.
    for _ in 0..50 {
        let k = rng.random_range(2..=6usize);
        let n = rng.random_range(k..=40usize);
        let truth: Vec<usize> = (0..n).map(|i| i % k).collect();
        let mut sigma: Vec<usize> = (0..k).collect();
        for i in (1..k).rev() {
            let j = rng.random_range(0..=i);
            sigma.swap(i, j);
        }
        let pred: Vec<usize> = truth.iter().map(|&t| sigma[t]).collect();
        let mapping = match_labels(&pred, &truth, k).unwrap();
        let (acc, _) = accuracy_and_confusion(&pred, &truth, &mapping).unwrap();
        assert_eq!(acc, 1.0);
    }
    assert_budget(start.elapsed(), Duration::from_secs(30), "criterion 5");
    println!("criterion 5: PASS (optimal matching on 500 cases; permuted truth scores 1.0)");
}

// --- criterion 6 -----------------------------------------------------------

#[test]
fn criterion_6_end_to_end_synthetic_benchmark() {
    use doppler_cluster::clustering::{ClusterMethod, ClustererConfig};
    let start = Instant::now();
    let ds = generate_synthetic(&SynthConfig {
        n_subjects: 4,
        reps_per_activity: 10,
        n_activities: 5,
        noise_level: 0.05,
        seed: 42,
    })
    .unwrap();

    let clusterer = ClustererConfig::new(ClusterMethod::KMedoids, 5, 0);
    let local = run_experiment(
        &ds,
        &ExtractorConfig::new(ExtractorKind::LocalDct),
        &clusterer,
        42,
    )
    .unwrap();
    assert!(
        local.mean_test_accuracy >= 0.9,
        "local DCT + K-Medoids mean test accuracy {}",
        local.mean_test_accuracy
    );

    // The raw-DCT baseline column must be produced alongside it.
    let raw = run_experiment(
        &ds,
        &ExtractorConfig::new(ExtractorKind::RawDct),
        &clusterer,
        42,
    )
    .unwrap();
    assert_eq!(raw.folds.len(), 4);
    assert_eq!(local.folds.len(), 4);

    // Structure check through the CLI: a two-column comparison report.
    let tmp = tempfile::TempDir::new().unwrap();
    let csv = tmp.path().join("dataset.csv");
    ds.save_csv(&csv, doppler_cluster::data::DataLayout::Vector6400).unwrap();
    let out = tmp.path().join("eval");
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_doppler-cluster"))
        .args([
            "evaluate",
            "--out",
            out.to_str().unwrap(),
            "--data",
            csv.to_str().unwrap(),
            "--seed",
            "42",
            "--k",
            "5",
            "--extractor",
            "local_dct",
            "--extractor",
            "raw_dct",
            "--clusterer",
            "kmedoids",
        ])
        .output()
        .unwrap();
    assert!(status.status.success());
    let summary = std::fs::read_to_string(out.join("summary.md")).unwrap();
    assert!(summary.contains("| clusterer | local_dct | raw_dct |"), "{summary}");

    assert_budget(start.elapsed(), Duration::from_secs(300), "criterion 6");
    println!(
        "criterion 6: PASS (local DCT + K-Medoids LOOCV test accuracy {:.3}, raw baseline {:.3})",
        local.mean_test_accuracy, raw.mean_test_accuracy
    );
}

// --- criterion 7 -----------------------------------------------------------

/// Class signal confined to the top-left 40x40 quadrant by construction.
fn quadrant_images(per_class: usize, classes: usize, seed: u64) -> Vec<Array2<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let band_h = 40 / classes;
    let mut images = Vec::new();
    for k in 0..classes {
        for _ in 0..per_class {
            let mut im = Array2::<f64>::zeros((IMAGE_SIDE, IMAGE_SIDE));
            for r in 0..IMAGE_SIDE {
                for c in 0..IMAGE_SIDE {
                    im[[r, c]] = if r < 40 && c < 40 {
                        let in_band = r >= k * band_h && r < (k + 1) * band_h;
                        let base: f64 = if in_band { 0.9 } else { 0.1 };
                        (base + rng.random_range(-0.05..0.05)).clamp(0.0, 1.0)
                    } else {
                        rng.random_range(0.0..1.0)
                    };
                }
            }
            images.push(im);
        }
    }
    images
}

#[test]
fn criterion_7_patch_selection_argmax() {
    let start = Instant::now();
    let mut wins = 0;
    for seed in 0..10u64 {
        let images = quadrant_images(8, 5, seed);
        let plan =
            select_best_dct_patch(&images, &PatchSize::ALL, &SelectionConfig::new(5)).unwrap();
        if plan.patch_size == PatchSize::P40 && plan.patch_index == 0 {
            wins += 1;
        }
    }
    assert!(wins >= 9, "top-left 40x40 selected for only {wins}/10 seeds");
    assert_budget(start.elapsed(), Duration::from_secs(120), "criterion 7");
    println!("criterion 7: PASS (top-left 40x40 patch selected for {wins}/10 seeds)");
}

// --- criterion 8 -----------------------------------------------------------

#[test]
fn criterion_8_manifold_contracts() {
    let start = Instant::now();

    // t-SNE: two far tight 10-point blobs stay separated, 5 seeds.
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(900 + seed);
        let mut z = Array2::<f64>::zeros((20, 5));
        for i in 0..20 {
            let offset = if i < 10 { 0.0 } else { 50.0 };
            for c in 0..5 {
                z[[i, c]] = offset + rng.random_range(-0.1..0.1);
            }
        }
        let emb = tsne(
            &z.view(),
            &TsneConfig { perplexity: 5.0, learning_rate: 10.0, seed, ..TsneConfig::default() },
        )
        .unwrap();
        let coords = &emb.coords;
        let d = |a: usize, b: usize| -> f64 {
            let dx = coords[[a, 0]] - coords[[b, 0]];
            let dy = coords[[a, 1]] - coords[[b, 1]];
            (dx * dx + dy * dy).sqrt()
        };
        let mut max_within = 0.0f64;
        let mut min_between = f64::INFINITY;
        for a in 0..20 {
            for b in a + 1..20 {
                if (a < 10) == (b < 10) {
                    max_within = max_within.max(d(a, b));
                } else {
                    min_between = min_between.min(d(a, b));
                }
            }
        }
        assert!(
            max_within < min_between,
            "seed {seed}: within {max_within} >= between {min_between}"
        );
    }

    // MDS: an exactly-embeddable 3-point metric reaches stress < 1e-6.
    let triangle = ndarray::array![[0.0, 0.0], [3.0, 0.0], [0.0, 4.0]];
    let emb = mds(&triangle.view(), 2000, 1).unwrap();
    assert!(emb.final_loss < 1e-6, "stress {}", emb.final_loss);

    // LLE: weight rows sum to 1; collinear data reconstructs exactly.
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut cloud = Array2::<f64>::zeros((30, 4));
    for v in cloud.iter_mut() {
        *v = rng.random_range(-1.0..1.0);
    }
    let (_, weights) = lle_weights(&cloud.view(), 6, 1e-3).unwrap();
    for row in &weights {
        let sum: f64 = row.iter().sum();
        assert!((sum - 1.0).abs() < 1e-10, "row sum {sum}");
    }
    let mut line = Array2::<f64>::zeros((12, 3));
    let dir = [0.6, -0.3, 0.74];
    for i in 0..12 {
        for c in 0..3 {
            line[[i, c]] = 0.2 + i as f64 * dir[c];
        }
    }
    let (neighbors, weights) = lle_weights(&line.view(), 2, 1e-9).unwrap();
    let residual = reconstruction_error(&line.view(), &neighbors, &weights);
    assert!(residual < 1e-8, "collinear residual {residual}");

    assert_budget(start.elapsed(), Duration::from_secs(120), "criterion 8");
    println!("criterion 8: PASS (t-SNE separation x5 seeds, MDS stress, LLE weights)");
}

// --- criterion 9 -----------------------------------------------------------

fn dir_snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    entries
}

#[test]
fn criterion_9_rerun_from_provenance_is_byte_identical() {
    let start = Instant::now();
    let tmp = tempfile::TempDir::new().unwrap();
    let bin = env!("CARGO_BIN_EXE_doppler-cluster");

    let synth = tmp.path().join("synth");
    let status = std::process::Command::new(bin)
        .args([
            "synth", "--out", synth.to_str().unwrap(), "--subjects", "3", "--reps", "3",
            "--activities", "3", "--noise", "0.05", "--seed", "21",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let data = synth.join("dataset.csv");

    // evaluate: run, then re-run from the provenance file.
    let eval_a = tmp.path().join("eval_a");
    let status = std::process::Command::new(bin)
        .args([
            "evaluate", "--out", eval_a.to_str().unwrap(), "--data", data.to_str().unwrap(),
            "--seed", "33", "--k", "3", "--extractor", "local_dct", "--extractor", "raw_dct",
            "--clusterer", "kmedoids",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let eval_b = tmp.path().join("eval_b");
    let status = std::process::Command::new(bin)
        .args([
            "evaluate",
            "--out",
            eval_b.to_str().unwrap(),
            "--config",
            eval_a.join("provenance.json").to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(dir_snapshot(&eval_a), dir_snapshot(&eval_b), "evaluate outputs differ");

    // embed: same contract.
    let embed_a = tmp.path().join("embed_a");
    let status = std::process::Command::new(bin)
        .args([
            "embed", "--out", embed_a.to_str().unwrap(), "--data", data.to_str().unwrap(),
            "--seed", "33", "--method", "tsne",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let embed_b = tmp.path().join("embed_b");
    let status = std::process::Command::new(bin)
        .args([
            "embed",
            "--out",
            embed_b.to_str().unwrap(),
            "--config",
            embed_a.join("provenance.json").to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(dir_snapshot(&embed_a), dir_snapshot(&embed_b), "embed outputs differ");

    assert_budget(start.elapsed(), Duration::from_secs(300), "criterion 9");
    println!("criterion 9: PASS (evaluate and embed re-runs are byte-identical)");
}
