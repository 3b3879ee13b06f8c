//! End-to-end tests of the `doppler-cluster` binary: every subcommand, the
//! documented exit codes, and the file contracts of each output directory.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_doppler-cluster"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn synth_dataset(dir: &Path, extra: &[&str]) -> PathBuf {
    let out = dir.join("synth");
    let mut args = vec![
        "synth",
        "--out",
        out.to_str().unwrap(),
        "--subjects",
        "3",
        "--reps",
        "3",
        "--activities",
        "3",
        "--noise",
        "0.05",
        "--seed",
        "11",
    ];
    args.extend_from_slice(extra);
    let result = run(&args);
    assert_success(&result);
    out.join("dataset.csv")
}

#[test]
fn synth_writes_loadable_csv_and_provenance() {
    let tmp = TempDir::new().unwrap();
    let csv = synth_dataset(tmp.path(), &[]);
    assert!(csv.exists());
    assert!(csv.parent().unwrap().join("provenance.json").exists());

    let ds = doppler_cluster::data::load_dataset(
        &csv,
        doppler_cluster::data::DataLayout::Vector6400,
    )
    .unwrap();
    assert_eq!(ds.len(), 27);
    assert_eq!(ds.n_subjects(), 3);
    assert_eq!(ds.n_activities(), Some(3));
}

#[test]
fn sweep_recommends_five_classes_on_standard_synthetic() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("cfg.toml");
    std::fs::write(
        &cfg,
        "seed = 42\n\n[dataset.synthetic]\nsubjects = 4\nreps = 10\nactivities = 5\nnoise = 0.05\n",
    )
    .unwrap();
    let out = tmp.path().join("sweep");
    let result = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_success(&result);

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("ksweep.json")).unwrap()).unwrap();
    assert_eq!(json["recommended_k"], 5);
    let csv = std::fs::read_to_string(out.join("ksweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10); // header + K = 2..10
    assert!(out.join("provenance.json").exists());
}

#[test]
fn sweep_single_candidate_k_gives_single_row() {
    let tmp = TempDir::new().unwrap();
    let data = synth_dataset(tmp.path(), &[]);
    let cfg = tmp.path().join("cfg.toml");
    std::fs::write(
        &cfg,
        format!("[dataset]\npath = {:?}\n\n[sweep]\nks = [2]\n", data.to_str().unwrap()),
    )
    .unwrap();
    let out = tmp.path().join("sweep1");
    let result = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_success(&result);
    let csv = std::fs::read_to_string(out.join("ksweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn sweep_missing_dataset_path_is_usage_error() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("x");
    let result = run(&[
        "sweep",
        "--out",
        out.to_str().unwrap(),
        "--data",
        "/definitely/not/here.csv",
    ]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("/definitely/not/here.csv"), "{stderr}");
}

#[test]
fn evaluate_writes_comparison_summary_and_reports() {
    let tmp = TempDir::new().unwrap();
    let data = synth_dataset(tmp.path(), &[]);
    let out = tmp.path().join("eval");
    let result = run(&[
        "evaluate",
        "--out",
        out.to_str().unwrap(),
        "--data",
        data.to_str().unwrap(),
        "--seed",
        "5",
        "--k",
        "3",
        "--extractor",
        "local_dct",
        "--extractor",
        "raw_dct",
        "--clusterer",
        "kmedoids",
    ]);
    assert_success(&result);

    let summary = std::fs::read_to_string(out.join("summary.md")).unwrap();
    // Table-style comparison: one column per extractor, one row per clusterer,
    // mean +- std cells.
    assert!(summary.contains("| clusterer | local_dct | raw_dct |"), "{summary}");
    assert!(summary.contains("| kmedoids |"), "{summary}");
    assert!(summary.contains('\u{b1}'), "{summary}");

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["k"], 3);
    assert_eq!(report["entries"].as_array().unwrap().len(), 2);

    // One confusion CSV per (extractor, clusterer, subject).
    for subject in 1..=3 {
        for ext in ["local_dct", "raw_dct"] {
            let name = format!("confusion_{ext}_kmedoids_subject{subject}.csv");
            assert!(out.join(&name).exists(), "missing {name}");
        }
    }
    assert!(out.join("provenance.json").exists());
}

#[test]
fn evaluate_rejects_unknown_extractor_with_usage_error() {
    let tmp = TempDir::new().unwrap();
    let data = synth_dataset(tmp.path(), &[]);
    let out = tmp.path().join("eval");
    let result = run(&[
        "evaluate",
        "--out",
        out.to_str().unwrap(),
        "--data",
        data.to_str().unwrap(),
        "--extractor",
        "glcm",
    ]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&result.stderr);
    for valid in ["local_dct", "raw_dct", "entropy", "pca", "pca2d"] {
        assert!(stderr.contains(valid), "{stderr} should list {valid}");
    }
}

#[test]
fn embed_writes_labeled_coordinates_for_raw_and_extractor_features() {
    let tmp = TempDir::new().unwrap();
    let data = synth_dataset(tmp.path(), &[]);

    let raw_out = tmp.path().join("embed_raw");
    let result = run(&[
        "embed",
        "--out",
        raw_out.to_str().unwrap(),
        "--data",
        data.to_str().unwrap(),
        "--seed",
        "2",
        "--method",
        "tsne",
    ]);
    assert_success(&result);
    let csv = std::fs::read_to_string(raw_out.join("embedding.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "sample,x,y,label");
    assert_eq!(lines.count(), 27);

    // Second run on extracted features for a before/after comparison.
    let dct_out = tmp.path().join("embed_dct");
    let result = run(&[
        "embed",
        "--out",
        dct_out.to_str().unwrap(),
        "--data",
        data.to_str().unwrap(),
        "--seed",
        "2",
        "--method",
        "tsne",
        "--features",
        "extractor",
        "--extractor",
        "local_dct",
        "--k",
        "3",
    ]);
    assert_success(&result);
    let csv2 = std::fs::read_to_string(dct_out.join("embedding.csv")).unwrap();
    assert_eq!(csv2.lines().count(), 28);
    assert_ne!(csv, csv2);
}

#[test]
fn embed_mds_on_two_samples_fails_with_precondition() {
    let tmp = TempDir::new().unwrap();
    // A two-sample dataset.
    let csv = tmp.path().join("two.csv");
    let mut header = vec!["subject".to_string(), "label".to_string()];
    header.extend((0..6400).map(|i| format!("f{i}")));
    let row = |s: u32| {
        let mut r = vec![s.to_string(), "1".to_string()];
        r.extend(std::iter::repeat_n("0.5".to_string(), 6400));
        r.join(",")
    };
    std::fs::write(&csv, format!("{}\n{}\n{}\n", header.join(","), row(1), row(2))).unwrap();

    let out = tmp.path().join("embed");
    let result = run(&[
        "embed",
        "--out",
        out.to_str().unwrap(),
        "--data",
        csv.to_str().unwrap(),
        "--method",
        "mds",
    ]);
    assert_eq!(result.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("at least 3 samples"), "{stderr}");
}

#[test]
fn embed_without_method_is_usage_error() {
    let tmp = TempDir::new().unwrap();
    let data = synth_dataset(tmp.path(), &[]);
    let out = tmp.path().join("embed");
    let result = run(&[
        "embed",
        "--out",
        out.to_str().unwrap(),
        "--data",
        data.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(2));
}
