//! Command-line driver: `synth`, `sweep`, `evaluate`, and `embed`.
//!
//! Every command resolves one [`PipelineConfig`] (config file plus flag
//! overrides), runs, and writes its results plus a `provenance.json` into the
//! output directory. Re-running a command with `--config provenance.json`
//! reproduces byte-identical outputs. Progress goes to stdout; results go to
//! files. Exit codes: 0 success, 1 runtime failure, 2 usage or config error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{FeatureSource, KChoice, PipelineConfig};
use crate::data::{DataLayout, Dataset};
use crate::error::{Error, Result};
use crate::evaluation::{run_experiment, ExperimentReport};
use crate::features::{fit_extractor, SelectionConfig};
use crate::manifold::{lle, mds, tsne, Embedding, LleConfig, ManifoldMethod, TsneConfig};
use crate::seeds::{self, tags};

/// Thread-count override, applied to the global rayon pool at startup.
pub const THREADS_ENV: &str = "DOPPLER_CLUSTER_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "doppler-cluster",
    version,
    about = "Unsupervised clustering pipeline for micro-Doppler spectrograms"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic labeled dataset CSV.
    Synth(SynthArgs),
    /// Score candidate cluster counts with the four validity indices.
    Sweep(CommonArgs),
    /// Run the leave-one-subject-out evaluation grid.
    Evaluate(CommonArgs),
    /// Project features to 2-D coordinates for plotting.
    Embed(EmbedArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Pipeline config file (TOML or JSON, e.g. a prior provenance.json).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    /// Root seed override.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Dataset CSV path override.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Dataset layout: vector6400 or cube.
    #[arg(long)]
    pub layout: Option<String>,
    /// Cluster count: an integer or "auto".
    #[arg(long)]
    pub k: Option<String>,
    /// Extractor(s) to run (repeatable): local_dct, raw_dct, entropy, pca, pca2d.
    #[arg(long = "extractor")]
    pub extractors: Vec<String>,
    /// Clusterer(s) to run (repeatable): kmeans, kmedoids.
    #[arg(long = "clusterer")]
    pub clusterers: Vec<String>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub subjects: Option<u32>,
    #[arg(long)]
    pub reps: Option<u32>,
    #[arg(long)]
    pub activities: Option<u32>,
    #[arg(long)]
    pub noise: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Embedding method: tsne, mds, or lle.
    #[arg(long)]
    pub method: Option<String>,
    /// Feature source: raw or extractor.
    #[arg(long)]
    pub features: Option<String>,
}

/// Parses argv and runs; returns the process exit code.
pub fn main_impl() -> u8 {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(args) => cmd_synth(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Embed(args) => cmd_embed(args),
    }
}

/// Builds the resolved config: file (if any), then flag overrides. All
/// failures here are usage errors.
fn resolve_config(common: &CommonArgs) -> Result<PipelineConfig> {
    let mut cfg = match &common.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(data) = &common.data {
        cfg.dataset.path = Some(data.clone());
        cfg.dataset.synthetic = None;
    }
    if let Some(layout) = &common.layout {
        cfg.dataset.layout = Some(layout.parse::<DataLayout>()?);
    }
    if let Some(k) = &common.k {
        cfg.k = k.parse::<KChoice>()?;
    }
    if !common.extractors.is_empty() {
        cfg.extractors = common
            .extractors
            .iter()
            .map(|s| Ok(crate::features::ExtractorConfig::new(s.parse()?)))
            .collect::<Result<_>>()?;
    }
    if !common.clusterers.is_empty() {
        cfg.clusterers = common
            .clusterers
            .iter()
            .map(|s| Ok(crate::config::ClustererSpec::new(s.parse()?)))
            .collect::<Result<_>>()?;
    }
    Ok(cfg)
}

fn prepare_out_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)
        .map_err(|e| Error::Config(format!("cannot create output dir {}: {e}", out.display())))
}

fn write_provenance(out: &Path, cfg: &PipelineConfig) -> Result<()> {
    let path = out.join("provenance.json");
    std::fs::write(&path, cfg.provenance_json()?)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn load_dataset_logged(cfg: &PipelineConfig) -> Result<Dataset> {
    let ds = cfg.load_dataset()?;
    println!(
        "dataset: {} samples, {} subjects{}",
        ds.len(),
        ds.n_subjects(),
        match ds.n_activities() {
            Some(a) => format!(", {a} activities"),
            None => ", unlabeled".to_string(),
        }
    );
    Ok(ds)
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let mut cfg = resolve_config(&args.common)?;
    // Flags fill or override the synthetic section; `synth` never reads CSVs.
    let mut spec = cfg.dataset.synthetic.clone().unwrap_or_default();
    if let Some(v) = args.subjects {
        spec.subjects = v;
    }
    if let Some(v) = args.reps {
        spec.reps = v;
    }
    if let Some(v) = args.activities {
        spec.activities = v;
    }
    if let Some(v) = args.noise {
        spec.noise = v;
    }
    cfg.dataset.path = None;
    cfg.dataset.synthetic = Some(spec);
    cfg.validate()?;

    let out = &args.common.out;
    prepare_out_dir(out)?;
    let ds = load_dataset_logged(&cfg)?;
    let layout = cfg.dataset.layout.unwrap_or(DataLayout::Vector6400);
    let path = out.join("dataset.csv");
    ds.save_csv(&path, layout)?;
    println!("wrote {}", path.display());
    write_provenance(out, &cfg)
}

fn cmd_sweep(args: CommonArgs) -> Result<()> {
    let cfg = resolve_config(&args)?;
    cfg.validate()?;
    let out = &args.out;
    prepare_out_dir(out)?;

    let ds = load_dataset_logged(&cfg)?;
    let report = cfg.run_sweep(&ds)?;
    println!(
        "recommended k = {} (votes: {})",
        report.recommended_k,
        report
            .votes
            .iter()
            .map(|(m, k)| format!("{m} -> {k}"))
            .collect::<Vec<_>>()
            .join(", ")
    );

    let csv_path = out.join("ksweep.csv");
    report.write_csv(&csv_path)?;
    println!("wrote {}", csv_path.display());
    let json_path = out.join("ksweep.json");
    std::fs::write(&json_path, serde_json::to_string_pretty(&report)?)?;
    println!("wrote {}", json_path.display());
    write_provenance(out, &cfg)
}

fn cmd_evaluate(args: CommonArgs) -> Result<()> {
    let cfg = resolve_config(&args)?;
    cfg.validate()?;
    let out = &args.out;
    prepare_out_dir(out)?;

    let ds = load_dataset_logged(&cfg)?;
    let k = cfg.resolve_k(&ds)?;
    println!("k = {k}");

    let mut entries: Vec<ExperimentReport> = Vec::new();
    let mut pair_idx = 0u64;
    for extractor in &cfg.extractors {
        for clusterer in &cfg.clusterers {
            let clu = clusterer.to_clusterer(k, 0);
            let pair_seed = seeds::split(cfg.seed, 1_000 + pair_idx);
            println!("running {} + {} ...", extractor.kind, clu.method);
            let report = run_experiment(&ds, extractor, &clu, pair_seed)?;
            println!(
                "  train {:.2}% +- {:.2}, test {:.2}% +- {:.2}",
                100.0 * report.mean_train_accuracy,
                100.0 * report.std_train_accuracy,
                100.0 * report.mean_test_accuracy,
                100.0 * report.std_test_accuracy
            );
            entries.push(report);
            pair_idx += 1;
        }
    }

    let report_path = out.join("report.json");
    let doc = serde_json::json!({ "k": k, "entries": entries });
    std::fs::write(&report_path, serde_json::to_string_pretty(&doc)?)?;
    println!("wrote {}", report_path.display());

    for report in &entries {
        for fold in &report.folds {
            let name = format!(
                "confusion_{}_{}_subject{}.csv",
                report.extractor.kind, report.clusterer.method, fold.held_out_subject
            );
            write_confusion_csv(&out.join(name), &fold.confusion)?;
        }
    }
    println!("wrote {} confusion matrices", entries.iter().map(|e| e.folds.len()).sum::<usize>());

    let summary_path = out.join("summary.md");
    std::fs::write(&summary_path, render_summary(&ds, k, cfg.seed, &entries))?;
    println!("wrote {}", summary_path.display());
    write_provenance(out, &cfg)
}

fn write_confusion_csv(path: &Path, confusion: &[Vec<u64>]) -> Result<()> {
    let k = confusion.len();
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["true_class".to_string()];
    header.extend((1..=k).map(|c| format!("pred_{c}")));
    w.write_record(&header)?;
    for (i, row) in confusion.iter().enumerate() {
        let mut rec = vec![(i + 1).to_string()];
        rec.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Markdown summary: one accuracy table per split, clusterers as rows and
/// extractors as columns.
fn render_summary(ds: &Dataset, k: usize, seed: u64, entries: &[ExperimentReport]) -> String {
    use std::fmt::Write as _;
    let mut extractors: Vec<String> = Vec::new();
    let mut clusterers: Vec<String> = Vec::new();
    for e in entries {
        let ext = e.extractor.kind.to_string();
        let clu = e.clusterer.method.to_string();
        if !extractors.contains(&ext) {
            extractors.push(ext);
        }
        if !clusterers.contains(&clu) {
            clusterers.push(clu);
        }
    }
    let cell = |clu: &str, ext: &str, train: bool| -> String {
        entries
            .iter()
            .find(|e| {
                e.extractor.kind.to_string() == ext && e.clusterer.method.to_string() == clu
            })
            .map(|e| {
                let (m, s) = if train {
                    (e.mean_train_accuracy, e.std_train_accuracy)
                } else {
                    (e.mean_test_accuracy, e.std_test_accuracy)
                };
                format!("{:.2}% \u{b1} {:.2}", 100.0 * m, 100.0 * s)
            })
            .unwrap_or_else(|| "-".to_string())
    };

    let mut out = String::new();
    let _ = writeln!(out, "# Clustering evaluation summary");
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "- dataset: {} samples, {} subjects, {} activities",
        ds.len(),
        ds.n_subjects(),
        ds.n_activities().map_or("?".to_string(), |a| a.to_string())
    );
    let _ = writeln!(out, "- k: {k}");
    let _ = writeln!(out, "- seed: {seed}");
    for (title, train) in [
        ("Average training accuracy (leave-one-subject-out)", true),
        ("Average testing accuracy (leave-one-subject-out)", false),
    ] {
        let _ = writeln!(out);
        let _ = writeln!(out, "## {title}");
        let _ = writeln!(out);
        let _ = writeln!(out, "| clusterer | {} |", extractors.join(" | "));
        let _ = writeln!(
            out,
            "|---|{}|",
            extractors.iter().map(|_| "---").collect::<Vec<_>>().join("|")
        );
        for clu in &clusterers {
            let cells: Vec<String> =
                extractors.iter().map(|ext| cell(clu, ext, train)).collect();
            let _ = writeln!(out, "| {clu} | {} |", cells.join(" | "));
        }
    }
    out
}

fn cmd_embed(args: EmbedArgs) -> Result<()> {
    let mut cfg = resolve_config(&args.common)?;
    if let Some(m) = &args.method {
        cfg.embed.method = Some(m.parse::<ManifoldMethod>()?);
    }
    if let Some(f) = &args.features {
        cfg.embed.features = f.parse::<FeatureSource>()?;
    }
    cfg.validate()?;
    let method = cfg.embed.method.ok_or_else(|| {
        Error::Config("embed: pass --method or set embed.method in the config".into())
    })?;
    let out = &args.common.out;
    prepare_out_dir(out)?;

    let ds = load_dataset_logged(&cfg)?;
    let embed_seed = seeds::split(cfg.seed, tags::EMBED);
    let features = match cfg.embed.features {
        FeatureSource::Raw => ds.to_matrix(),
        FeatureSource::Extractor => {
            let k = cfg.resolve_k(&ds)?;
            let images = ds.images();
            let fitted = fit_extractor(&cfg.extractors[0], &images, &SelectionConfig::new(k))?;
            println!(
                "features: {} {}",
                cfg.extractors[0].kind,
                serde_json::to_string(&fitted.detail())?
            );
            fitted.transform(&images, cfg.seed)?.data
        }
    };

    let embedding: Embedding = match method {
        ManifoldMethod::Tsne => tsne(
            &features.view(),
            &TsneConfig {
                perplexity: cfg.embed.perplexity,
                iters: cfg.embed.iters,
                seed: embed_seed,
                ..TsneConfig::default()
            },
        )?,
        ManifoldMethod::Mds => mds(&features.view(), cfg.embed.iters, embed_seed)?,
        ManifoldMethod::Lle => lle(
            &features.view(),
            &LleConfig {
                n_neighbors: cfg.embed.neighbors,
                dim: 2,
                reg: cfg.embed.reg,
            },
        )?,
    };
    println!(
        "{} finished: loss {:.6}, {} iterations",
        method, embedding.final_loss, embedding.iterations
    );

    let labels = ds.labels();
    let path = out.join("embedding.csv");
    embedding.write_csv(&path, labels.as_deref())?;
    println!("wrote {}", path.display());
    write_provenance(out, &cfg)
}
