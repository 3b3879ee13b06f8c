//! Dataset loading, layout conversion, and synthetic data generation.
//!
//! A sample is one activity recording: a normalized amplitude cube of
//! 2 directions x 100 Doppler bins x 32 time steps, stored flattened
//! (direction-major, then Doppler bin, then time) as 6400 values in [0, 1].
//! For image-style feature extraction the flat vector is reshaped row-major
//! into an 80x80 matrix.
//!
//! On-disk interchange is CSV. The `vector6400` layout is one row per sample
//! with header `subject,label,f0..f6399`; the `cube` layout is one row per
//! (sample, direction, Doppler bin) with header
//! `subject,label,direction,bin,t0..t31`. The label cell is empty for
//! unlabeled data.

use std::fmt;
use std::path::Path;

use ndarray::{Array1, Array2};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DIRECTIONS: usize = 2;
pub const DOPPLER_BINS: usize = 100;
pub const TIME_STEPS: usize = 32;
/// Total values per sample: 2 x 100 x 32.
pub const SAMPLE_LEN: usize = DIRECTIONS * DOPPLER_BINS * TIME_STEPS;
/// Side of the square image a sample reshapes to.
pub const IMAGE_SIDE: usize = 80;

/// One activity recording.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrogramSample {
    values: Array1<f64>,
    pub subject_id: u32,
    /// Ground-truth activity label (1-based), used only for evaluation.
    pub label: Option<u32>,
}

impl SpectrogramSample {
    /// Builds a sample from a flattened cube, validating length, finiteness,
    /// and the [0, 1] range.
    pub fn new(values: Vec<f64>, subject_id: u32, label: Option<u32>) -> Result<Self> {
        if values.len() != SAMPLE_LEN {
            return Err(Error::WrongLength {
                expected: SAMPLE_LEN,
                got: values.len(),
            });
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite value at flat index {i}"
                )));
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!(
                    "value {v} at flat index {i} is outside [0, 1]"
                )));
            }
        }
        if let Some(l) = label {
            if l == 0 {
                return Err(Error::InvalidArgument("labels are 1-based".into()));
            }
        }
        Ok(Self {
            values: Array1::from(values),
            subject_id,
            label,
        })
    }

    /// Flattened cube values (length 6400).
    pub fn values(&self) -> &Array1<f64> {
        &self.values
    }

    /// Value at (direction, Doppler bin, time step).
    pub fn cube_value(&self, direction: usize, bin: usize, t: usize) -> f64 {
        self.values[direction * DOPPLER_BINS * TIME_STEPS + bin * TIME_STEPS + t]
    }

    /// 80x80 image view of the sample (row-major reshape).
    pub fn to_image(&self) -> Array2<f64> {
        reshape_to_image(self.values.as_slice().expect("contiguous"))
            .expect("sample length is 6400 by construction")
    }
}

/// Reshapes a flat vector of length 6400 into an 80x80 matrix, row-major.
pub fn reshape_to_image(v: &[f64]) -> Result<Array2<f64>> {
    if v.len() != SAMPLE_LEN {
        return Err(Error::WrongLength {
            expected: SAMPLE_LEN,
            got: v.len(),
        });
    }
    Ok(Array2::from_shape_vec((IMAGE_SIDE, IMAGE_SIDE), v.to_vec())
        .expect("6400 = 80 * 80"))
}

/// Inverse of [`reshape_to_image`]: flattens an 80x80 matrix row-major.
pub fn flatten_image(img: &Array2<f64>) -> Result<Array1<f64>> {
    if img.nrows() != IMAGE_SIDE || img.ncols() != IMAGE_SIDE {
        return Err(Error::WrongLength {
            expected: SAMPLE_LEN,
            got: img.len(),
        });
    }
    Ok(Array1::from_iter(img.iter().copied()))
}

/// On-disk CSV layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataLayout {
    /// One row per sample: `subject,label,f0..f6399`.
    Vector6400,
    /// One row per (sample, direction, bin): `subject,label,direction,bin,t0..t31`.
    Cube,
}

impl fmt::Display for DataLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataLayout::Vector6400 => write!(f, "vector6400"),
            DataLayout::Cube => write!(f, "cube"),
        }
    }
}

impl std::str::FromStr for DataLayout {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vector6400" => Ok(DataLayout::Vector6400),
            "cube" => Ok(DataLayout::Cube),
            other => Err(Error::Config(format!(
                "unknown layout {other:?}; valid layouts: vector6400, cube"
            ))),
        }
    }
}

/// An ordered collection of samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<SpectrogramSample>,
}

impl Dataset {
    /// Wraps samples, requiring a non-empty set and contiguous subject IDs.
    pub fn new(samples: Vec<SpectrogramSample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("empty dataset".into()));
        }
        let mut ids: Vec<u32> = samples.iter().map(|s| s.subject_id).collect();
        ids.sort_unstable();
        ids.dedup();
        let lo = ids[0];
        let hi = ids[ids.len() - 1];
        if (hi - lo) as usize + 1 != ids.len() {
            return Err(Error::InvalidArgument(format!(
                "subject ids must form a contiguous range, got {ids:?}"
            )));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[SpectrogramSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Distinct subject IDs, ascending.
    pub fn subject_ids(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self.samples.iter().map(|s| s.subject_id).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    pub fn n_subjects(&self) -> usize {
        self.subject_ids().len()
    }

    /// All labels, provided every sample carries one.
    pub fn labels(&self) -> Option<Vec<u32>> {
        self.samples.iter().map(|s| s.label).collect()
    }

    /// Distinct label count when labels are present.
    pub fn n_activities(&self) -> Option<usize> {
        let labels = self.labels()?;
        let mut distinct = labels;
        distinct.sort_unstable();
        distinct.dedup();
        Some(distinct.len())
    }

    /// n x 6400 matrix of flattened samples, in dataset order.
    pub fn to_matrix(&self) -> Array2<f64> {
        let n = self.samples.len();
        let mut m = Array2::<f64>::zeros((n, SAMPLE_LEN));
        for (i, s) in self.samples.iter().enumerate() {
            m.row_mut(i).assign(s.values());
        }
        m
    }

    /// 80x80 image per sample, in dataset order.
    pub fn images(&self) -> Vec<Array2<f64>> {
        self.samples.iter().map(|s| s.to_image()).collect()
    }

    /// Writes the dataset as CSV in the given layout.
    pub fn save_csv(&self, path: &Path, layout: DataLayout) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        match layout {
            DataLayout::Vector6400 => {
                let mut header = vec!["subject".to_string(), "label".to_string()];
                header.extend((0..SAMPLE_LEN).map(|i| format!("f{i}")));
                w.write_record(&header)?;
                for s in &self.samples {
                    let mut rec = vec![
                        s.subject_id.to_string(),
                        s.label.map(|l| l.to_string()).unwrap_or_default(),
                    ];
                    rec.extend(s.values().iter().map(|v| format!("{v}")));
                    w.write_record(&rec)?;
                }
            }
            DataLayout::Cube => {
                let mut header = vec![
                    "subject".to_string(),
                    "label".to_string(),
                    "direction".to_string(),
                    "bin".to_string(),
                ];
                header.extend((0..TIME_STEPS).map(|t| format!("t{t}")));
                w.write_record(&header)?;
                for s in &self.samples {
                    for d in 0..DIRECTIONS {
                        for b in 0..DOPPLER_BINS {
                            let mut rec = vec![
                                s.subject_id.to_string(),
                                s.label.map(|l| l.to_string()).unwrap_or_default(),
                                d.to_string(),
                                b.to_string(),
                            ];
                            rec.extend(
                                (0..TIME_STEPS).map(|t| format!("{}", s.cube_value(d, b, t))),
                            );
                            w.write_record(&rec)?;
                        }
                    }
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Loads a dataset CSV in the given layout, validating every value.
pub fn load_dataset(path: &Path, layout: DataLayout) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::MalformedInput {
                path: path.to_path_buf(),
                detail: format!("cannot open: {e}"),
            },
            _ => Error::Csv(e),
        })?;

    let headers = reader.headers()?.clone();
    if headers.is_empty() || headers.iter().all(|h| h.is_empty()) {
        return Err(Error::MalformedInput {
            path: path.to_path_buf(),
            detail: "empty file".into(),
        });
    }

    let samples = match layout {
        DataLayout::Vector6400 => load_vector_rows(path, &mut reader)?,
        DataLayout::Cube => load_cube_rows(path, &mut reader)?,
    };
    if samples.is_empty() {
        return Err(Error::MalformedInput {
            path: path.to_path_buf(),
            detail: "no data rows".into(),
        });
    }
    Dataset::new(samples)
}

fn parse_cell(raw: &str, row: usize, col: usize) -> Result<f64> {
    let v: f64 = raw.trim().parse().map_err(|_| Error::MalformedInput {
        path: Default::default(),
        detail: format!("unparseable number {raw:?} at row {row}, column {col}"),
    })?;
    if !v.is_finite() {
        return Err(Error::NonFinite { row, col });
    }
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::ValueOutOfRange { row, col, value: v });
    }
    Ok(v)
}

fn parse_subject_label(
    rec: &csv::StringRecord,
    row: usize,
) -> Result<(u32, Option<u32>)> {
    let subject: u32 = rec[0].trim().parse().map_err(|_| Error::MalformedInput {
        path: Default::default(),
        detail: format!("bad subject id {:?} at row {row}", &rec[0]),
    })?;
    let label_raw = rec[1].trim();
    let label = if label_raw.is_empty() {
        None
    } else {
        Some(label_raw.parse().map_err(|_| Error::MalformedInput {
            path: Default::default(),
            detail: format!("bad label {label_raw:?} at row {row}"),
        })?)
    };
    Ok((subject, label))
}

fn load_vector_rows(
    path: &Path,
    reader: &mut csv::Reader<std::fs::File>,
) -> Result<Vec<SpectrogramSample>> {
    let expected = SAMPLE_LEN + 2;
    let mut samples = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row = i + 1; // 1-based data row
        if rec.len() != expected {
            return Err(Error::RowWidth {
                row,
                expected,
                found: rec.len(),
            });
        }
        let (subject, label) = parse_subject_label(&rec, row).map_err(|e| at_path(e, path))?;
        let mut values = Vec::with_capacity(SAMPLE_LEN);
        for col in 0..SAMPLE_LEN {
            values.push(parse_cell(&rec[col + 2], row, col).map_err(|e| at_path(e, path))?);
        }
        samples.push(SpectrogramSample::new(values, subject, label)?);
    }
    Ok(samples)
}

fn load_cube_rows(
    path: &Path,
    reader: &mut csv::Reader<std::fs::File>,
) -> Result<Vec<SpectrogramSample>> {
    let expected = TIME_STEPS + 4;
    let rows_per_sample = DIRECTIONS * DOPPLER_BINS;
    let mut samples = Vec::new();
    let mut current: Vec<f64> = Vec::with_capacity(SAMPLE_LEN);
    let mut current_meta: Option<(u32, Option<u32>)> = None;

    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        if rec.len() != expected {
            return Err(Error::RowWidth {
                row,
                expected,
                found: rec.len(),
            });
        }
        let (subject, label) = parse_subject_label(&rec, row).map_err(|e| at_path(e, path))?;
        let within = i % rows_per_sample;
        let (want_d, want_b) = (within / DOPPLER_BINS, within % DOPPLER_BINS);
        let d: usize = rec[2].trim().parse().unwrap_or(usize::MAX);
        let b: usize = rec[3].trim().parse().unwrap_or(usize::MAX);
        if d != want_d || b != want_b {
            return Err(Error::MalformedInput {
                path: path.to_path_buf(),
                detail: format!(
                    "row {row}: expected direction {want_d} bin {want_b}, found {d} {b}"
                ),
            });
        }
        if within == 0 {
            current_meta = Some((subject, label));
        } else if current_meta != Some((subject, label)) {
            return Err(Error::MalformedInput {
                path: path.to_path_buf(),
                detail: format!("row {row}: subject/label changed mid-sample"),
            });
        }
        for col in 0..TIME_STEPS {
            current.push(parse_cell(&rec[col + 4], row, col).map_err(|e| at_path(e, path))?);
        }
        if within == rows_per_sample - 1 {
            let (subject, label) = current_meta.take().expect("meta set at sample start");
            samples.push(SpectrogramSample::new(
                std::mem::take(&mut current),
                subject,
                label,
            )?);
        }
    }
    if !current.is_empty() {
        return Err(Error::MalformedInput {
            path: path.to_path_buf(),
            detail: "truncated cube sample at end of file".into(),
        });
    }
    Ok(samples)
}

fn at_path(e: Error, path: &Path) -> Error {
    match e {
        Error::MalformedInput { detail, .. } => Error::MalformedInput {
            path: path.to_path_buf(),
            detail,
        },
        other => other,
    }
}

/// Parameters of the synthetic labeled dataset generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub n_subjects: u32,
    pub reps_per_activity: u32,
    pub n_activities: u32,
    pub noise_level: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_subjects: 4,
            reps_per_activity: 10,
            n_activities: 5,
            noise_level: 0.05,
            seed: 0,
        }
    }
}

/// Doppler-bin range carrying activity `k`'s energy (zero-based).
fn activity_band(k: usize, n_activities: usize) -> (usize, usize) {
    let start = k * DOPPLER_BINS / n_activities;
    let end = (k + 1) * DOPPLER_BINS / n_activities;
    (start, end)
}

/// Temporal modulation period for activity `k` (zero-based).
fn activity_period(k: usize) -> f64 {
    4.0 + 2.0 * k as f64
}

/// Generates a deterministic labeled dataset.
///
/// Activity `k` concentrates energy in Doppler band `k` with a class-specific
/// temporal modulation period; each subject applies a fixed amplitude gain
/// drawn uniformly from [0.8, 1.2], each sample a random modulation phase.
/// Additive uniform noise of half-width `noise_level` is applied and the
/// result clipped to [0, 1]. The output is a pure function of the config.
pub fn generate_synthetic(cfg: &SynthConfig) -> Result<Dataset> {
    if cfg.n_activities == 0 {
        return Err(Error::InvalidArgument("n_activities must be >= 1".into()));
    }
    if cfg.n_activities as usize > DOPPLER_BINS {
        return Err(Error::InvalidArgument(format!(
            "n_activities must be <= {DOPPLER_BINS} so each class gets a Doppler band"
        )));
    }
    if cfg.reps_per_activity == 0 {
        return Err(Error::InvalidArgument("reps_per_activity must be >= 1".into()));
    }
    if cfg.n_subjects == 0 {
        return Err(Error::InvalidArgument("n_subjects must be >= 1".into()));
    }
    if !cfg.noise_level.is_finite() || cfg.noise_level < 0.0 {
        return Err(Error::InvalidArgument(
            "noise_level must be finite and >= 0".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let gains: Vec<f64> = (0..cfg.n_subjects)
        .map(|_| rng.random_range(0.8..1.2))
        .collect();

    let a = cfg.n_activities as usize;
    let mut samples = Vec::new();
    for subject in 1..=cfg.n_subjects {
        let gain = gains[(subject - 1) as usize];
        for activity in 1..=cfg.n_activities {
            let k = (activity - 1) as usize;
            let (band_lo, band_hi) = activity_band(k, a);
            let period = activity_period(k);
            for _ in 0..cfg.reps_per_activity {
                let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let mut values = vec![0.0f64; SAMPLE_LEN];
                for d in 0..DIRECTIONS {
                    let dir_gain = if d == 0 { 1.0 } else { 0.8 };
                    for b in 0..DOPPLER_BINS {
                        let in_band = b >= band_lo && b < band_hi;
                        for t in 0..TIME_STEPS {
                            let base = if in_band {
                                let mod_t = (std::f64::consts::TAU * t as f64 / period
                                    + phase)
                                    .cos();
                                gain * dir_gain * (0.5 + 0.3 * mod_t)
                            } else {
                                0.05
                            };
                            let noisy = if cfg.noise_level > 0.0 {
                                base + rng.random_range(
                                    -cfg.noise_level..cfg.noise_level,
                                )
                            } else {
                                base
                            };
                            values[d * DOPPLER_BINS * TIME_STEPS + b * TIME_STEPS + t] =
                                noisy.clamp(0.0, 1.0);
                        }
                    }
                }
                samples.push(SpectrogramSample::new(values, subject, Some(activity))?);
            }
        }
    }
    Dataset::new(samples)
}
