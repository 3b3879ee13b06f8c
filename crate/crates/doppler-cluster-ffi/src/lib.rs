//! C ABI for the doppler-cluster pipeline.
//!
//! All entry points follow the same conventions:
//!
//! - objects cross the boundary as opaque handles (`DopcDataset`,
//!   `DopcFeatureMatrix`, `DopcClusterModel`) created and destroyed by this
//!   library; never free them with anything but the matching `*_free`,
//! - fallible calls return a [`DopcStatus`]; on failure
//!   [`dopc_last_error_message`] holds a human-readable description for the
//!   calling thread until the next failing call,
//! - strings returned through `char **` out-parameters are owned by the
//!   caller and must be released with [`dopc_string_free`],
//! - structured results (sweep reports, experiment reports, models) are
//!   returned as JSON documents, matching the CLI's file formats.
//!
//! The header `include/doppler_cluster.h` is generated by cbindgen at build
//! time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ndarray::Array2;

use doppler_cluster::clustering::{self, ClusterMethod, ClustererConfig};
use doppler_cluster::data::{self, DataLayout, Dataset, SynthConfig};
use doppler_cluster::error::Error;
use doppler_cluster::evaluation;
use doppler_cluster::features::{
    fit_extractor, ExtractorConfig, ExtractorKind, FeatureMatrix, FeatureProvenance,
    SelectionConfig,
};
use doppler_cluster::manifold::{self, LleConfig, ManifoldMethod, TsneConfig};
use doppler_cluster::validity::{self, SweepConfig};

/// Result code of a fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DopcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    IoError = 4,
    ComputeError = 5,
    Panic = 6,
}

/// An owned dataset handle.
pub struct DopcDataset(Dataset);

/// An owned feature-matrix handle.
pub struct DopcFeatureMatrix(FeatureMatrix);

/// An owned fitted-clusterer handle.
pub struct DopcClusterModel(clustering::ClusterModel);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(sanitized).expect("nul bytes stripped");
    });
}

fn status_of(e: &Error) -> DopcStatus {
    match e {
        Error::Io(_) | Error::Csv(_) | Error::MalformedInput { .. } => DopcStatus::IoError,
        Error::Json(_) => DopcStatus::ComputeError,
        Error::RowWidth { .. }
        | Error::ValueOutOfRange { .. }
        | Error::NonFinite { .. }
        | Error::WrongLength { .. }
        | Error::InvalidArgument(_)
        | Error::DimensionMismatch { .. }
        | Error::KTooLarge { .. }
        | Error::SingleCluster(_)
        | Error::Config(_) => DopcStatus::InvalidArgument,
        _ => DopcStatus::ComputeError,
    }
}

fn fail(e: &Error) -> DopcStatus {
    set_error(&e.to_string());
    status_of(e)
}

/// Runs `f` with panics converted to `DopcStatus::Panic`.
fn guarded(f: impl FnOnce() -> DopcStatus) -> DopcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            DopcStatus::Panic
        }
    }
}

unsafe fn cstr<'a>(ptr: *const c_char) -> Result<&'a str, DopcStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(DopcStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        DopcStatus::InvalidUtf8
    })
}

unsafe fn hand_out<T>(out: *mut *mut T, value: T) -> DopcStatus {
    if out.is_null() {
        set_error("null output pointer");
        return DopcStatus::NullPointer;
    }
    *out = Box::into_raw(Box::new(value));
    DopcStatus::Ok
}

unsafe fn hand_out_string(out: *mut *mut c_char, value: String) -> DopcStatus {
    if out.is_null() {
        set_error("null output pointer");
        return DopcStatus::NullPointer;
    }
    match CString::new(value) {
        Ok(s) => {
            *out = s.into_raw();
            DopcStatus::Ok
        }
        Err(_) => {
            set_error("result contained an interior nul byte");
            DopcStatus::ComputeError
        }
    }
}

macro_rules! non_null {
    ($ptr:expr) => {
        match unsafe { $ptr.as_ref() } {
            Some(r) => r,
            None => {
                set_error("null handle");
                return DopcStatus::NullPointer;
            }
        }
    };
}

/// Version of the library as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dopc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the last failure on this thread (empty string if none). The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dopc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Frees a string produced by this library.
///
/// # Safety
/// `s` must be a pointer previously returned through a `char **` out
/// parameter of this library (or NULL), not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dopc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

/// Loads a dataset CSV. `layout` is `"vector6400"` or `"cube"`.
///
/// # Safety
/// `path` and `layout` must be valid NUL-terminated strings; `out` must be a
/// valid pointer. On success `*out` owns the dataset and must be released
/// with [`dopc_dataset_free`].
#[no_mangle]
pub unsafe extern "C" fn dopc_dataset_load(
    path: *const c_char,
    layout: *const c_char,
    out: *mut *mut DopcDataset,
) -> DopcStatus {
    guarded(|| {
        let path = match cstr(path) {
            Ok(s) => s,
            Err(st) => return st,
        };
        let layout = match cstr(layout) {
            Ok(s) => s,
            Err(st) => return st,
        };
        let layout: DataLayout = match layout.parse() {
            Ok(l) => l,
            Err(e) => return fail(&e),
        };
        match data::load_dataset(std::path::Path::new(path), layout) {
            Ok(ds) => hand_out(out, DopcDataset(ds)),
            Err(e) => fail(&e),
        }
    })
}

/// Generates the deterministic synthetic dataset.
///
/// # Safety
/// `out` must be a valid pointer; release the handle with
/// [`dopc_dataset_free`].
#[no_mangle]
pub unsafe extern "C" fn dopc_dataset_synthetic(
    subjects: u32,
    reps: u32,
    activities: u32,
    noise: f64,
    seed: u64,
    out: *mut *mut DopcDataset,
) -> DopcStatus {
    guarded(|| {
        let cfg = SynthConfig {
            n_subjects: subjects,
            reps_per_activity: reps,
            n_activities: activities,
            noise_level: noise,
            seed,
        };
        match data::generate_synthetic(&cfg) {
            Ok(ds) => hand_out(out, DopcDataset(ds)),
            Err(e) => fail(&e),
        }
    })
}

/// Number of samples, or 0 for a null handle.
#[no_mangle]
pub extern "C" fn dopc_dataset_len(ds: *const DopcDataset) -> usize {
    unsafe { ds.as_ref() }.map_or(0, |d| d.0.len())
}

/// Number of distinct subjects, or 0 for a null handle.
#[no_mangle]
pub extern "C" fn dopc_dataset_subjects(ds: *const DopcDataset) -> usize {
    unsafe { ds.as_ref() }.map_or(0, |d| d.0.n_subjects())
}

/// Copies the 1-based activity labels into `out` (length `len >= sample
/// count`). Fails if any sample is unlabeled.
///
/// # Safety
/// `out` must point to at least `len` writable u32 values.
#[no_mangle]
pub unsafe extern "C" fn dopc_dataset_labels(
    ds: *const DopcDataset,
    out: *mut u32,
    len: usize,
) -> DopcStatus {
    guarded(|| {
        let ds = non_null!(ds);
        if out.is_null() {
            set_error("null output pointer");
            return DopcStatus::NullPointer;
        }
        let Some(labels) = ds.0.labels() else {
            set_error("dataset has unlabeled samples");
            return DopcStatus::InvalidArgument;
        };
        if len < labels.len() {
            set_error("output buffer too small");
            return DopcStatus::InvalidArgument;
        }
        for (i, l) in labels.into_iter().enumerate() {
            *out.add(i) = l;
        }
        DopcStatus::Ok
    })
}

/// Writes the dataset as CSV in the given layout.
///
/// # Safety
/// `path` and `layout` must be valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn dopc_dataset_save_csv(
    ds: *const DopcDataset,
    path: *const c_char,
    layout: *const c_char,
) -> DopcStatus {
    guarded(|| {
        let ds = non_null!(ds);
        let path = match cstr(path) {
            Ok(s) => s,
            Err(st) => return st,
        };
        let layout: DataLayout = match cstr(layout).and_then(|s| {
            s.parse().map_err(|e: Error| {
                set_error(&e.to_string());
                DopcStatus::InvalidArgument
            })
        }) {
            Ok(l) => l,
            Err(st) => return st,
        };
        match ds.0.save_csv(std::path::Path::new(path), layout) {
            Ok(()) => DopcStatus::Ok,
            Err(e) => fail(&e),
        }
    })
}

/// Releases a dataset handle.
///
/// # Safety
/// `ds` must be a handle from this library (or NULL), not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dopc_dataset_free(ds: *mut DopcDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

// ---------------------------------------------------------------------------
// Features
// ---------------------------------------------------------------------------

/// Fits an extractor on the whole dataset and transforms it. `extractor` is
/// one of `raw`, `local_dct`, `raw_dct`, `entropy`, `pca`, `pca2d`; `k` is
/// the cluster count driving the Dunn-scored patch/strategy searches.
///
/// # Safety
/// `extractor` must be a valid NUL-terminated string; `out` must be a valid
/// pointer. Release the handle with [`dopc_features_free`].
#[no_mangle]
pub unsafe extern "C" fn dopc_extract_features(
    ds: *const DopcDataset,
    extractor: *const c_char,
    k: usize,
    seed: u64,
    out: *mut *mut DopcFeatureMatrix,
) -> DopcStatus {
    guarded(|| {
        let ds = non_null!(ds);
        let name = match cstr(extractor) {
            Ok(s) => s,
            Err(st) => return st,
        };
        if name == "raw" {
            let n = ds.0.len();
            let fm = FeatureMatrix {
                data: ds.0.to_matrix(),
                columns: (0..data::SAMPLE_LEN).map(|i| format!("f{i}")).collect(),
                provenance: FeatureProvenance {
                    extractor: "raw".into(),
                    detail: serde_json::json!({ "samples": n }),
                    seed,
                },
            };
            return hand_out(out, DopcFeatureMatrix(fm));
        }
        let kind: ExtractorKind = match name.parse() {
            Ok(k) => k,
            Err(e) => return fail(&e),
        };
        let images = ds.0.images();
        let fitted = match fit_extractor(
            &ExtractorConfig::new(kind),
            &images,
            &SelectionConfig::new(k),
        ) {
            Ok(f) => f,
            Err(e) => return fail(&e),
        };
        match fitted.transform(&images, seed) {
            Ok(fm) => hand_out(out, DopcFeatureMatrix(fm)),
            Err(e) => fail(&e),
        }
    })
}

/// Number of feature rows (samples), or 0 for a null handle.
#[no_mangle]
pub extern "C" fn dopc_features_rows(fm: *const DopcFeatureMatrix) -> usize {
    unsafe { fm.as_ref() }.map_or(0, |f| f.0.data.nrows())
}

/// Number of feature columns, or 0 for a null handle.
#[no_mangle]
pub extern "C" fn dopc_features_cols(fm: *const DopcFeatureMatrix) -> usize {
    unsafe { fm.as_ref() }.map_or(0, |f| f.0.data.ncols())
}

/// Copies the feature matrix row-major into `out` (length `len >=
/// rows * cols`).
///
/// # Safety
/// `out` must point to at least `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn dopc_features_copy(
    fm: *const DopcFeatureMatrix,
    out: *mut f64,
    len: usize,
) -> DopcStatus {
    guarded(|| {
        let fm = non_null!(fm);
        if out.is_null() {
            set_error("null output pointer");
            return DopcStatus::NullPointer;
        }
        let need = fm.0.data.nrows() * fm.0.data.ncols();
        if len < need {
            set_error("output buffer too small");
            return DopcStatus::InvalidArgument;
        }
        for (i, v) in fm.0.data.iter().enumerate() {
            *out.add(i) = *v;
        }
        DopcStatus::Ok
    })
}

/// JSON sidecar describing the extractor, plan/strategy, and seed.
///
/// # Safety
/// `out` must be a valid pointer; free the string with
/// [`dopc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn dopc_features_provenance_json(
    fm: *const DopcFeatureMatrix,
    out: *mut *mut c_char,
) -> DopcStatus {
    guarded(|| {
        let fm = non_null!(fm);
        match serde_json::to_string_pretty(&fm.0.provenance) {
            Ok(json) => hand_out_string(out, json),
            Err(e) => {
                set_error(&e.to_string());
                DopcStatus::ComputeError
            }
        }
    })
}

/// Releases a feature-matrix handle.
///
/// # Safety
/// `fm` must be a handle from this library (or NULL), not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dopc_features_free(fm: *mut DopcFeatureMatrix) {
    if !fm.is_null() {
        drop(Box::from_raw(fm));
    }
}

// ---------------------------------------------------------------------------
// Clustering
// ---------------------------------------------------------------------------

/// Fits K-Means (`method = "kmeans"`) or K-Medoids (`"kmedoids"`) on the
/// feature matrix with the best of `restarts` seeded starts.
///
/// # Safety
/// `method` must be a valid NUL-terminated string; `out` must be a valid
/// pointer. Release the handle with [`dopc_model_free`].
#[no_mangle]
pub unsafe extern "C" fn dopc_cluster_fit(
    fm: *const DopcFeatureMatrix,
    method: *const c_char,
    k: usize,
    seed: u64,
    restarts: usize,
    out: *mut *mut DopcClusterModel,
) -> DopcStatus {
    guarded(|| {
        let fm = non_null!(fm);
        let method: ClusterMethod = match cstr(method) {
            Ok(s) => match s.parse() {
                Ok(m) => m,
                Err(e) => return fail(&e),
            },
            Err(st) => return st,
        };
        let cfg = ClustererConfig { restarts, ..ClustererConfig::new(method, k, seed) };
        match cfg.fit(&fm.0.data.view()) {
            Ok(model) => hand_out(out, DopcClusterModel(model)),
            Err(e) => fail(&e),
        }
    })
}

/// Final objective value (sum of squared distances to assigned centers).
#[no_mangle]
pub extern "C" fn dopc_model_objective(model: *const DopcClusterModel) -> f64 {
    unsafe { model.as_ref() }.map_or(f64::NAN, |m| m.0.objective)
}

/// Number of clusters, or 0 for a null handle.
#[no_mangle]
pub extern "C" fn dopc_model_k(model: *const DopcClusterModel) -> usize {
    unsafe { model.as_ref() }.map_or(0, |m| m.0.k())
}

/// Labels each feature row with its nearest center; `out` needs `len >=
/// rows` entries.
///
/// # Safety
/// `out` must point to at least `len` writable u32 values.
#[no_mangle]
pub unsafe extern "C" fn dopc_model_assign(
    model: *const DopcClusterModel,
    fm: *const DopcFeatureMatrix,
    out: *mut u32,
    len: usize,
) -> DopcStatus {
    guarded(|| {
        let model = non_null!(model);
        let fm = non_null!(fm);
        if out.is_null() {
            set_error("null output pointer");
            return DopcStatus::NullPointer;
        }
        if len < fm.0.data.nrows() {
            set_error("output buffer too small");
            return DopcStatus::InvalidArgument;
        }
        match clustering::assign(&model.0, &fm.0.data.view()) {
            Ok(labels) => {
                for (i, l) in labels.into_iter().enumerate() {
                    *out.add(i) = l as u32;
                }
                DopcStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Serializes the model (method, centers, medoid indices, seed, objective)
/// to JSON.
///
/// # Safety
/// `out` must be a valid pointer; free the string with
/// [`dopc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn dopc_model_to_json(
    model: *const DopcClusterModel,
    out: *mut *mut c_char,
) -> DopcStatus {
    guarded(|| {
        let model = non_null!(model);
        match model.0.to_json() {
            Ok(json) => hand_out_string(out, json),
            Err(e) => fail(&e),
        }
    })
}

/// Releases a model handle.
///
/// # Safety
/// `model` must be a handle from this library (or NULL), not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dopc_model_free(model: *mut DopcClusterModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

// ---------------------------------------------------------------------------
// Validity, evaluation, manifold
// ---------------------------------------------------------------------------

/// Runs the K-sweep over `ks` and returns the report (metric table, votes,
/// recommended K) as JSON.
///
/// # Safety
/// `ks` must point to `ks_len` readable values; `out` must be a valid
/// pointer. Free the string with [`dopc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn dopc_sweep_k(
    fm: *const DopcFeatureMatrix,
    ks: *const usize,
    ks_len: usize,
    seed: u64,
    out: *mut *mut c_char,
) -> DopcStatus {
    guarded(|| {
        let fm = non_null!(fm);
        if ks.is_null() {
            set_error("null candidate-k pointer");
            return DopcStatus::NullPointer;
        }
        let ks: Vec<usize> = (0..ks_len).map(|i| *ks.add(i)).collect();
        let cfg = SweepConfig { candidate_ks: ks, seed, ..SweepConfig::default() };
        match validity::sweep_k(&fm.0.data.view(), &cfg) {
            Ok(report) => match serde_json::to_string_pretty(&report) {
                Ok(json) => hand_out_string(out, json),
                Err(e) => {
                    set_error(&e.to_string());
                    DopcStatus::ComputeError
                }
            },
            Err(e) => fail(&e),
        }
    })
}

/// Runs the full leave-one-subject-out experiment for one
/// (extractor, clusterer) pair and returns the report as JSON.
///
/// # Safety
/// `extractor` and `clusterer` must be valid NUL-terminated strings; `out`
/// must be a valid pointer. Free the string with [`dopc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn dopc_run_experiment(
    ds: *const DopcDataset,
    extractor: *const c_char,
    clusterer: *const c_char,
    k: usize,
    seed: u64,
    out: *mut *mut c_char,
) -> DopcStatus {
    guarded(|| {
        let ds = non_null!(ds);
        let kind: ExtractorKind = match cstr(extractor) {
            Ok(s) => match s.parse() {
                Ok(k) => k,
                Err(e) => return fail(&e),
            },
            Err(st) => return st,
        };
        let method: ClusterMethod = match cstr(clusterer) {
            Ok(s) => match s.parse() {
                Ok(m) => m,
                Err(e) => return fail(&e),
            },
            Err(st) => return st,
        };
        let report = evaluation::run_experiment(
            &ds.0,
            &ExtractorConfig::new(kind),
            &ClustererConfig::new(method, k, 0),
            seed,
        );
        match report {
            Ok(r) => match serde_json::to_string_pretty(&r) {
                Ok(json) => hand_out_string(out, json),
                Err(e) => {
                    set_error(&e.to_string());
                    DopcStatus::ComputeError
                }
            },
            Err(e) => fail(&e),
        }
    })
}

/// Embeds the feature matrix into 2-D with `method` (`tsne`, `mds`, `lle`)
/// and writes the coordinates row-major into `out_xy` (`len >= 2 * rows`).
///
/// # Safety
/// `method` must be a valid NUL-terminated string; `out_xy` must point to at
/// least `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn dopc_embed(
    fm: *const DopcFeatureMatrix,
    method: *const c_char,
    seed: u64,
    out_xy: *mut f64,
    len: usize,
) -> DopcStatus {
    guarded(|| {
        let fm = non_null!(fm);
        let method: ManifoldMethod = match cstr(method) {
            Ok(s) => match s.parse() {
                Ok(m) => m,
                Err(e) => return fail(&e),
            },
            Err(st) => return st,
        };
        if out_xy.is_null() {
            set_error("null output pointer");
            return DopcStatus::NullPointer;
        }
        let z: &Array2<f64> = &fm.0.data;
        if len < 2 * z.nrows() {
            set_error("output buffer too small");
            return DopcStatus::InvalidArgument;
        }
        let result = match method {
            ManifoldMethod::Tsne => {
                manifold::tsne(&z.view(), &TsneConfig { seed, ..TsneConfig::default() })
            }
            ManifoldMethod::Mds => manifold::mds(&z.view(), 1000, seed),
            ManifoldMethod::Lle => manifold::lle(&z.view(), &LleConfig::default()),
        };
        match result {
            Ok(embedding) => {
                for i in 0..embedding.coords.nrows() {
                    *out_xy.add(2 * i) = embedding.coords[[i, 0]];
                    *out_xy.add(2 * i + 1) = embedding.coords[[i, 1]];
                }
                DopcStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}
