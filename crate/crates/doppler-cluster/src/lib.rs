//! Unsupervised activity clustering for micro-Doppler radar spectrograms.
//!
//! The pipeline mirrors a typical unlabeled radar workflow: load (or
//! synthesize) normalized Doppler spectrogram samples, estimate the number of
//! clusters with internal validity indices, extract compact features (local
//! 2D DCT coefficients, local entropy, PCA or 2DPCA projections), partition
//! with K-Means or K-Medoids, and evaluate with leave-one-subject-out cross
//! validation using best-match label alignment. Feature matrices can also be
//! projected to 2-D with t-SNE, metric MDS, or LLE for visualization export.
//!
//! The `cli` module wires everything into the `doppler-cluster` binary; every
//! other module is usable as a library on its own.

pub mod cli;
pub mod clustering;
pub mod config;
pub mod data;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod linalg;
pub mod manifold;
pub mod seeds;
pub mod validity;

pub use error::{Error, Result};
