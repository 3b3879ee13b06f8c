//! 2-D embeddings of feature matrices for visualization export.

pub mod lle;
pub mod mds;
pub mod tsne;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use lle::{lle, lle_weights, reconstruction_error, LleConfig};
pub use mds::mds;
pub use tsne::{tsne, TsneConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManifoldMethod {
    Tsne,
    Mds,
    Lle,
}

impl ManifoldMethod {
    pub const ALL: [ManifoldMethod; 3] =
        [ManifoldMethod::Tsne, ManifoldMethod::Mds, ManifoldMethod::Lle];

    pub fn name(self) -> &'static str {
        match self {
            ManifoldMethod::Tsne => "tsne",
            ManifoldMethod::Mds => "mds",
            ManifoldMethod::Lle => "lle",
        }
    }
}

impl std::fmt::Display for ManifoldMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl std::str::FromStr for ManifoldMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ManifoldMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown embedding method {s:?}; valid methods: tsne, mds, lle"
                ))
            })
    }
}

/// A fitted 2-D (or d-D for LLE) embedding with its optimizer provenance.
#[derive(Debug, Clone)]
pub struct Embedding {
    /// n x 2 coordinates.
    pub coords: Array2<f64>,
    pub method: ManifoldMethod,
    /// KL divergence for t-SNE, stress for MDS, embedded reconstruction cost
    /// for LLE.
    pub final_loss: f64,
    pub iterations: usize,
    pub seed: u64,
    /// Loss after every optimizer step (single entry for spectral methods).
    pub loss_trace: Vec<f64>,
}

impl Embedding {
    /// Writes `sample,x,y[,label]` rows ready for external plotting.
    pub fn write_csv(&self, path: &std::path::Path, labels: Option<&[u32]>) -> Result<()> {
        if let Some(l) = labels {
            if l.len() != self.coords.nrows() {
                return Err(Error::DimensionMismatch {
                    expected: self.coords.nrows(),
                    got: l.len(),
                });
            }
        }
        let mut w = csv::Writer::from_path(path)?;
        if labels.is_some() {
            w.write_record(["sample", "x", "y", "label"])?;
        } else {
            w.write_record(["sample", "x", "y"])?;
        }
        for i in 0..self.coords.nrows() {
            let mut rec = vec![
                i.to_string(),
                format!("{}", self.coords[[i, 0]]),
                format!("{}", self.coords[[i, 1]]),
            ];
            if let Some(l) = labels {
                rec.push(l[i].to_string());
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}
