//! JSON file formats for states and spectra.
//!
//! State: `{"dim": N, "amplitudes": [[[re, im], ...], ...]}`, rows indexed by
//! `j`, columns by `k`. Spectrum: `{"dim": N, "lambdas": [...]}` holding the
//! Schmidt amplitudes `λ_i` (not the probabilities).

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::state::{PureBipartiteState, SchmidtSpectrum};
use crate::error::{NlmError, Result};
use crate::linalg::CMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dim: usize,
    pub amplitudes: Vec<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn from_state(state: &PureBipartiteState<f64>) -> Self {
        let n = state.dim();
        let amplitudes = (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| {
                        let z = state.amplitude(j, k);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        Self { dim: n, amplitudes }
    }

    pub fn to_state(&self) -> Result<PureBipartiteState<f64>> {
        let n = self.dim;
        if self.amplitudes.len() != n {
            return Err(NlmError::ShapeMismatch {
                dim: n,
                rows: self.amplitudes.len(),
                cols: self.amplitudes.first().map_or(0, Vec::len),
            });
        }
        if let Some(row) = self.amplitudes.iter().find(|r| r.len() != n) {
            return Err(NlmError::ShapeMismatch {
                dim: n,
                rows: n,
                cols: row.len(),
            });
        }
        let x = CMatrix::from_fn(n, n, |j, k| {
            let [re, im] = self.amplitudes[j][k];
            Complex::new(re, im)
        });
        PureBipartiteState::new(x)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFile {
    pub dim: usize,
    pub lambdas: Vec<f64>,
}

impl SpectrumFile {
    pub fn from_spectrum(spec: &SchmidtSpectrum<f64>) -> Self {
        Self {
            dim: spec.dim(),
            lambdas: spec.lambdas().to_vec(),
        }
    }

    /// The coefficients in file order, checked against `dim`.
    pub fn ordered_lambdas(&self) -> Result<&[f64]> {
        if self.lambdas.len() != self.dim {
            return Err(NlmError::ShapeMismatch {
                dim: self.dim,
                rows: self.lambdas.len(),
                cols: 1,
            });
        }
        Ok(&self.lambdas)
    }

    pub fn to_spectrum(&self) -> Result<SchmidtSpectrum<f64>> {
        SchmidtSpectrum::from_unsorted(self.ordered_lambdas()?.to_vec())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}
