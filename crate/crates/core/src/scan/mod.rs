//! Seeded formula-versus-optimiser scans and the data files derived from them.

mod bands;
mod grid;
mod search;
mod stats;

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::{nlm_schmidt, Method, CLOSED_FORM_DIMENSIONS};
use crate::error::{NlmError, Result};
use crate::lu_opt::{minimize, OptimizerConfig};
use crate::qudit_core::PureBipartiteState;
use crate::scalar::Real;

pub use bands::{n4_band_slices, write_band_csv, BandPoint, BandSlice, DEFAULT_BAND_CENTERS, DEFAULT_BAND_HALFWIDTH};
pub use grid::{
    grid_symmetry_defect, ququint_slice_grid, simplex_grid_qutrit, simplex_xy, write_grid_csv, GridPoint,
};
pub use search::{max_on_qutrit_simplex, max_on_ququint_slice, SimplexMaximum};
pub use stats::{residual_stats, ResidualStats, DEFAULT_THRESHOLD};

/// SplitMix64 finaliser.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sample `index` under master seed `master`.
#[inline]
pub fn sample_seed(master: u64, index: u64) -> u64 {
    master ^ splitmix64(index)
}

/// `|z_i| / ‖z‖` for i.i.d. standard normals, i.e. uniform on the positive
/// orthant of the unit sphere. Unsorted.
pub fn sample_spectrum<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Vec<T>> {
    if dim < 2 {
        return Err(NlmError::InvalidDimension(dim));
    }
    loop {
        let z: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).map(f64::abs).collect();
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            return Ok(z.into_iter().map(|v| T::lit(v / norm)).collect());
        }
    }
}

/// Sample counts and start counts for quick runs.
pub fn desk_scale(dim: usize) -> Option<(usize, usize)> {
    match dim {
        2 => Some((50, 20)),
        3 => Some((100, 50)),
        4 => Some((200, 200)),
        5 => Some((20, 100)),
        _ => None,
    }
}

/// Start counts of the full protocol.
pub fn full_scale_starts(dim: usize) -> Option<usize> {
    match dim {
        2 => Some(50),
        3 => Some(50),
        4 => Some(200),
        5 => Some(500),
        _ => None,
    }
}

pub const FULL_SCALE_SAMPLES: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanRecord {
    pub dim: usize,
    /// As sampled, not sorted.
    pub lambdas: Vec<f64>,
    pub m_formula: f64,
    /// NaN when the optimiser failed on this sample.
    pub m_numerical: f64,
    pub residual: f64,
    pub n_starts: usize,
    pub max_iter: usize,
    pub converged: f64,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub dim: usize,
    pub samples: usize,
    /// `optimizer.seed` is the master seed.
    pub optimizer: OptimizerConfig<f64>,
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if !CLOSED_FORM_DIMENSIONS.contains(&self.dim) {
            return Err(NlmError::UnsupportedDimension(self.dim));
        }
        self.optimizer.validate()
    }
}

/// One sample of a scan; depends only on `(config, index)`.
pub fn scan_sample(config: &ScanConfig, index: usize) -> Result<ScanRecord> {
    let seed = sample_seed(config.optimizer.seed, index as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambdas: Vec<f64> = sample_spectrum(config.dim, &mut rng)?;
    let m_formula = nlm_schmidt(&lambdas, Method::ClosedForm)?.value;
    let state = PureBipartiteState::aligned(&lambdas)?;
    let opt = OptimizerConfig {
        seed,
        ..config.optimizer.clone()
    };
    let (m_numerical, converged) = match minimize(&state, &opt) {
        Ok(r) => (r.min_value, r.converged_fraction()),
        Err(e) => {
            log::warn!("sample {index}: optimiser failed: {e}");
            (f64::NAN, 0.0)
        }
    };
    Ok(ScanRecord {
        dim: config.dim,
        lambdas,
        m_formula,
        m_numerical,
        residual: m_formula - m_numerical,
        n_starts: opt.n_starts,
        max_iter: opt.max_iter,
        converged,
        seed,
    })
}

/// Records in sample order.
pub fn run_scan(config: &ScanConfig) -> Result<Vec<ScanRecord>> {
    config.validate()?;
    (0..config.samples)
        .into_par_iter()
        .map(|i| {
            let r = scan_sample(config, i);
            log::debug!("sample {i} done");
            r
        })
        .collect()
}

fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn scan_header(dim: usize) -> Vec<String> {
    let mut h = vec!["dim".to_string()];
    h.extend((0..dim).map(|i| format!("lambda_{i}")));
    h.extend(
        ["m_formula", "m_numerical", "residual", "n_starts", "max_iter", "converged_fraction", "seed"]
            .map(String::from),
    );
    h
}

/// Writes the scan CSV. All records must share one dimension.
pub fn write_scan_csv<W: Write>(records: &[ScanRecord], out: W) -> Result<()> {
    let dim = records.first().map_or(0, |r| r.dim);
    if let Some(r) = records.iter().find(|r| r.dim != dim || r.lambdas.len() != dim) {
        return Err(NlmError::MalformedScan(format!("mixed dimensions {dim} and {}", r.dim)));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(scan_header(dim))?;
    for r in records {
        let mut row = vec![r.dim.to_string()];
        row.extend(r.lambdas.iter().map(|&l| fmt_real(l)));
        row.extend([r.m_formula, r.m_numerical, r.residual].map(fmt_real));
        row.push(r.n_starts.to_string());
        row.push(r.max_iter.to_string());
        row.push(fmt_real(r.converged));
        row.push(r.seed.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn scan_csv_string(records: &[ScanRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_scan_csv(records, &mut buf)?;
    String::from_utf8(buf).map_err(|e| NlmError::MalformedScan(e.to_string()))
}

pub fn read_scan_csv<R: Read>(input: R) -> Result<Vec<ScanRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?.clone();
    let dim = header.iter().filter(|h| h.starts_with("lambda_")).count();
    let expected = scan_header(dim);
    if header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(NlmError::MalformedScan(format!("unexpected header {:?}", header)));
    }
    let bad = |line: usize, what: &str| NlmError::MalformedScan(format!("row {line}: bad {what}"));
    let mut out = Vec::new();
    for (line, row) in rd.records().enumerate() {
        let row = row?;
        let real = |i: usize, what: &str| -> Result<f64> { row[i].parse().map_err(|_| bad(line, what)) };
        let record = ScanRecord {
            dim: row[0].parse().map_err(|_| bad(line, "dim"))?,
            lambdas: (0..dim).map(|i| real(1 + i, "lambda")).collect::<Result<_>>()?,
            m_formula: real(dim + 1, "m_formula")?,
            m_numerical: real(dim + 2, "m_numerical")?,
            residual: real(dim + 3, "residual")?,
            n_starts: row[dim + 4].parse().map_err(|_| bad(line, "n_starts"))?,
            max_iter: row[dim + 5].parse().map_err(|_| bad(line, "max_iter"))?,
            converged: real(dim + 6, "converged_fraction")?,
            seed: row[dim + 7].parse().map_err(|_| bad(line, "seed"))?,
        };
        if record.dim != dim {
            return Err(bad(line, "dim"));
        }
        out.push(record);
    }
    Ok(out)
}

/// Checks record-level invariants: valid spectrum, `residual = mFormula −
/// mNumerical`, and that `mFormula` is reproducible from the lambdas on every
/// `stride`-th row.
pub fn verify_records(records: &[ScanRecord], stride: usize) -> Result<()> {
    for (i, r) in records.iter().enumerate() {
        let norm: f64 = r.lambdas.iter().map(|l| l * l).sum();
        if (norm - 1.0).abs() > 1e-12 || r.lambdas.iter().any(|&l| !(l >= 0.0)) {
            return Err(NlmError::InvariantViolation(format!("row {i}: invalid spectrum")));
        }
        if r.m_numerical.is_finite() && (r.residual - (r.m_formula - r.m_numerical)).abs() > 1e-12 {
            return Err(NlmError::InvariantViolation(format!("row {i}: residual mismatch")));
        }
        if !(0.0..=1.0).contains(&r.converged) {
            return Err(NlmError::InvariantViolation(format!("row {i}: converged fraction out of range")));
        }
        if stride > 0 && i % stride == 0 {
            let m = nlm_schmidt(&r.lambdas, Method::ClosedForm)?.value;
            if (m - r.m_formula).abs() > 1e-12 {
                return Err(NlmError::InvariantViolation(format!("row {i}: m_formula not reproducible")));
            }
        }
    }
    Ok(())
}
