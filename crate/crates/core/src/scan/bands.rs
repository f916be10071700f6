//! Projections of an N = 4 scan onto the `(λ₀², λ₁², λ₂²)` triangle, one
//! band of `λ₃²` at a time.

use std::io::Write;

use super::grid::simplex_xy;
use super::ScanRecord;
use crate::error::{NlmError, Result};

pub const DEFAULT_BAND_CENTERS: [f64; 4] = [0.0, 0.2, 0.4, 0.6];
pub const DEFAULT_BAND_HALFWIDTH: f64 = 0.02;

#[derive(Clone, Debug, PartialEq)]
pub struct BandPoint {
    pub x: f64,
    pub y: f64,
    /// `λ_i² / (1 − λ₃²)` for `i = 0, 1, 2`.
    pub probs: [f64; 3],
    pub lambda3_sq: f64,
    pub m_formula: f64,
    pub m_numerical: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BandSlice {
    pub center: f64,
    pub halfwidth: f64,
    pub points: Vec<BandPoint>,
}

/// Keeps records with `|λ₃² − center| ≤ halfwidth`, using `λ₃` as stored.
pub fn n4_band_slices(records: &[ScanRecord], centers: &[f64], halfwidth: f64) -> Result<Vec<BandSlice>> {
    if !(halfwidth >= 0.0) {
        return Err(NlmError::InvalidConfig(format!("halfwidth must be non-negative, got {halfwidth}")));
    }
    if let Some(r) = records.iter().find(|r| r.dim != 4 || r.lambdas.len() != 4) {
        return Err(NlmError::WrongDimension {
            expected: 4,
            got: r.lambdas.len(),
        });
    }
    let slices = centers
        .iter()
        .map(|&center| {
            let points: Vec<BandPoint> = records
                .iter()
                .filter_map(|r| {
                    let l3 = r.lambdas[3] * r.lambdas[3];
                    if (l3 - center).abs() > halfwidth || l3 >= 1.0 {
                        return None;
                    }
                    let scale = 1.0 - l3;
                    let probs = [0, 1, 2].map(|i| r.lambdas[i] * r.lambdas[i] / scale);
                    let (x, y) = simplex_xy(probs[1], probs[2]);
                    Some(BandPoint {
                        x,
                        y,
                        probs,
                        lambda3_sq: l3,
                        m_formula: r.m_formula,
                        m_numerical: r.m_numerical,
                        residual: r.residual,
                    })
                })
                .collect();
            if points.is_empty() {
                log::warn!("band {center} ± {halfwidth} is empty");
            }
            BandSlice {
                center,
                halfwidth,
                points,
            }
        })
        .collect();
    Ok(slices)
}

pub fn write_band_csv<W: Write>(slice: &BandSlice, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y", "p0", "p1", "p2", "lambda3_sq", "m_formula", "m_numerical", "residual"])?;
    for p in &slice.points {
        let row = [p.x, p.y, p.probs[0], p.probs[1], p.probs[2], p.lambda3_sq, p.m_formula, p.m_numerical, p.residual];
        w.write_record(row.map(|v| format!("{v:.16e}")))?;
    }
    w.flush()?;
    Ok(())
}
