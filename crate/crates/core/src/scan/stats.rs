use serde::{Deserialize, Serialize};

use super::ScanRecord;
use crate::error::{NlmError, Result};

pub const DEFAULT_THRESHOLD: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResidualStats {
    /// Records with a finite residual.
    pub count: usize,
    /// Records whose optimiser failed.
    pub failed: usize,
    pub mean_abs: f64,
    /// Population standard deviation of `|residual|`.
    pub std_abs: f64,
    pub threshold: f64,
    /// Fraction with `residual < threshold`.
    pub fraction_below: f64,
    pub max: f64,
    pub negative_count: usize,
}

pub fn residual_stats(records: &[ScanRecord], threshold: f64) -> Result<ResidualStats> {
    if records.is_empty() {
        return Err(NlmError::Empty("scan records"));
    }
    let res: Vec<f64> = records.iter().map(|r| r.residual).filter(|r| r.is_finite()).collect();
    let failed = records.len() - res.len();
    if res.is_empty() {
        return Err(NlmError::Empty("finite residuals"));
    }
    let n = res.len() as f64;
    let mean_abs = res.iter().map(|r| r.abs()).sum::<f64>() / n;
    let var = res.iter().map(|r| (r.abs() - mean_abs).powi(2)).sum::<f64>() / n;
    Ok(ResidualStats {
        count: res.len(),
        failed,
        mean_abs,
        std_abs: var.sqrt(),
        threshold,
        fraction_below: res.iter().filter(|&&r| r < threshold).count() as f64 / n,
        max: res.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        negative_count: res.iter().filter(|&&r| r < 0.0).count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(residual: f64) -> ScanRecord {
        ScanRecord {
            dim: 2,
            lambdas: vec![1.0, 0.0],
            m_formula: residual,
            m_numerical: 0.0,
            residual,
            n_starts: 1,
            max_iter: 1,
            converged: 1.0,
            seed: 0,
        }
    }

    #[test]
    fn zeros() {
        let s = residual_stats(&[rec(0.0), rec(0.0)], 0.01).unwrap();
        assert_eq!(s.mean_abs, 0.0);
        assert_eq!(s.fraction_below, 1.0);
    }

    #[test]
    fn two_point() {
        let s = residual_stats(&[rec(0.0), rec(0.12)], 0.01).unwrap();
        assert!((s.mean_abs - 0.06).abs() < 1e-15);
        assert!((s.std_abs - 0.06).abs() < 1e-15);
        assert_eq!(s.max, 0.12);
        assert_eq!(s.fraction_below, 0.5);
    }

    #[test]
    fn negatives_and_failures() {
        let s = residual_stats(&[rec(-1e-9), rec(f64::NAN), rec(0.3)], 0.01).unwrap();
        assert_eq!(s.count, 2);
        assert_eq!(s.failed, 1);
        assert_eq!(s.negative_count, 1);
    }

    #[test]
    fn empty_rejected() {
        assert!(residual_stats(&[], 0.01).is_err());
        assert!(residual_stats(&[rec(f64::NAN)], 0.01).is_err());
    }
}
