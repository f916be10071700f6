//! Triangular lattices over Schmidt-probability simplices.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::closed_form::{nlm_schmidt, Method};
use crate::error::{NlmError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub x: f64,
    pub y: f64,
    pub probs: Vec<f64>,
    pub m: f64,
}

/// Cartesian position of `(p0, p1, p2)` in the equilateral triangle with
/// vertices `(0,0)`, `(1,0)`, `(1/2, √3/2)`.
pub fn simplex_xy(p1: f64, p2: f64) -> (f64, f64) {
    (p1 + 0.5 * p2, 0.75f64.sqrt() * p2)
}

fn lattice(resolution: usize, dim: usize) -> Result<Vec<GridPoint>> {
    if resolution < 2 {
        return Err(NlmError::InvalidConfig(format!("resolution must be at least 2, got {resolution}")));
    }
    let r = resolution as f64;
    let mut out = Vec::with_capacity((resolution + 1) * (resolution + 2) / 2);
    for i in (0..=resolution).rev() {
        for j in (0..=resolution - i).rev() {
            let k = resolution - i - j;
            let mut probs = vec![0.0; dim];
            probs[0] = i as f64 / r;
            probs[1] = j as f64 / r;
            probs[2] = k as f64 / r;
            let lambdas: Vec<f64> = probs.iter().map(|p| p.sqrt()).collect();
            let m = nlm_schmidt(&lambdas, Method::ClosedForm)?.value;
            let (x, y) = simplex_xy(probs[1], probs[2]);
            out.push(GridPoint { x, y, probs, m });
        }
    }
    Ok(out)
}

/// Lattice of spacing `1/resolution` over `(λ₀², λ₁², λ₂²)`, N = 3.
pub fn simplex_grid_qutrit(resolution: usize) -> Result<Vec<GridPoint>> {
    lattice(resolution, 3)
}

/// The same lattice on the N = 5 slice `(λ₀², λ₁², λ₂², 0, 0)`.
pub fn ququint_slice_grid(resolution: usize) -> Result<Vec<GridPoint>> {
    lattice(resolution, 5)
}

pub fn write_grid_csv<W: Write>(points: &[GridPoint], out: W) -> Result<()> {
    let dim = points.first().map_or(3, |p| p.probs.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["x".to_string(), "y".to_string()];
    header.extend((0..dim).map(|i| format!("p{i}")));
    header.push("m".into());
    w.write_record(&header)?;
    for p in points {
        let row = [p.x, p.y]
            .into_iter()
            .chain(p.probs.iter().copied())
            .chain([p.m])
            .map(|v| format!("{v:.16e}"));
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Largest `|m(p) − m(σp)|` over lattice points and the six permutations of
/// the three active coordinates, found by lattice lookup.
pub fn grid_symmetry_defect(points: &[GridPoint], resolution: usize) -> Result<f64> {
    let r = resolution as f64;
    let key = |p: &GridPoint| -> [usize; 3] { [0, 1, 2].map(|i| (p.probs[i] * r).round() as usize) };
    let table: HashMap<[usize; 3], f64> = points.iter().map(|p| (key(p), p.m)).collect();
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut worst = 0.0f64;
    for p in points {
        let k = key(p);
        for s in PERMS {
            let image = [k[s[0]], k[s[1]], k[s[2]]];
            let m = table
                .get(&image)
                .ok_or_else(|| NlmError::InvariantViolation(format!("lattice point {image:?} missing")))?;
            worst = worst.max((m - p.m).abs());
        }
    }
    Ok(worst)
}
