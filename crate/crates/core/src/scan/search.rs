//! Maximisation of the closed-form NLM over a probability triangle: lattice
//! scan followed by compass search along the six edge directions and the
//! six median directions. The medians matter where several orderings tie
//! and the objective has a ridge.

use serde::{Deserialize, Serialize};

use super::grid::{ququint_slice_grid, simplex_grid_qutrit, GridPoint};
use crate::closed_form::{nlm_schmidt, Method};
use crate::error::Result;

const MIN_STEP: f64 = 1e-13;

const DIRECTIONS: [[f64; 3]; 12] = [
    [1.0, -1.0, 0.0],
    [-1.0, 1.0, 0.0],
    [1.0, 0.0, -1.0],
    [-1.0, 0.0, 1.0],
    [0.0, 1.0, -1.0],
    [0.0, -1.0, 1.0],
    [1.0, -0.5, -0.5],
    [-1.0, 0.5, 0.5],
    [-0.5, 1.0, -0.5],
    [0.5, -1.0, 0.5],
    [-0.5, -0.5, 1.0],
    [0.5, 0.5, -1.0],
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexMaximum {
    pub probs: Vec<f64>,
    pub m: f64,
}

fn nlm_of(active: [f64; 3], dim: usize) -> Result<f64> {
    let mut lambdas = vec![0.0; dim];
    for i in 0..3 {
        lambdas[i] = active[i].max(0.0).sqrt();
    }
    Ok(nlm_schmidt(&lambdas, Method::ClosedForm)?.value)
}

fn refine(grid: Vec<GridPoint>, resolution: usize, dim: usize) -> Result<SimplexMaximum> {
    let start = grid
        .iter()
        .max_by(|a, b| a.m.total_cmp(&b.m))
        .expect("lattice is non-empty");
    let mut p = [start.probs[0], start.probs[1], start.probs[2]];
    let mut best = start.m;
    let mut step = 1.0 / resolution as f64;
    while step > MIN_STEP {
        let mut moved = false;
        for d in DIRECTIONS {
            let q = [0, 1, 2].map(|k| p[k] + step * d[k]);
            if q.iter().any(|&v| v < 0.0) {
                continue;
            }
            let m = nlm_of(q, dim)?;
            if m > best {
                best = m;
                p = q;
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    let mut probs = vec![0.0; dim];
    probs[..3].copy_from_slice(&p);
    Ok(SimplexMaximum { probs, m: best })
}

pub fn max_on_qutrit_simplex(resolution: usize) -> Result<SimplexMaximum> {
    refine(simplex_grid_qutrit(resolution)?, resolution, 3)
}

/// Over the slice `(λ₀², λ₁², λ₂², 0, 0)`.
pub fn max_on_ququint_slice(resolution: usize) -> Result<SimplexMaximum> {
    refine(ququint_slice_grid(resolution)?, resolution, 5)
}
