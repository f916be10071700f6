use num_complex::Complex;

use super::eigh::JacobiRotation;
use super::{orthonormalize_columns, CMatrix};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 64;

/// `A = U diag(singular_values) V^dag` for a square complex matrix.
#[derive(Clone, Debug)]
pub struct Svd<T: Real> {
    pub u: CMatrix<T>,
    /// Descending, non-negative.
    pub singular_values: Vec<T>,
    pub v: CMatrix<T>,
}

/// One-sided (Hestenes) Jacobi SVD.
///
/// Columns are orthogonalised pairwise by plane rotations accumulated into
/// `V`; the column norms are then the singular values. Columns belonging to
/// (numerically) zero singular values are completed to an orthonormal basis.
pub fn svd<T: Real>(a: &CMatrix<T>) -> Svd<T> {
    assert!(a.is_square(), "svd implemented for square matrices only");
    let n = a.rows();
    let mut w = a.clone();
    let mut v = CMatrix::identity(n);
    let tol = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = T::zero();
                let mut beta = T::zero();
                let mut gamma = Complex::new(T::zero(), T::zero());
                for r in 0..n {
                    alpha += w[(r, p)].norm_sqr();
                    beta += w[(r, q)].norm_sqr();
                    gamma += w[(r, p)].conj() * w[(r, q)];
                }
                if gamma.norm() <= tol * (alpha * beta).sqrt() || gamma.norm() == T::zero() {
                    continue;
                }
                rotated = true;
                let rot = JacobiRotation::annihilating(alpha, beta, gamma);
                rot.apply_right(&mut w, p, q);
                rot.apply_right(&mut v, p, q);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<T> = (0..n)
        .map(|c| (0..n).map(|r| w[(r, c)].norm_sqr()).sum::<T>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let singular_values: Vec<T> = order.iter().map(|&i| norms[i]).collect();
    let v = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);

    let largest = singular_values.first().copied().unwrap_or(T::zero());
    let null_cutoff = largest * T::epsilon() * T::from_usize_lossy(n) * T::lit(16.0);
    let mut u = CMatrix::zeros(n, n);
    let mut rank = 0;
    for (c, &src) in order.iter().enumerate() {
        let sigma = norms[src];
        if sigma > null_cutoff && sigma > T::min_positive_value() {
            for r in 0..n {
                u[(r, c)] = w[(r, src)] / sigma;
            }
            rank = c + 1;
        }
    }
    let u = complete_basis(u, rank);
    Svd { u, singular_values, v }
}

/// Replaces columns `rank..n` with an orthonormal completion of the first
/// `rank` columns, and re-orthonormalises the lot.
fn complete_basis<T: Real>(mut u: CMatrix<T>, rank: usize) -> CMatrix<T> {
    let n = u.rows();
    let mut next_basis = 0;
    let mut col = rank;
    let mut candidate = u.clone();
    while col < n {
        for r in 0..n {
            candidate[(r, col)] = if r == next_basis {
                Complex::new(T::one(), T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            };
        }
        next_basis += 1;
        let trial = CMatrix::from_fn(n, col + 1, |r, c| candidate[(r, c)]);
        if orthonormalize_columns(&trial).is_some() {
            for r in 0..n {
                u[(r, col)] = candidate[(r, col)];
            }
            col += 1;
        }
        assert!(next_basis <= n || col == n, "basis completion exhausted");
    }
    orthonormalize_columns(&u).expect("completed basis is full rank")
}
