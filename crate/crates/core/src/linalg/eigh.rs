use num_complex::Complex;

use super::CMatrix;
use crate::scalar::{Real, C};

const MAX_SWEEPS: usize = 64;

/// Eigendecomposition `A = V diag(values) V^dag` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T: Real> {
    /// Ascending.
    pub values: Vec<T>,
    /// Unitary; column `i` is the eigenvector of `values[i]`.
    pub vectors: CMatrix<T>,
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// Only the Hermitian part of the input is used.
pub fn eigh<T: Real>(a: &CMatrix<T>) -> HermitianEigen<T> {
    assert!(a.is_square(), "eigh needs a square matrix");
    let n = a.rows();
    let half = T::lit(0.5);
    let mut m = CMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * half);
    let mut v = CMatrix::identity(n);

    let scale = m.frobenius_norm_sqr().sqrt();
    let threshold = T::epsilon() * scale;
    for _ in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<T>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= threshold * T::lit(1e-3) {
                    continue;
                }
                let rot = JacobiRotation::annihilating(m[(p, p)].re, m[(q, q)].re, apq);
                rot.apply_two_sided(&mut m, p, q);
                rot.apply_right(&mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap());
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    HermitianEigen { values, vectors }
}

/// Unitary acting on the `(p, q)` plane as
/// `[[c, s], [-s e^{-iφ}, c e^{-iφ}]]`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct JacobiRotation<T: Real> {
    c: T,
    s: T,
    phase: C<T>,
}

impl<T: Real> JacobiRotation<T> {
    /// Rotation `J` such that `J^dag H J` has a zero `(p, q)` entry for the
    /// Hermitian 2x2 block `[[app, apq], [conj(apq), aqq]]`.
    pub(crate) fn annihilating(app: T, aqq: T, apq: C<T>) -> Self {
        let mag = apq.norm();
        // Phase that makes the off-diagonal real and positive.
        let phase = apq.conj() / mag;
        let tau = (aqq - app) / (T::lit(2.0) * mag);
        let t = if tau >= T::zero() {
            T::one() / (tau + (T::one() + tau * tau).sqrt())
        } else {
            -T::one() / (-tau + (T::one() + tau * tau).sqrt())
        };
        let c = T::one() / (T::one() + t * t).sqrt();
        let s = t * c;
        Self { c, s, phase }
    }

    #[inline]
    fn entries(&self) -> [[C<T>; 2]; 2] {
        let z = T::zero();
        [
            [Complex::new(self.c, z), Complex::new(self.s, z)],
            [self.phase * (-self.s), self.phase * self.c],
        ]
    }

    /// `M <- M J` on columns `p`, `q`.
    pub(crate) fn apply_right(&self, m: &mut CMatrix<T>, p: usize, q: usize) {
        let j = self.entries();
        for r in 0..m.rows() {
            let mp = m[(r, p)];
            let mq = m[(r, q)];
            m[(r, p)] = mp * j[0][0] + mq * j[1][0];
            m[(r, q)] = mp * j[0][1] + mq * j[1][1];
        }
    }

    /// `M <- J^dag M J`.
    fn apply_two_sided(&self, m: &mut CMatrix<T>, p: usize, q: usize) {
        self.apply_right(m, p, q);
        let j = self.entries();
        for col in 0..m.cols() {
            let mp = m[(p, col)];
            let mq = m[(q, col)];
            m[(p, col)] = j[0][0].conj() * mp + j[1][0].conj() * mq;
            m[(q, col)] = j[0][1].conj() * mp + j[1][1].conj() * mq;
        }
        m[(p, q)] = Complex::new(T::zero(), T::zero());
        m[(q, p)] = Complex::new(T::zero(), T::zero());
        m[(p, p)].im = T::zero();
        m[(q, q)].im = T::zero();
    }
}
