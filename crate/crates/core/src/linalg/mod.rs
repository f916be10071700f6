//! Small dense complex linear algebra.
//!
//! Every matrix in this crate is at most a few dozen entries on a side, so a
//! row-major `Vec` with straightforward loops is all that is needed.

mod eigh;
mod expm;
mod svd;

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::scalar::{Real, C};

pub use eigh::{eigh, HermitianEigen};
pub use expm::expm;
pub use svd::{svd, Svd};

/// Dense complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data. Panics if the length is wrong.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C<T>>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length does not match shape");
        Self { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, T::zero());
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C<T>] {
        &mut self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn trace(&self) -> C<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm_sqr(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm_one(&self) -> T {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    /// `max |U^dag U - I|` entrywise.
    pub fn unitarity_defect(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&Self::identity(self.rows))
    }

    pub fn determinant(&self) -> C<T> {
        assert!(self.is_square());
        match lu_factor(self) {
            Some((lu, _, sign)) => {
                let mut det = Complex::new(T::lit(sign), T::zero());
                for i in 0..self.rows {
                    det *= lu[(i, i)];
                }
                det
            }
            None => Complex::new(T::zero(), T::zero()),
        }
    }

    /// Solves `self * X = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        assert!(self.is_square());
        assert_eq!(self.rows, rhs.rows);
        let (lu, perm, _) = lu_factor(self)?;
        let n = self.rows;
        let mut x = Self::from_fn(n, rhs.cols, |i, j| rhs[(perm[i], j)]);
        for j in 0..rhs.cols {
            for i in 0..n {
                let mut acc = x[(i, j)];
                for k in 0..i {
                    acc -= lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = acc;
            }
            for i in (0..n).rev() {
                let mut acc = x[(i, j)];
                for k in i + 1..n {
                    acc -= lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = acc / lu[(i, i)];
            }
        }
        Some(x)
    }
}

fn lu_factor<T: Real>(a: &CMatrix<T>) -> Option<(CMatrix<T>, Vec<usize>, f64)> {
    let n = a.rows;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| lu[(i, k)].norm().partial_cmp(&lu[(j, k)].norm()).unwrap())
            .unwrap();
        if lu[(pivot, k)].norm() == T::zero() {
            return None;
        }
        if pivot != k {
            for j in 0..n {
                lu.data.swap(k * n + j, pivot * n + j);
            }
            perm.swap(k, pivot);
            sign = -sign;
        }
        let p = lu[(k, k)];
        for i in k + 1..n {
            let f = lu[(i, k)] / p;
            lu[(i, k)] = f;
            for j in k + 1..n {
                let t = lu[(k, j)];
                lu[(i, j)] -= f * t;
            }
        }
    }
    Some((lu, perm, sign))
}

impl<T: Real> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Add for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn add(self, rhs: Self) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn sub(self, rhs: Self) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: Self) -> CMatrix<T> {
        self.matmul(rhs)
    }
}

/// Haar-random unitary from Gram-Schmidt on a complex Ginibre matrix.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix<T> {
    loop {
        let g = CMatrix::from_fn(n, n, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(T::lit(re), T::lit(im))
        });
        if let Some(q) = orthonormalize_columns(&g) {
            return q;
        }
    }
}

/// Modified Gram-Schmidt on the columns. Returns `None` if a column is
/// numerically dependent on the preceding ones.
pub(crate) fn orthonormalize_columns<T: Real>(m: &CMatrix<T>) -> Option<CMatrix<T>> {
    let n = m.rows;
    let mut q = m.clone();
    for j in 0..m.cols {
        for _pass in 0..2 {
            for k in 0..j {
                let mut dot = Complex::new(T::zero(), T::zero());
                for i in 0..n {
                    dot += q[(i, k)].conj() * q[(i, j)];
                }
                for i in 0..n {
                    let qk = q[(i, k)];
                    q[(i, j)] -= dot * qk;
                }
            }
        }
        let norm = (0..n).map(|i| q[(i, j)].norm_sqr()).sum::<T>().sqrt();
        if norm <= T::epsilon() * T::lit(64.0) {
            return None;
        }
        for i in 0..n {
            q[(i, j)] = q[(i, j)] / norm;
        }
    }
    Some(q)
}
