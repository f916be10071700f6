//! Exponential chart `θ ↦ exp(i Σ_k θ_k G_k)` onto `SU(N)`.
//!
//! Generators follow the generalised Gell-Mann ordering: symmetric
//! `|j⟩⟨k| + |k⟩⟨j|`, then antisymmetric `−i|j⟩⟨k| + i|k⟩⟨j|` (both over
//! `j < k` lexicographically), then diagonal
//! `√(2/(l(l+1))) (Σ_{j<l} |j⟩⟨j| − l |l⟩⟨l|)` for `l = 1..N−1`. For
//! `N = 2` these are `σ_x, σ_y, σ_z`.

use num_complex::Complex;

use crate::error::{NlmError, Result};
use crate::linalg::{eigh, expm, CMatrix, HermitianEigen};
use crate::scalar::{Real, C};

/// One sparse entry `(row, col, value)` of a generator.
pub(crate) type Entry<T> = (usize, usize, C<T>);

/// Ordered traceless Hermitian basis of `su(N)`.
#[derive(Clone, Debug)]
pub struct GeneratorBasis<T: Real> {
    dim: usize,
    generators: Vec<Vec<Entry<T>>>,
}

impl<T: Real> GeneratorBasis<T> {
    pub fn new(dim: usize) -> Self {
        let zero = T::zero();
        let one = T::one();
        let mut generators = Vec::with_capacity(dim * dim - 1);
        for j in 0..dim {
            for k in j + 1..dim {
                generators.push(vec![(j, k, Complex::new(one, zero)), (k, j, Complex::new(one, zero))]);
            }
        }
        for j in 0..dim {
            for k in j + 1..dim {
                generators.push(vec![(j, k, Complex::new(zero, -one)), (k, j, Complex::new(zero, one))]);
            }
        }
        for l in 1..dim {
            let lf = T::from_usize_lossy(l);
            let norm = (T::lit(2.0) / (lf * (lf + one))).sqrt();
            let mut g: Vec<Entry<T>> = (0..l).map(|j| (j, j, Complex::new(norm, zero))).collect();
            g.push((l, l, Complex::new(-lf * norm, zero)));
            generators.push(g);
        }
        Self { dim, generators }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `N² − 1`.
    #[inline]
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generator(&self, k: usize) -> CMatrix<T> {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.generators[k] {
            m[(r, c)] += v;
        }
        m
    }

    pub(crate) fn entries(&self, k: usize) -> &[Entry<T>] {
        &self.generators[k]
    }

    /// Indices of the diagonal (Cartan) generators.
    pub fn diagonal_indices(&self) -> std::ops::Range<usize> {
        let off = self.dim * (self.dim - 1);
        off..off + self.dim - 1
    }

    /// `H = Σ_k θ_k G_k`.
    pub fn hamiltonian(&self, theta: &[T]) -> Result<CMatrix<T>> {
        self.check_len(theta)?;
        let mut h = CMatrix::zeros(self.dim, self.dim);
        for (k, &t) in theta.iter().enumerate() {
            if t == T::zero() {
                continue;
            }
            for &(r, c, v) in &self.generators[k] {
                h[(r, c)] += v * t;
            }
        }
        Ok(h)
    }

    fn check_len(&self, theta: &[T]) -> Result<()> {
        if theta.len() != self.len() {
            return Err(NlmError::ParamLength {
                expected: self.len(),
                got: theta.len(),
            });
        }
        Ok(())
    }
}

/// `exp(i Σ θ_k G_k)` by Padé scaling and squaring.
pub fn su_from_params<T: Real>(theta: &[T], dim: usize) -> Result<CMatrix<T>> {
    su_with_basis(&GeneratorBasis::new(dim), theta)
}

pub(crate) fn su_with_basis<T: Real>(basis: &GeneratorBasis<T>, theta: &[T]) -> Result<CMatrix<T>> {
    let h = basis.hamiltonian(theta)?;
    let u = expm(&h.scale(Complex::new(T::zero(), T::one())));
    let defect = u.unitarity_defect();
    if !(defect <= T::lit(1e-10).max(T::epsilon() * T::lit(1e4))) {
        return Err(NlmError::NotUnitary {
            deviation: defect.to_f64_lossy(),
        });
    }
    Ok(u)
}

/// `exp(iH)` through the eigendecomposition of `H`, retaining what is needed
/// to differentiate the map.
#[derive(Clone, Debug)]
pub(crate) struct SpectralExp<T: Real> {
    pub(crate) eigen: HermitianEigen<T>,
    pub(crate) unitary: CMatrix<T>,
}

impl<T: Real> SpectralExp<T> {
    pub(crate) fn new(basis: &GeneratorBasis<T>, theta: &[T]) -> Result<Self> {
        let eigen = eigh(&basis.hamiltonian(theta)?);
        let phases: Vec<C<T>> = eigen.values.iter().map(|&h| Complex::from_polar(T::one(), h)).collect();
        let n = basis.dim();
        let v = &eigen.vectors;
        let unitary = CMatrix::from_fn(n, n, |r, c| {
            (0..n)
                .map(|p| v[(r, p)] * phases[p] * v[(c, p)].conj())
                .sum()
        });
        Ok(Self { eigen, unitary })
    }

    /// `Re tr(Γ ∂U/∂θ_k)` for every generator, via the divided-difference
    /// (Daleckii–Krein) form of the derivative of `exp(iH)`.
    pub(crate) fn pullback(&self, basis: &GeneratorBasis<T>, gamma: &CMatrix<T>) -> Vec<T> {
        let n = basis.dim();
        let v = &self.eigen.vectors;
        let h = &self.eigen.values;
        let gt = v.adjoint().matmul(gamma).matmul(v);
        // M_pq = Γ̃_qp φ(h_p, h_q)
        let m = CMatrix::from_fn(n, n, |p, q| gt[(q, p)] * divided_difference(h[p], h[q]));
        // Q = V Mᵀ V^dag; tr(Γ dU_k) = Σ_{(r,c,g) ∈ G_k} g Q_cr
        let q = v.matmul(&m.transpose()).matmul(&v.adjoint());
        (0..basis.len())
            .map(|k| {
                basis
                    .entries(k)
                    .iter()
                    .map(|&(r, c, g)| (g * q[(c, r)]).re)
                    .sum()
            })
            .collect()
    }
}

/// `(e^{ia} − e^{ib}) / (a − b)`, with the limit `i e^{ia}` at `a = b`.
#[inline]
fn divided_difference<T: Real>(a: T, b: T) -> C<T> {
    let half = (a - b) * T::lit(0.5);
    let mean = (a + b) * T::lit(0.5);
    let sinc = if half.abs() < T::lit(1e-4) {
        T::one() - half * half / T::lit(6.0)
    } else {
        half.sin() / half
    };
    Complex::new(T::zero(), sinc) * Complex::from_polar(T::one(), mean)
}
