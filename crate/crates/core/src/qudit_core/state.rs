use num_complex::Complex;

use crate::error::{NlmError, Result};
use crate::linalg::{eigh, random_unitary, svd, CMatrix};
use crate::scalar::{Real, C};

/// Which half of the bipartition to keep in a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Pure state `Σ x_jk |jk⟩` of two `N`-level systems.
#[derive(Clone, Debug, PartialEq)]
pub struct PureBipartiteState<T: Real> {
    amplitudes: CMatrix<T>,
}

impl<T: Real> PureBipartiteState<T> {
    /// Validates shape and normalisation.
    pub fn new(amplitudes: CMatrix<T>) -> Result<Self> {
        let dim = amplitudes.rows();
        if dim < 2 {
            return Err(NlmError::InvalidDimension(dim));
        }
        if !amplitudes.is_square() {
            return Err(NlmError::ShapeMismatch {
                dim,
                rows: amplitudes.rows(),
                cols: amplitudes.cols(),
            });
        }
        let norm_sq = amplitudes.frobenius_norm_sqr();
        if !norm_sq.is_finite() || (norm_sq - T::one()).abs() > T::norm_tolerance() {
            return Err(NlmError::NotNormalized {
                norm_sq: norm_sq.to_f64_lossy(),
            });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm before validating.
    pub fn normalized(amplitudes: CMatrix<T>) -> Result<Self> {
        let norm = amplitudes.frobenius_norm_sqr().sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(NlmError::NotNormalized {
                norm_sq: (norm * norm).to_f64_lossy(),
            });
        }
        Self::new(amplitudes.scale(Complex::new(T::one() / norm, T::zero())))
    }

    /// Schmidt-aligned state `x_jk = λ_j δ_jk` for an ordered coefficient
    /// vector (not re-sorted).
    pub fn aligned(lambdas: &[T]) -> Result<Self> {
        Self::new(CMatrix::from_real_diagonal(lambdas))
    }

    /// Computational basis product state `|j k⟩`.
    pub fn basis(dim: usize, j: usize, k: usize) -> Result<Self> {
        let mut x = CMatrix::zeros(dim, dim);
        if j < dim && k < dim {
            x[(j, k)] = Complex::new(T::one(), T::zero());
        }
        Self::new(x)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.rows()
    }

    #[inline]
    pub fn amplitudes(&self) -> &CMatrix<T> {
        &self.amplitudes
    }

    #[inline]
    pub fn amplitude(&self, j: usize, k: usize) -> C<T> {
        self.amplitudes[(j, k)]
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.frobenius_norm_sqr()
    }

    pub fn with_global_phase(&self, phase: T) -> Self {
        Self {
            amplitudes: self.amplitudes.scale(Complex::from_polar(T::one(), phase)),
        }
    }
}

/// Schmidt coefficients `λ_0 ≥ λ_1 ≥ … ≥ 0` with `Σ λ² = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtSpectrum<T: Real> {
    lambdas: Vec<T>,
}

impl<T: Real> SchmidtSpectrum<T> {
    /// Validates non-negativity, ordering and normalisation.
    pub fn new(lambdas: Vec<T>) -> Result<Self> {
        validate_coefficients(&lambdas)?;
        if lambdas.windows(2).any(|w| w[0] < w[1]) {
            return Err(NlmError::NotSorted);
        }
        check_norm(&lambdas)?;
        Ok(Self { lambdas })
    }

    /// Sorts descending and validates normalisation.
    pub fn from_unsorted(mut lambdas: Vec<T>) -> Result<Self> {
        validate_coefficients(&lambdas)?;
        sort_descending(&mut lambdas);
        Self::new(lambdas)
    }

    /// Sorts descending and rescales to unit Euclidean norm.
    pub fn normalized(mut lambdas: Vec<T>) -> Result<Self> {
        validate_coefficients(&lambdas)?;
        let norm = lambdas.iter().map(|&l| l * l).sum::<T>().sqrt();
        if norm <= T::zero() {
            return Err(NlmError::NotNormalized { norm_sq: 0.0 });
        }
        for l in &mut lambdas {
            *l = *l / norm;
        }
        Self::from_unsorted(lambdas)
    }

    /// Schmidt coefficients from probabilities `λ_i²`.
    pub fn from_probabilities(probs: &[T]) -> Result<Self> {
        for (index, &p) in probs.iter().enumerate() {
            if !(p >= T::zero()) || !p.is_finite() {
                return Err(NlmError::InvalidCoefficient {
                    index,
                    value: p.to_f64_lossy(),
                });
            }
        }
        Self::from_unsorted(probs.iter().map(|p| p.sqrt()).collect())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.lambdas.len()
    }

    #[inline]
    pub fn lambdas(&self) -> &[T] {
        &self.lambdas
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.lambdas.iter().map(|&l| l * l).collect()
    }

    pub fn into_inner(self) -> Vec<T> {
        self.lambdas
    }
}

impl<T: Real> AsRef<[T]> for SchmidtSpectrum<T> {
    fn as_ref(&self) -> &[T] {
        &self.lambdas
    }
}

fn validate_coefficients<T: Real>(lambdas: &[T]) -> Result<()> {
    if lambdas.len() < 2 {
        return Err(NlmError::InvalidDimension(lambdas.len()));
    }
    for (index, &l) in lambdas.iter().enumerate() {
        if !(l >= T::zero()) || !l.is_finite() {
            return Err(NlmError::InvalidCoefficient {
                index,
                value: l.to_f64_lossy(),
            });
        }
    }
    Ok(())
}

fn check_norm<T: Real>(lambdas: &[T]) -> Result<()> {
    let norm_sq: T = lambdas.iter().map(|&l| l * l).sum();
    if (norm_sq - T::one()).abs() > T::norm_tolerance() {
        return Err(NlmError::NotNormalized {
            norm_sq: norm_sq.to_f64_lossy(),
        });
    }
    Ok(())
}

pub(crate) fn sort_descending<T: Real>(v: &mut [T]) {
    v.sort_by(|a, b| b.partial_cmp(a).expect("finite values"));
}

/// Output of [`schmidt_decompose`]: `U_A x U_Bᵀ = diag(λ)`.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition<T: Real> {
    pub spectrum: SchmidtSpectrum<T>,
    pub u_a: CMatrix<T>,
    pub u_b: CMatrix<T>,
}

/// Schmidt-aligned state with `x_jk = λ_j δ_jk`.
pub fn state_from_spectrum<T: Real>(spec: &SchmidtSpectrum<T>) -> PureBipartiteState<T> {
    PureBipartiteState::aligned(spec.lambdas()).expect("valid spectrum gives a normalised state")
}

/// Schmidt decomposition via the SVD `x = W Σ V^dag` of the amplitude matrix.
///
/// Returns `U_A = W^dag` and `U_B = Vᵀ`, so that
/// `apply_local_unitaries(state, U_A, U_B)` is the real, non-negative,
/// descending diagonal `diag(λ)`.
pub fn schmidt_decompose<T: Real>(state: &PureBipartiteState<T>) -> Result<SchmidtDecomposition<T>> {
    let norm_sq = state.norm_sqr();
    if (norm_sq - T::one()).abs() > T::norm_tolerance() {
        return Err(NlmError::NotNormalized {
            norm_sq: norm_sq.to_f64_lossy(),
        });
    }
    let dec = svd(state.amplitudes());
    // Renormalise away the last few ulps so the spectrum validates.
    let total = dec.singular_values.iter().map(|&s| s * s).sum::<T>().sqrt();
    let lambdas = dec.singular_values.iter().map(|&s| s / total).collect();
    Ok(SchmidtDecomposition {
        spectrum: SchmidtSpectrum::new(lambdas)?,
        u_a: dec.u.adjoint(),
        u_b: dec.v.transpose(),
    })
}

/// Reduced density matrix: `x x^dag` for `A`, `xᵀ x̄` for `B`.
pub fn reduced_density<T: Real>(state: &PureBipartiteState<T>, subsystem: Subsystem) -> CMatrix<T> {
    let x = state.amplitudes();
    match subsystem {
        Subsystem::A => x.matmul(&x.adjoint()),
        Subsystem::B => x.transpose().matmul(&x.conj()),
    }
}

/// Eigenvalues (ascending) of a reduced density matrix.
pub fn reduced_spectrum<T: Real>(state: &PureBipartiteState<T>, subsystem: Subsystem) -> Vec<T> {
    eigh(&reduced_density(state, subsystem)).values
}

/// Tolerance on `‖U^dag U − I‖` for inputs to [`apply_local_unitaries`].
pub const UNITARITY_TOLERANCE: f64 = 1e-8;

/// `x' = U_A x U_Bᵀ`, i.e. `(U_A ⊗ U_B)|ψ⟩`.
pub fn apply_local_unitaries<T: Real>(
    state: &PureBipartiteState<T>,
    u_a: &CMatrix<T>,
    u_b: &CMatrix<T>,
) -> Result<PureBipartiteState<T>> {
    let dim = state.dim();
    for u in [u_a, u_b] {
        if u.rows() != dim || u.cols() != dim {
            return Err(NlmError::ShapeMismatch {
                dim,
                rows: u.rows(),
                cols: u.cols(),
            });
        }
        let deviation = u.unitarity_defect();
        if !(deviation <= T::lit(UNITARITY_TOLERANCE)) {
            return Err(NlmError::NotUnitary {
                deviation: deviation.to_f64_lossy(),
            });
        }
    }
    Ok(PureBipartiteState {
        amplitudes: transform_unchecked(state.amplitudes(), u_a, u_b),
    })
}

/// Applies a Haar-random `U_A ⊗ U_B` drawn from `ChaCha8Rng` seeded with `seed`.
pub fn scramble<T: Real>(state: &PureBipartiteState<T>, seed: u64) -> PureBipartiteState<T> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = state.dim();
    let u_a = random_unitary(n, &mut rng);
    let u_b = random_unitary(n, &mut rng);
    PureBipartiteState {
        amplitudes: transform_unchecked(state.amplitudes(), &u_a, &u_b),
    }
}

#[inline]
pub(crate) fn transform_unchecked<T: Real>(x: &CMatrix<T>, u_a: &CMatrix<T>, u_b: &CMatrix<T>) -> CMatrix<T> {
    u_a.matmul(x).matmul(&u_b.transpose())
}
