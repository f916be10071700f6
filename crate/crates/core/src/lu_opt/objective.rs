//! `m2` of `(U_A ⊗ U_B)|ψ⟩` as a function of the chart parameters, with its
//! gradient.
//!
//! Writing `S = Σ|t_abcd|⁴` for the transformed amplitudes `x' = U_A x U_Bᵀ`,
//! the Wirtinger derivative is
//!
//! ```text
//! ∂S/∂x̄'_mn = 2 Σ_ac [ V^ac_mn x'_{m+a,n+c} + conj(V^ac_{m−a,n−c}) x'_{m−a,n−c} ],
//! V^ac_mn   = Σ_bd |t_abcd|² t_abcd ω^{−(bm+dn)},
//! ```
//!
//! so both `S` and its gradient cost one forward and one inverse separable
//! DFT per shift pair `(a, c)`. The chain rule through `x'` and the
//! exponential map is handled by [`SpectralExp::pullback`].

use num_complex::Complex;

use super::su::{su_with_basis, GeneratorBasis, SpectralExp};
use super::LocalUnitaryParams;
use crate::error::Result;
use crate::linalg::CMatrix;
use crate::qudit_core::{transform_unchecked, Dft2, PureBipartiteState};
use crate::scalar::{Real, C};

/// Step of the central finite differences.
pub const FD_STEP: f64 = 1e-5;

/// Gradient evaluation strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum GradientMode {
    Analytic,
    FiniteDifference,
}

/// Precomputed tables for repeated evaluation on one state.
#[derive(Clone, Debug)]
pub struct Evaluator<T: Real> {
    x: CMatrix<T>,
    basis: GeneratorBasis<T>,
    dft: Dft2<T>,
}

impl<T: Real> Evaluator<T> {
    pub fn new(state: &PureBipartiteState<T>) -> Self {
        let n = state.dim();
        Self {
            x: state.amplitudes().clone(),
            basis: GeneratorBasis::new(n),
            dft: Dft2::new(n),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Number of real parameters, `2(N² − 1)`.
    #[inline]
    pub fn num_params(&self) -> usize {
        2 * self.basis.len()
    }

    fn split<'a>(&self, flat: &'a [T]) -> Result<(&'a [T], &'a [T])> {
        let m = self.basis.len();
        if flat.len() != 2 * m {
            return Err(crate::NlmError::ParamLength {
                expected: 2 * m,
                got: flat.len(),
            });
        }
        Ok(flat.split_at(m))
    }

    /// Objective with the unitaries built by Padé scaling and squaring.
    pub fn value(&self, flat: &[T]) -> Result<T> {
        let (ta, tb) = self.split(flat)?;
        let ua = su_with_basis(&self.basis, ta)?;
        let ub = su_with_basis(&self.basis, tb)?;
        let xp = transform_unchecked(&self.x, &ua, &ub);
        Ok(self.m2_of(&xp))
    }

    fn m2_of(&self, xp: &CMatrix<T>) -> T {
        let n = self.dim();
        let s: T = self.dft.tensor(xp).iter().map(|t| t.norm_sqr() * t.norm_sqr()).sum();
        T::zero() - (s / T::from_usize_lossy(n * n)).ln()
    }

    /// Objective and analytic gradient, with the unitaries built from the
    /// eigendecomposition of the generator combination.
    pub fn value_and_gradient(&self, flat: &[T]) -> Result<(T, Vec<T>)> {
        let n = self.dim();
        let (ta, tb) = self.split(flat)?;
        let ea = SpectralExp::new(&self.basis, ta)?;
        let eb = SpectralExp::new(&self.basis, tb)?;
        let ub_t = eb.unitary.transpose();
        let xp = ea.unitary.matmul(&self.x).matmul(&ub_t);

        let (s, w) = self.fourth_moment_with_derivative(&xp);
        let w_adj = w.adjoint();

        // dS = 2 Re tr(Γ_A dU_A) + 2 Re tr(Γ_B dU_B)
        let gamma_a = self.x.matmul(&ub_t).matmul(&w_adj);
        let gamma_b = w_adj.matmul(&ea.unitary).matmul(&self.x).transpose();
        let scale = -T::lit(2.0) / s;
        let grad = ea
            .pullback(&self.basis, &gamma_a)
            .into_iter()
            .chain(eb.pullback(&self.basis, &gamma_b))
            .map(|g| g * scale)
            .collect();
        let value = T::zero() - (s / T::from_usize_lossy(n * n)).ln();
        Ok((value, grad))
    }

    /// `S = Σ|t|⁴` and `W = ∂S/∂x̄'`.
    fn fourth_moment_with_derivative(&self, xp: &CMatrix<T>) -> (T, CMatrix<T>) {
        let n = self.dim();
        let zero = Complex::new(T::zero(), T::zero());
        let two = T::lit(2.0);
        let mut s = T::zero();
        let mut w = CMatrix::zeros(n, n);
        let mut y = vec![zero; n * n];
        let mut scratch = vec![zero; n * n];
        let mut block = vec![zero; n * n];
        let mut v = vec![zero; n * n];
        for a in 0..n {
            for c in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        y[j * n + k] = xp[(j, k)] * xp[((j + a) % n, (k + c) % n)].conj();
                    }
                }
                self.dft.transform(&y, true, &mut scratch, &mut block);
                for t in block.iter_mut() {
                    let m2 = t.norm_sqr();
                    s += m2 * m2;
                    *t = *t * m2;
                }
                self.dft.transform(&block, false, &mut scratch, &mut v);
                for m in 0..n {
                    for nn in 0..n {
                        let fwd = v[m * n + nn] * xp[((m + a) % n, (nn + c) % n)];
                        let (mb, nb) = ((m + n - a) % n, (nn + n - c) % n);
                        let bwd: C<T> = v[mb * n + nb].conj() * xp[(mb, nb)];
                        w[(m, nn)] += (fwd + bwd) * two;
                    }
                }
            }
        }
        (s, w)
    }

    /// Central differences of [`Evaluator::value`] with step [`FD_STEP`].
    pub fn finite_difference_gradient(&self, flat: &[T]) -> Result<Vec<T>> {
        let h = T::lit(FD_STEP);
        let mut probe = flat.to_vec();
        let mut grad = Vec::with_capacity(flat.len());
        for k in 0..flat.len() {
            probe[k] = flat[k] + h;
            let up = self.value(&probe)?;
            probe[k] = flat[k] - h;
            let dn = self.value(&probe)?;
            probe[k] = flat[k];
            grad.push((up - dn) / (h + h));
        }
        Ok(grad)
    }

    pub fn gradient(&self, flat: &[T], mode: GradientMode) -> Result<Vec<T>> {
        match mode {
            GradientMode::Analytic => Ok(self.value_and_gradient(flat)?.1),
            GradientMode::FiniteDifference => self.finite_difference_gradient(flat),
        }
    }

    pub fn value_and_gradient_with(&self, flat: &[T], mode: GradientMode) -> Result<(T, Vec<T>)> {
        match mode {
            GradientMode::Analytic => self.value_and_gradient(flat),
            GradientMode::FiniteDifference => Ok((self.value(flat)?, self.finite_difference_gradient(flat)?)),
        }
    }
}

/// `m2_pure(apply_local_unitaries(state, U(θ_A), U(θ_B)))`.
pub fn objective<T: Real>(state: &PureBipartiteState<T>, params: &LocalUnitaryParams<T>) -> Result<T> {
    params.check_dim(state.dim())?;
    Evaluator::new(state).value(&params.to_flat())
}

/// Gradient of [`objective`] with respect to `(θ_A, θ_B)`, concatenated.
pub fn gradient<T: Real>(
    state: &PureBipartiteState<T>,
    params: &LocalUnitaryParams<T>,
    mode: GradientMode,
) -> Result<Vec<T>> {
    params.check_dim(state.dim())?;
    Evaluator::new(state).gradient(&params.to_flat(), mode)
}
