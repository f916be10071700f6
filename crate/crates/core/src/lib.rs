//! Non-local magic of bipartite pure qudit states.
//!
//! The second stabiliser Rényi entropy of `|ψ⟩ ∈ C^N ⊗ C^N`, minimised over
//! local unitaries `U_A ⊗ U_B`, computed three ways:
//!
//! * closed-form expressions in spectrum invariants for `N = 2..5`
//!   ([`closed_form::f_closed`]),
//! * a quadruple-sum oracle on the Schmidt-aligned state for any `N`
//!   ([`closed_form::f_oracle`]),
//! * direct multi-start quasi-Newton minimisation over `SU(N) ⊗ SU(N)`
//!   ([`lu_opt::minimize`]).
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar for everyday use.

pub mod closed_form;
pub mod error;
pub mod invariants;
pub mod linalg;
pub mod lu_opt;
pub mod qudit_core;
pub mod scalar;
pub mod scan;

pub use error::{NlmError, Result};
pub use scalar::Real;

pub type State = qudit_core::PureBipartiteState<f64>;
pub type Spectrum = qudit_core::SchmidtSpectrum<f64>;
pub type PauliTensor = qudit_core::PauliCoefficientTensor<f64>;
pub type RTensor = qudit_core::QubitRTensor<f64>;
pub type Matrix = linalg::CMatrix<f64>;
pub type Invariants = invariants::SpectrumInvariants<f64>;
pub type Nlm = closed_form::NlmResult<f64>;
pub type Params = lu_opt::LocalUnitaryParams<f64>;
pub type Config = lu_opt::OptimizerConfig<f64>;
pub type Optimum = lu_opt::OptResult<f64>;

pub type State32 = qudit_core::PureBipartiteState<f32>;
pub type Spectrum32 = qudit_core::SchmidtSpectrum<f32>;
pub type Matrix32 = linalg::CMatrix<f32>;
pub type Nlm32 = closed_form::NlmResult<f32>;
