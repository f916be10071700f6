//! Two-qudit pure states, Schmidt decomposition and the generalised Pauli
//! expansion.

mod files;
mod pauli;
mod state;

pub use files::{SpectrumFile, StateFile};
pub use pauli::{
    m2_pure, pauli_coefficient, pauli_tensor, pauli_tensor_naive, qubit_r_tensor, PauliCoefficientTensor,
    PauliIndex, QubitRTensor,
};
pub(crate) use pauli::Dft2;
pub use state::{
    apply_local_unitaries, reduced_density, reduced_spectrum, schmidt_decompose, scramble, state_from_spectrum,
    PureBipartiteState, SchmidtDecomposition, SchmidtSpectrum, Subsystem, UNITARITY_TOLERANCE,
};
pub(crate) use state::transform_unchecked;
