//! Generalised Pauli (Weyl–Heisenberg) expansion of two-qudit pure states.
//!
//! `P_abcd = (X^a Z^b) ⊗ (X^c Z^d)` with `X|j⟩ = |j+1⟩`, `Z|j⟩ = ω^j |j⟩`,
//! `ω = exp(2πi/N)`. The customary phase factor making `P_abcd` Hermitian
//! for qubits is left out; it drops out of `|t_abcd|`.

use num_complex::Complex;

use super::state::PureBipartiteState;
use crate::error::{NlmError, Result};
use crate::linalg::CMatrix;
use crate::scalar::{roots_of_unity, Real, C};

/// Exponents `(a, b, c, d)` of `P_abcd`, reduced mod `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliIndex {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
}

impl PauliIndex {
    pub fn new(a: i64, b: i64, c: i64, d: i64, dim: usize) -> Self {
        let n = dim as i64;
        let r = |v: i64| v.rem_euclid(n) as usize;
        Self {
            a: r(a),
            b: r(b),
            c: r(c),
            d: r(d),
        }
    }

    #[inline]
    fn flat(&self, dim: usize) -> usize {
        ((self.a * dim + self.b) * dim + self.c) * dim + self.d
    }
}

/// All `N⁴` coefficients `t_abcd = Tr(ρ P_abcd)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliCoefficientTensor<T: Real> {
    dim: usize,
    entries: Vec<C<T>>,
}

impl<T: Real> PauliCoefficientTensor<T> {
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, idx: PauliIndex) -> C<T> {
        self.entries[idx.flat(self.dim)]
    }

    /// Flat storage, index `((a N + b) N + c) N + d`.
    pub fn entries(&self) -> &[C<T>] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (PauliIndex, C<T>)> + '_ {
        let n = self.dim;
        self.entries.iter().enumerate().map(move |(i, &t)| {
            let d = i % n;
            let c = (i / n) % n;
            let b = (i / (n * n)) % n;
            let a = i / (n * n * n);
            (PauliIndex { a, b, c, d }, t)
        })
    }

    /// `Σ |t|²`; equals `N²` for pure states.
    pub fn sum_sq(&self) -> T {
        self.entries.iter().map(|t| t.norm_sqr()).sum()
    }

    /// `Σ |t|⁴`.
    pub fn sum_fourth(&self) -> T {
        self.entries.iter().map(|t| t.norm_sqr() * t.norm_sqr()).sum()
    }
}

/// `t_abcd = Σ_jk x_jk x*_{j+a,k+c} ω^{bj+dk}`, indices mod `N`.
pub fn pauli_coefficient<T: Real>(state: &PureBipartiteState<T>, idx: PauliIndex) -> C<T> {
    let n = state.dim();
    let omega = roots_of_unity::<T>(n);
    let idx = PauliIndex::new(idx.a as i64, idx.b as i64, idx.c as i64, idx.d as i64, n);
    let x = state.amplitudes();
    let mut acc = Complex::new(T::zero(), T::zero());
    for j in 0..n {
        for k in 0..n {
            let phase = omega[(idx.b * j + idx.d * k) % n];
            acc += x[(j, k)] * x[((j + idx.a) % n, (k + idx.c) % n)].conj() * phase;
        }
    }
    acc
}

/// Full coefficient tensor by direct summation, `O(N⁶)`.
pub fn pauli_tensor_naive<T: Real>(state: &PureBipartiteState<T>) -> PauliCoefficientTensor<T> {
    let n = state.dim();
    let omega = roots_of_unity::<T>(n);
    let x = state.amplitudes();
    let mut entries = vec![Complex::new(T::zero(), T::zero()); n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for j in 0..n {
                        for k in 0..n {
                            acc += x[(j, k)] * x[((j + a) % n, (k + c) % n)].conj() * omega[(b * j + d * k) % n];
                        }
                    }
                    entries[PauliIndex { a, b, c, d }.flat(n)] = acc;
                }
            }
        }
    }
    PauliCoefficientTensor { dim: n, entries }
}

/// Full coefficient tensor using a separable DFT over `(b, d)` for each
/// shift pair `(a, c)`, `O(N⁵)`. Agrees with [`pauli_tensor_naive`] to
/// round-off.
pub fn pauli_tensor<T: Real>(state: &PureBipartiteState<T>) -> PauliCoefficientTensor<T> {
    let n = state.dim();
    let dft = Dft2::new(n);
    let entries = dft.tensor(state.amplitudes());
    PauliCoefficientTensor { dim: n, entries }
}

/// Second stabiliser Rényi entropy of a pure state in its given basis,
/// `−ln((1/N²) Σ |t_abcd|⁴)`.
pub fn m2_pure<T: Real>(state: &PureBipartiteState<T>) -> T {
    let n = T::from_usize_lossy(state.dim());
    T::zero() - (pauli_tensor(state).sum_fourth() / (n * n)).ln()
}

/// Reusable separable 2-D DFT tables for one dimension.
#[derive(Clone, Debug)]
pub(crate) struct Dft2<T: Real> {
    n: usize,
    omega: Vec<C<T>>,
}

impl<T: Real> Dft2<T> {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            n,
            omega: roots_of_unity(n),
        }
    }

    /// `out_bd = Σ_jk y_jk ω^{s(bj + dk)}` with `s = ±1`.
    pub(crate) fn transform(&self, y: &[C<T>], forward: bool, scratch: &mut [C<T>], out: &mut [C<T>]) {
        let n = self.n;
        let zero = Complex::new(T::zero(), T::zero());
        let w = |m: usize| {
            let m = m % n;
            if forward {
                self.omega[m]
            } else {
                self.omega[(n - m) % n]
            }
        };
        // scratch_jd = Σ_k y_jk ω^{±dk}
        for j in 0..n {
            for d in 0..n {
                let mut acc = zero;
                for k in 0..n {
                    acc += y[j * n + k] * w(d * k);
                }
                scratch[j * n + d] = acc;
            }
        }
        for b in 0..n {
            for d in 0..n {
                let mut acc = zero;
                for j in 0..n {
                    acc += scratch[j * n + d] * w(b * j);
                }
                out[b * n + d] = acc;
            }
        }
    }

    /// All coefficients, flat order `((a N + b) N + c) N + d`.
    pub(crate) fn tensor(&self, x: &CMatrix<T>) -> Vec<C<T>> {
        let n = self.n;
        let zero = Complex::new(T::zero(), T::zero());
        let mut entries = vec![zero; n * n * n * n];
        let mut y = vec![zero; n * n];
        let mut scratch = vec![zero; n * n];
        let mut block = vec![zero; n * n];
        for a in 0..n {
            for c in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        y[j * n + k] = x[(j, k)] * x[((j + a) % n, (k + c) % n)].conj();
                    }
                }
                self.transform(&y, true, &mut scratch, &mut block);
                for b in 0..n {
                    for d in 0..n {
                        entries[((a * n + b) * n + c) * n + d] = block[b * n + d];
                    }
                }
            }
        }
        entries
    }
}

/// Real two-qubit correlation matrix `R_μν = Tr[(σ_μ ⊗ σ_ν) ρ]`,
/// `σ = (I, X, Y, Z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitRTensor<T: Real> {
    pub entries: [[T; 4]; 4],
}

impl<T: Real> QubitRTensor<T> {
    #[inline]
    pub fn get(&self, mu: usize, nu: usize) -> T {
        self.entries[mu][nu]
    }

    pub fn sum_sq(&self) -> T {
        self.entries.iter().flatten().map(|&r| r * r).sum()
    }

    pub fn sum_fourth(&self) -> T {
        self.entries.iter().flatten().map(|&r| r * r * r * r).sum()
    }
}

fn qubit_pauli<T: Real>(mu: usize) -> [[C<T>; 2]; 2] {
    let o = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    match mu {
        0 => [[one, o], [o, one]],
        1 => [[o, one], [one, o]],
        2 => [[o, -i], [i, o]],
        3 => [[one, o], [o, -one]],
        _ => unreachable!("Pauli label out of range"),
    }
}

/// `R_μν` of a two-qubit pure state.
pub fn qubit_r_tensor<T: Real>(state: &PureBipartiteState<T>) -> Result<QubitRTensor<T>> {
    if state.dim() != 2 {
        return Err(NlmError::WrongDimension {
            expected: 2,
            got: state.dim(),
        });
    }
    let x = state.amplitudes();
    let mut entries = [[T::zero(); 4]; 4];
    for (mu, row) in entries.iter_mut().enumerate() {
        let sm = qubit_pauli::<T>(mu);
        for (nu, r) in row.iter_mut().enumerate() {
            let sn = qubit_pauli::<T>(nu);
            // ⟨ψ| σ_μ ⊗ σ_ν |ψ⟩
            let mut acc = Complex::new(T::zero(), T::zero());
            for j in 0..2 {
                for k in 0..2 {
                    for jp in 0..2 {
                        for kp in 0..2 {
                            acc += x[(j, k)].conj() * sm[j][jp] * sn[k][kp] * x[(jp, kp)];
                        }
                    }
                }
            }
            *r = acc.re;
        }
    }
    Ok(QubitRTensor { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_unitary;
    use crate::qudit_core::state::{apply_local_unitaries, state_from_spectrum, SchmidtSpectrum};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> PureBipartiteState<f64> {
        let g = random_unitary::<f64, _>(n * n, rng);
        PureBipartiteState::normalized(CMatrix::from_fn(n, n, |j, k| g[(j * n + k, 0)])).unwrap()
    }

    #[test]
    fn index_reduction() {
        let i = PauliIndex::new(-1, 7, 3, -5, 3);
        assert_eq!(i, PauliIndex { a: 2, b: 1, c: 0, d: 1 });
    }

    #[test]
    fn identity_coefficient_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 2..=5 {
            let st = random_state(n, &mut rng);
            let t = pauli_coefficient(&st, PauliIndex::new(0, 0, 0, 0, n));
            assert!((t - Complex::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn aligned_state_block_structure() {
        let st = PureBipartiteState::aligned(&[0.7, 0.5, 0.3, (1.0f64 - 0.83).sqrt()]).unwrap();
        let t = pauli_tensor_naive(&st);
        for (idx, v) in t.iter() {
            if idx.a != idx.c {
                assert!(v.norm() < 1e-15, "{idx:?} -> {v}");
            }
        }
    }

    #[test]
    fn qutrit_aligned_diagonal_coefficients() {
        // t_{0b0d} = Σ_j λ_j² ω^{(b+d)j}; only j=0,1 contribute.
        let st = PureBipartiteState::aligned(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]).unwrap();
        for b in 0..3 {
            for d in 0..3 {
                let t = pauli_coefficient(&st, PauliIndex::new(0, b, 0, d, 3));
                let angle = 2.0 * PI * ((b + d) % 3) as f64 / 3.0;
                let expected = Complex::new(0.5, 0.0) + Complex::from_polar(0.5, angle);
                assert!((t - expected).norm() < 1e-15);
                if (b + d) % 3 == 0 {
                    assert!((t - Complex::new(1.0, 0.0)).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn product_state_tensor() {
        let st: PureBipartiteState<f64> = PureBipartiteState::basis(3, 0, 0).unwrap();
        let t = pauli_tensor(&st);
        for (idx, v) in t.iter() {
            if idx.a == 0 && idx.c == 0 {
                assert!((v.norm() - 1.0).abs() < 1e-15);
            } else {
                assert!(v.norm() < 1e-15);
            }
        }
    }

    #[test]
    fn fast_tensor_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 2..=6 {
            let st = random_state(n, &mut rng);
            let fast = pauli_tensor(&st);
            let naive = pauli_tensor_naive(&st);
            for (a, b) in fast.entries().iter().zip(naive.entries()) {
                assert!((a - b).norm() < 1e-12);
            }
            let direct = pauli_coefficient(&st, PauliIndex::new(1, 2, 0, 1, n));
            assert!((direct - fast.get(PauliIndex::new(1, 2, 0, 1, n))).norm() < 1e-12);
        }
    }

    #[test]
    fn purity_identity_and_phase_insensitivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=5 {
            let st = random_state(n, &mut rng);
            let t = pauli_tensor(&st);
            assert!((t.sum_sq() - (n * n) as f64).abs() < 1e-9);
            let rotated = pauli_tensor(&st.with_global_phase(1.234));
            for (a, b) in t.entries().iter().zip(rotated.entries()) {
                assert!((a.norm() - b.norm()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn m2_of_product_states_vanishes() {
        for n in 2..=6 {
            let st: PureBipartiteState<f64> = PureBipartiteState::basis(n, n - 1, 1).unwrap();
            assert!(m2_pure(&st).abs() < 1e-12);
        }
    }

    #[test]
    fn m2_two_qubit_pi_over_8() {
        let th = PI / 8.0;
        let st = PureBipartiteState::aligned(&[th.cos(), th.sin()]).unwrap();
        assert!((m2_pure(&st) + (0.75f64).ln()).abs() < 1e-14);
    }

    #[test]
    fn m2_maximally_entangled_qutrits() {
        let l = 1.0 / 3f64.sqrt();
        let st = PureBipartiteState::aligned(&[l, l, l]).unwrap();
        assert!(m2_pure(&st).abs() < 1e-14);
    }

    #[test]
    fn m2_changes_under_local_unitaries_but_spectrum_does_not() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let spec = SchmidtSpectrum::normalized(vec![0.9f64, 0.4, 0.2]).unwrap();
        let st = state_from_spectrum(&spec);
        let ua = random_unitary(3, &mut rng);
        let ub = random_unitary(3, &mut rng);
        let moved = apply_local_unitaries(&st, &ua, &ub).unwrap();
        assert!((m2_pure(&st) - m2_pure(&moved)).abs() > 1e-3);
        let dec = crate::qudit_core::state::schmidt_decompose(&moved).unwrap();
        for (a, b) in dec.spectrum.lambdas().iter().zip(spec.lambdas()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn r_tensor_schmidt_form() {
        for &th in &[0.0, PI / 4.0, 0.3, 1.1] {
            let st = PureBipartiteState::aligned(&[f64::cos(th), f64::sin(th)]).unwrap();
            let r = qubit_r_tensor(&st).unwrap();
            let c2 = (2.0 * th).cos();
            let s2 = (2.0 * th).sin();
            let mut expected = [[0.0; 4]; 4];
            expected[0][0] = 1.0;
            expected[3][3] = 1.0;
            expected[3][0] = c2;
            expected[0][3] = c2;
            expected[1][1] = s2;
            expected[2][2] = -s2;
            for mu in 0..4 {
                for nu in 0..4 {
                    assert!((r.get(mu, nu) - expected[mu][nu]).abs() < 1e-15);
                }
            }
            let fourth = 4.0 - (4.0 * th).sin().powi(2);
            assert!((r.sum_fourth() - fourth).abs() < 1e-14);
        }
    }

    #[test]
    fn r_tensor_matches_t_moduli() {
        // σ_μ ↔ X^a Z^b: I=(0,0), X=(1,0), Y~(1,1), Z=(0,1)
        let ab = [(0usize, 0usize), (1, 0), (1, 1), (0, 1)];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let st = random_state(2, &mut rng);
            let r = qubit_r_tensor(&st).unwrap();
            let t = pauli_tensor(&st);
            for mu in 0..4 {
                for nu in 0..4 {
                    let (a, b) = ab[mu];
                    let (c, d) = ab[nu];
                    let tv = t.get(PauliIndex { a, b, c, d });
                    assert!((tv.norm() - r.get(mu, nu).abs()).abs() < 1e-13);
                }
            }
            assert!((r.sum_sq() - 4.0).abs() < 1e-12);
            for row in r.entries {
                for v in row {
                    assert!(v.abs() <= 1.0 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn r_tensor_rejects_qutrits() {
        let st: PureBipartiteState<f64> = PureBipartiteState::basis(3, 0, 0).unwrap();
        assert!(matches!(
            qubit_r_tensor(&st),
            Err(NlmError::WrongDimension { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn six_nonzero_qubit_coefficients() {
        let th = 0.4f64;
        let st = PureBipartiteState::aligned(&[th.cos(), th.sin()]).unwrap();
        let t = pauli_tensor(&st);
        let mut mags: Vec<f64> = t.entries().iter().map(|z| z.norm()).filter(|&m| m > 1e-14).collect();
        mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let s2 = (2.0 * th).sin();
        let c2 = (2.0 * th).cos();
        let mut expected = vec![1.0, 1.0, c2, c2, s2, s2];
        expected.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert_eq!(mags.len(), 6);
        for (a, b) in mags.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
