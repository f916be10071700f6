//! Local-unitary invariants of a Schmidt spectrum.
//!
//! All functions take the coefficients `λ_i` as an ordered slice. Power sums,
//! the determinant and the monomial symmetric sums ignore the order; cyclic
//! sums depend on it up to rotation.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{NlmError, Result};
use crate::scalar::Real;

/// Exponent vector `(a_1, …, a_k)` of a symmetric or cyclic sum, right-padded
/// with zeros to the local dimension when evaluated. `"242"` is `(2, 4, 2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExponentPattern {
    exponents: Vec<u32>,
}

impl ExponentPattern {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self { exponents }
    }

    /// `n` copies of `exponent`, e.g. `c_{2⋯2}`.
    pub fn repeated(exponent: u32, n: usize) -> Self {
        Self::new(vec![exponent; n])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Exponents padded with zeros to length `dim`.
    pub fn padded(&self, dim: usize) -> Result<Vec<u32>> {
        if self.exponents.len() > dim {
            return Err(NlmError::InvalidPattern(format!(
                "pattern {self} longer than dimension {dim}"
            )));
        }
        let mut v = self.exponents.clone();
        v.resize(dim, 0);
        Ok(v)
    }
}

impl FromStr for ExponentPattern {
    type Err = NlmError;

    /// Single-digit exponents written consecutively, as in `"1331"`.
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(NlmError::InvalidPattern("empty pattern".into()));
        }
        s.chars()
            .map(|ch| {
                ch.to_digit(10)
                    .ok_or_else(|| NlmError::InvalidPattern(format!("non-digit {ch:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}

impl fmt::Display for ExponentPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.exponents {
            if *e < 10 {
                write!(f, "{e}")?;
            } else {
                write!(f, "({e})")?;
            }
        }
        Ok(())
    }
}

/// `p_n = Σ λ_i^{2n} = Tr ρ_X^n`; `n` may be fractional (`p_{1/2} = Σ λ_i`).
pub fn power_sum<T: Real>(lambdas: &[T], n: T) -> T {
    let two_n = n + n;
    lambdas.iter().map(|&l| pow_nonneg(l, two_n)).sum()
}

#[inline]
fn pow_nonneg<T: Real>(base: T, exp: T) -> T {
    if exp.fract() == T::zero() && exp.abs() < T::lit(64.0) {
        base.powi(exp.to_i32().unwrap_or(0))
    } else {
        base.powf(exp)
    }
}

/// `e_N = det ρ_X = Π λ_i²`.
pub fn det_invariant<T: Real>(lambdas: &[T]) -> T {
    lambdas.iter().map(|&l| l * l).fold(T::one(), |a, b| a * b)
}

/// `Π λ_i = e_N^{1/2}` evaluated without a square root.
pub fn sqrt_det_invariant<T: Real>(lambdas: &[T]) -> T {
    lambdas.iter().fold(T::one(), |a, &b| a * b)
}

/// Monomial symmetric sum: `Π_j λ_j^{a'_j}` summed over the distinct
/// rearrangements `a'` of the padded exponent vector.
pub fn monomial_sym<T: Real>(lambdas: &[T], pattern: &ExponentPattern) -> Result<T> {
    let mut exps = pattern.padded(lambdas.len())?;
    exps.sort_unstable();
    let mut total = T::zero();
    loop {
        total += monomial(lambdas, &exps, 0);
        if !next_permutation(&mut exps) {
            break;
        }
    }
    Ok(total)
}

/// Cyclic sum: `Σ_{s=0}^{N-1} Π_j λ_{(j+s) mod N}^{a_j}`, all `N` shifts
/// counted.
pub fn cyclic_sum<T: Real>(lambdas: &[T], pattern: &ExponentPattern) -> Result<T> {
    let exps = pattern.padded(lambdas.len())?;
    Ok((0..lambdas.len()).map(|s| monomial(lambdas, &exps, s)).sum())
}

/// `p_3 − p_2²`.
pub fn anti_flatness<T: Real>(lambdas: &[T]) -> T {
    let p2 = power_sum(lambdas, T::lit(2.0));
    let p3 = power_sum(lambdas, T::lit(3.0));
    p3 - p2 * p2
}

#[inline]
fn monomial<T: Real>(lambdas: &[T], exps: &[u32], shift: usize) -> T {
    let n = lambdas.len();
    exps.iter()
        .enumerate()
        .filter(|(_, &e)| e != 0)
        .map(|(j, &e)| lambdas[(j + shift) % n].powi(e as i32))
        .fold(T::one(), |a, b| a * b)
}

/// Lexicographic successor; `false` once the sequence is the last one.
pub(crate) fn next_permutation<E: Ord>(v: &mut [E]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Summary invariants printed by the `invariants` command.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectrumInvariants<T: Real> {
    pub p2: T,
    pub p3: T,
    pub p4: T,
    pub p_half: T,
    #[serde(rename = "eN")]
    pub e_n: T,
    pub anti_flatness: T,
}

impl<T: Real> SpectrumInvariants<T> {
    pub fn compute(lambdas: &[T]) -> Self {
        let p2 = power_sum(lambdas, T::lit(2.0));
        let p3 = power_sum(lambdas, T::lit(3.0));
        Self {
            p2,
            p3,
            p4: power_sum(lambdas, T::lit(4.0)),
            p_half: power_sum(lambdas, T::lit(0.5)),
            e_n: det_invariant(lambdas),
            anti_flatness: p3 - p2 * p2,
        }
    }
}
