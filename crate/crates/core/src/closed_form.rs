//! Schmidt-attained non-local magic.
//!
//! For a Schmidt-aligned state the argument of the logarithm,
//! `F_N(λ) = (1/N²) Σ |t_abcd|⁴`, collapses to a quadruple sum over the
//! coefficients. Closed forms in terms of spectrum invariants exist for
//! `N = 2..5`; the quadruple sum works for any `N`. The non-local magic is
//! `−ln max F_N(λ')` over orderings `λ'` of the coefficients modulo cyclic
//! shifts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{NlmError, Result};
use crate::invariants::{
    cyclic_sum, det_invariant, monomial_sym, next_permutation, power_sum, sqrt_det_invariant, ExponentPattern,
};
use crate::scalar::Real;

/// Orderings whose `F` lies within this of the maximum count as tied.
pub const ARGMAX_TIE_TOLERANCE: f64 = 1e-12;

pub const CLOSED_FORM_DIMENSIONS: [usize; 4] = [2, 3, 4, 5];

const COMPOSITE_NOTE: &str = "reference expression; not a certified global minimum";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Method {
    ClosedForm,
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closedForm",
            Method::Oracle => "oracle",
        })
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "closedForm" | "closed-form" | "closed" => Ok(Method::ClosedForm),
            "oracle" => Ok(Method::Oracle),
            other => Err(format!("unknown method {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NlmResult<T: Real> {
    /// Non-local magic in nats.
    pub value: T,
    pub f_of_lambda: T,
    /// `λ' = (λ[σ_0], λ[σ_1], …)` attaining the maximum.
    pub argmax_ordering: Vec<usize>,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// `F_N` of an ordered coefficient vector by the quadruple sum
/// `Σ_a Σ_{j,k,p} λ_j λ_{j+a} λ_k λ_{k+a} λ_p λ_{p+a} λ_q λ_{q+a}` with
/// `q = j − k + p`, indices mod `N`.
pub fn f_oracle<T: Real>(lambdas: &[T]) -> T {
    let n = lambdas.len();
    let mut total = T::zero();
    for a in 0..n {
        // pair_j = λ_j λ_{j+a}
        let pair: Vec<T> = (0..n).map(|j| lambdas[j] * lambdas[(j + a) % n]).collect();
        for j in 0..n {
            if pair[j] == T::zero() {
                continue;
            }
            for k in 0..n {
                let jk = pair[j] * pair[k];
                if jk == T::zero() {
                    continue;
                }
                for p in 0..n {
                    let q = (j + n - k + p) % n;
                    total += jk * pair[p] * pair[q];
                }
            }
        }
    }
    total
}

/// `F_N` of an ordered coefficient vector from the closed-form invariant
/// expressions, `N ∈ {2, 3, 4, 5}`.
pub fn f_closed<T: Real>(lambdas: &[T]) -> Result<T> {
    let n = lambdas.len();
    let lit = T::lit;
    let p2 = || power_sum(lambdas, lit(2.0));
    let p4 = || power_sum(lambdas, lit(4.0));
    let cyc = |s: &str| cyclic_sum(lambdas, &pattern(s));
    let value = match n {
        2 => {
            let e2 = det_invariant(lambdas);
            T::one() - lit(4.0) * e2 + lit(16.0) * e2 * e2
        }
        3 => {
            let p2 = p2();
            let s1 = monomial_sym(lambdas, &pattern("1"))?;
            T::one() - lit(2.0) * p2 + lit(2.0) * p2 * p2 + lit(4.0) * det_invariant(lambdas) * s1 * s1
        }
        4 => {
            let p2 = p2();
            lit(3.0) * p2 * p2 - lit(2.0) * p4()
                + lit(120.0) * det_invariant(lambdas)
                + lit(4.0) * cyc("404")?
                + lit(12.0) * cyc("242")?
                + lit(8.0) * cyc("1331")?
        }
        5 => {
            let p2 = p2();
            lit(3.0) * p2 * p2 - lit(2.0) * p4()
                + lit(24.0) * sqrt_det_invariant(lambdas) * monomial_sym(lambdas, &pattern("111"))?
                + lit(24.0) * cyc("2222")?
                + lit(12.0) * cyc("242")?
                + lit(12.0) * cyc("2204")?
                + lit(8.0) * cyc("1331")?
                + lit(8.0) * cyc("3113")?
        }
        other => return Err(NlmError::UnsupportedDimension(other)),
    };
    Ok(value)
}

fn pattern(s: &str) -> ExponentPattern {
    s.parse().expect("static pattern literal")
}

/// `F_N` of an ordered coefficient vector by the chosen method.
pub fn f_value<T: Real>(lambdas: &[T], method: Method) -> Result<T> {
    match method {
        Method::ClosedForm => f_closed(lambdas),
        Method::Oracle => {
            if lambdas.len() < 2 {
                return Err(NlmError::InvalidDimension(lambdas.len()));
            }
            Ok(f_oracle(lambdas))
        }
    }
}

/// Schmidt-attained non-local magic `−ln max_{λ'} F_N(λ')`.
///
/// The maximum runs over the `(N−1)!` orderings that keep `λ[0]` in front,
/// one per cyclic class. Ties within [`ARGMAX_TIE_TOLERANCE`] resolve to the
/// lexicographically smallest ordering.
pub fn nlm_schmidt<T: Real>(lambdas: &[T], method: Method) -> Result<NlmResult<T>> {
    let n = lambdas.len();
    if n < 2 {
        return Err(NlmError::InvalidDimension(n));
    }
    if method == Method::ClosedForm && !CLOSED_FORM_DIMENSIONS.contains(&n) {
        return Err(NlmError::UnsupportedDimension(n));
    }
    for (index, &l) in lambdas.iter().enumerate() {
        if !(l >= T::zero()) || !l.is_finite() {
            return Err(NlmError::InvalidCoefficient {
                index,
                value: l.to_f64_lossy(),
            });
        }
    }

    let mut rest: Vec<usize> = (1..n).collect();
    let mut candidates: Vec<(Vec<usize>, T)> = Vec::new();
    let mut permuted = vec![T::zero(); n];
    loop {
        let ordering: Vec<usize> = std::iter::once(0).chain(rest.iter().copied()).collect();
        for (slot, &i) in permuted.iter_mut().zip(&ordering) {
            *slot = lambdas[i];
        }
        candidates.push((ordering, f_value(&permuted, method)?));
        if !next_permutation(&mut rest) {
            break;
        }
    }

    let best = candidates.iter().map(|(_, f)| *f).fold(T::neg_infinity(), T::max);
    let tol = T::lit(ARGMAX_TIE_TOLERANCE);
    let (ordering, f) = candidates
        .into_iter()
        .find(|(_, f)| *f >= best - tol)
        .expect("at least one ordering");
    Ok(NlmResult {
        value: T::zero() - f.ln(),
        f_of_lambda: f,
        argmax_ordering: ordering,
        method,
        note: (!is_prime(n)).then(|| COMPOSITE_NOTE.to_string()),
    })
}

/// Linear non-local magic `1 − exp(−𝓜)`.
pub fn nlm_linear<T: Real>(value: T) -> T {
    T::one() - (-value).exp()
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}
