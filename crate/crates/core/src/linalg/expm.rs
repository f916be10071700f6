use num_complex::Complex;

use super::CMatrix;
use crate::scalar::Real;

const PADE_DEGREE: usize = 6;

/// Matrix exponential by scaling and squaring with a diagonal `[6/6]` Padé
/// approximant.
///
/// The input is scaled by `2^-s` until its 1-norm is at most `1/2`, where the
/// truncation error of the `[6/6]` approximant is below `1e-17` relative.
pub fn expm<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.rows();
    let norm = a.norm_one();
    let mut squarings = 0u32;
    if norm > T::lit(0.5) {
        squarings = (norm / T::lit(0.5)).log2().ceil().to_u32().unwrap_or(0);
    }
    let scale = T::lit(2.0).powi(-(squarings as i32));
    let a = a.scale(Complex::new(scale, T::zero()));

    let coeffs = pade_coefficients::<T>(PADE_DEGREE);
    // Even and odd parts: N = E + O, D = E - O.
    let mut even = CMatrix::identity(n).scale(Complex::new(coeffs[0], T::zero()));
    let mut odd = CMatrix::zeros(n, n);
    let mut power = CMatrix::identity(n);
    for (k, &c) in coeffs.iter().enumerate().skip(1) {
        power = power.matmul(&a);
        let term = power.scale(Complex::new(c, T::zero()));
        if k % 2 == 0 {
            even = &even + &term;
        } else {
            odd = &odd + &term;
        }
    }
    let numer = &even + &odd;
    let denom = &even - &odd;
    let mut result = denom
        .solve(&numer)
        .expect("Pade denominator is nonsingular for scaled input");
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result
}

/// `c_k = (2q - k)! q! / ((2q)! k! (q - k)!)`.
fn pade_coefficients<T: Real>(q: usize) -> Vec<T> {
    let mut c = vec![T::one(); q + 1];
    for k in 1..=q {
        let num = T::from_usize_lossy(q - k + 1);
        let den = T::from_usize_lossy(k * (2 * q - k + 1));
        c[k] = c[k - 1] * num / den;
    }
    c
}
