//! Multi-start minimisation of `m2` over `SU(N) ⊗ SU(N)`.

mod lbfgs;
mod objective;
mod su;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{NlmError, Result};
use crate::qudit_core::PureBipartiteState;
use crate::scalar::Real;

pub use lbfgs::{LbfgsOutcome, LbfgsSettings, Termination};
pub use objective::{gradient, objective, Evaluator, GradientMode, FD_STEP};
pub use su::{su_from_params, GeneratorBasis};

/// Chart coordinates of `(U_A, U_B)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LocalUnitaryParams<T: Real> {
    pub theta_a: Vec<T>,
    pub theta_b: Vec<T>,
}

impl<T: Real> LocalUnitaryParams<T> {
    pub fn new(theta_a: Vec<T>, theta_b: Vec<T>, dim: usize) -> Result<Self> {
        let p = Self { theta_a, theta_b };
        p.check_dim(dim)?;
        Ok(p)
    }

    pub fn zeros(dim: usize) -> Self {
        let m = dim * dim - 1;
        Self {
            theta_a: vec![T::zero(); m],
            theta_b: vec![T::zero(); m],
        }
    }

    /// Splits `[θ_A, θ_B]`.
    pub fn from_flat(flat: &[T], dim: usize) -> Result<Self> {
        let m = dim * dim - 1;
        if flat.len() != 2 * m {
            return Err(NlmError::ParamLength {
                expected: 2 * m,
                got: flat.len(),
            });
        }
        Self::new(flat[..m].to_vec(), flat[m..].to_vec(), dim)
    }

    pub fn to_flat(&self) -> Vec<T> {
        self.theta_a.iter().chain(&self.theta_b).copied().collect()
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if dim < 2 {
            return Err(NlmError::InvalidDimension(dim));
        }
        let m = dim * dim - 1;
        for v in [&self.theta_a, &self.theta_b] {
            if v.len() != m {
                return Err(NlmError::ParamLength {
                    expected: m,
                    got: v.len(),
                });
            }
        }
        if let Some((index, value)) = self.to_flat().into_iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(NlmError::InvalidCoefficient {
                index,
                value: value.to_f64_lossy(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OptimizerConfig<T: Real> {
    pub n_starts: usize,
    pub max_iter: usize,
    /// On the max-norm of the gradient.
    pub grad_tolerance: T,
    pub seed: u64,
    /// Standard deviation of the initial angles.
    pub init_scale: T,
    pub gradient_mode: GradientMode,
    /// Run start 0 from `θ = 0` instead of a random draw.
    pub identity_start: bool,
    /// Number of curvature pairs kept by L-BFGS.
    pub memory: usize,
}

impl<T: Real> Default for OptimizerConfig<T> {
    fn default() -> Self {
        Self {
            n_starts: 50,
            max_iter: 300,
            grad_tolerance: T::lit(1e-9),
            seed: 0,
            init_scale: T::one(),
            gradient_mode: GradientMode::Analytic,
            identity_start: true,
            memory: 60,
        }
    }
}

impl<T: Real> OptimizerConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(NlmError::InvalidConfig(m.to_string()));
        if self.n_starts == 0 {
            return bad("nStarts must be at least 1");
        }
        if self.max_iter == 0 {
            return bad("maxIter must be at least 1");
        }
        if !(self.grad_tolerance > T::zero()) {
            return bad("gradTolerance must be positive");
        }
        if !(self.init_scale >= T::zero()) || !self.init_scale.is_finite() {
            return bad("initScale must be finite and non-negative");
        }
        if self.memory == 0 {
            return bad("memory must be at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OptResult<T: Real> {
    pub min_value: T,
    pub best_params: LocalUnitaryParams<T>,
    /// Indexed by start.
    pub per_start_values: Vec<T>,
    pub converged: Vec<bool>,
    pub evaluations: usize,
}

impl<T: Real> OptResult<T> {
    pub fn converged_fraction(&self) -> f64 {
        let k = self.converged.iter().filter(|&&c| c).count();
        k as f64 / self.converged.len() as f64
    }
}

/// Initial angles of one start, from stream `start` of the seeded generator.
pub fn initial_point<T: Real>(config: &OptimizerConfig<T>, dim: usize, start: usize) -> Vec<T> {
    let len = 2 * (dim * dim - 1);
    if start == 0 && config.identity_start {
        return vec![T::zero(); len];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(start as u64);
    (0..len)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            T::lit(z) * config.init_scale
        })
        .collect()
}

/// One L-BFGS descent from [`initial_point`].
pub fn run_start<T: Real>(ev: &Evaluator<T>, config: &OptimizerConfig<T>, start: usize) -> LbfgsOutcome<T> {
    let settings = LbfgsSettings {
        max_iter: config.max_iter,
        grad_tolerance: config.grad_tolerance,
        memory: config.memory,
    };
    let x0 = initial_point(config, ev.dim(), start);
    lbfgs::minimize(x0, |x| ev.value_and_gradient_with(x, config.gradient_mode).ok(), &settings)
}

/// Runs `config.n_starts` independent L-BFGS descents and keeps the best.
pub fn minimize<T: Real>(state: &PureBipartiteState<T>, config: &OptimizerConfig<T>) -> Result<OptResult<T>> {
    config.validate()?;
    let dim = state.dim();
    let ev = Evaluator::new(state);
    let runs: Vec<LbfgsOutcome<T>> = (0..config.n_starts)
        .into_par_iter()
        .map(|start| run_start(&ev, config, start))
        .collect();

    let mut best: Option<usize> = None;
    for (i, r) in runs.iter().enumerate() {
        if r.value.is_finite() && best.map_or(true, |b| r.value < runs[b].value) {
            best = Some(i);
        }
    }
    let Some(best) = best else {
        return Err(NlmError::InvariantViolation("no start produced a finite objective".into()));
    };
    let best_params = LocalUnitaryParams::from_flat(&runs[best].x, dim)?;
    Ok(OptResult {
        min_value: runs[best].value,
        best_params,
        per_start_values: runs.iter().map(|r| r.value).collect(),
        converged: runs.iter().map(|r| r.converged()).collect(),
        evaluations: runs.iter().map(|r| r.evaluations).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_unitary;
    use crate::qudit_core::apply_local_unitaries;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn scrambled(st: &PureBipartiteState<f64>, seed: u64) -> PureBipartiteState<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = st.dim();
        let ua = random_unitary(n, &mut rng);
        let ub = random_unitary(n, &mut rng);
        apply_local_unitaries(st, &ua, &ub).unwrap()
    }

    #[test]
    fn params_roundtrip_and_validation() {
        let p = LocalUnitaryParams::new(vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0], 2).unwrap();
        assert_eq!(LocalUnitaryParams::from_flat(&p.to_flat(), 2).unwrap(), p);
        assert!(LocalUnitaryParams::new(vec![1.0; 3], vec![1.0; 2], 2).is_err());
        assert!(LocalUnitaryParams::new(vec![f64::NAN, 0.0, 0.0], vec![0.0; 3], 2).is_err());
        let js = serde_json::to_string(&p).unwrap();
        assert!(js.contains("thetaA") && js.contains("thetaB"));
    }

    #[test]
    fn config_validation() {
        let ok = OptimizerConfig::<f64>::default();
        assert!(ok.validate().is_ok());
        for bad in [
            OptimizerConfig { n_starts: 0, ..ok.clone() },
            OptimizerConfig { max_iter: 0, ..ok.clone() },
            OptimizerConfig { grad_tolerance: 0.0, ..ok.clone() },
            OptimizerConfig { init_scale: f64::NAN, ..ok.clone() },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn product_state_minimum_is_zero() {
        let st = scrambled(&PureBipartiteState::basis(3, 0, 0).unwrap(), 5);
        let cfg = OptimizerConfig { n_starts: 8, ..Default::default() };
        let r = minimize(&st, &cfg).unwrap();
        assert!(r.min_value.abs() < 1e-8, "{}", r.min_value);
    }

    #[test]
    fn aligned_qutrit_reaches_ln2() {
        let st = PureBipartiteState::aligned(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]).unwrap();
        let cfg = OptimizerConfig { n_starts: 50, ..Default::default() };
        let r = minimize(&st, &cfg).unwrap();
        assert!((r.min_value - 2f64.ln()).abs() < 1e-6, "{}", r.min_value);

        let r2 = minimize(&scrambled(&st, 9), &cfg).unwrap();
        assert!((r2.min_value - r.min_value).abs() < 1e-5, "{}", r2.min_value);
    }

    #[test]
    fn result_invariants_and_repeatability() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = random_unitary::<f64, _>(16, &mut rng);
        let st = PureBipartiteState::normalized(crate::linalg::CMatrix::from_fn(4, 4, |j, k| g[(j * 4 + k, 0)])).unwrap();
        let cfg = OptimizerConfig { n_starts: 6, max_iter: 60, seed: 3, ..Default::default() };
        let a = minimize(&st, &cfg).unwrap();
        let b = minimize(&st, &cfg).unwrap();
        assert_eq!(a, b);
        let lo = a.per_start_values.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(a.min_value, lo);
        assert_eq!(a.per_start_values.len(), 6);
        let at_zero = objective(&st, &LocalUnitaryParams::zeros(4)).unwrap();
        assert!(a.min_value <= at_zero + 1e-9);
        let recomputed = objective(&st, &a.best_params).unwrap();
        assert!((recomputed - a.min_value).abs() < 1e-10);

        let no_identity = OptimizerConfig { identity_start: false, ..cfg.clone() };
        let c = minimize(&st, &no_identity).unwrap();
        assert_eq!(c.per_start_values[1..], a.per_start_values[1..]);
    }

    #[test]
    fn finite_difference_mode_also_descends() {
        let st = scrambled(&PureBipartiteState::aligned(&[0.8, 0.6]).unwrap(), 2);
        let cfg = OptimizerConfig {
            n_starts: 3,
            max_iter: 100,
            gradient_mode: GradientMode::FiniteDifference,
            grad_tolerance: 1e-7,
            ..Default::default()
        };
        let r = minimize(&st, &cfg).unwrap();
        let expected = -crate::closed_form::f_oracle(&[0.8f64, 0.6]).ln();
        assert!((r.min_value - expected).abs() < 1e-7);
    }
}
