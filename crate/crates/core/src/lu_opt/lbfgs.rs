//! Limited-memory BFGS with a bracketing weak Wolfe line search.

use std::collections::VecDeque;

use crate::scalar::Real;

const ARMIJO_C1: f64 = 1e-4;
/// Approximate Wolfe test used once the Armijo decrease drops below rounding:
/// `f(x + αd) ≤ f(x) + ε|f(x)|` and `∇f(x + αd)·d ≤ (2δ − 1) ∇f(x)·d`.
const APPROX_WOLFE_DELTA: f64 = 0.1;
const APPROX_WOLFE_EPS_ULPS: f64 = 16.0;
/// Curvature constant of the weak Wolfe condition.
const WOLFE_C2: f64 = 0.9;
const MAX_LINE_STEPS: usize = 60;

#[derive(Clone, Debug)]
pub struct LbfgsSettings<T: Real> {
    pub max_iter: usize,
    /// Stop once `max_k |g_k|` falls below this.
    pub grad_tolerance: T,
    pub memory: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    GradientTolerance,
    MaxIterations,
    /// No step along the search direction gave sufficient decrease.
    LineSearchFailed,
    NonFinite,
}

#[derive(Clone, Debug)]
pub struct LbfgsOutcome<T: Real> {
    pub x: Vec<T>,
    pub value: T,
    pub grad_max_norm: T,
    pub iterations: usize,
    pub evaluations: usize,
    pub termination: Termination,
}

impl<T: Real> LbfgsOutcome<T> {
    pub fn converged(&self) -> bool {
        self.termination == Termination::GradientTolerance
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn max_norm<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

fn all_finite<T: Real>(v: T, g: &[T]) -> bool {
    v.is_finite() && g.iter().all(|x| x.is_finite())
}

/// Minimises `f` from `x0`. `f` returns value and gradient, or `None` if
/// the point cannot be evaluated.
pub fn minimize<T, F>(x0: Vec<T>, mut f: F, settings: &LbfgsSettings<T>) -> LbfgsOutcome<T>
where
    T: Real,
    F: FnMut(&[T]) -> Option<(T, Vec<T>)>,
{
    let mut evaluations = 1;
    let (mut fx, mut g) = match f(&x0) {
        Some((v, g)) if all_finite(v, &g) => (v, g),
        other => {
            let value = other.map_or(T::nan(), |(v, _)| v);
            return LbfgsOutcome {
                x: x0,
                value,
                grad_max_norm: T::nan(),
                iterations: 0,
                evaluations,
                termination: Termination::NonFinite,
            };
        }
    };
    let mut x = x0;
    let mut history: VecDeque<(Vec<T>, Vec<T>, T)> = VecDeque::with_capacity(settings.memory);
    let mut iterations = 0;
    let c1 = T::lit(ARMIJO_C1);
    let c2 = T::lit(WOLFE_C2);
    let wolfe_factor = T::lit(2.0 * APPROX_WOLFE_DELTA - 1.0);
    let noise_eps = T::lit(APPROX_WOLFE_EPS_ULPS) * T::epsilon();

    let termination = loop {
        if max_norm(&g) < settings.grad_tolerance {
            break Termination::GradientTolerance;
        }
        if iterations >= settings.max_iter {
            break Termination::MaxIterations;
        }

        let mut d = two_loop(&g, &history);
        let mut slope = dot(&g, &d);
        if !(slope < T::zero()) {
            history.clear();
            d = g.iter().map(|&v| -v).collect();
            slope = dot(&g, &d);
        }

        let mut step = if history.is_empty() {
            T::one().min(T::one() / max_norm(&g))
        } else {
            T::one()
        };
        // Weak Wolfe search by bracketing: halve towards `lo` on failed
        // decrease, double (or bisect) while the slope is still steep.
        let (mut lo, mut hi) = (T::zero(), T::infinity());
        let mut accepted = None;
        let mut fallback = None;
        for _ in 0..MAX_LINE_STEPS {
            let trial: Vec<T> = x.iter().zip(&d).map(|(&xi, &di)| xi + step * di).collect();
            evaluations += 1;
            let point = f(&trial).filter(|(ft, gt)| all_finite(*ft, gt));
            match point {
                Some((ft, gt)) if ft <= fx + c1 * step * slope => {
                    if dot(&gt, &d) >= c2 * slope {
                        accepted = Some((trial, ft, gt));
                        break;
                    }
                    // A step that leaves f unchanged is rounding noise, not progress.
                    if ft < fx {
                        fallback = Some((trial, ft, gt));
                    }
                    lo = step;
                }
                Some((ft, gt)) => {
                    let dg = dot(&gt, &d);
                    if ft <= fx + noise_eps * fx.abs() && dg >= c2 * slope && dg <= wolfe_factor * slope {
                        accepted = Some((trial, ft, gt));
                        break;
                    }
                    hi = step;
                }
                None => hi = step,
            }
            step = if hi.is_finite() {
                T::lit(0.5) * (lo + hi)
            } else {
                step * T::lit(2.0)
            };
        }
        let accepted = accepted.or(fallback);

        let Some((x_new, f_new, g_new)) = accepted else {
            if history.is_empty() {
                break Termination::LineSearchFailed;
            }
            // Retry once along steepest descent.
            history.clear();
            continue;
        };

        let s: Vec<T> = x_new.iter().zip(&x).map(|(&a, &b)| a - b).collect();
        let y: Vec<T> = g_new.iter().zip(&g).map(|(&a, &b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > T::epsilon() * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() {
            if history.len() == settings.memory {
                history.pop_front();
            }
            history.push_back((s, y, T::one() / sy));
        }
        x = x_new;
        fx = f_new;
        g = g_new;
        iterations += 1;
    };

    LbfgsOutcome {
        grad_max_norm: max_norm(&g),
        x,
        value: fx,
        iterations,
        evaluations,
        termination,
    }
}

/// `−H g` from the stored curvature pairs `(s, y, 1/sᵀy)`.
fn two_loop<T: Real>(g: &[T], history: &VecDeque<(Vec<T>, Vec<T>, T)>) -> Vec<T> {
    let mut q: Vec<T> = g.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = *rho * dot(s, &q);
        for (qi, &yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = *rho * dot(y, &q);
        for (qi, &si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q.into_iter().map(|v| -v).collect()
}
