//! Damped Newton minimization with Armijo backtracking for smooth convex
//! objectives. Shared by the Chebyshev projection and the Nikol'skii problems.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A twice-differentiable convex objective.
pub trait SmoothConvex {
    fn dim(&self) -> usize;
    fn value(&self, x: &DVector<f64>) -> f64;
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64>;
    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64>;
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Relative gradient-norm tolerance.
    pub tol: f64,
    pub max_iter: usize,
    /// Gradient magnitude the tolerance is relative to. Defaults to the
    /// gradient norm at the starting point.
    pub scale: Option<f64>,
    /// Stop once the Newton decrement (an estimate of the remaining
    /// suboptimality) falls below this fraction of the objective.
    pub value_rtol: f64,
    /// Objective magnitude `value_rtol` is relative to, when the objective
    /// itself may approach zero.
    pub value_scale: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 100_000,
            scale: None,
            value_rtol: 0.0,
            value_scale: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: DVector<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
}

const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 80;

/// Newton direction from `H d = -g`, with Levenberg regularization when the
/// Hessian is numerically singular and steepest descent as a last resort.
pub(crate) fn newton_direction(h: DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    let n = g.len();
    let diag_scale = (0..n).map(|i| h[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut shift = 0.0;
    for _ in 0..12 {
        let mut hs = h.clone();
        for i in 0..n {
            hs[(i, i)] += shift;
        }
        if let Some(ch) = hs.cholesky() {
            let d = -ch.solve(g);
            if d.iter().all(|v| v.is_finite()) && d.dot(g) < 0.0 {
                return d;
            }
        }
        shift = if shift == 0.0 { diag_scale * 1e-12 } else { shift * 100.0 };
    }
    -g.clone()
}

pub fn minimize<O: SmoothConvex + ?Sized>(
    obj: &O,
    x0: DVector<f64>,
    opts: SolverOptions,
) -> Result<Minimum> {
    let mut x = x0;
    let mut fx = obj.value(&x);
    let mut g = obj.gradient(&x);
    let scale = opts.scale.unwrap_or_else(|| g.norm()).max(f64::MIN_POSITIVE);
    let target = opts.tol * scale;

    for it in 0..opts.max_iter {
        let gn = g.norm();
        if gn <= target {
            return Ok(Minimum { x, value: fx, grad_norm: gn, iterations: it });
        }
        let d = newton_direction(obj.hessian(&x), &g);
        let slope = g.dot(&d);
        // Newton decrement negligible relative to the objective.
        let floor = opts.value_rtol.max(4.0 * f64::EPSILON);
        let magnitude = fx.abs().max(opts.value_scale.unwrap_or(0.0)).max(f64::MIN_POSITIVE);
        if -slope <= floor * magnitude {
            return Ok(Minimum { x, value: fx, grad_norm: gn, iterations: it });
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let xt = &x + &d * t;
            let ft = obj.value(&xt);
            if ft.is_finite() && ft <= fx + ARMIJO_C1 * t * slope {
                accepted = Some((xt, ft));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((xt, ft)) => {
                x = xt;
                fx = ft;
                g = obj.gradient(&x);
            }
            None => {
                // Line search exhausted: accept only if we are at round-off level.
                if gn <= target.sqrt().max(target * 1e3) {
                    return Ok(Minimum { x, value: fx, grad_norm: gn, iterations: it });
                }
                return Err(Error::NonConvergence { iterations: it, grad_norm: gn });
            }
        }
    }
    let gn = g.norm();
    if gn <= target {
        Ok(Minimum { x, value: fx, grad_norm: gn, iterations: opts.max_iter })
    } else {
        Err(Error::NonConvergence { iterations: opts.max_iter, grad_norm: gn })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// sum_i |x_i - a_i|^4 + (x_0 + x_1)^2
    struct Quartic {
        a: Vec<f64>,
    }

    impl SmoothConvex for Quartic {
        fn dim(&self) -> usize {
            self.a.len()
        }
        fn value(&self, x: &DVector<f64>) -> f64 {
            let s: f64 = x.iter().zip(&self.a).map(|(x, a)| (x - a).powi(4)).sum();
            s + (x[0] + x[1]).powi(2)
        }
        fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
            let mut g = DVector::from_iterator(
                x.len(),
                x.iter().zip(&self.a).map(|(x, a)| 4.0 * (x - a).powi(3)),
            );
            g[0] += 2.0 * (x[0] + x[1]);
            g[1] += 2.0 * (x[0] + x[1]);
            g
        }
        fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
            let mut h = DMatrix::from_diagonal(&DVector::from_iterator(
                x.len(),
                x.iter().zip(&self.a).map(|(x, a)| 12.0 * (x - a).powi(2)),
            ));
            for i in 0..2 {
                for j in 0..2 {
                    h[(i, j)] += 2.0;
                }
            }
            h
        }
    }

    #[test]
    fn converges_on_degenerate_quartic() {
        let obj = Quartic { a: vec![1.0, 1.0, -2.0] };
        let m = minimize(&obj, DVector::zeros(3), SolverOptions::default()).unwrap();
        // Symmetric optimum: x0 = x1 = s with 4(s-1)^3 + 4s = 0.
        let s = m.x[0];
        assert!((4.0 * (s - 1.0f64).powi(3) + 4.0 * s).abs() < 1e-6);
        assert!((m.x[2] + 2.0).abs() < 1e-2);
        assert!(m.grad_norm <= 1e-10 * 36.0 || m.iterations > 0);
    }

    #[test]
    fn already_optimal_start_returns_immediately() {
        let obj = Quartic { a: vec![0.0, 0.0] };
        let m = minimize(&obj, DVector::zeros(2), SolverOptions::default()).unwrap();
        assert_eq!(m.iterations, 0);
        assert_eq!(m.value, 0.0);
    }
}
