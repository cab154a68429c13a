//! `M_p(X_N) = sup_f ||f||_inf / ||f||_p` by direct maximization over the
//! subspace, and by minimizing `||D(x, .) - v||_{p'}` over `v` orthogonal to
//! the subspace. The first is a lower bound, the second an upper bound, up
//! to solver accuracy.

use nalgebra::{DMatrix, DVector};

use super::Subspace;
use crate::error::{invalid, Error, Result};
use crate::par;
use crate::solver::{minimize, SmoothConvex, SolverOptions};

/// Default relative tolerance of the direct problem for `p != 2`.
pub const DIRECT_TOL: f64 = 1e-5;
/// Default relative tolerance of the dual problem.
pub const DUAL_TOL: f64 = 1e-5;

fn check_p(p: f64) -> Result<()> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(invalid("p", format!("requires 2 <= p < inf, got {p}")));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(invalid("tol", format!("must lie in (0, 1), got {tol}")));
    }
    Ok(())
}

/// Optimum of the direct problem at one point.
#[derive(Clone, Debug)]
pub struct DirectSolution {
    /// `max { f(x) : f in X_N, ||f||_p <= 1 }`.
    pub value: f64,
    /// Basis coefficients of the maximizer (zero when all of `X_N`
    /// vanishes at `x`).
    pub coefficients: Vec<f64>,
}

/// `sum_i mu_i |(U (a0 + Z y))_i|^p` over the affine set `a . b = 1`.
struct AffinePower<'a> {
    weights: &'a [f64],
    p: f64,
    /// `U a0` and `U Z`.
    base: DVector<f64>,
    dirs: DMatrix<f64>,
}

impl AffinePower<'_> {
    fn values(&self, y: &DVector<f64>) -> DVector<f64> {
        &self.base + &self.dirs * y
    }
}

impl SmoothConvex for AffinePower<'_> {
    fn dim(&self) -> usize {
        self.dirs.ncols()
    }

    fn value(&self, y: &DVector<f64>) -> f64 {
        self.values(y)
            .iter()
            .zip(self.weights)
            .map(|(v, w)| w * v.abs().powf(self.p))
            .sum()
    }

    fn gradient(&self, y: &DVector<f64>) -> DVector<f64> {
        let f = self.values(y);
        let s = DVector::from_iterator(
            f.len(),
            f.iter().zip(self.weights).map(|(v, w)| self.p * w * v.signum() * v.abs().powf(self.p - 1.0)),
        );
        self.dirs.transpose() * s
    }

    fn hessian(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let f = self.values(y);
        let mut scaled = self.dirs.clone();
        for (i, v) in f.iter().enumerate() {
            let h = self.p * (self.p - 1.0) * self.weights[i] * v.abs().powf(self.p - 2.0);
            scaled.row_mut(i).scale_mut(h);
        }
        self.dirs.transpose() * scaled
    }
}

/// Orthonormal basis of the complement of `b` in `R^N`.
fn complement_basis(b: &DVector<f64>) -> DMatrix<f64> {
    let n = b.len();
    let bb = b.dot(b);
    let proj = DMatrix::identity(n, n) - b * b.transpose() / bb;
    let svd = proj.svd(true, false);
    let u = svd.u.expect("requested U");
    let keep: Vec<usize> = (0..n).filter(|&i| svd.singular_values[i] > 0.5).collect();
    DMatrix::from_fn(n, keep.len(), |i, j| u[(i, keep[j])])
}

/// Direct problem at sample point `x`.
pub fn m_p_direct_at(sub: &Subspace, x: usize, p: f64, tol: f64) -> Result<DirectSolution> {
    check_p(p)?;
    check_tol(tol)?;
    let n = sub.dim();
    let b = DVector::from_vec(sub.values_at(x));
    let bb = b.dot(&b);
    if bb == 0.0 {
        return Ok(DirectSolution { value: 0.0, coefficients: vec![0.0; n] });
    }
    let u = sub.matrix();
    let weights = sub.measure().weights();
    let a0 = &b / bb;
    if p == 2.0 {
        // The maximizer is D(x, .) / D(x, x)^{1/2}.
        let value = bb.sqrt();
        return Ok(DirectSolution { value, coefficients: (&b / value).iter().cloned().collect() });
    }
    let z = complement_basis(&b);
    let objective = AffinePower { weights, p, base: &u * &a0, dirs: &u * &z };
    let y0 = DVector::zeros(z.ncols());
    let start = objective.value(&y0);
    let a = if z.ncols() == 0 {
        a0
    } else {
        let opts = SolverOptions { tol: tol * 1e-3, value_scale: Some(start), ..SolverOptions::default() };
        let min = minimize(&objective, y0, opts)?;
        &a0 + &z * &min.x
    };
    let f = &u * &a;
    let norm = sub.measure().norm(f.as_slice(), p);
    // f(x) = 1 on the affine set, so f / ||f||_p attains 1 / ||f||_p.
    Ok(DirectSolution { value: 1.0 / norm, coefficients: (a / norm).iter().cloned().collect() })
}

/// `max_x` of the direct problem over all sample points.
pub fn m_p_direct(sub: &Subspace, p: f64, tol: f64) -> Result<f64> {
    let s = sub.measure().len();
    let per_point = par::try_map_range(s, |x| m_p_direct_at(sub, x, p, tol).map(|d| d.value))?;
    Ok(per_point.into_iter().fold(0.0, f64::max))
}

/// Optimum of the dual problem at one point.
#[derive(Clone, Debug)]
pub struct DualSolution {
    /// `||w||_{p'}` at the computed minimizer.
    pub value: f64,
    /// `w = D(x, .) - v` with `v` orthogonal to `X_N`.
    pub w: Vec<f64>,
    pub iterations: usize,
}

const DUAL_MAX_ITER: usize = 2000;

/// Dual problem at sample point `x`: minimize `sum_i mu_i |w_i|^{p'}`
/// subject to `<u_k, w>_mu = u_k(x)` for every basis vector, starting from
/// `w = D(x, .)`.
///
/// The kink of `|w|^{p'}` at zero is smoothed to `(w^2 + eps^2)^{p'/2}` and
/// `eps` is driven down in stages; each stage runs equality-constrained
/// Newton with the (diagonal) Hessian, eliminating the constraints through
/// their `N x N` Schur complement. Iterates stay feasible, so the reported
/// value is attained by an admissible `w`.
pub fn m_p_dual_at(sub: &Subspace, kernel: &DMatrix<f64>, x: usize, p: f64, tol: f64) -> Result<DualSolution> {
    check_p(p)?;
    check_tol(tol)?;
    let s = sub.measure().len();
    let r = p / (p - 1.0);
    let mu = DVector::from_column_slice(sub.measure().weights());
    let u = sub.matrix();
    // Constraint matrix A = U^T diag(mu).
    let a = DMatrix::from_fn(sub.dim(), s, |k, i| u[(i, k)] * mu[i]);
    let mut w = DVector::from_iterator(s, (0..s).map(|y| kernel[(x, y)]));
    let exact = |w: &DVector<f64>| -> f64 { w.iter().zip(mu.iter()).map(|(v, m)| m * v.abs().powf(r)).sum() };
    if exact(&w) == 0.0 {
        return Ok(DualSolution { value: 0.0, w: w.iter().cloned().collect(), iterations: 0 });
    }
    let wmax = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let eps_final = wmax * (tol * 1e-5).min(1e-10);
    let mut eps = wmax * 1e-1;
    let mut iterations = 0;
    loop {
        let smooth = |w: &DVector<f64>| -> f64 {
            w.iter().zip(mu.iter()).map(|(v, m)| m * (v * v + eps * eps).powf(r / 2.0)).sum()
        };
        let mut value = smooth(&w);
        loop {
            let g = DVector::from_iterator(
                s,
                (0..s).map(|i| r * mu[i] * w[i] * (w[i] * w[i] + eps * eps).powf(r / 2.0 - 1.0)),
            );
            let hinv = DVector::from_iterator(
                s,
                (0..s).map(|i| {
                    let t = w[i] * w[i] + eps * eps;
                    1.0 / (r * mu[i] * t.powf(r / 2.0 - 2.0) * ((r - 1.0) * w[i] * w[i] + eps * eps))
                }),
            );
            // S lambda = -A H^{-1} g with S = A H^{-1} A^T.
            let mut ah = a.clone();
            for i in 0..s {
                ah.column_mut(i).scale_mut(hinv[i]);
            }
            let schur = &ah * a.transpose();
            let rhs = -(&ah * &g);
            let lambda = match schur.clone().cholesky() {
                Some(ch) => ch.solve(&rhs),
                None => schur
                    .svd(true, true)
                    .solve(&rhs, 1e-14)
                    .map_err(|_| Error::NonConvergence { iterations, grad_norm: f64::NAN })?,
            };
            let step = -(g.clone() + a.transpose() * &lambda).component_mul(&hinv);
            let decrement = -g.dot(&step);
            // The decrement bounds the remaining gap in the objective.
            if !(decrement > 4.0 * f64::EPSILON * value) {
                break;
            }
            if iterations >= DUAL_MAX_ITER {
                return Err(Error::NonConvergence { iterations, grad_norm: (decrement / value).sqrt() });
            }
            iterations += 1;
            let mut t = 1.0;
            let mut moved = false;
            for _ in 0..60 {
                let trial = &w + &step * t;
                let ft = smooth(&trial);
                if ft <= value - 1e-4 * t * decrement {
                    w = trial;
                    value = ft;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if !moved {
                break;
            }
        }
        if eps <= eps_final {
            break;
        }
        eps = (eps * 0.1).max(eps_final);
    }
    Ok(DualSolution { value: exact(&w).powf(1.0 / r), w: w.iter().cloned().collect(), iterations })
}

/// `max_x` of the dual problem over all sample points.
pub fn m_p_dual(sub: &Subspace, p: f64, tol: f64) -> Result<f64> {
    let kernel = super::dirichlet_kernel(sub)?;
    let s = sub.measure().len();
    let per_point = par::try_map_range(s, |x| m_p_dual_at(sub, &kernel, x, p, tol).map(|d| d.value))?;
    Ok(per_point.into_iter().fold(0.0, f64::max))
}
