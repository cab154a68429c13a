//! Linear programs behind the A-norm: minimal l1 coefficient representation
//! and the supremum of a functional over the A-unit ball.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative residual below which a vector counts as lying in a span.
pub const SPAN_TOL: f64 = 1e-8;

/// Orthonormal basis (columns) of the column space of `g`, by SVD.
pub(crate) fn column_space(g: &DMatrix<f64>) -> DMatrix<f64> {
    let (d, n) = g.shape();
    if d == 0 || n == 0 {
        return DMatrix::zeros(d, 0);
    }
    let svd = g.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = smax * 1e-11 * (d.max(n) as f64);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cut)
        .collect();
    DMatrix::from_fn(d, keep.len(), |i, j| u[(i, keep[j])])
}

/// Minimal `sum |c_j|` subject to `g c = f`, where the columns of `g` are the
/// atoms. Returns the optimal value and a minimizing coefficient vector.
pub(crate) fn min_l1_representation(g: &DMatrix<f64>, f: &[f64]) -> Result<(f64, Vec<f64>)> {
    let (d, n) = g.shape();
    let fv = nalgebra::DVector::from_column_slice(f);
    let fnorm = fv.norm();
    if fnorm == 0.0 {
        return Ok((0.0, vec![0.0; n]));
    }
    let basis = column_space(g);
    let proj = &basis * (basis.transpose() * &fv);
    let residual = (&fv - proj).norm() / fnorm;
    if residual > SPAN_TOL {
        return Err(Error::NotInSpan { residual });
    }
    debug_assert_eq!(basis.nrows(), d);
    let reduced_g = basis.transpose() * g;
    let reduced_f = basis.transpose() * &fv;

    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let plus: Vec<_> = (0..n).map(|_| problem.add_var(1.0, (0.0, f64::INFINITY))).collect();
    let minus: Vec<_> = (0..n).map(|_| problem.add_var(1.0, (0.0, f64::INFINITY))).collect();
    for r in 0..reduced_g.nrows() {
        let mut row = Vec::with_capacity(2 * n);
        for j in 0..n {
            let a = reduced_g[(r, j)];
            if a != 0.0 {
                row.push((plus[j], a));
                row.push((minus[j], -a));
            }
        }
        problem.add_constraint(&row, ComparisonOp::Eq, reduced_f[r]);
    }
    let solution = problem
        .solve()
        .map_err(|e| Error::LinearProgram(e.to_string()))?;
    let coeffs: Vec<f64> = (0..n).map(|j| solution[plus[j]] - solution[minus[j]]).collect();
    let value = coeffs.iter().map(|c| c.abs()).sum();
    Ok((value, coeffs))
}

/// `max <F, f>` over `f = g c` with `sum |c_j| <= 1`, with the pairing
/// `<F, f> = sum_i w_i F_i f_i`. The ambient coordinates of `f` are free LP
/// variables tied to the coefficients by equality rows.
pub(crate) fn sup_over_a_ball(g: &DMatrix<f64>, functional: &[f64], weights: &[f64]) -> Result<f64> {
    let (d, n) = g.shape();
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let fvars: Vec<_> = (0..d)
        .map(|i| problem.add_var(weights[i] * functional[i], (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    let plus: Vec<_> = (0..n).map(|_| problem.add_var(0.0, (0.0, f64::INFINITY))).collect();
    let minus: Vec<_> = (0..n).map(|_| problem.add_var(0.0, (0.0, f64::INFINITY))).collect();
    for i in 0..d {
        let mut row = vec![(fvars[i], 1.0)];
        for j in 0..n {
            let a = g[(i, j)];
            if a != 0.0 {
                row.push((plus[j], -a));
                row.push((minus[j], a));
            }
        }
        problem.add_constraint(&row, ComparisonOp::Eq, 0.0);
    }
    let mass: Vec<_> = plus.iter().chain(&minus).map(|&v| (v, 1.0)).collect();
    problem.add_constraint(&mass, ComparisonOp::Le, 1.0);
    let solution = problem
        .solve()
        .map_err(|e| Error::LinearProgram(e.to_string()))?;
    Ok(solution.objective())
}
