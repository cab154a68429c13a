use serde::{Deserialize, Serialize};

use super::nikolskii::{m_p_direct, m_p_dual_at};
use super::{dirichlet_kernel, SamplePointSet, Subspace};
use crate::error::{Error, Result};
use crate::spaces::{Dictionary, NormedSpaceSpec};
use crate::{par, sampling};

/// Slack on `||w_j||_{p'} <= 2 M_p`.
pub const NORM_BOUND_TOL: f64 = 1e-6;
/// Tolerance of the reproducing identity `<f, w_j>_mu = f(x^j)`.
pub const REPRODUCING_TOL: f64 = 1e-8;

/// Vectors `w_j = D(x^j, .) - v_j` and their normalizations `g_j` as a
/// dictionary in `L_{p'}(mu)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiscretizationDictionary {
    pub p: f64,
    pub points: SamplePointSet,
    pub w: Vec<Vec<f64>>,
    /// `||w_j||_{p'}`.
    pub norms: Vec<f64>,
    /// Normalized atoms `g_j = w_j / ||w_j||_{p'}`.
    pub dictionary: Dictionary,
    /// `M_p` from the direct problem.
    pub m_p: f64,
    /// Certified `max_j ||w_j||_{p'}`.
    pub max_norm: f64,
}

/// Builds `w_j` from the dual problem at each `x^j` and certifies the
/// reproducing identity and `||w_j||_{p'} <= 2 M_p`.
pub fn build_discretization_dictionary(sub: &Subspace, pts: &SamplePointSet, p: f64, tol: f64) -> Result<DiscretizationDictionary> {
    let s = sub.measure().len();
    if let Some(&i) = pts.indices.iter().find(|&&i| i >= s) {
        return Err(crate::error::invalid("points", format!("index {i} out of range for {s} points")));
    }
    let kernel = dirichlet_kernel(sub)?;
    let m_p = m_p_direct(sub, p, tol)?;
    let solutions = par::try_map_range(pts.len(), |j| m_p_dual_at(sub, &kernel, pts.indices[j], p, tol))?;
    let measure = sub.measure();
    let pd = p / (p - 1.0);
    let mut w = Vec::with_capacity(pts.len());
    let mut norms = Vec::with_capacity(pts.len());
    for (j, sol) in solutions.into_iter().enumerate() {
        let x = pts.indices[j];
        for (k, u) in sub.basis().iter().enumerate() {
            let defect = (measure.inner(u, &sol.w) - u[x]).abs();
            if defect > REPRODUCING_TOL * u[x].abs().max(1.0) {
                return Err(Error::PropertyViolation(format!(
                    "<u_{k}, w_{j}> misses u_{k}(x^{j}) by {defect}"
                )));
            }
        }
        let norm = measure.norm(&sol.w, pd);
        if norm > 2.0 * m_p + NORM_BOUND_TOL {
            return Err(Error::PropertyViolation(format!(
                "||w_{j}||_p' = {norm} exceeds 2 M_p = {}",
                2.0 * m_p
            )));
        }
        norms.push(norm);
        w.push(sol.w);
    }
    let space = NormedSpaceSpec::discrete(measure.weights().to_vec(), pd)?;
    let dictionary = Dictionary::normalized(space, w.clone())?;
    let max_norm = norms.iter().cloned().fold(0.0, f64::max);
    Ok(DiscretizationDictionary { p, points: pts.clone(), w, norms, dictionary, m_p, max_norm })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransferReport {
    pub trials: usize,
    /// Largest `||f||_{L_inf(Omega_n)} / (2 M_p ||f||_U)` seen.
    pub max_ratio: f64,
    pub violations: usize,
}

/// Checks `||f||_{L_inf(Omega_n)} <= 2 M_p ||f||_U + 1e-8` on the basis
/// vectors and on `trials` random elements of the subspace.
pub fn verify_transfer(sub: &Subspace, dict: &DiscretizationDictionary, trials: usize, seed: u64) -> Result<TransferReport> {
    let n_dim = sub.dim();
    let candidates: Vec<Vec<f64>> = (0..n_dim)
        .map(|k| {
            let mut a = vec![0.0; n_dim];
            a[k] = 1.0;
            a
        })
        .chain((0..trials).map(|t| sampling::gaussian_vec(&mut sampling::child_rng(seed, t as u64), n_dim)))
        .collect();
    let results = par::map_slice(&candidates, |a| {
        let f = sub.combine(a);
        let lhs = dict.points.restrict(&f).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let u = dict.dictionary.norm_u_slice(&f);
        let rhs = 2.0 * dict.m_p * u;
        (lhs, rhs)
    });
    let mut max_ratio = 0.0f64;
    for (i, (lhs, rhs)) in results.iter().enumerate() {
        if lhs > &(rhs + 1e-8) {
            return Err(Error::PropertyViolation(format!(
                "transfer inequality fails for f with coefficients {:?}: {lhs} > {rhs}",
                candidates[i]
            )));
        }
        if *rhs > 0.0 {
            max_ratio = max_ratio.max(lhs / rhs);
        }
    }
    Ok(TransferReport { trials: candidates.len(), max_ratio, violations: 0 })
}
