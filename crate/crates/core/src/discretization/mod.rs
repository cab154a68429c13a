//! Sampling discretization on finite measure spaces: Dirichlet kernels,
//! the Nikol'skii constant `M_p` computed two independent ways, the
//! kernel-based dictionary and the transfer inequality it supports.

mod dictionary;
mod it1;
mod nikolskii;

pub use dictionary::{build_discretization_dictionary, verify_transfer, DiscretizationDictionary, TransferReport};
pub use it1::{it1_experiment, It1Report};
pub use nikolskii::{m_p_direct, m_p_direct_at, m_p_dual, m_p_dual_at, DirectSolution, DualSolution, DIRECT_TOL, DUAL_TOL};

use std::path::Path;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sampling;
use crate::spaces::validate_weights;

/// Largest Gram-matrix deviation from the identity accepted for a basis.
pub const GRAM_TOL: f64 = 1e-10;

/// `s` points with probability weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureFile")]
pub struct MeasureSpace {
    weights: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

#[derive(Deserialize)]
struct MeasureFile {
    weights: Vec<f64>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

impl TryFrom<MeasureFile> for MeasureSpace {
    type Error = Error;
    fn try_from(f: MeasureFile) -> Result<Self> {
        let m = MeasureSpace::new(f.weights)?;
        match f.labels {
            Some(l) => m.with_labels(l),
            None => Ok(m),
        }
    }
}

impl MeasureSpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        validate_weights(&weights)?;
        Ok(Self { weights, labels: None })
    }

    pub fn uniform(s: usize) -> Result<Self> {
        if s == 0 {
            return Err(invalid("s", "needs at least one point".to_string()));
        }
        Self::new(vec![1.0 / s as f64; s])
    }

    /// Weights proportional to `1 + U(0, spread)` draws, normalized.
    pub fn random(s: usize, spread: f64, seed: u64) -> Result<Self> {
        use rand::Rng;
        let mut rng = sampling::rng(seed);
        let raw: Vec<f64> = (0..s).map(|_| 1.0 + spread * rng.gen::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        Self::new(raw.into_iter().map(|v| v / total).collect())
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.weights.len() {
            return Err(Error::DimensionMismatch { expected: self.weights.len(), got: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Name of point `i`: its label, or `w<i>`.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => format!("w{i}"),
        }
    }

    /// `<f, g>_mu`.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.weights.iter().zip(f).zip(g).map(|((w, a), b)| w * a * b).sum()
    }

    /// `L_p(mu)` norm.
    pub fn norm(&self, f: &[f64], p: f64) -> f64 {
        crate::spaces::weighted_lq(f, p, |i| self.weights[i])
    }
}

/// An `N`-dimensional subspace given by a `mu`-orthonormal basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SubspaceFile")]
pub struct Subspace {
    measure: MeasureSpace,
    /// Basis vectors `u_1..u_N`, each of length `s`.
    basis: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct SubspaceFile {
    measure: MeasureSpace,
    basis: Vec<Vec<f64>>,
}

impl TryFrom<SubspaceFile> for Subspace {
    type Error = Error;
    fn try_from(f: SubspaceFile) -> Result<Self> {
        Subspace::new(f.measure, f.basis)
    }
}

impl Subspace {
    /// Checks orthonormality under `<., .>_mu`.
    pub fn new(measure: MeasureSpace, basis: Vec<Vec<f64>>) -> Result<Self> {
        if basis.is_empty() {
            return Err(invalid("basis", "needs at least one vector".to_string()));
        }
        for u in &basis {
            if u.len() != measure.len() {
                return Err(Error::DimensionMismatch { expected: measure.len(), got: u.len() });
            }
        }
        let sub = Self { measure, basis };
        let defect = sub.gram_defect();
        if !(defect <= GRAM_TOL) {
            return Err(Error::NotOrthonormal { defect });
        }
        Ok(sub)
    }

    /// Constant functions.
    pub fn constants(measure: MeasureSpace) -> Result<Self> {
        let s = measure.len();
        Self::new(measure, vec![vec![1.0; s]])
    }

    /// All functions on the measure space: `e_i / sqrt(mu_i)`.
    pub fn full(measure: MeasureSpace) -> Result<Self> {
        let s = measure.len();
        let basis = (0..s)
            .map(|i| {
                let mut e = vec![0.0; s];
                e[i] = measure.weights[i].sqrt().recip();
                e
            })
            .collect();
        Self::new(measure, basis)
    }

    /// Orthonormalized Gaussian vectors: QR of `diag(sqrt mu) G`.
    pub fn random(measure: MeasureSpace, dim: usize, seed: u64) -> Result<Self> {
        let s = measure.len();
        if dim == 0 || dim > s {
            return Err(invalid("dim", format!("must lie in 1..={s}, got {dim}")));
        }
        let mut rng = sampling::rng(seed);
        let g = DMatrix::from_fn(s, dim, |_, _| sampling::gaussian_vec(&mut rng, 1)[0]);
        let sqrt_mu: Vec<f64> = measure.weights.iter().map(|w| w.sqrt()).collect();
        let a = DMatrix::from_fn(s, dim, |i, j| sqrt_mu[i] * g[(i, j)]);
        let q = a.qr().q();
        let basis = (0..dim)
            .map(|j| (0..s).map(|i| q[(i, j)] / sqrt_mu[i]).collect())
            .collect();
        Self::new(measure, basis)
    }

    pub fn measure(&self) -> &MeasureSpace {
        &self.measure
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// `s x N` matrix with the basis as columns.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.measure.len(), self.dim(), |i, j| self.basis[j][i])
    }

    /// `(u_1(w_i), ..., u_N(w_i))`.
    pub fn values_at(&self, i: usize) -> Vec<f64> {
        self.basis.iter().map(|u| u[i]).collect()
    }

    /// `sum_j a_j u_j`.
    pub fn combine(&self, coefficients: &[f64]) -> Vec<f64> {
        let mut f = vec![0.0; self.measure.len()];
        for (u, a) in self.basis.iter().zip(coefficients) {
            for (fi, ui) in f.iter_mut().zip(u) {
                *fi += a * ui;
            }
        }
        f
    }

    /// `max |<u_i, u_j>_mu - delta_ij|`.
    pub fn gram_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..=i {
                let g = self.measure.inner(&self.basis[i], &self.basis[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }
}

/// The set `Omega_n`: distinct indices into a measure space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplePointSet {
    pub indices: Vec<usize>,
}

impl SamplePointSet {
    pub fn new(indices: Vec<usize>, measure: &MeasureSpace) -> Result<Self> {
        let mut seen = vec![false; measure.len()];
        for &i in &indices {
            if i >= measure.len() {
                return Err(invalid("indices", format!("index {i} out of range for {} points", measure.len())));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(invalid("indices", format!("index {i} repeated")));
            }
        }
        if indices.is_empty() {
            return Err(invalid("indices", "needs at least one point".to_string()));
        }
        Ok(Self { indices })
    }

    /// Seeded subset of size `n`, sorted.
    pub fn random(measure: &MeasureSpace, n: usize, seed: u64) -> Result<Self> {
        if n == 0 || n > measure.len() {
            return Err(invalid("n", format!("must lie in 1..={}, got {n}", measure.len())));
        }
        let mut rng = sampling::rng(seed);
        Self::new(sampling::subset(&mut rng, measure.len(), n), measure)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `f` restricted to the set.
    pub fn restrict(&self, f: &[f64]) -> Vec<f64> {
        self.indices.iter().map(|&i| f[i]).collect()
    }
}

/// `D(w_i, w_j) = sum_k u_k(w_i) u_k(w_j)` as an `s x s` table.
pub fn dirichlet_kernel(sub: &Subspace) -> Result<DMatrix<f64>> {
    let defect = sub.gram_defect();
    if !(defect <= GRAM_TOL) {
        return Err(Error::NotOrthonormal { defect });
    }
    let u = sub.matrix();
    let d = &u * u.transpose();
    // Exact symmetry.
    Ok(DMatrix::from_fn(d.nrows(), d.ncols(), |i, j| if i <= j { d[(i, j)] } else { d[(j, i)] }))
}

/// Reads a measure space, subspace or point set from a JSON file.
pub fn load_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Serde(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_examples() {
        let m = MeasureSpace::uniform(2).unwrap();
        let d = dirichlet_kernel(&Subspace::constants(m).unwrap()).unwrap();
        assert!(d.iter().all(|&v| (v - 1.0).abs() < 1e-15));

        let m = MeasureSpace::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let d = dirichlet_kernel(&Subspace::full(m.clone()).unwrap()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 / m.weights()[i] } else { 0.0 };
                assert!((d[(i, j)] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn kernel_reproduces_and_traces_to_dimension() {
        let m = MeasureSpace::random(40, 3.0, 2).unwrap();
        let sub = Subspace::random(m.clone(), 5, 9).unwrap();
        let d = dirichlet_kernel(&sub).unwrap();
        let trace: f64 = (0..40).map(|i| m.weights()[i] * d[(i, i)]).sum();
        assert!((trace - 5.0).abs() < 1e-10);
        for u in sub.basis() {
            for x in 0..40 {
                let row: Vec<f64> = (0..40).map(|y| d[(x, y)]).collect();
                assert!((m.inner(u, &row) - u[x]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(MeasureSpace::new(vec![0.5, 0.6]).is_err());
        assert!(MeasureSpace::new(vec![1.5, -0.5]).is_err());
        let m = MeasureSpace::uniform(3).unwrap();
        let err = Subspace::new(m.clone(), vec![vec![1.0, 1.0, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::NotOrthonormal { .. }));
        assert!(SamplePointSet::new(vec![0, 0], &m).is_err());
        assert!(SamplePointSet::new(vec![3], &m).is_err());
    }

    #[test]
    fn json_round_trip_validates() {
        let m = MeasureSpace::random(6, 1.0, 1).unwrap();
        let sub = Subspace::random(m, 2, 3).unwrap();
        let text = serde_json::to_string(&sub).unwrap();
        let back: Subspace = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sub);
        let bad = r#"{"measure":{"weights":[0.5,0.5]},"basis":[[1.0,0.0]]}"#;
        assert!(serde_json::from_str::<Subspace>(bad).is_err());
    }
}
