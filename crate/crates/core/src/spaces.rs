//! Finite-dimensional weighted l_q spaces, their duals, and the A-norm /
//! U-norm pair induced by a normalized dictionary.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::{lp, sampling};

/// Tolerance on atom norms for a "normalized system".
pub const ATOM_NORM_TOL: f64 = 1e-10;
/// Tolerance on measure weights summing to one.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormKind {
    /// Plain l_q^n: unit weights.
    SequenceLq,
    /// L_q(mu) on a finite probability space.
    DiscreteLqMu { weights: Vec<f64> },
}

/// Power-type modulus of smoothness `rho(u) <= gamma * u^power`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Smoothness {
    pub power: f64,
    pub gamma: f64,
}

impl Smoothness {
    pub fn bound(&self, u: f64) -> f64 {
        self.gamma * u.powf(self.power)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormedSpaceSpec {
    dim: usize,
    q: f64,
    norm: NormKind,
}

impl NormedSpaceSpec {
    pub fn sequence(dim: usize, q: f64) -> Result<Self> {
        Self::validate(dim, q)?;
        Ok(Self { dim, q, norm: NormKind::SequenceLq })
    }

    pub fn discrete(weights: Vec<f64>, q: f64) -> Result<Self> {
        Self::validate(weights.len(), q)?;
        validate_weights(&weights)?;
        Ok(Self {
            dim: weights.len(),
            q,
            norm: NormKind::DiscreteLqMu { weights },
        })
    }

    fn validate(dim: usize, q: f64) -> Result<()> {
        if dim == 0 {
            return Err(invalid("dim", "must be at least 1"));
        }
        if !(q > 1.0 && q.is_finite()) {
            return Err(invalid("q", format!("must lie in (1, inf), got {q}")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn kind(&self) -> &NormKind {
        &self.norm
    }

    /// Conjugate exponent `q' = q / (q - 1)`.
    pub fn dual_exponent(&self) -> f64 {
        self.q / (self.q - 1.0)
    }

    pub fn weights(&self) -> Option<&[f64]> {
        match &self.norm {
            NormKind::SequenceLq => None,
            NormKind::DiscreteLqMu { weights } => Some(weights),
        }
    }

    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        match &self.norm {
            NormKind::SequenceLq => 1.0,
            NormKind::DiscreteLqMu { weights } => weights[i],
        }
    }

    pub fn weight_vec(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.weight(i)).collect()
    }

    /// The dual space, realized with the same weights and exponent `q'`
    /// under the pairing [`Self::pair`].
    pub fn dual(&self) -> NormedSpaceSpec {
        Self { dim: self.dim, q: self.dual_exponent(), norm: self.norm.clone() }
    }

    /// Smoothness exponent and constant: `u^q / q` for `q <= 2`,
    /// `(q - 1) u^2 / 2` for `q >= 2`.
    pub fn smoothness(&self) -> Smoothness {
        if self.q <= 2.0 {
            Smoothness { power: self.q, gamma: 1.0 / self.q }
        } else {
            Smoothness { power: 2.0, gamma: (self.q - 1.0) / 2.0 }
        }
    }

    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.norm_unchecked(x))
    }

    pub(crate) fn norm_unchecked(&self, x: &[f64]) -> f64 {
        weighted_lq(x, self.q, |i| self.weight(i))
    }

    /// Norm of a functional in the dual space.
    pub fn dual_norm(&self, functional: &DualFunctional) -> Result<f64> {
        check_dim(self.dim, functional.coefficients.len())?;
        Ok(weighted_lq(&functional.coefficients, self.dual_exponent(), |i| self.weight(i)))
    }

    /// `<F, f> = sum_i w_i F_i f_i`.
    pub fn pair(&self, functional: &[f64], f: &[f64]) -> f64 {
        functional
            .iter()
            .zip(f)
            .enumerate()
            .map(|(i, (a, b))| self.weight(i) * a * b)
            .sum()
    }

    /// Norming functional of `f`: `F_i = sign(f_i) (|f_i| / ||f||)^{q-1}`.
    pub fn norming_functional(&self, f: &[f64]) -> Result<DualFunctional> {
        let norm = self.norm(f)?;
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let coefficients = f
            .iter()
            .map(|&v| v.signum() * (v.abs() / norm).powf(self.q - 1.0))
            .collect();
        Ok(DualFunctional { coefficients })
    }
}

pub(crate) fn validate_weights(weights: &[f64]) -> Result<()> {
    if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
        return Err(invalid("weights", "must be strictly positive"));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(invalid("weights", format!("must sum to 1, got {total}")));
    }
    Ok(())
}

/// `(sum_i w_i |x_i|^q)^{1/q}`, rescaled by the max entry to avoid overflow.
pub(crate) fn weighted_lq(x: &[f64], q: f64, weight: impl Fn(usize) -> f64) -> f64 {
    let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    let s: f64 = x
        .iter()
        .enumerate()
        .map(|(i, v)| weight(i) * (v.abs() / m).powf(q))
        .sum();
    m * s.powf(1.0 / q)
}

/// An element of the dual space, acting through [`NormedSpaceSpec::pair`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualFunctional {
    pub coefficients: Vec<f64>,
}

impl DualFunctional {
    pub fn new(coefficients: Vec<f64>) -> Self {
        Self { coefficients }
    }

    pub fn apply(&self, space: &NormedSpaceSpec, f: &[f64]) -> f64 {
        space.pair(&self.coefficients, f)
    }
}

/// A normalized system `g_1, ..., g_n` in a [`NormedSpaceSpec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dictionary {
    space: NormedSpaceSpec,
    atoms: Vec<Vec<f64>>,
}

impl Dictionary {
    /// Wraps atoms that are already unit vectors.
    pub fn new(space: NormedSpaceSpec, atoms: Vec<Vec<f64>>) -> Result<Self> {
        for (index, a) in atoms.iter().enumerate() {
            let norm = space.norm(a)?;
            if (norm - 1.0).abs() > ATOM_NORM_TOL {
                return Err(Error::NotNormalized { index, norm });
            }
        }
        Ok(Self { space, atoms })
    }

    /// Rescales each raw vector to unit norm.
    pub fn normalized(space: NormedSpaceSpec, raw: Vec<Vec<f64>>) -> Result<Self> {
        let mut atoms = Vec::with_capacity(raw.len());
        for a in raw {
            let norm = space.norm(&a)?;
            if norm == 0.0 {
                return Err(Error::ZeroVector);
            }
            atoms.push(a.into_iter().map(|v| v / norm).collect());
        }
        Self::new(space, atoms)
    }

    /// Coordinate vectors, scaled to unit norm under the space weights.
    pub fn canonical(space: NormedSpaceSpec) -> Self {
        let d = space.dim();
        let atoms = (0..d)
            .map(|j| {
                let mut e = vec![0.0; d];
                e[j] = space.weight(j).powf(-1.0 / space.q());
                e
            })
            .collect();
        Self { space, atoms }
    }

    /// `n` normalized Gaussian atoms.
    pub fn random_gaussian(space: NormedSpaceSpec, n: usize, seed: u64) -> Result<Self> {
        let mut rng = sampling::rng(seed);
        let raw = (0..n).map(|_| sampling::gaussian_vec(&mut rng, space.dim())).collect();
        Self::normalized(space, raw)
    }

    pub fn space(&self) -> &NormedSpaceSpec {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom(&self, j: usize) -> &[f64] {
        &self.atoms[j]
    }

    pub fn atoms(&self) -> &[Vec<f64>] {
        &self.atoms
    }

    /// `d x n` matrix whose columns are the atoms.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.space.dim(), self.len(), |i, j| self.atoms[j][i])
    }

    /// `sum_j c_j g_j` over the listed atoms.
    pub fn combine(&self, support: &[usize], coefficients: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.space.dim()];
        for (&j, &c) in support.iter().zip(coefficients) {
            for (o, a) in out.iter_mut().zip(&self.atoms[j]) {
                *o += c * a;
            }
        }
        out
    }

    /// `<F, g_j>` for every atom.
    pub fn pairings(&self, functional: &[f64]) -> Vec<f64> {
        self.atoms.iter().map(|g| self.space.pair(functional, g)).collect()
    }

    /// `||f||_A`: minimal l1 mass of a representation `f = sum c_j g_j`,
    /// solved as a linear program.
    pub fn norm_a(&self, f: &[f64]) -> Result<f64> {
        self.min_l1_representation(f).map(|(v, _)| v)
    }

    /// Optimal value and coefficients of the A-norm linear program.
    pub fn min_l1_representation(&self, f: &[f64]) -> Result<(f64, Vec<f64>)> {
        check_dim(self.space.dim(), f.len())?;
        if self.is_empty() {
            return Err(Error::EmptyDictionary);
        }
        lp::min_l1_representation(&self.matrix(), f)
    }

    /// `||F||_U = max_j |<F, g_j>|`.
    pub fn norm_u(&self, functional: &DualFunctional) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptyDictionary);
        }
        check_dim(self.space.dim(), functional.coefficients.len())?;
        Ok(self.norm_u_slice(&functional.coefficients))
    }

    pub(crate) fn norm_u_slice(&self, functional: &[f64]) -> f64 {
        self.atoms
            .iter()
            .map(|g| self.space.pair(functional, g).abs())
            .fold(0.0, f64::max)
    }

    /// `sup { |<F, f>| : ||f||_A <= 1 }` computed by linear programming over
    /// the ambient coordinates and the coefficients jointly. Independent of
    /// [`Self::norm_u`], which it must reproduce.
    pub fn a_ball_sup(&self, functional: &DualFunctional) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptyDictionary);
        }
        check_dim(self.space.dim(), functional.coefficients.len())?;
        lp::sup_over_a_ball(&self.matrix(), &functional.coefficients, &self.space.weight_vec())
    }
}

/// `1/2 (||x + u y|| + ||x - u y||) - 1`.
fn smoothness_gap(space: &NormedSpaceSpec, x: &[f64], y: &[f64], u: f64) -> f64 {
    let plus: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + u * b).collect();
    let minus: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - u * b).collect();
    0.5 * (space.norm_unchecked(&plus) + space.norm_unchecked(&minus)) - 1.0
}

fn unit(space: &NormedSpaceSpec, mut v: Vec<f64>) -> Option<Vec<f64>> {
    let n = space.norm_unchecked(&v);
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= n);
    Some(v)
}

const LOCAL_SEARCH_ITERS: usize = 600;
const LOCAL_SEARCH_PATIENCE: usize = 25;

/// Hill-climb a unit pair `(x, y)` on the smoothness gap at `u`.
fn climb<R: Rng>(
    space: &NormedSpaceSpec,
    u: f64,
    mut x: Vec<f64>,
    mut y: Vec<f64>,
    rng: &mut R,
) -> (f64, Vec<f64>, Vec<f64>) {
    let d = space.dim();
    let mut best = smoothness_gap(space, &x, &y, u);
    let mut step = 0.5;
    let mut misses = 0;
    for _ in 0..LOCAL_SEARCH_ITERS {
        if step < 1e-7 {
            break;
        }
        let dx = sampling::gaussian_vec(rng, d);
        let dy = sampling::gaussian_vec(rng, d);
        let cx = unit(space, x.iter().zip(&dx).map(|(a, b)| a + step * b).collect());
        let cy = unit(space, y.iter().zip(&dy).map(|(a, b)| a + step * b).collect());
        if let (Some(cx), Some(cy)) = (cx, cy) {
            let v = smoothness_gap(space, &cx, &cy, u);
            if v > best {
                best = v;
                x = cx;
                y = cy;
                misses = 0;
                continue;
            }
        }
        misses += 1;
        if misses >= LOCAL_SEARCH_PATIENCE {
            step *= 0.5;
            misses = 0;
        }
    }
    (best, x, y)
}

fn starting_pairs(space: &NormedSpaceSpec, trials: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let d = space.dim();
    let mut rng = sampling::rng(seed);
    let mut starts = Vec::with_capacity(trials + 1);
    if d >= 2 {
        // Two-coordinate configuration extremal for l_q (Hanner pair).
        let mut x = vec![0.0; d];
        let mut y = vec![0.0; d];
        x[0] = 1.0;
        x[1] = 1.0;
        y[0] = 1.0;
        y[1] = -1.0;
        if let (Some(x), Some(y)) = (unit(space, x), unit(space, y)) {
            starts.push((x, y));
        }
    }
    while starts.len() < trials + usize::from(d >= 2) {
        let x = unit(space, sampling::gaussian_vec(&mut rng, d));
        let y = unit(space, sampling::gaussian_vec(&mut rng, d));
        if let (Some(x), Some(y)) = (x, y) {
            starts.push((x, y));
        }
    }
    starts
}

/// Lower estimate of the modulus of smoothness `rho(X, u)` by random starts
/// followed by local search over unit pairs.
pub fn estimate_modulus(space: &NormedSpaceSpec, u: f64, trials: usize, seed: u64) -> Result<f64> {
    Ok(modulus_profile(space, &[u], trials, seed)?[0])
}

/// [`estimate_modulus`] on a grid of `u` values. Pairs found at smaller `u`
/// seed the search at larger `u`, so the profile is nondecreasing when the
/// grid is sorted.
pub fn modulus_profile(space: &NormedSpaceSpec, us: &[f64], trials: usize, seed: u64) -> Result<Vec<f64>> {
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    if us.iter().any(|&u| !(u >= 0.0 && u.is_finite())) {
        return Err(invalid("u", "must be finite and nonnegative"));
    }
    if space.dim() == 1 {
        // Only x = +-y: the gap is |1+u|/2 + |1-u|/2 - 1 = max(u - 1, 0).
        return Ok(us.iter().map(|&u| (u - 1.0).max(0.0)).collect());
    }
    let mut starts = starting_pairs(space, trials, seed);
    let mut out = Vec::with_capacity(us.len());
    for (ui, &u) in us.iter().enumerate() {
        if u == 0.0 {
            out.push(0.0);
            continue;
        }
        let mut rng = sampling::child_rng(seed, ui as u64 + 1);
        let mut best = 0.0f64;
        for (x, y) in starts.iter_mut() {
            let (v, nx, ny) = climb(space, u, x.clone(), y.clone(), &mut rng);
            *x = nx;
            *y = ny;
            best = best.max(v);
        }
        out.push(best);
    }
    Ok(out)
}
