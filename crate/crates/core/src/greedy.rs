//! Best m-term approximation: exhaustive search for tiny instances and the
//! Weak Chebyshev Greedy Algorithm (WCGA).

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fit::{fit_envelope, EnvelopeModel, FitResult};
use crate::solver::{minimize, SmoothConvex, SolverOptions};
use crate::spaces::{Dictionary, NormedSpaceSpec};
use crate::{par, sampling};

/// Octahedron membership slack on the A-norm.
pub const OCTAHEDRON_TOL: f64 = 1e-9;
/// Largest number of supports [`best_mterm_bruteforce`] will enumerate.
pub const BRUTE_FORCE_BUDGET: f64 = 1e6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseApproximant {
    pub support: Vec<usize>,
    pub coefficients: Vec<f64>,
    pub residual_norm: f64,
    /// Residual norm after each greedy step (a single entry for exact search).
    pub history: Vec<f64>,
    /// Set when the residual dropped below tolerance before `m` steps.
    pub converged: bool,
}

impl SparseApproximant {
    pub fn approximation(&self, dict: &Dictionary) -> Vec<f64> {
        dict.combine(&self.support, &self.coefficients)
    }

    /// Recompute the residual norm from scratch.
    pub fn recompute_residual(&self, f: &[f64], dict: &Dictionary) -> f64 {
        let approx = self.approximation(dict);
        let r: Vec<f64> = f.iter().zip(&approx).map(|(a, b)| a - b).collect();
        dict.space().norm_unchecked(&r)
    }
}

/// `q`-th power of the residual norm as a function of the coefficients.
struct ResidualPower<'a> {
    space: &'a NormedSpaceSpec,
    atoms: DMatrix<f64>,
    f: DVector<f64>,
    floor: f64,
}

impl ResidualPower<'_> {
    fn residual(&self, c: &DVector<f64>) -> DVector<f64> {
        &self.f - &self.atoms * c
    }
}

impl SmoothConvex for ResidualPower<'_> {
    fn dim(&self) -> usize {
        self.atoms.ncols()
    }

    fn value(&self, c: &DVector<f64>) -> f64 {
        let q = self.space.q();
        self.residual(c)
            .iter()
            .enumerate()
            .map(|(i, r)| self.space.weight(i) * r.abs().powf(q))
            .sum()
    }

    fn gradient(&self, c: &DVector<f64>) -> DVector<f64> {
        let q = self.space.q();
        let r = self.residual(c);
        let s = DVector::from_iterator(
            r.len(),
            r.iter()
                .enumerate()
                .map(|(i, v)| -q * self.space.weight(i) * v.signum() * v.abs().powf(q - 1.0)),
        );
        self.atoms.transpose() * s
    }

    fn hessian(&self, c: &DVector<f64>) -> DMatrix<f64> {
        let q = self.space.q();
        let r = self.residual(c);
        let mut scaled = self.atoms.clone();
        for (i, v) in r.iter().enumerate() {
            let w = q * (q - 1.0) * self.space.weight(i) * v.abs().max(self.floor).powf(q - 2.0);
            scaled.row_mut(i).scale_mut(w);
        }
        self.atoms.transpose() * scaled
    }
}

fn support_matrix(dict: &Dictionary, support: &[usize]) -> DMatrix<f64> {
    let d = dict.space().dim();
    DMatrix::from_fn(d, support.len(), |i, k| dict.atom(support[k])[i])
}

/// Weighted least squares `argmin sum_i w_i (f - G c)_i^2` (minimum-norm
/// solution when the atoms are dependent).
fn weighted_least_squares(space: &NormedSpaceSpec, g: &DMatrix<f64>, f: &[f64]) -> DVector<f64> {
    let mut a = g.clone();
    let mut b = DVector::from_column_slice(f);
    for i in 0..g.nrows() {
        let s = space.weight(i).sqrt();
        a.row_mut(i).scale_mut(s);
        b[i] *= s;
    }
    let svd = a.svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    svd.solve(&b, smax * 1e-13)
        .unwrap_or_else(|_| DVector::zeros(g.ncols()))
}

/// Coefficients minimizing `||f - sum_{j in support} c_j g_j||` in the
/// dictionary's space. Closed form for `q = 2`, damped Newton on the
/// `q`-th power otherwise.
pub fn chebyshev_project(f: &[f64], support: &[usize], dict: &Dictionary, tol: f64) -> Result<Vec<f64>> {
    chebyshev_project_from(f, support, dict, tol, None)
}

pub(crate) fn chebyshev_project_from(
    f: &[f64],
    support: &[usize],
    dict: &Dictionary,
    tol: f64,
    warm: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let space = dict.space();
    crate::error::check_dim(space.dim(), f.len())?;
    if let Some(&j) = support.iter().find(|&&j| j >= dict.len()) {
        return Err(invalid("support", format!("atom index {j} out of range")));
    }
    if support.is_empty() {
        return Ok(Vec::new());
    }
    let g = support_matrix(dict, support);
    let ls = weighted_least_squares(space, &g, f);
    let q = space.q();
    if q == 2.0 {
        return Ok(ls.iter().cloned().collect());
    }
    let fnorm = space.norm_unchecked(f);
    if fnorm == 0.0 {
        return Ok(vec![0.0; support.len()]);
    }
    let fmax = f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let objective = ResidualPower {
        space,
        atoms: g,
        f: DVector::from_column_slice(f),
        floor: fmax * 1e-12,
    };
    let mut start = ls;
    if let Some(w) = warm {
        let w = DVector::from_iterator(support.len(), w.iter().cloned().chain(std::iter::repeat(0.0)).take(support.len()));
        if objective.value(&w) < objective.value(&start) {
            start = w;
        }
    }
    let opts = SolverOptions {
        tol,
        scale: Some(q * fnorm.powf(q - 1.0)),
        value_scale: Some(fnorm.powf(q)),
        ..SolverOptions::default()
    };
    let min = minimize(&objective, start, opts)?;
    Ok(min.x.iter().cloned().collect())
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Advance a sorted combination of `0..n` to its lexicographic successor.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let m = c.len();
    let mut i = m;
    while i > 0 {
        i -= 1;
        if c[i] < n - m + i {
            c[i] += 1;
            for j in i + 1..m {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Exact `sigma_m(f)`: best projection over every support of size `m`.
/// Ties go to the lexicographically smallest support.
pub fn best_mterm_bruteforce(f: &[f64], dict: &Dictionary, m: usize, tol: f64) -> Result<SparseApproximant> {
    let space = dict.space();
    crate::error::check_dim(space.dim(), f.len())?;
    let n = dict.len();
    if m > n {
        return Err(invalid("m", format!("m = {m} exceeds dictionary size {n}")));
    }
    let count = binomial(n, m);
    if count > BRUTE_FORCE_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "supports",
            needed: count,
            budget: BRUTE_FORCE_BUDGET,
            advice: "use wcga for this size",
        });
    }
    let fnorm = space.norm_unchecked(f);
    if m == 0 {
        return Ok(SparseApproximant {
            support: vec![],
            coefficients: vec![],
            residual_norm: fnorm,
            history: vec![fnorm],
            converged: false,
        });
    }
    let mut supports = Vec::with_capacity(count as usize);
    let mut c: Vec<usize> = (0..m).collect();
    loop {
        supports.push(c.clone());
        if !next_combination(&mut c, n) {
            break;
        }
    }
    let evaluated = par::try_map_range(supports.len(), |i| {
        let coef = chebyshev_project(f, &supports[i], dict, tol)?;
        let approx = dict.combine(&supports[i], &coef);
        let r: Vec<f64> = f.iter().zip(&approx).map(|(a, b)| a - b).collect();
        Ok::<_, Error>((space.norm_unchecked(&r), coef))
    })?;
    let (best_idx, _) = evaluated
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, (v, _))| if *v < bv { (i, *v) } else { (bi, bv) });
    let (residual, coefficients) = evaluated[best_idx].clone();
    Ok(SparseApproximant {
        support: supports[best_idx].clone(),
        coefficients,
        residual_norm: residual,
        history: vec![residual],
        converged: residual <= tol * fnorm,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WcgaOptions {
    /// Weakness `t` in (0, 1].
    pub weakness: f64,
    /// Early-exit threshold on the relative residual, also the projection tolerance.
    pub tol: f64,
}

impl Default for WcgaOptions {
    fn default() -> Self {
        Self { weakness: 1.0, tol: 1e-10 }
    }
}

/// WCGA run to `m` steps; see [`wcga_path`].
pub fn wcga(f: &[f64], dict: &Dictionary, m: usize, opts: WcgaOptions) -> Result<SparseApproximant> {
    let mut path = wcga_path(f, dict, m, opts)?;
    Ok(path.pop().expect("path holds the empty approximant"))
}

/// All WCGA iterates: entry `k` is the `k`-term approximant (entry 0 is
/// empty). Shorter than `m + 1` when the residual falls below tolerance.
///
/// Each step takes the norming functional `F` of the current residual and
/// selects the lowest-index unused atom with `|<F, g_j>| >= t max_i |<F, g_i>|`,
/// then re-projects onto all selected atoms.
pub fn wcga_path(f: &[f64], dict: &Dictionary, m: usize, opts: WcgaOptions) -> Result<Vec<SparseApproximant>> {
    let space = dict.space();
    crate::error::check_dim(space.dim(), f.len())?;
    if dict.is_empty() {
        return Err(Error::EmptyDictionary);
    }
    if m > dict.len() {
        return Err(invalid("m", format!("m = {m} exceeds dictionary size {}", dict.len())));
    }
    if !(opts.weakness > 0.0 && opts.weakness <= 1.0) {
        return Err(invalid("weakness", format!("must lie in (0, 1], got {}", opts.weakness)));
    }
    let fnorm = space.norm_unchecked(f);
    if fnorm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut support: Vec<usize> = Vec::with_capacity(m);
    let mut coefficients: Vec<f64> = Vec::with_capacity(m);
    let mut residual = f.to_vec();
    let mut history = vec![fnorm];
    let mut path = vec![SparseApproximant {
        support: vec![],
        coefficients: vec![],
        residual_norm: fnorm,
        history: history.clone(),
        converged: false,
    }];
    let mut used = vec![false; dict.len()];
    for _ in 0..m {
        if *history.last().unwrap() <= opts.tol * fnorm {
            path.last_mut().unwrap().converged = true;
            break;
        }
        let functional = space.norming_functional(&residual)?;
        let pairings = dict.pairings(&functional.coefficients);
        let best = pairings
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(_, p)| p.abs())
            .fold(0.0, f64::max);
        let threshold = opts.weakness * best;
        let Some(choice) = (0..dict.len()).find(|&j| !used[j] && pairings[j].abs() >= threshold) else {
            break;
        };
        used[choice] = true;
        support.push(choice);
        coefficients = chebyshev_project_from(f, &support, dict, opts.tol, Some(&coefficients))?;
        let approx = dict.combine(&support, &coefficients);
        residual = f.iter().zip(&approx).map(|(a, b)| a - b).collect();
        let rn = space.norm_unchecked(&residual);
        history.push(rn);
        path.push(SparseApproximant {
            support: support.clone(),
            coefficients: coefficients.clone(),
            residual_norm: rn,
            history: history.clone(),
            converged: rn <= opts.tol * fnorm,
        });
    }
    Ok(path)
}

/// The octahedron `A_1(D)`: absolutely convex hull of the atoms.
#[derive(Clone, Debug)]
pub struct Octahedron {
    pub dictionary: Dictionary,
}

impl Octahedron {
    pub fn new(dictionary: Dictionary) -> Self {
        Self { dictionary }
    }

    pub fn contains(&self, f: &[f64]) -> Result<bool> {
        match self.dictionary.norm_a(f) {
            Ok(v) => Ok(v <= 1.0 + OCTAHEDRON_TOL),
            Err(Error::NotInSpan { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// Random convex combinations of signed atoms. Support sizes are
    /// log-uniform in `[1, n]` with flat Dirichlet weights on the support.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let n = self.dictionary.len();
        (0..count)
            .map(|i| {
                let mut rng = sampling::child_rng(seed, i as u64);
                let size = ((n as f64).ln() * rng.gen::<f64>()).exp().round().clamp(1.0, n as f64) as usize;
                let support = sampling::subset(&mut rng, n, size);
                let weights = sampling::dirichlet_flat(&mut rng, size);
                let coeffs: Vec<f64> = weights.iter().map(|w| w * sampling::random_sign(&mut rng)).collect();
                self.dictionary.combine(&support, &coeffs)
            })
            .collect()
    }

    /// Vertices `+-g_j` followed by `extra` random mixtures.
    pub fn witness_sample(&self, extra: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut pts = Vec::with_capacity(2 * self.dictionary.len() + extra);
        for g in self.dictionary.atoms() {
            pts.push(g.clone());
            pts.push(g.iter().map(|v| -v).collect());
        }
        pts.extend(self.sample(extra, seed));
        pts
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SigmaProfile {
    pub m_list: Vec<usize>,
    /// Max WCGA residual over the samples, per `m`.
    pub sigma: Vec<f64>,
    /// Power-law fit of `sigma` against `m`, when it is defined.
    pub fit: Option<FitResult>,
}

/// Worst-case WCGA residual over octahedron samples for each `m`.
pub fn sigma_profile(
    samples: &[Vec<f64>],
    dict: &Dictionary,
    m_list: &[usize],
    opts: WcgaOptions,
) -> Result<SigmaProfile> {
    if samples.is_empty() {
        return Err(invalid("samples", "sample set is empty"));
    }
    let oct = Octahedron::new(dict.clone());
    for (i, s) in samples.iter().enumerate() {
        if !oct.contains(s)? {
            return Err(invalid("samples", format!("sample {i} lies outside the octahedron")));
        }
    }
    let m_max = m_list.iter().cloned().max().unwrap_or(0);
    let histories = par::try_map_range(samples.len(), |i| {
        let f = &samples[i];
        if dict.space().norm_unchecked(f) == 0.0 {
            return Ok(vec![0.0; m_max + 1]);
        }
        let path = wcga_path(f, dict, m_max, opts)?;
        let last = path.last().unwrap().residual_norm;
        let mut h: Vec<f64> = path.iter().map(|a| a.residual_norm).collect();
        h.resize(m_max + 1, last);
        Ok::<_, Error>(h)
    })?;
    let sigma: Vec<f64> = m_list
        .iter()
        .map(|&m| histories.iter().map(|h| h[m]).fold(0.0, f64::max))
        .collect();
    let ms: Vec<f64> = m_list.iter().map(|&m| m as f64).collect();
    let fit = fit_envelope(&ms, &sigma, dict.len(), EnvelopeModel::PowerM).ok();
    Ok(SigmaProfile { m_list: m_list.to_vec(), sigma, fit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::NormedSpaceSpec;

    fn canon(d: usize, q: f64) -> Dictionary {
        Dictionary::canonical(NormedSpaceSpec::sequence(d, q).unwrap())
    }

    #[test]
    fn bruteforce_examples() {
        let dict = Dictionary::random_gaussian(NormedSpaceSpec::sequence(3, 1.7).unwrap(), 5, 4).unwrap();
        let a = best_mterm_bruteforce(dict.atom(1), &dict, 1, 1e-10).unwrap();
        assert!(a.residual_norm < 1e-9);
        assert_eq!(a.support, vec![1]);

        // Orthonormal case: keep the two largest coordinates. The oracle is
        // the brute-force tail over the six supports.
        let f = [1.0, 0.5, 0.25, 0.125];
        let tails: Vec<f64> = (0..4)
            .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
            .map(|(i, j)| {
                (0..4).filter(|&k| k != i && k != j).map(|k| f[k] * f[k]).sum::<f64>().sqrt()
            })
            .collect();
        let oracle = tails.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((oracle - 0.279508497187).abs() < 1e-9);
        let a = best_mterm_bruteforce(&f, &canon(4, 2.0), 2, 1e-10).unwrap();
        assert!((a.residual_norm - oracle).abs() < 1e-12);
        assert_eq!(a.support, vec![0, 1]);

        let a = best_mterm_bruteforce(&f, &canon(4, 2.0), 0, 1e-10).unwrap();
        assert!((a.residual_norm - (1.0f64 + 0.25 + 0.0625 + 0.015625).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bruteforce_budget_guard() {
        let dict = canon(40, 2.0);
        let f = vec![1.0; 40];
        assert!(matches!(
            best_mterm_bruteforce(&f, &dict, 20, 1e-10),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn projection_examples() {
        let space = NormedSpaceSpec::sequence(3, 2.0).unwrap();
        let q = nalgebra::Matrix3::from_fn(|i, j| ((i * 3 + j) as f64).sin()).qr().q();
        let atoms: Vec<Vec<f64>> = (0..3).map(|j| q.column(j).iter().cloned().collect()).collect();
        let dict = Dictionary::new(space.clone(), atoms).unwrap();
        let f = [0.3, -1.2, 2.0];
        let c = chebyshev_project(&f, &[0, 2], &dict, 1e-10).unwrap();
        assert!((c[0] - space.pair(dict.atom(0), &f)).abs() < 1e-12);
        assert!((c[1] - space.pair(dict.atom(2), &f)).abs() < 1e-12);

        let c = chebyshev_project(&f, &[0, 1, 2], &dict, 1e-10).unwrap();
        let approx = dict.combine(&[0, 1, 2], &c);
        assert!(f.iter().zip(&approx).all(|(a, b)| (a - b).abs() < 1e-12));

        // q = 4: min |1-c|^4 + 1 at c = 1.
        let c = chebyshev_project(&[1.0, 1.0], &[0], &canon(2, 4.0), 1e-10).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn projection_q_not_two_is_stationary() {
        // Optimality: <F(r), g_j> = 0 for the norming functional of the residual.
        let space = NormedSpaceSpec::sequence(6, 1.5).unwrap();
        let dict = Dictionary::random_gaussian(space.clone(), 4, 2).unwrap();
        let f = sampling::gaussian_vec(&mut sampling::rng(8), 6);
        let support = [0, 2, 3];
        let c = chebyshev_project(&f, &support, &dict, 1e-10).unwrap();
        let approx = dict.combine(&support, &c);
        let r: Vec<f64> = f.iter().zip(&approx).map(|(a, b)| a - b).collect();
        let func = space.norming_functional(&r).unwrap();
        for &j in &support {
            assert!(space.pair(&func.coefficients, dict.atom(j)).abs() < 1e-8);
        }
    }

    #[test]
    fn wcga_examples() {
        let dict = Dictionary::random_gaussian(NormedSpaceSpec::sequence(8, 1.5).unwrap(), 8, 1).unwrap();
        let a = wcga(dict.atom(4), &dict, 3, WcgaOptions::default()).unwrap();
        assert_eq!(a.support, vec![4]);
        assert!(a.history[1] < 1e-9 && a.converged);

        let f = [0.25; 4];
        assert!((canon(4, 2.0).norm_a(&f).unwrap() - 1.0).abs() < 1e-9);
        let a = wcga(&f, &canon(4, 2.0), 2, WcgaOptions::default()).unwrap();
        assert!((a.residual_norm - 2f64.sqrt() / 4.0).abs() < 1e-12);
        assert_eq!(a.support, vec![0, 1]);
    }

    #[test]
    fn weak_selection_never_beats_strongest_first_step() {
        // Step-1 optimality of the strongest selection is a Hilbert-space
        // fact; in other norms only monotonicity is checked.
        for (q, seed) in [2.0, 1.5].iter().flat_map(|&q| (0..10).map(move |s| (q, s))) {
            let space = NormedSpaceSpec::sequence(10, q).unwrap();
            let dict = Dictionary::random_gaussian(space, 15, seed).unwrap();
            let f = sampling::gaussian_vec(&mut sampling::rng(seed + 99), 10);
            let strong = wcga(&f, &dict, 5, WcgaOptions::default()).unwrap();
            let weak = wcga(&f, &dict, 5, WcgaOptions { weakness: 0.9, ..Default::default() }).unwrap();
            for h in [&strong.history, &weak.history] {
                assert!(h.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
            }
            if q == 2.0 {
                let best1 = best_mterm_bruteforce(&f, &dict, 1, 1e-10).unwrap();
                assert!(strong.history[1] <= weak.history[1] + 1e-12);
                assert!((strong.history[1] - best1.residual_norm).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn wcga_rejects_bad_arguments() {
        let dict = canon(3, 2.0);
        assert!(matches!(wcga(&[0.0; 3], &dict, 1, WcgaOptions::default()), Err(Error::ZeroVector)));
        assert!(wcga(&[1.0; 3], &dict, 4, WcgaOptions::default()).is_err());
        assert!(wcga(&[1.0; 3], &dict, 1, WcgaOptions { weakness: 0.0, tol: 1e-10 }).is_err());
    }

    #[test]
    fn wcga_is_homogeneous() {
        let space = NormedSpaceSpec::sequence(7, 3.0).unwrap();
        let dict = Dictionary::random_gaussian(space, 9, 5).unwrap();
        let f = sampling::gaussian_vec(&mut sampling::rng(5), 7);
        let a = wcga(&f, &dict, 4, WcgaOptions::default()).unwrap();
        for alpha in [0.01, 3.0, 250.0] {
            let g: Vec<f64> = f.iter().map(|v| alpha * v).collect();
            let b = wcga(&g, &dict, 4, WcgaOptions::default()).unwrap();
            assert_eq!(a.support, b.support);
            for (x, y) in a.coefficients.iter().zip(&b.coefficients) {
                assert!((alpha * x - y).abs() <= 1e-7 * alpha * x.abs().max(1.0));
            }
            assert!((alpha * a.residual_norm - b.residual_norm).abs() <= 1e-8 * alpha);
        }
    }

    #[test]
    fn residual_is_recomputable() {
        let space = NormedSpaceSpec::discrete(vec![0.1, 0.2, 0.3, 0.15, 0.25], 1.4).unwrap();
        let dict = Dictionary::random_gaussian(space, 6, 3).unwrap();
        let f = sampling::gaussian_vec(&mut sampling::rng(31), 5);
        for a in wcga_path(&f, &dict, 4, WcgaOptions::default()).unwrap() {
            assert!((a.recompute_residual(&f, &dict) - a.residual_norm).abs() < 1e-9);
            let mut s = a.support.clone();
            s.sort_unstable();
            s.dedup();
            assert_eq!(s.len(), a.support.len());
        }
    }

    #[test]
    fn sigma_profile_trivial_sample() {
        let dict = Dictionary::random_gaussian(NormedSpaceSpec::sequence(5, 2.0).unwrap(), 5, 0).unwrap();
        let p = sigma_profile(&[dict.atom(0).to_vec()], &dict, &[1, 2, 3], WcgaOptions::default()).unwrap();
        assert!(p.sigma.iter().all(|&s| s < 1e-9));
        assert!(sigma_profile(&[], &dict, &[1], WcgaOptions::default()).is_err());
        let outside = vec![dict.atom(0).iter().map(|v| 3.0 * v).collect::<Vec<_>>()];
        assert!(sigma_profile(&outside, &dict, &[1], WcgaOptions::default()).is_err());
    }

    #[test]
    fn octahedron_samples_are_members() {
        let dict = Dictionary::random_gaussian(NormedSpaceSpec::sequence(6, 1.5).unwrap(), 10, 2).unwrap();
        let oct = Octahedron::new(dict);
        for s in oct.witness_sample(20, 1) {
            assert!(oct.contains(&s).unwrap());
        }
    }

    #[test]
    fn hilbert_greedy_rate_for_octahedron() {
        // Orthogonal greedy in a Hilbert space: ||r_m|| <= ||f||_A (m + 1)^{-1/2}.
        let dict = Dictionary::random_gaussian(NormedSpaceSpec::sequence(24, 2.0).unwrap(), 48, 6).unwrap();
        let oct = Octahedron::new(dict.clone());
        for f in oct.sample(20, 3) {
            let path = wcga_path(&f, &dict, 12, WcgaOptions::default()).unwrap();
            for (m, a) in path.iter().enumerate() {
                assert!(a.residual_norm <= ((m + 1) as f64).powf(-0.5) + 1e-12);
            }
        }
    }
}
