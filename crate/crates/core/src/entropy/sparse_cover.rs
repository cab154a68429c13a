//! Counted cover families built from sparse approximants.
//!
//! Octahedra: every witness point is replaced by its WCGA `m`-term
//! approximant with coefficients snapped to the grid `z / K`,
//! `z in Z^m`, `sum |z| <= K`. The family is indexed by a support of size
//! `m` and a grid point, so its size is `C(n, m) N1(m, K)`.
//!
//! Coordinate sets: keep the `m` largest coordinates, quantize each with an
//! `L`-level midpoint quantizer on `[-R, R]`, zero the rest. Family size
//! `C(n, m) L^m`.

use super::certificate::{CoverCertificate, Provenance};
use super::metric::Metric;
use crate::error::{invalid, Error, Result};
use crate::greedy::{wcga_path, Octahedron, SparseApproximant, WcgaOptions};
use crate::par;
use serde::{Deserialize, Serialize};

/// `log2 C(n, k)`.
pub fn log2_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64 / (i + 1) as f64).log2()).sum()
}

fn log2_sum_exp2(terms: &[f64]) -> f64 {
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + terms.iter().map(|t| (t - top).exp2()).sum::<f64>().log2()
}

/// `log2` of the number of integer vectors in `Z^m` with `sum |z| <= k`.
pub fn log2_l1_lattice_count(m: usize, k: u64) -> f64 {
    let top = (m as u64).min(k) as usize;
    let terms: Vec<f64> = (0..=top)
        .map(|i| i as f64 + log2_binomial(m, i) + log2_binomial_u64(k, i as u64))
        .collect();
    log2_sum_exp2(&terms)
}

fn log2_binomial_u64(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64 / (i + 1) as f64).log2()).sum()
}

/// Largest grid resolution `K` (at most `cap`) with family size `<= 2^k`.
fn largest_quanta(n: usize, m: usize, k: usize, cap: u64) -> Option<u64> {
    let budget = k as f64 - log2_binomial(n, m) + 1e-9;
    let fits = |kk: u64| log2_l1_lattice_count(m, kk) <= budget;
    if !fits(1) {
        return None;
    }
    let (mut lo, mut hi) = (1u64, 2u64);
    while hi <= cap && fits(hi) {
        lo = hi;
        hi = hi.saturating_mul(2);
    }
    let mut hi = hi.min(cap.saturating_add(1));
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

/// How the coefficients of a sparse center are discretized.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "grid", rename_all = "kebab-case")]
pub enum CoefficientGrid {
    /// `z / K` with `z` integer and `sum |z| <= K`.
    L1Lattice { quanta: u64 },
    /// Each coefficient snapped to the midpoint of one of `L` equal cells
    /// of `[-1, 1]`.
    Midpoint { levels: u64 },
}

/// One `(m, grid)` choice for the octahedron family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SparsePlan {
    pub m: usize,
    pub grid: CoefficientGrid,
    pub log2_family_size: f64,
}

const MAX_QUANTA: u64 = 1 << 40;

/// For each `m <= min(n, k)`, the finest grids of either kind whose family
/// fits in `2^k`.
pub fn sparse_plans(n: usize, k: usize) -> Vec<SparsePlan> {
    let mut plans = Vec::new();
    for m in 1..=n.min(k) {
        let supports = log2_binomial(n, m);
        if let Some(quanta) = largest_quanta(n, m, k, MAX_QUANTA) {
            plans.push(SparsePlan {
                m,
                grid: CoefficientGrid::L1Lattice { quanta },
                log2_family_size: supports + log2_l1_lattice_count(m, quanta),
            });
        }
        let levels = max_levels(supports, m, k);
        if levels >= 2 {
            plans.push(SparsePlan {
                m,
                grid: CoefficientGrid::Midpoint { levels },
                log2_family_size: supports + m as f64 * (levels as f64).log2(),
            });
        }
    }
    plans
}

/// Most levels `L` with `supports + m log2 L <= k`, at least 1.
fn max_levels(supports: f64, m: usize, k: usize) -> u64 {
    let spare = k as f64 - supports;
    if spare < -1e-9 {
        return 0;
    }
    let mut levels = (spare.max(0.0) / m as f64).exp2().floor().min(MAX_LEVELS as f64) as u64;
    // Guard the floor against round-off in either direction.
    while levels > 1 && supports + m as f64 * (levels as f64).log2() > k as f64 + 1e-9 {
        levels -= 1;
    }
    while levels < MAX_LEVELS && supports + m as f64 * ((levels + 1) as f64).log2() <= k as f64 + 1e-9 {
        levels += 1;
    }
    levels.max(1)
}

fn midpoint(x: f64, range: f64, levels: u64) -> f64 {
    let width = 2.0 * range / levels as f64;
    let cell = ((x + range) / width).floor().clamp(0.0, levels as f64 - 1.0);
    -range + (cell + 0.5) * width
}

/// Euclidean projection onto `{c : sum |c_i| <= 1}`.
fn project_l1_ball(c: &[f64]) -> Vec<f64> {
    let mass: f64 = c.iter().map(|v| v.abs()).sum();
    if mass <= 1.0 {
        return c.to_vec();
    }
    let mut mags: Vec<f64> = c.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (i, &u) in mags.iter().enumerate() {
        acc += u;
        let t = (acc - 1.0) / (i + 1) as f64;
        if u > t {
            theta = t;
        }
    }
    c.iter().map(|v| v.signum() * (v.abs() - theta).max(0.0)).collect()
}

/// Integer `z` with `sum |z| <= quanta` close to `quanta * c`, where
/// `sum |c| <= 1`.
fn snap_to_l1_grid(c: &[f64], quanta: u64) -> Vec<i64> {
    let scaled: Vec<f64> = c.iter().map(|v| v * quanta as f64).collect();
    let mut z: Vec<i64> = scaled.iter().map(|v| v.trunc() as i64).collect();
    let mut spare = quanta as i64 - z.iter().map(|v| v.abs()).sum::<i64>();
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = scaled[a].abs().fract();
        let fb = scaled[b].abs().fract();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for i in order {
        if spare == 0 {
            break;
        }
        if scaled[i].abs().fract() >= 0.5 {
            z[i] += if scaled[i] >= 0.0 { 1 } else { -1 };
            spare -= 1;
        }
    }
    z
}

/// The family member assigned to a WCGA approximant. Short supports are
/// padded with unused atoms carrying zero coefficients, so the center has
/// exactly `m` atoms like every other member.
fn center_for(approx: &SparseApproximant, oct: &Octahedron, m: usize, grid: CoefficientGrid) -> Vec<f64> {
    let mut support = approx.support.clone();
    let mut raw = approx.coefficients.clone();
    let mut j = 0;
    while support.len() < m {
        if !support.contains(&j) {
            support.push(j);
            raw.push(0.0);
        }
        j += 1;
    }
    let c = project_l1_ball(&raw);
    let coeffs: Vec<f64> = match grid {
        CoefficientGrid::L1Lattice { quanta } => snap_to_l1_grid(&c, quanta)
            .iter()
            .map(|&v| v as f64 / quanta as f64)
            .collect(),
        CoefficientGrid::Midpoint { levels } => c.iter().map(|&v| midpoint(v, 1.0, levels)).collect(),
    };
    oct.dictionary.combine(&support, &coeffs)
}

/// WCGA paths of every witness point, long enough for `m_max` terms.
pub fn witness_paths(oct: &Octahedron, witness: &[Vec<f64>], m_max: usize, opts: WcgaOptions) -> Result<Vec<Vec<SparseApproximant>>> {
    let m_max = m_max.min(oct.dictionary.len());
    par::try_map_range(witness.len(), |i| {
        let f = &witness[i];
        if oct.dictionary.space().norm_unchecked(f) == 0.0 {
            return Ok(vec![SparseApproximant {
                support: vec![],
                coefficients: vec![],
                residual_norm: 0.0,
                history: vec![0.0],
                converged: true,
            }]);
        }
        wcga_path(f, &oct.dictionary, m_max, opts)
    })
}

/// Cover of a witness sample of the octahedron with at most `2^k` counted
/// centers, choosing the `(m, K)` plan with the smallest realized radius.
pub fn cover_from_sparse(oct: &Octahedron, k: usize, witness: &[Vec<f64>], opts: WcgaOptions) -> Result<CoverCertificate> {
    let n = oct.dictionary.len();
    if k > n {
        return Err(invalid("k", format!("k = {k} exceeds dictionary size {n}")));
    }
    let plans = sparse_plans(n, k);
    let m_max = plans.iter().map(|p| p.m).max().unwrap_or(0);
    let paths = witness_paths(oct, witness, m_max, opts)?;
    cover_from_paths(oct, k, witness, &paths)
}

/// [`cover_from_sparse`] with precomputed WCGA paths.
pub fn cover_from_paths(oct: &Octahedron, k: usize, witness: &[Vec<f64>], paths: &[Vec<SparseApproximant>]) -> Result<CoverCertificate> {
    let n = oct.dictionary.len();
    let plans = sparse_plans(n, k);
    if plans.is_empty() {
        return Err(Error::BudgetExceeded {
            what: "log2 of the sparse family size",
            needed: log2_binomial(n, 1) + log2_l1_lattice_count(1, 1),
            budget: k as f64,
            advice: "use a larger k",
        });
    }
    let space = oct.dictionary.space();
    let mut best: Option<(f64, SparsePlan)> = None;
    for plan in &plans {
        let radius = par::map_range(witness.len(), |i| {
            let path = &paths[i];
            let approx = &path[plan.m.min(path.len() - 1)];
            let center = center_for(approx, oct, plan.m, plan.grid);
            let diff: Vec<f64> = witness[i].iter().zip(&center).map(|(a, b)| a - b).collect();
            space.norm_unchecked(&diff)
        })
        .into_iter()
        .fold(0.0, f64::max);
        if best.map_or(true, |(r, _)| radius < r) {
            best = Some((radius, *plan));
        }
    }
    let (_, plan) = best.expect("plans is nonempty");
    let mut centers: Vec<Vec<f64>> = Vec::new();
    for path in paths {
        let approx = &path[plan.m.min(path.len() - 1)];
        let c = center_for(approx, oct, plan.m, plan.grid);
        if !centers.contains(&c) {
            centers.push(c);
        }
    }
    let metric = Metric::ambient(space.clone());
    let radius = witness
        .iter()
        .map(|x| centers.iter().map(|c| metric.distance(x, c)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    Ok(CoverCertificate {
        centers,
        radius,
        metric,
        covered_set: format!(
            "{} witness points of the octahedron of {n} atoms; m = {}, {:?}",
            witness.len(),
            plan.m,
            plan.grid
        ),
        provenance: Provenance::SparseCover,
        seed: None,
        log2_family_size: Some(plan.log2_family_size),
    })
}

/// One `(m, L)` choice for the coordinate family on `[-range, range]^n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoordinatePlan {
    pub m: usize,
    pub levels: u64,
    pub range: f64,
    pub log2_family_size: f64,
}

impl CoordinatePlan {
    /// Quantization error of a kept coordinate.
    pub fn step_error(&self) -> f64 {
        self.range / self.levels as f64
    }

    /// The center assigned to `x`.
    pub fn center(&self, x: &[f64]) -> Vec<f64> {
        let mut order: Vec<usize> = (0..x.len()).collect();
        order.sort_by(|&a, &b| x[b].abs().total_cmp(&x[a].abs()).then(a.cmp(&b)));
        let mut c = vec![0.0; x.len()];
        for &i in order.iter().take(self.m) {
            c[i] = midpoint(x[i], self.range, self.levels);
        }
        c
    }
}

const MAX_LEVELS: u64 = 1 << 52;

/// For each `m <= n`, the most levels whose family fits in `2^k`
/// (`m = 0` is the single center at the origin).
pub fn coordinate_plans(n: usize, k: usize, range: f64) -> Vec<CoordinatePlan> {
    let mut plans = vec![CoordinatePlan { m: 0, levels: 1, range, log2_family_size: 0.0 }];
    for m in 1..=n {
        let levels = max_levels(log2_binomial(n, m), m, k);
        if levels == 0 {
            continue;
        }
        let log2_family_size = log2_binomial(n, m) + m as f64 * (levels as f64).log2();
        if log2_family_size <= k as f64 + 1e-9 {
            plans.push(CoordinatePlan { m, levels, range, log2_family_size });
        }
    }
    plans
}

/// A priori bound for `B_p^n` in `l_inf^n`: outside the `m` largest
/// coordinates every entry is at most `(m + 1)^{-1/p}`, and kept entries
/// are off by at most `1 / L`. Returns the best plan and its bound.
pub fn coordinate_ball_bound(n: usize, k: usize, p: f64) -> (CoordinatePlan, f64) {
    coordinate_plans(n, k, 1.0)
        .into_iter()
        .map(|plan| {
            let tail = if plan.m >= n { 0.0 } else { ((plan.m + 1) as f64).powf(-1.0 / p) };
            let bound = tail.max(plan.step_error()).min(1.0);
            (plan, bound)
        })
        .fold(None, |acc: Option<(CoordinatePlan, f64)>, cur| match acc {
            Some(a) if a.1 <= cur.1 => Some(a),
            _ => Some(cur),
        })
        .expect("the m = 0 plan always exists")
}

/// Coordinate cover of a sample of vectors in `[-range, range]^n`, with the
/// plan chosen to minimize the realized radius in `metric`.
pub fn coordinate_cover(points: &[Vec<f64>], k: usize, range: f64, metric: &Metric) -> Result<CoverCertificate> {
    let n = points.first().map_or(0, |p| p.len());
    if !(range > 0.0) {
        return Err(invalid("range", format!("must be positive, got {range}")));
    }
    if let Some(i) = points.iter().position(|p| p.iter().any(|v| v.abs() > range * (1.0 + 1e-12))) {
        return Err(invalid("points", format!("point {i} leaves [-{range}, {range}]^{n}")));
    }
    let plans = coordinate_plans(n, k, range);
    let radii: Vec<f64> = par::map_slice(&plans, |plan| {
        points
            .iter()
            .map(|x| metric.distance(x, &plan.center(x)))
            .fold(0.0, f64::max)
    });
    let mut best = 0;
    for (i, r) in radii.iter().enumerate() {
        if *r < radii[best] {
            best = i;
        }
    }
    let plan = plans[best];
    let mut centers: Vec<Vec<f64>> = Vec::new();
    for x in points {
        let c = plan.center(x);
        if !centers.contains(&c) {
            centers.push(c);
        }
    }
    Ok(CoverCertificate {
        centers,
        radius: radii[best],
        metric: metric.clone(),
        covered_set: format!(
            "{} sample vectors in [-{range}, {range}]^{n}; m = {}, {} levels",
            points.len(),
            plan.m,
            plan.levels
        ),
        provenance: Provenance::SparseCover,
        seed: None,
        log2_family_size: Some(plan.log2_family_size),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{Dictionary, NormedSpaceSpec};

    #[test]
    fn lattice_count_matches_enumeration() {
        for m in 1..4usize {
            for k in 0..5u64 {
                let mut count = 0u64;
                let side = 2 * k as i64 + 1;
                let total = (side as u64).pow(m as u32);
                for code in 0..total {
                    let mut c = code;
                    let mut mass = 0;
                    for _ in 0..m {
                        mass += ((c % side as u64) as i64 - k as i64).abs();
                        c /= side as u64;
                    }
                    if mass <= k as i64 {
                        count += 1;
                    }
                }
                assert!((log2_l1_lattice_count(m, k) - (count as f64).log2()).abs() < 1e-9, "m={m} k={k}");
            }
        }
        assert!((log2_binomial(10, 3) - 120f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn plans_fit_budget() {
        for plan in sparse_plans(32, 20) {
            assert!(plan.log2_family_size <= 20.0 + 1e-9);
            if let CoefficientGrid::L1Lattice { quanta } = plan.grid {
                let finer = log2_binomial(32, plan.m) + log2_l1_lattice_count(plan.m, quanta + 1);
                assert!(finer > 20.0);
            }
        }
        for plan in coordinate_plans(16, 16, 1.0) {
            assert!(plan.log2_family_size <= 16.0 + 1e-9);
        }
    }

    #[test]
    fn snapping_respects_grid_and_mass() {
        let c = [0.3, -0.45, 0.2];
        for quanta in [1u64, 3, 10, 1000] {
            let z = snap_to_l1_grid(&c, quanta);
            assert!(z.iter().map(|v| v.abs()).sum::<i64>() <= quanta as i64);
            for (zi, ci) in z.iter().zip(&c) {
                assert!((*zi as f64 / quanta as f64 - ci).abs() <= 1.0 / quanta as f64 + 1e-12);
            }
        }
        let p = project_l1_ball(&[2.0, -1.0, 0.5]);
        assert!((p.iter().map(|v| v.abs()).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_atom_segment_is_dyadic() {
        let space = NormedSpaceSpec::sequence(1, 2.0).unwrap();
        let dict = Dictionary::canonical(space.clone());
        let oct = Octahedron::new(dict);
        let grid: Vec<Vec<f64>> = (0..=400).map(|i| vec![-1.0 + i as f64 / 200.0]).collect();
        // n = 1 has only k <= 1; the coordinate family carries the dyadic cover.
        let cert = cover_from_sparse(&oct, 1, &grid, WcgaOptions::default()).unwrap();
        assert!(cert.radius <= 0.5 + 1e-12);
        cert.verify(&grid).unwrap();
        for k in 0..8 {
            let cert = coordinate_cover(&grid, k, 1.0, &Metric::Sup).unwrap();
            assert!(cert.radius <= 0.5f64.powi(k as i32) + 1e-12);
            assert!(cert.centers.len() <= 1 << k);
            let (_, bound) = coordinate_ball_bound(1, k, 2.0);
            assert_eq!(bound, 0.5f64.powi(k as i32));
        }
    }

    #[test]
    fn octahedron_cover_is_sound() {
        let space = NormedSpaceSpec::sequence(12, 2.0).unwrap();
        let dict = Dictionary::random_gaussian(space, 16, 4).unwrap();
        let oct = Octahedron::new(dict);
        let witness = oct.witness_sample(100, 1);
        for k in [6usize, 10, 16] {
            let cert = cover_from_sparse(&oct, k, &witness, WcgaOptions::default()).unwrap();
            assert!(cert.certifies(k));
            assert!(cert.centers.len() as f64 <= 2f64.powi(k as i32));
            let realized = cert.verify(&witness).unwrap();
            assert!((realized - cert.radius).abs() < 1e-12);
        }
        assert!(matches!(
            cover_from_sparse(&oct, 2, &witness, WcgaOptions::default()),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn ball_bound_within_trivial() {
        for n in [4usize, 16, 64] {
            let mut prev = f64::INFINITY;
            for k in 0..=n {
                let (plan, b) = coordinate_ball_bound(n, k, 2.0);
                assert!(b <= 1.0 && b <= prev + 1e-15);
                assert!(plan.log2_family_size <= k as f64 + 1e-9);
                prev = b;
            }
        }
    }
}
