//! Finite-sample covers and packings: the exact restricted-centers oracle,
//! classical greedy covers, and farthest-point traversal.

use super::certificate::{CoverCertificate, PackingCertificate, Provenance};
use super::metric::{DistanceMatrix, Metric};
use crate::error::{invalid, Error, Result};
use crate::{par, sampling};

/// Largest witness set accepted by the exact oracle.
pub const EXACT_MAX_POINTS: usize = 512;
/// Largest number of centers (`2^k`) accepted by the exact oracle.
pub const EXACT_MAX_CENTERS: usize = 16;

/// Result of the exact restricted-centers search.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactCover {
    pub radius: f64,
    /// Indices into the witness set.
    pub centers: Vec<usize>,
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn zeros(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn full(n: usize) -> Self {
        let mut b = Self::zeros(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }
    #[inline]
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
    fn and_not(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & !b).collect())
    }
    fn or_assign(&mut self, other: &Bits) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a |= b);
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn is_subset(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .position(|&w| w != 0)
            .map(|w| w * 64 + self.0[w].trailing_zeros() as usize)
    }
    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            (0..64).filter(move |b| word >> b & 1 == 1).map(move |b| w * 64 + b)
        })
    }
}

/// Set-cover decision at a fixed radius with centers drawn from the set.
struct CoverSearch {
    n: usize,
    /// `balls[c]`: points within radius of candidate center `c`.
    balls: Vec<Bits>,
    /// `coverers[p]`: candidate centers whose ball contains `p`.
    coverers: Vec<Vec<usize>>,
    /// `conflict[p]`: points that can share a center with `p`.
    conflict: Vec<Bits>,
}

impl CoverSearch {
    fn new(dm: &DistanceMatrix, radius: f64) -> Self {
        let n = dm.len();
        let mut balls = vec![Bits::zeros(n); n];
        let mut coverers = vec![Vec::new(); n];
        for c in 0..n {
            for p in 0..n {
                if dm.get(c, p) <= radius {
                    balls[c].set(p);
                    coverers[p].push(c);
                }
            }
        }
        // A center whose ball sits inside another's is never needed: swap it
        // for the larger one. Among equal balls the lowest index is kept.
        let sizes: Vec<usize> = balls.iter().map(|b| b.count()).collect();
        let dominated: Vec<bool> = par::map_range(n, |c| {
            (0..n).any(|d| {
                d != c
                    && (sizes[d] > sizes[c] || (sizes[d] == sizes[c] && d < c))
                    && balls[c].is_subset(&balls[d])
            })
        });
        for list in coverers.iter_mut() {
            list.retain(|&c| !dominated[c]);
            // Larger balls first when branching.
            list.sort_by(|a, b| sizes[*b].cmp(&sizes[*a]).then(a.cmp(b)));
        }
        let conflict = (0..n)
            .map(|p| {
                let mut acc = Bits::zeros(n);
                for &c in &coverers[p] {
                    acc.or_assign(&balls[c]);
                }
                acc
            })
            .collect();
        Self { n, balls, coverers, conflict }
    }

    /// Points pairwise unable to share a center: a lower bound on the
    /// number of centers still needed.
    fn lower_bound(&self, uncovered: &Bits) -> usize {
        let mut pool = uncovered.clone();
        let mut count = 0;
        while let Some(p) = pool.first() {
            pool = pool.and_not(&self.conflict[p]);
            count += 1;
        }
        count
    }

    fn solve(&self, uncovered: &Bits, budget: usize, chosen: &mut Vec<usize>) -> bool {
        if uncovered.is_empty() {
            return true;
        }
        if budget == 0 || self.lower_bound(uncovered) > budget {
            return false;
        }
        let pivot = uncovered
            .iter()
            .min_by_key(|&p| (self.coverers[p].len(), p))
            .expect("nonempty");
        for &c in &self.coverers[pivot] {
            chosen.push(c);
            if self.solve(&uncovered.and_not(&self.balls[c]), budget - 1, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    fn cover_with(&self, budget: usize) -> Option<Vec<usize>> {
        let mut chosen = Vec::new();
        self.solve(&Bits::full(self.n), budget, &mut chosen).then_some(chosen)
    }
}

fn check_exact_budget(len: usize, centers: usize) -> Result<()> {
    if len > EXACT_MAX_POINTS {
        return Err(Error::BudgetExceeded {
            what: "witness points",
            needed: len as f64,
            budget: EXACT_MAX_POINTS as f64,
            advice: "use greedy_cover or farthest_point_packing",
        });
    }
    if centers > EXACT_MAX_CENTERS {
        return Err(Error::BudgetExceeded {
            what: "centers",
            needed: centers as f64,
            budget: EXACT_MAX_CENTERS as f64,
            advice: "use greedy_cover or farthest_point_packing",
        });
    }
    Ok(())
}

/// Minimal radius at which `2^k` centers chosen from `points` cover
/// `points`. Relates to the free-center entropy number by
/// `eps_k <= radius <= 2 eps_k`.
pub fn exact_entropy_small(points: &[Vec<f64>], k: usize, metric: &Metric) -> Result<ExactCover> {
    let centers = 1usize.checked_shl(k as u32).unwrap_or(usize::MAX);
    check_exact_budget(points.len(), centers)?;
    if points.is_empty() {
        return Ok(ExactCover { radius: 0.0, centers: vec![] });
    }
    let dm = DistanceMatrix::new(points, metric);
    exact_on_matrix(&dm, centers)
}

pub(crate) fn exact_on_matrix(dm: &DistanceMatrix, centers: usize) -> Result<ExactCover> {
    if centers >= dm.len() {
        return Ok(ExactCover { radius: 0.0, centers: (0..dm.len()).collect() });
    }
    // The optimum is one of the pairwise distances. Farthest-point traversal
    // with `centers` points is feasible at its radius `r` and the optimum is
    // at least `r / 2`, so only distances in `[r/2, r]` are searched.
    let r = traversal_radius(dm, centers);
    let values: Vec<f64> = dm.distinct_values().into_iter().filter(|&v| v >= r / 2.0 && v <= r).collect();
    let (mut lo, mut hi) = (0usize, values.len() - 1);
    let mut best = CoverSearch::new(dm, values[hi])
        .cover_with(centers)
        .expect("the traversal centers cover at their radius");
    while lo < hi {
        let mid = (lo + hi) / 2;
        match CoverSearch::new(dm, values[mid]).cover_with(centers) {
            Some(c) => {
                hi = mid;
                best = c;
            }
            None => lo = mid + 1,
        }
    }
    Ok(ExactCover { radius: values[hi], centers: best })
}

/// Covering radius of the first `centers` points of a farthest-point
/// traversal started at point 0, read off the distance matrix; always one of
/// its entries.
fn traversal_radius(dm: &DistanceMatrix, centers: usize) -> f64 {
    let n = dm.len();
    let mut nearest: Vec<f64> = (0..n).map(|p| dm.get(0, p)).collect();
    for _ in 1..centers {
        let next = argmax(&nearest);
        for (p, d) in nearest.iter_mut().enumerate() {
            *d = d.min(dm.get(next, p));
        }
    }
    nearest.iter().cloned().fold(0.0, f64::max)
}

/// Fewest centers from `points` covering `points` at `radius`.
pub fn exact_min_centers(points: &[Vec<f64>], radius: f64, metric: &Metric, max_centers: usize) -> Result<Option<Vec<usize>>> {
    check_exact_budget(points.len(), max_centers)?;
    let dm = DistanceMatrix::new(points, metric);
    let search = CoverSearch::new(&dm, radius);
    Ok((1..=max_centers.max(1)).find_map(|b| search.cover_with(b)))
}

/// Classical greedy cover: the first uncovered point becomes a center until
/// everything is covered.
pub fn greedy_cover(points: &[Vec<f64>], epsilon: f64, metric: &Metric) -> Result<CoverCertificate> {
    if !(epsilon > 0.0) {
        return Err(invalid("epsilon", format!("must be positive, got {epsilon}")));
    }
    let mut covered = vec![false; points.len()];
    let mut centers = Vec::new();
    let mut radius = 0.0f64;
    while let Some(c) = covered.iter().position(|&v| !v) {
        let dists = par::map_slice(points, |p| metric.distance(&points[c], p));
        for (i, d) in dists.into_iter().enumerate() {
            if !covered[i] && d <= epsilon {
                covered[i] = true;
                radius = radius.max(d);
            }
        }
        centers.push(points[c].clone());
    }
    Ok(CoverCertificate {
        centers,
        radius,
        metric: metric.clone(),
        covered_set: format!("greedy cover of {} sample points", points.len()),
        provenance: Provenance::GreedyCover,
        seed: None,
        log2_family_size: None,
    })
}

/// Farthest-point (Gonzalez) traversal of a finite set.
#[derive(Clone, Debug)]
pub struct Traversal {
    /// Selected indices in order.
    pub order: Vec<usize>,
    /// `cover_radius[c]`: covering radius of the whole set by the first
    /// `c` selected points (`c >= 1`); equals the insertion distance of
    /// point `c`, so the first `c + 1` points are that far apart.
    pub cover_radius: Vec<f64>,
}

impl Traversal {
    /// Covering radius using the first `count` selected points.
    pub fn radius_with(&self, count: usize) -> Option<f64> {
        self.cover_radius.get(count).copied()
    }
}

/// Traversal of up to `max_points` points. The seeded random start is used
/// only to find the first point, which is the point farthest from it.
pub fn farthest_point_traversal(points: &[Vec<f64>], metric: &Metric, max_points: usize, seed: u64) -> Traversal {
    use rand::Rng;
    let n = points.len();
    if n == 0 || max_points == 0 {
        return Traversal { order: vec![], cover_radius: vec![f64::INFINITY] };
    }
    let start = sampling::rng(seed).gen_range(0..n);
    let from_start = par::map_slice(points, |p| metric.distance(&points[start], p));
    let first = argmax(&from_start);
    let mut order = vec![first];
    let mut nearest = par::map_slice(points, |p| metric.distance(&points[first], p));
    let mut cover_radius = vec![f64::INFINITY];
    loop {
        let next = argmax(&nearest);
        let r = nearest[next];
        cover_radius.push(r);
        if order.len() >= max_points.min(n) {
            break;
        }
        order.push(next);
        let d = par::map_slice(points, |p| metric.distance(&points[next], p));
        for (a, b) in nearest.iter_mut().zip(d) {
            *a = a.min(b);
        }
    }
    Traversal { order, cover_radius }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// `count` well-separated points by farthest-point traversal.
pub fn farthest_point_packing(points: &[Vec<f64>], count: usize, metric: &Metric, seed: u64) -> Result<PackingCertificate> {
    if count > points.len() {
        return Err(invalid("count", format!("{count} exceeds the {} available points", points.len())));
    }
    let t = farthest_point_traversal(points, metric, count, seed);
    let selected: Vec<Vec<f64>> = t.order.iter().map(|&i| points[i].clone()).collect();
    let mut separation = f64::INFINITY;
    for i in 0..selected.len() {
        for j in i + 1..selected.len() {
            separation = separation.min(metric.distance(&selected[i], &selected[j]));
        }
    }
    if selected.len() < 2 {
        separation = 0.0;
    }
    Ok(PackingCertificate { points: selected, separation, metric: metric.clone(), seed: Some(seed) })
}
