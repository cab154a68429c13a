//! Entropy experiments: coordinate balls in `l_inf`, octahedra of a
//! dictionary, and the duality of sums of powered entropy numbers.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::certificate::Provenance;
use super::metric::Metric;
use super::profile::{traversal_brackets, EntropyProfile};
use super::sparse_cover::{coordinate_ball_bound, cover_from_paths, sparse_plans, witness_paths};
use crate::error::{invalid, Result};
use crate::fit::log_ratio_envelope;
use crate::greedy::{Octahedron, WcgaOptions};
use crate::sampling;
use crate::spaces::Dictionary;

/// Envelope values and the ratios `upper / envelope` for a profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeComparison {
    pub exponent: f64,
    /// Multiplier applied to the envelope (1 unless stated).
    pub scale: f64,
    pub envelope: Vec<f64>,
    pub ratio: Vec<f64>,
}

impl EnvelopeComparison {
    pub fn new(profile: &EntropyProfile, n: usize, exponent: f64, scale: f64) -> Self {
        let envelope: Vec<f64> = profile
            .k_list
            .iter()
            .map(|&k| scale * log_ratio_envelope(n, k as f64, exponent))
            .collect();
        let ratio = profile.upper.iter().zip(&envelope).map(|(u, e)| u / e).collect();
        Self { exponent, scale, envelope, ratio }
    }

    /// `max / min` of the ratios at positions where `k >= k_min`.
    pub fn spread(&self, k_list: &[usize], k_min: usize) -> f64 {
        let r: Vec<f64> = k_list
            .iter()
            .zip(&self.ratio)
            .filter(|(k, _)| **k >= k_min)
            .map(|(_, r)| *r)
            .collect();
        let hi = r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = r.iter().cloned().fold(f64::INFINITY, f64::min);
        hi / lo
    }
}

/// Smallest `k` counted as past the trivial range: `ceil(log2 n)`.
pub fn default_k_min(n: usize) -> usize {
    (n.max(1) as f64).log2().ceil() as usize
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BallEntropyReport {
    pub p: f64,
    pub n: usize,
    pub profile: EntropyProfile,
    /// Farthest-point cover radius of the dense sample itself, per k
    /// (`None` once `2^k` exceeds the sample).
    pub sample_upper: Vec<Option<f64>>,
    pub comparison: EnvelopeComparison,
    pub sample_size: usize,
    pub seed: u64,
}

/// Dense sample of `B_p^n`: vertices `+-e_i`, flat points with `s` equal
/// entries of size `s^{-1/p}` and random signs, and random ball points.
pub fn ball_sample(n: usize, p: f64, random: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = sampling::rng(seed);
    let mut pts = Vec::new();
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[i] = s;
            pts.push(e);
        }
    }
    let mut s = 2;
    while s <= n {
        for _ in 0..n {
            let support = sampling::subset(&mut rng, n, s);
            let mut x = vec![0.0; n];
            let h = (s as f64).powf(-1.0 / p);
            for j in support {
                x[j] = h * sampling::random_sign(&mut rng);
            }
            pts.push(x);
        }
        s *= 2;
    }
    for _ in 0..random {
        pts.push(sampling::lp_ball_point(&mut rng, n, p));
    }
    pts
}

/// Entropy profile of `B_p^n` in `l_inf^n`. Upper bounds are a priori
/// coordinate-cover bounds valid for the whole ball, capped by the trivial
/// bound 1; lower bounds come from farthest-point packings of a dense
/// sample.
pub fn ball_entropy_experiment(p: f64, n: usize, k_list: &[usize], sample_size: usize, seed: u64) -> Result<BallEntropyReport> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(invalid("p", format!("requires p >= 2, got {p}")));
    }
    if n == 0 {
        return Err(invalid("n", "must be positive".to_string()));
    }
    if let Some(k) = k_list.iter().find(|&&k| k < 1 || k > n) {
        return Err(invalid("k_list", format!("k = {k} outside [1, {n}]")));
    }
    let mut profile = EntropyProfile::new(k_list)?;
    let sample = ball_sample(n, p, sample_size, seed);
    let brackets = traversal_brackets(&sample, &Metric::Sup, k_list, seed);
    let mut sample_upper = Vec::with_capacity(k_list.len());
    for (i, &k) in k_list.iter().enumerate() {
        profile.offer_upper(i, 1.0, Provenance::Trivial);
        let (plan, bound) = coordinate_ball_bound(n, k, p);
        let source = if plan.m == 0 { Provenance::Trivial } else { Provenance::SparseCover };
        profile.offer_upper(i, bound, source);
        sample_upper.push(brackets[i].map(|b| b.1));
        if let Some((lo, _)) = brackets[i] {
            profile.offer_lower(i, lo, Provenance::Packing);
        }
    }
    profile.finalize()?;
    let comparison = EnvelopeComparison::new(&profile, n, 1.0 / p, 1.0);
    Ok(BallEntropyReport { p, n, profile, sample_upper, comparison, sample_size: sample.len(), seed })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OctahedronEntropyReport {
    pub q: f64,
    pub n: usize,
    pub profile: EntropyProfile,
    pub comparison: EnvelopeComparison,
    /// `log2` size of the sparse family used at each k, when one fits.
    pub log2_family_size: Vec<Option<f64>>,
    pub witness_size: usize,
    pub seed: u64,
}

/// Entropy profile of a witness sample of the octahedron `A_1(D)` in the
/// ambient norm, with sparse-cover upper bounds and packing lower bounds.
pub fn octahedron_entropy_experiment(
    dict: &Dictionary,
    k_list: &[usize],
    extra_samples: usize,
    opts: WcgaOptions,
    seed: u64,
) -> Result<OctahedronEntropyReport> {
    let n = dict.len();
    if let Some(k) = k_list.iter().find(|&&k| k > n) {
        return Err(invalid("k_list", format!("k = {k} exceeds n = {n}")));
    }
    let oct = Octahedron::new(dict.clone());
    let witness = oct.witness_sample(extra_samples, seed);
    let m_max = k_list
        .iter()
        .flat_map(|&k| sparse_plans(n, k))
        .map(|p| p.m)
        .max()
        .unwrap_or(0);
    let paths = witness_paths(&oct, &witness, m_max, opts)?;
    let metric = Metric::ambient(dict.space().clone());
    let brackets = traversal_brackets(&witness, &metric, k_list, seed);
    let mut profile = EntropyProfile::new(k_list)?;
    let mut sizes = Vec::with_capacity(k_list.len());
    for (i, &k) in k_list.iter().enumerate() {
        profile.offer_upper(i, 1.0, Provenance::Trivial);
        if sparse_plans(n, k).is_empty() {
            sizes.push(None);
        } else {
            let cert = cover_from_paths(&oct, k, &witness, &paths)?;
            sizes.push(cert.log2_family_size);
            profile.offer_upper(i, cert.radius, Provenance::SparseCover);
        }
        if let Some((lo, _)) = brackets[i] {
            profile.offer_lower(i, lo, Provenance::Packing);
        }
    }
    profile.finalize()?;
    let q = dict.space().q();
    let comparison = EnvelopeComparison::new(&profile, n, 1.0 - 1.0 / q, 1.0);
    Ok(OctahedronEntropyReport { q, n, profile, comparison, log2_family_size: sizes, witness_size: witness.len(), seed })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DualityStatus {
    /// The ratio interval meets `[1e-3, 1e3]`.
    Consistent,
    /// The ratio interval misses `[1e-3, 1e3]` entirely.
    Excluded,
    /// Brackets too wide (or empty) to say anything.
    Uninformative,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualityReport {
    pub q: f64,
    pub m: usize,
    /// Power applied to the entropy numbers, `q' / 2`.
    pub power: f64,
    /// `[lower, upper]` per k for the octahedron in X.
    pub adjoint: Vec<(f64, f64)>,
    /// `[lower, upper]` per k for the dual unit ball in the U-norm.
    pub operator: Vec<(f64, f64)>,
    pub ratio_low: f64,
    pub ratio_high: f64,
    pub status: DualityStatus,
}

/// Sample of the unit ball of the dual space: norming functionals of the
/// atoms, signed dual coordinate vectors, and random dual-ball points.
pub fn dual_ball_sample(dict: &Dictionary, random: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let space = dict.space();
    let dual = space.dual();
    let qd = dual.q();
    let d = space.dim();
    let mut pts = Vec::new();
    for g in dict.atoms() {
        let f = space.norming_functional(g)?.coefficients;
        pts.push(f.iter().map(|v| -v).collect());
        pts.push(f);
    }
    for i in 0..d {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; d];
            e[i] = s * space.weight(i).powf(-1.0 / qd);
            pts.push(e);
        }
    }
    let mut rng = sampling::rng(seed);
    for t in 0..random {
        let x = if t % 2 == 0 {
            sampling::lp_ball_point(&mut rng, d, qd)
        } else {
            // Sphere points: the extreme part of the ball.
            let g = sampling::gaussian_vec(&mut rng, d);
            let r = sampling::lp_norm(&g, qd);
            g.into_iter().map(|v| v / r * rng.gen_range(0.9..=1.0)).collect()
        };
        pts.push(x.iter().enumerate().map(|(i, v)| v * space.weight(i).powf(-1.0 / qd)).collect());
    }
    Ok(pts)
}

/// Brackets `sum_{k<=m} eps_k^p` for the dual unit ball in the U-norm
/// (operator side) and for the octahedron in X (adjoint side), with
/// `p = q' / 2`, and reports the interval of possible ratios.
pub fn duality_sum_check(dict: &Dictionary, m: usize, samples: usize, seed: u64) -> Result<DualityReport> {
    let n = dict.len();
    if n == 0 || n > 12 {
        return Err(invalid("dictionary", format!("needs 1..=12 atoms, got {n}")));
    }
    if m > 16 {
        return Err(invalid("m", format!("at most 16, got {m}")));
    }
    let space = dict.space();
    let power = space.dual_exponent() / 2.0;
    let samples = samples.max((1 << m) * 4);
    let k_list: Vec<usize> = (0..=m).collect();

    let oct = Octahedron::new(dict.clone());
    let primal = oct.witness_sample(samples, sampling::child_seed(seed, 0));
    let primal_metric = Metric::ambient(space.clone());
    let adjoint = bracket_all(&primal, &primal_metric, &k_list, seed);

    let dual = dual_ball_sample(dict, samples, sampling::child_seed(seed, 1))?;
    let u_metric = Metric::u_norm(dict.clone());
    let operator = bracket_all(&dual, &u_metric, &k_list, seed);

    let sum = |b: &[(f64, f64)], hi: bool| -> f64 {
        b.iter().map(|(l, h)| if hi { *h } else { *l }).map(|v| v.powf(power)).sum()
    };
    let ratio_low = sum(&operator, false) / sum(&adjoint, true);
    let ratio_high = sum(&operator, true) / sum(&adjoint, false);
    let status = if !(ratio_low > 0.0 && ratio_high.is_finite()) {
        DualityStatus::Uninformative
    } else if ratio_high < 1e-3 || ratio_low > 1e3 {
        DualityStatus::Excluded
    } else {
        DualityStatus::Consistent
    };
    Ok(DualityReport { q: space.q(), m, power, adjoint, operator, ratio_low, ratio_high, status })
}

/// Traversal brackets capped by the radius of the smallest origin-centered
/// ball holding the sample.
fn bracket_all(points: &[Vec<f64>], metric: &Metric, k_list: &[usize], seed: u64) -> Vec<(f64, f64)> {
    let reach = points.iter().map(|x| metric.magnitude(x)).fold(0.0, f64::max);
    traversal_brackets(points, metric, k_list, seed)
        .into_iter()
        .map(|b| match b {
            Some((lo, hi)) => (lo, hi.min(reach)),
            None => (0.0, reach),
        })
        .collect()
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::NormedSpaceSpec;

    #[test]
    fn segment_profile_brackets_dyadic() {
        let r = ball_entropy_experiment(2.0, 1, &[1], 2000, 3).unwrap();
        let (lo, hi) = (r.profile.lower[0], r.profile.upper[0]);
        assert!(lo <= 0.5 && 0.5 <= hi, "{lo} {hi}");
        assert_eq!(hi, 0.5);
    }

    #[test]
    fn ball_profile_is_bounded_by_one() {
        let ks: Vec<usize> = (1..=16).collect();
        let r = ball_entropy_experiment(2.0, 16, &ks, 2000, 1).unwrap();
        assert!(r.profile.upper.iter().all(|&u| u <= 1.0));
        r.profile.check().unwrap();
        let spread = r.comparison.spread(&ks, 4);
        assert!(spread < 8.0, "spread {spread}");
        assert!(ball_entropy_experiment(1.5, 16, &ks, 10, 1).is_err());
    }

    #[test]
    fn duality_m_zero_is_finite() {
        let dict = Dictionary::canonical(NormedSpaceSpec::sequence(4, 2.0).unwrap());
        let r = duality_sum_check(&dict, 0, 50, 2).unwrap();
        assert!(r.ratio_low > 0.0 && r.ratio_high.is_finite());
    }

    #[test]
    fn duality_hilbert_contains_one() {
        let dict = Dictionary::canonical(NormedSpaceSpec::sequence(8, 2.0).unwrap());
        let r = duality_sum_check(&dict, 6, 300, 5).unwrap();
        assert!(r.ratio_low <= 1.0 && 1.0 <= r.ratio_high, "{} {}", r.ratio_low, r.ratio_high);
        assert_eq!(r.status, DualityStatus::Consistent);
    }

    #[test]
    fn duality_q15_corridor() {
        let dict = Dictionary::canonical(NormedSpaceSpec::sequence(8, 1.5).unwrap());
        let r = duality_sum_check(&dict, 6, 300, 5).unwrap();
        assert!(r.ratio_low >= 1e-2 && r.ratio_high <= 1e2, "{} {}", r.ratio_low, r.ratio_high);
    }
}
