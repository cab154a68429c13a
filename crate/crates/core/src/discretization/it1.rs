use serde::{Deserialize, Serialize};

use super::nikolskii::{m_p_direct, m_p_direct_at, DIRECT_TOL};
use super::{SamplePointSet, Subspace};
use crate::entropy::experiments::EnvelopeComparison;
use crate::entropy::metric::Metric;
use crate::entropy::profile::{traversal_brackets, EntropyProfile};
use crate::entropy::sparse_cover::coordinate_cover;
use crate::entropy::Provenance;
use crate::error::{invalid, Result};
use crate::{par, sampling};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct It1Report {
    pub p: f64,
    pub n: usize,
    pub dim: usize,
    pub m_p: f64,
    pub profile: EntropyProfile,
    /// Envelope `M_p (log2(2n/k)/k)^{1/p}` and ratios `upper / envelope`.
    pub comparison: EnvelopeComparison,
    /// Cover of the whole unit ball through a cubic grid on the basis
    /// coefficients (which lie in `[-1, 1]^N`): `L^N <= 2^k` cells give
    /// error `max_j ||u(x^j)||_1 / L`, capped by `M_p`. Decays like
    /// `2^{-k/N}` and is kept apart from the profile.
    pub grid_upper: Vec<f64>,
    pub sample_size: usize,
    pub seed: u64,
}

/// Entropy profile of the unit `L_p` ball of the subspace in the
/// `L_inf(Omega_n)` semi-norm, measured on a sample of its restrictions to
/// `Omega_n`: the maximizers of `|f(x^j)|` (both signs) plus `samples`
/// random unit-norm elements.
pub fn it1_experiment(sub: &Subspace, pts: &SamplePointSet, p: f64, k_list: &[usize], samples: usize, seed: u64) -> Result<It1Report> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(invalid("p", format!("the L_p to L_inf bound needs p >= 2, got {p}")));
    }
    let n = pts.len();
    if let Some(k) = k_list.iter().find(|&&k| k < 1 || k > n) {
        return Err(invalid("k_list", format!("k = {k} outside [1, {n}]")));
    }
    let m_p = m_p_direct(sub, p, DIRECT_TOL)?;
    let measure = sub.measure();
    let extremal = par::try_map_range(n, |j| m_p_direct_at(sub, pts.indices[j], p, DIRECT_TOL))?;
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(2 * n + samples);
    for e in &extremal {
        let f = sub.combine(&e.coefficients);
        if measure.norm(&f, p) > 0.0 {
            let r = pts.restrict(&f);
            vectors.push(r.iter().map(|v| -v).collect());
            vectors.push(r);
        }
    }
    for t in 0..samples {
        let a = sampling::gaussian_vec(&mut sampling::child_rng(seed, t as u64), sub.dim());
        let f = sub.combine(&a);
        let norm = measure.norm(&f, p);
        if norm > 0.0 {
            vectors.push(pts.restrict(&f).iter().map(|v| v / norm).collect());
        }
    }
    // |f(x)| <= M_p for unit f; the max guards against solver round-off.
    let range = vectors
        .iter()
        .flat_map(|v| v.iter().map(|x| x.abs()))
        .fold(m_p, f64::max);
    let metric = Metric::Sup;
    let brackets = traversal_brackets(&vectors, &metric, k_list, seed);
    let covers = par::try_map_range(k_list.len(), |i| coordinate_cover(&vectors, k_list[i], range, &metric))?;
    let mut profile = EntropyProfile::new(k_list)?;
    for i in 0..k_list.len() {
        profile.offer_upper(i, range, Provenance::Trivial);
        profile.offer_upper(i, covers[i].radius, Provenance::SparseCover);
        if let Some((lo, _)) = brackets[i] {
            profile.offer_lower(i, lo, Provenance::Packing);
        }
    }
    profile.finalize()?;
    let comparison = EnvelopeComparison::new(&profile, n, 1.0 / p, m_p);
    let spread_l1 = pts
        .indices
        .iter()
        .map(|&x| sub.values_at(x).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let grid_upper = k_list
        .iter()
        .map(|&k| {
            let levels = (k as f64 / sub.dim() as f64).exp2().floor().max(1.0);
            (spread_l1 / levels).min(m_p)
        })
        .collect();
    Ok(It1Report { p, n, dim: sub.dim(), m_p, profile, comparison, grid_upper, sample_size: vectors.len(), seed })
}

#[cfg(test)]
mod tests {
    use super::super::MeasureSpace;
    use super::*;

    #[test]
    fn first_entry_within_trivial_ball() {
        let m = MeasureSpace::uniform(64).unwrap();
        let sub = Subspace::random(m.clone(), 4, 1).unwrap();
        let pts = SamplePointSet::random(&m, 16, 2).unwrap();
        let r = it1_experiment(&sub, &pts, 2.0, &[1, 2, 4, 8, 16], 300, 3).unwrap();
        assert!(r.profile.upper[0] <= r.m_p + 1e-9);
        r.profile.check().unwrap();
        assert!(it1_experiment(&sub, &pts, 1.5, &[1], 10, 3).is_err());
    }

    #[test]
    fn one_dimensional_ratios_decrease() {
        let m = MeasureSpace::uniform(32).unwrap();
        let sub = Subspace::random(m.clone(), 1, 5).unwrap();
        let pts = SamplePointSet::random(&m, 8, 6).unwrap();
        let ks = [3, 4, 5, 6, 7, 8];
        let r = it1_experiment(&sub, &pts, 2.0, &ks, 200, 1).unwrap();
        // A segment: the grid bound halves with each extra bit and falls
        // faster than the envelope.
        let ratios: Vec<f64> = r.grid_upper.iter().zip(&r.comparison.envelope).map(|(g, e)| g / e).collect();
        assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
        for w in r.grid_upper.windows(2) {
            assert!(w[1] <= w[0] / 2.0 + 1e-12 || w[0] == r.m_p);
        }
    }

    #[test]
    fn corridor_small() {
        let m = MeasureSpace::uniform(256).unwrap();
        let sub = Subspace::random(m.clone(), 8, 11).unwrap();
        let pts = SamplePointSet::random(&m, 64, 12).unwrap();
        let ks = [8, 16, 32, 64];
        let r = it1_experiment(&sub, &pts, 2.0, &ks, 2000, 13).unwrap();
        let spread = r.comparison.spread(&ks, 0);
        assert!(spread <= 4.0, "spread {spread}: {:?}", r.comparison.ratio);
    }
}
