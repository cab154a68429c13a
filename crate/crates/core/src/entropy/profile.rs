use serde::{Deserialize, Serialize};

use super::certificate::Provenance;
use super::cover::farthest_point_traversal;
use super::metric::Metric;
use crate::error::{invalid, Error, Result};

/// Per-k lower and upper bounds on entropy numbers, each tagged with its
/// source. `k_list` is strictly increasing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyProfile {
    pub k_list: Vec<usize>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Source of each upper entry.
    pub provenance: Vec<Provenance>,
    pub lower_provenance: Vec<Provenance>,
}

impl EntropyProfile {
    /// Empty bounds: lower 0, upper infinite.
    pub fn new(k_list: &[usize]) -> Result<Self> {
        if k_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("k_list", "must be strictly increasing".to_string()));
        }
        let n = k_list.len();
        Ok(Self {
            k_list: k_list.to_vec(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
            provenance: vec![Provenance::None; n],
            lower_provenance: vec![Provenance::None; n],
        })
    }

    pub fn len(&self) -> usize {
        self.k_list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_list.is_empty()
    }

    /// Tighten the upper bound at position `i`.
    pub fn offer_upper(&mut self, i: usize, value: f64, source: Provenance) {
        if value < self.upper[i] {
            self.upper[i] = value;
            self.provenance[i] = source;
        }
    }

    /// Tighten the lower bound at position `i`.
    pub fn offer_lower(&mut self, i: usize, value: f64, source: Provenance) {
        if value > self.lower[i] {
            self.lower[i] = value;
            self.lower_provenance[i] = source;
        }
    }

    /// Propagate bounds along k (entropy numbers are nonincreasing) and
    /// check `lower <= upper`.
    pub fn finalize(&mut self) -> Result<()> {
        for i in 1..self.len() {
            if self.upper[i - 1] < self.upper[i] {
                self.upper[i] = self.upper[i - 1];
                self.provenance[i] = self.provenance[i - 1];
            }
        }
        for i in (0..self.len().saturating_sub(1)).rev() {
            if self.lower[i + 1] > self.lower[i] {
                self.lower[i] = self.lower[i + 1];
                self.lower_provenance[i] = self.lower_provenance[i + 1];
            }
        }
        self.check()
    }

    /// Profile invariants: `lower <= upper`, both nonincreasing.
    pub fn check(&self) -> Result<()> {
        for i in 0..self.len() {
            if self.lower[i] > self.upper[i] * (1.0 + 1e-12) {
                return Err(Error::PropertyViolation(format!(
                    "k = {}: lower {} exceeds upper {}",
                    self.k_list[i], self.lower[i], self.upper[i]
                )));
            }
            if i > 0 && (self.upper[i] > self.upper[i - 1] || self.lower[i] > self.lower[i - 1]) {
                return Err(Error::PropertyViolation(format!("profile increases at k = {}", self.k_list[i])));
            }
        }
        Ok(())
    }
}

/// Brackets `[r / 2, r]` on the entropy numbers of a finite sample from a
/// farthest-point traversal: the first `2^k` points cover the sample at
/// radius `r`, and together with the next point they are `r`-separated.
/// Entries stay `None` when the sample has at most `2^k` points.
pub fn traversal_brackets(points: &[Vec<f64>], metric: &Metric, k_list: &[usize], seed: u64) -> Vec<Option<(f64, f64)>> {
    let cap = k_list
        .iter()
        .filter(|&&k| k < 63 && (1usize << k) < points.len())
        .map(|&k| (1usize << k) + 1)
        .max()
        .unwrap_or(1);
    let t = farthest_point_traversal(points, metric, cap, seed);
    k_list
        .iter()
        .map(|&k| {
            if k >= 63 || (1usize << k) >= points.len() {
                return None;
            }
            let r = t.radius_with(1 << k)?;
            Some((r / 2.0, r))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finalize_enforces_monotone_bounds() {
        let mut p = EntropyProfile::new(&[1, 2, 3]).unwrap();
        p.offer_upper(0, 0.5, Provenance::Trivial);
        p.offer_upper(1, 0.7, Provenance::SparseCover);
        p.offer_upper(2, 0.2, Provenance::SparseCover);
        p.offer_lower(2, 0.1, Provenance::Packing);
        p.finalize().unwrap();
        assert_eq!(p.upper, vec![0.5, 0.5, 0.2]);
        assert_eq!(p.provenance[1], Provenance::Trivial);
        assert_eq!(p.lower, vec![0.1, 0.1, 0.1]);
        assert!(EntropyProfile::new(&[2, 2]).is_err());
    }

    #[test]
    fn crossing_bounds_are_reported() {
        let mut p = EntropyProfile::new(&[1]).unwrap();
        p.offer_upper(0, 0.1, Provenance::Exact);
        p.offer_lower(0, 0.2, Provenance::Packing);
        assert!(matches!(p.finalize(), Err(Error::PropertyViolation(_))));
    }

    #[test]
    fn brackets_on_segment() {
        let grid: Vec<Vec<f64>> = (0..=1024).map(|i| vec![-1.0 + i as f64 / 512.0]).collect();
        let b = traversal_brackets(&grid, &Metric::Sup, &[0, 1, 2, 3, 20], 9);
        for (k, e) in b.iter().take(4).enumerate() {
            let (lo, hi) = e.unwrap();
            let truth = 0.5f64.powi(k as i32);
            assert!(lo <= truth + 1e-12 && truth <= hi + 2.0 / 512.0, "k={k}: {lo} {hi}");
        }
        assert!(b[4].is_none());
    }
}
