use serde::{Deserialize, Serialize};

use super::metric::Metric;
use crate::error::{Error, Result};

/// Where a bound came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Exact,
    GreedyCover,
    SparseCover,
    Packing,
    /// Containment in a ball around the origin.
    Trivial,
    /// No bound available at this k.
    None,
}

/// Relative slack for re-checking radii against recomputed distances.
const CHECK_SLACK: f64 = 1e-12;

/// Explicit centers covering a witness sample at `radius`.
///
/// For implicit center families (sparse covers) `centers` holds only the
/// centers actually used by the witness sample, and `log2_family_size` is
/// the counted size of the whole family. Either way the certificate bounds
/// `eps_k` of the sampled set for `k >= log2_family_size()`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverCertificate {
    pub centers: Vec<Vec<f64>>,
    pub radius: f64,
    pub metric: Metric,
    pub covered_set: String,
    pub provenance: Provenance,
    pub seed: Option<u64>,
    pub log2_family_size: Option<f64>,
}

impl CoverCertificate {
    pub fn log2_family_size(&self) -> f64 {
        self.log2_family_size
            .unwrap_or_else(|| (self.centers.len().max(1) as f64).log2())
    }

    /// Smallest `k` with at most `2^k` centers.
    pub fn min_k(&self) -> usize {
        let l = self.log2_family_size();
        let k = l.ceil();
        // Guard against log2 round-off on exact powers of two.
        if (l - (k - 1.0)).abs() < 1e-12 {
            (k - 1.0).max(0.0) as usize
        } else {
            k.max(0.0) as usize
        }
    }

    pub fn certifies(&self, k: usize) -> bool {
        k >= self.min_k()
    }

    /// Independent check: every sample point lies within `radius` of some
    /// center. Returns the realized covering radius.
    pub fn verify(&self, sample: &[Vec<f64>]) -> Result<f64> {
        let mut worst = 0.0f64;
        for (i, x) in sample.iter().enumerate() {
            let d = self
                .centers
                .iter()
                .map(|c| self.metric.distance(x, c))
                .fold(f64::INFINITY, f64::min);
            if d > self.radius * (1.0 + CHECK_SLACK) + CHECK_SLACK {
                return Err(Error::Certificate(format!(
                    "sample point {i} is at distance {d} > radius {}",
                    self.radius
                )));
            }
            worst = worst.max(d);
        }
        if let Some(l) = self.log2_family_size {
            let explicit = (self.centers.len().max(1) as f64).log2();
            if explicit > l + 1e-9 {
                return Err(Error::Certificate(format!(
                    "{} explicit centers exceed the counted family 2^{l}",
                    self.centers.len()
                )));
            }
        }
        Ok(worst)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serde(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Serde(e.to_string()))
    }
}

/// Points of the set with pairwise distances at least `separation`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PackingCertificate {
    pub points: Vec<Vec<f64>>,
    pub separation: f64,
    pub metric: Metric,
    pub seed: Option<u64>,
}

impl PackingCertificate {
    /// Recompute all pairwise distances and confirm the separation.
    pub fn verify(&self) -> Result<()> {
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                let d = self.metric.distance(&self.points[i], &self.points[j]);
                if d < self.separation * (1.0 - CHECK_SLACK) - CHECK_SLACK {
                    return Err(Error::Certificate(format!(
                        "points {i} and {j} are {d} apart, below separation {}",
                        self.separation
                    )));
                }
            }
        }
        Ok(())
    }

    /// `eps_k >= separation / 2` whenever there are more than `2^k` points.
    pub fn lower_bound(&self, k: usize) -> Option<f64> {
        let enough = k < 64 && self.points.len() as u128 > 1u128 << k;
        enough.then_some(self.separation / 2.0)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serde(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Serde(e.to_string()))
    }
}
