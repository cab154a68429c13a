use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::par;
use crate::spaces::{Dictionary, NormedSpaceSpec};

/// Distances used by the covering engine.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "metric", rename_all = "snake_case")]
pub enum Metric {
    /// Norm of the ambient space.
    Ambient { space: NormedSpaceSpec },
    /// U-norm over a dictionary: points are functionals and
    /// `d(F, G) = max_j |<F - G, g_j>|`.
    UNorm { dictionary: Arc<Dictionary> },
    /// `max_{i in indices} |a_i - b_i|`: the L_inf(Omega_n) semi-norm.
    SupOver { indices: Vec<usize> },
    /// `max_i |a_i - b_i|`.
    Sup,
}

impl Metric {
    pub fn ambient(space: NormedSpaceSpec) -> Self {
        Metric::Ambient { space }
    }

    pub fn u_norm(dictionary: Dictionary) -> Self {
        Metric::UNorm { dictionary: Arc::new(dictionary) }
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Ambient { space } => {
                let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                space.norm_unchecked(&diff)
            }
            Metric::UNorm { dictionary } => {
                let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                dictionary.norm_u_slice(&diff)
            }
            Metric::SupOver { indices } => indices
                .iter()
                .map(|&i| (a[i] - b[i]).abs())
                .fold(0.0, f64::max),
            Metric::Sup => a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max),
        }
    }

    /// Distance to the origin.
    pub fn magnitude(&self, a: &[f64]) -> f64 {
        self.distance(a, &vec![0.0; a.len()])
    }

    pub fn id(&self) -> String {
        match self {
            Metric::Ambient { space } => match space.weights() {
                None => format!("l_{}", space.q()),
                Some(_) => format!("L_{}(mu)", space.q()),
            },
            Metric::UNorm { dictionary } => format!("U(D_{})", dictionary.len()),
            Metric::SupOver { indices } => format!("L_inf(Omega_{})", indices.len()),
            Metric::Sup => "l_inf".to_string(),
        }
    }
}

/// Symmetric pairwise distance table.
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(points: &[Vec<f64>], metric: &Metric) -> Self {
        let n = points.len();
        let rows = par::map_range(n, |i| {
            (0..n)
                .map(|j| if i == j { 0.0 } else { metric.distance(&points[i], &points[j]) })
                .collect::<Vec<f64>>()
        });
        let mut data = Vec::with_capacity(n * n);
        rows.into_iter().for_each(|r| data.extend(r));
        // Exact symmetry, independent of evaluation order.
        for i in 0..n {
            for j in i + 1..n {
                let v = data[i * n + j].max(data[j * n + i]);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sorted distinct off-diagonal values, with 0 prepended.
    pub fn distinct_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = Vec::with_capacity(self.n * (self.n.saturating_sub(1)) / 2 + 1);
        v.push(0.0);
        for i in 0..self.n {
            for j in i + 1..self.n {
                v.push(self.get(i, j));
            }
        }
        v.sort_by(|a, b| a.total_cmp(b));
        v.dedup();
        v
    }
}
