use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    SigmaDecay,
    BallEntropy,
    DualityCheck,
    MpDuality,
    It1,
    It2Octahedron,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::SigmaDecay,
        ExperimentKind::BallEntropy,
        ExperimentKind::DualityCheck,
        ExperimentKind::MpDuality,
        ExperimentKind::It1,
        ExperimentKind::It2Octahedron,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SigmaDecay => "sigma-decay",
            ExperimentKind::BallEntropy => "ball-entropy",
            ExperimentKind::DualityCheck => "duality-check",
            ExperimentKind::MpDuality => "mp-duality",
            ExperimentKind::It1 => "it1",
            ExperimentKind::It2Octahedron => "it2-octahedron",
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Validation(vec![format!("experiment: unknown id `{s}`")]))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Validation(vec![format!("format: expected csv or json, got `{s}`")])),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DictionaryKind {
    #[default]
    Gaussian,
    Canonical,
}

/// One experiment run. Fields that an experiment does not use are ignored;
/// unset fields take per-experiment defaults (see [`ExperimentConfig::resolved`]).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<ExperimentKind>,
    pub seed: Option<u64>,
    /// Exponent of the ambient `l_q` space.
    pub q: Option<f64>,
    /// Exponent of the ball or of `L_p(mu)`.
    pub p: Option<f64>,
    /// Number of atoms, ball dimension, or size of `Omega_n`.
    pub n: Option<usize>,
    /// Ambient dimension for dictionaries; subspace dimension `N`.
    pub dim: Option<usize>,
    /// Size of the finite measure space.
    pub s: Option<usize>,
    pub k_list: Option<Vec<usize>>,
    pub m_list: Option<Vec<usize>>,
    /// Largest k in the duality sums.
    pub m: Option<usize>,
    pub samples: Option<usize>,
    pub weakness: Option<f64>,
    pub tolerance: Option<f64>,
    pub dictionary: Option<DictionaryKind>,
    /// Non-uniformity of random measures: weights `1 + U(0, spread)`.
    pub measure_spread: Option<f64>,
    /// JSON file holding a subspace (measure and basis).
    pub subspace_file: Option<PathBuf>,
    /// JSON file holding the point set `Omega_n`.
    pub points_file: Option<PathBuf>,
    /// Random trials for the transfer inequality.
    pub transfer_trials: Option<usize>,
    /// Smallest k (or m) entering the fit.
    pub fit_min: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

fn default_k_list(n: usize) -> Vec<usize> {
    let lo = crate::entropy::experiments::default_k_min(n).max(1);
    (lo..=n).collect()
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind, seed: u64) -> Self {
        Self { experiment: Some(experiment), seed: Some(seed), ..Self::default() }
    }

    /// Reads TOML (`.toml`) or JSON (anything else).
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "toml") {
            Self::from_toml(&text)
        } else {
            Self::from_json(&text)
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Validation(vec![format!("config: {}", e.message())]))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Validation(vec![format!("config: {e}")]))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serde(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serde(e.to_string()))
    }

    /// Fields set in `other` replace those in `self`.
    pub fn merge(mut self, other: &ExperimentConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => {$(if other.$f.is_some() { self.$f = other.$f.clone(); })*};
        }
        take!(
            experiment, seed, q, p, n, dim, s, k_list, m_list, m, samples, weakness, tolerance, dictionary,
            measure_spread, subspace_file, points_file, transfer_trials, fit_min, output, format
        );
        self
    }

    /// A copy with every field the experiment uses filled in.
    pub fn resolved(&self) -> Result<Self> {
        self.validate()?;
        let mut c = self.clone();
        let kind = c.experiment.expect("validated");
        c.format.get_or_insert(OutputFormat::Csv);
        match kind {
            ExperimentKind::SigmaDecay => {
                let n = *c.n.get_or_insert(256);
                c.q.get_or_insert(2.0);
                c.dim.get_or_insert((n / 2).max(1));
                c.samples.get_or_insert(50);
                c.m_list.get_or_insert_with(|| [4, 8, 16, 32, 64].into_iter().filter(|&m| m <= n).collect());
                c.weakness.get_or_insert(1.0);
                c.tolerance.get_or_insert(1e-10);
                c.dictionary.get_or_insert(DictionaryKind::Gaussian);
                c.fit_min.get_or_insert(1);
            }
            ExperimentKind::BallEntropy => {
                let n = *c.n.get_or_insert(16);
                c.p.get_or_insert(2.0);
                c.k_list.get_or_insert_with(|| default_k_list(n));
                c.samples.get_or_insert(4096);
                c.fit_min.get_or_insert(crate::entropy::experiments::default_k_min(n));
            }
            ExperimentKind::DualityCheck => {
                let n = *c.n.get_or_insert(8);
                c.q.get_or_insert(2.0);
                c.dim.get_or_insert(n);
                c.m.get_or_insert(6);
                c.samples.get_or_insert(300);
                c.dictionary.get_or_insert(DictionaryKind::Canonical);
            }
            ExperimentKind::MpDuality => {
                c.p.get_or_insert(3.0);
                if c.subspace_file.is_none() {
                    c.s.get_or_insert(64);
                    c.dim.get_or_insert(4);
                    c.measure_spread.get_or_insert(0.0);
                }
                c.tolerance.get_or_insert(1e-6);
            }
            ExperimentKind::It1 => {
                c.p.get_or_insert(2.0);
                if c.subspace_file.is_none() {
                    c.s.get_or_insert(256);
                    c.dim.get_or_insert(8);
                    c.measure_spread.get_or_insert(0.0);
                }
                let n = match (&c.points_file, c.n) {
                    (Some(_), n) => n,
                    (None, n) => Some(*c.n.get_or_insert(n.unwrap_or(64))),
                };
                if let Some(n) = n {
                    c.k_list.get_or_insert_with(|| default_k_list(n));
                    c.fit_min.get_or_insert(crate::entropy::experiments::default_k_min(n));
                }
                c.samples.get_or_insert(2000);
                c.tolerance.get_or_insert(1e-6);
                c.transfer_trials.get_or_insert(1000);
            }
            ExperimentKind::It2Octahedron => {
                let n = *c.n.get_or_insert(16);
                c.q.get_or_insert(2.0);
                c.dim.get_or_insert(n);
                c.k_list.get_or_insert_with(|| default_k_list(n));
                c.samples.get_or_insert(200);
                c.weakness.get_or_insert(1.0);
                c.tolerance.get_or_insert(1e-10);
                c.dictionary.get_or_insert(DictionaryKind::Gaussian);
                c.fit_min.get_or_insert(crate::entropy::experiments::default_k_min(n));
            }
        }
        c.validate()?;
        Ok(c)
    }

    /// Every problem with the configuration, not only the first.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        match self.seed {
            None => errs.push("seed: missing (every run must be seeded)".to_string()),
            // Config files are TOML, whose integers are signed 64-bit.
            Some(s) if s > i64::MAX as u64 => errs.push(format!("seed: must be below 2^63, got {s}")),
            Some(_) => {}
        }
        let Some(kind) = self.experiment else {
            errs.push("experiment: missing".to_string());
            return Err(Error::Validation(errs));
        };
        let positive = |errs: &mut Vec<String>, name: &str, v: Option<usize>| {
            if v == Some(0) {
                errs.push(format!("{name}: must be positive"));
            }
        };
        positive(&mut errs, "n", self.n);
        positive(&mut errs, "dim", self.dim);
        positive(&mut errs, "s", self.s);
        positive(&mut errs, "samples", self.samples);
        if let Some(w) = self.weakness {
            if !(w > 0.0 && w <= 1.0) {
                errs.push(format!("weakness: must lie in (0, 1], got {w}"));
            }
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t < 1.0) {
                errs.push(format!("tolerance: must lie in (0, 1), got {t}"));
            }
        }
        if let Some(sp) = self.measure_spread {
            if !(sp >= 0.0 && sp.is_finite()) {
                errs.push(format!("measure_spread: must be a nonnegative number, got {sp}"));
            }
        }
        match kind {
            ExperimentKind::SigmaDecay | ExperimentKind::DualityCheck | ExperimentKind::It2Octahedron => {
                if let Some(q) = self.q {
                    if !(q > 1.0 && q.is_finite()) {
                        errs.push(format!("q: requires 1 < q < inf, got {q}"));
                    }
                }
            }
            ExperimentKind::BallEntropy | ExperimentKind::It1 | ExperimentKind::MpDuality => {
                if let Some(p) = self.p {
                    if !(p >= 2.0 && p.is_finite()) {
                        errs.push(format!("p: {} requires p >= 2 (the L_p to L_inf bounds assume it), got {p}", kind.name()));
                    }
                }
            }
        }
        if let (Some(ks), Some(n)) = (&self.k_list, self.n) {
            let lo = if kind == ExperimentKind::DualityCheck { 0 } else { 1 };
            if let Some(k) = ks.iter().find(|&&k| k < lo || k > n) {
                errs.push(format!("k_list: k = {k} outside [{lo}, n = {n}]"));
            }
        }
        if let Some(ks) = &self.k_list {
            if ks.windows(2).any(|w| w[0] >= w[1]) {
                errs.push("k_list: must be strictly increasing".to_string());
            }
        }
        if let Some(ms) = &self.m_list {
            if ms.windows(2).any(|w| w[0] >= w[1]) || ms.first() == Some(&0) {
                errs.push("m_list: must be positive and strictly increasing".to_string());
            }
            if let Some(n) = self.n {
                if let Some(m) = ms.iter().find(|&&m| m > n) {
                    errs.push(format!("m_list: m = {m} exceeds the dictionary size n = {n}"));
                }
            }
        }
        match kind {
            ExperimentKind::DualityCheck => {
                if let Some(n) = self.n {
                    if n > 12 {
                        errs.push(format!("n: duality-check needs n <= 12, got {n}"));
                    }
                }
                if let Some(m) = self.m {
                    if m > 16 {
                        errs.push(format!("m: at most 16, got {m}"));
                    }
                }
                if self.dictionary == Some(DictionaryKind::Canonical) {
                    if let (Some(n), Some(d)) = (self.n, self.dim) {
                        if n != d {
                            errs.push(format!("dim: the canonical dictionary needs dim = n, got {d} != {n}"));
                        }
                    }
                }
            }
            ExperimentKind::SigmaDecay | ExperimentKind::It2Octahedron => {
                if self.dictionary == Some(DictionaryKind::Canonical) {
                    if let (Some(n), Some(d)) = (self.n, self.dim) {
                        if n != d {
                            errs.push(format!("dim: the canonical dictionary needs dim = n, got {d} != {n}"));
                        }
                    }
                }
            }
            ExperimentKind::It1 | ExperimentKind::MpDuality => {
                if let (Some(d), Some(s)) = (self.dim, self.s) {
                    if d > s {
                        errs.push(format!("dim: subspace dimension {d} exceeds s = {s}"));
                    }
                }
                if let (Some(n), Some(s)) = (self.n, self.s) {
                    if n > s && self.points_file.is_none() {
                        errs.push(format!("n: {n} points requested from s = {s}"));
                    }
                }
            }
            ExperimentKind::BallEntropy => {}
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }
}
