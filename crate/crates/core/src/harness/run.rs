use super::config::{DictionaryKind, ExperimentConfig, ExperimentKind};
use super::report::Report;
use crate::discretization::{
    build_discretization_dictionary, dirichlet_kernel, it1_experiment, load_json, m_p_direct_at, m_p_dual_at,
    verify_transfer, MeasureSpace, SamplePointSet, Subspace,
};
use crate::entropy::experiments::{
    ball_entropy_experiment, default_k_min, duality_sum_check, octahedron_entropy_experiment, DualityStatus,
    EnvelopeComparison,
};
use crate::entropy::EntropyProfile;
use crate::error::{Error, Result};
use crate::fit::{fit_envelope, EnvelopeModel};
use crate::greedy::{sigma_profile, Octahedron, WcgaOptions};
use crate::sampling::child_seed;
use crate::spaces::{Dictionary, NormedSpaceSpec};
use crate::par;

/// Allowed relative gap between the direct and dual values of `M_p`.
pub fn mp_gap_tolerance(p: f64) -> f64 {
    if p == 2.0 {
        1e-6
    } else {
        1e-4
    }
}

/// Validates `config`, fills defaults and runs the experiment.
///
/// Property failures detected by the run are recorded in
/// [`Report::violations`] rather than returned as errors, so the data is
/// still written.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    let c = config.resolved()?;
    match c.experiment.expect("resolved") {
        ExperimentKind::SigmaDecay => sigma_decay(c),
        ExperimentKind::BallEntropy => ball_entropy(c),
        ExperimentKind::DualityCheck => duality_check(c),
        ExperimentKind::MpDuality => mp_duality(c),
        ExperimentKind::It1 => it1(c),
        ExperimentKind::It2Octahedron => it2_octahedron(c),
    }
}

fn dictionary(c: &ExperimentConfig, seed: u64) -> Result<Dictionary> {
    let n = c.n.unwrap();
    let space = NormedSpaceSpec::sequence(c.dim.unwrap(), c.q.unwrap())?;
    match c.dictionary.unwrap_or_default() {
        DictionaryKind::Canonical => Ok(Dictionary::canonical(space)),
        DictionaryKind::Gaussian => Dictionary::random_gaussian(space, n, seed),
    }
}

fn wcga_options(c: &ExperimentConfig) -> WcgaOptions {
    WcgaOptions { weakness: c.weakness.unwrap(), tol: c.tolerance.unwrap() }
}

fn sigma_decay(c: ExperimentConfig) -> Result<Report> {
    let seed = c.seed.unwrap();
    let dict = dictionary(&c, child_seed(seed, 0))?;
    let samples = Octahedron::new(dict.clone()).sample(c.samples.unwrap(), child_seed(seed, 1));
    let m_list = c.m_list.clone().unwrap();
    let prof = sigma_profile(&samples, &dict, &m_list, wcga_options(&c))?;
    let fit_min = c.fit_min.unwrap();
    let (ms, sig): (Vec<f64>, Vec<f64>) = m_list
        .iter()
        .zip(&prof.sigma)
        .filter(|(m, _)| **m >= fit_min)
        .map(|(&m, &s)| (m as f64, s))
        .unzip();
    let mut report = Report::new(c, &["m", "sigma", "fit"]);
    match fit_envelope(&ms, &sig, dict.len(), EnvelopeModel::PowerM) {
        Ok(f) => report.fit = Some(f),
        Err(e) => report.notes.push(format!("no fit: {e}")),
    }
    for (&m, &s) in m_list.iter().zip(&prof.sigma) {
        let fitted = report.fit.as_ref().map(|f| f.constant * (m as f64).powf(f.exponent));
        report.push_row(vec![Some(m as f64), Some(s), fitted]);
    }
    if let Some(f) = &report.fit {
        report.summary.insert("exponent".into(), f.exponent);
    }
    report.summary.insert("sigma_max".into(), prof.sigma.iter().cloned().fold(0.0, f64::max));
    Ok(report)
}

/// Rows `(k, lower, upper, envelope, ratio)` plus a log-ratio fit of the
/// upper profile over `k >= fit_min`.
fn entropy_rows(report: &mut Report, profile: &EntropyProfile, cmp: &EnvelopeComparison, n: usize, fit_min: usize) {
    let (ks, ups): (Vec<f64>, Vec<f64>) = profile
        .k_list
        .iter()
        .zip(&profile.upper)
        .filter(|(k, _)| **k >= fit_min)
        .map(|(&k, &u)| (k as f64, u))
        .unzip();
    match fit_envelope(&ks, &ups, n, EnvelopeModel::LogRatioK) {
        Ok(f) => report.fit = Some(f),
        Err(e) => report.notes.push(format!("no fit: {e}")),
    }
    for (i, &k) in profile.k_list.iter().enumerate() {
        report.push_row(vec![
            Some(k as f64),
            Some(profile.lower[i]),
            Some(profile.upper[i]),
            Some(cmp.envelope[i]),
            Some(cmp.ratio[i]),
        ]);
    }
    if !profile.is_empty() {
        report.summary.insert("spread".into(), cmp.spread(&profile.k_list, fit_min));
    }
    report.summary.insert("envelope_exponent".into(), cmp.exponent);
    report.summary.insert("envelope_scale".into(), cmp.scale);
    if let Err(e) = profile.check() {
        report.violations.push(e.to_string());
    }
}

fn ball_entropy(c: ExperimentConfig) -> Result<Report> {
    let (p, n) = (c.p.unwrap(), c.n.unwrap());
    let k_list = c.k_list.clone().unwrap();
    let r = ball_entropy_experiment(p, n, &k_list, c.samples.unwrap(), c.seed.unwrap())?;
    let fit_min = c.fit_min.unwrap();
    let mut report = Report::new(c, &["k", "lower", "upper", "envelope", "ratio"]);
    entropy_rows(&mut report, &r.profile, &r.comparison, n, fit_min);
    if let Some(u) = r.profile.upper.iter().find(|&&u| u > 1.0) {
        report.violations.push(format!("upper bound {u} exceeds the trivial bound 1"));
    }
    Ok(report)
}

fn it2_octahedron(c: ExperimentConfig) -> Result<Report> {
    let seed = c.seed.unwrap();
    let dict = dictionary(&c, child_seed(seed, 0))?;
    let k_list = c.k_list.clone().unwrap();
    let r = octahedron_entropy_experiment(&dict, &k_list, c.samples.unwrap(), wcga_options(&c), child_seed(seed, 1))?;
    let fit_min = c.fit_min.unwrap();
    let mut report = Report::new(c, &["k", "lower", "upper", "envelope", "ratio", "log2_family_size"]);
    let mut base = Report::new(report.config.clone(), &["k", "lower", "upper", "envelope", "ratio"]);
    entropy_rows(&mut base, &r.profile, &r.comparison, dict.len(), fit_min);
    for (row, size) in base.rows.into_iter().zip(&r.log2_family_size) {
        let mut row = row;
        row.push(*size);
        report.push_row(row);
    }
    report.fit = base.fit;
    report.summary = base.summary;
    report.notes = base.notes;
    report.violations = base.violations;
    report.summary.insert("witness_size".into(), r.witness_size as f64);
    Ok(report)
}

fn duality_check(c: ExperimentConfig) -> Result<Report> {
    let seed = c.seed.unwrap();
    let dict = dictionary(&c, child_seed(seed, 0))?;
    let r = duality_sum_check(&dict, c.m.unwrap(), c.samples.unwrap(), child_seed(seed, 1))?;
    let mut report = Report::new(
        c,
        &["k", "adjoint_lower", "adjoint_upper", "operator_lower", "operator_upper"],
    );
    for (k, (a, o)) in r.adjoint.iter().zip(&r.operator).enumerate() {
        report.push_row(vec![Some(k as f64), Some(a.0), Some(a.1), Some(o.0), Some(o.1)]);
    }
    report.summary.insert("power".into(), r.power);
    report.summary.insert("ratio_low".into(), r.ratio_low);
    report.summary.insert("ratio_high".into(), r.ratio_high);
    report.notes.push(format!("status: {:?}", r.status));
    if r.status == DualityStatus::Excluded {
        report.violations.push(format!(
            "ratio interval [{:.3e}, {:.3e}] excludes [1e-3, 1e3]",
            r.ratio_low, r.ratio_high
        ));
    }
    Ok(report)
}

fn load_subspace(c: &ExperimentConfig) -> Result<Subspace> {
    let seed = c.seed.unwrap();
    match &c.subspace_file {
        Some(path) => load_json(path),
        None => {
            let mu = MeasureSpace::random(c.s.unwrap(), c.measure_spread.unwrap(), child_seed(seed, 0))?;
            Subspace::random(mu, c.dim.unwrap(), child_seed(seed, 1))
        }
    }
}

fn load_points(c: &ExperimentConfig, sub: &Subspace, default_n: Option<usize>) -> Result<SamplePointSet> {
    match &c.points_file {
        Some(path) => {
            let raw: SamplePointSet = load_json(path)?;
            SamplePointSet::new(raw.indices, sub.measure())
        }
        None => match default_n {
            Some(n) => SamplePointSet::random(sub.measure(), n, child_seed(c.seed.unwrap(), 2)),
            None => SamplePointSet::new((0..sub.measure().len()).collect(), sub.measure()),
        },
    }
}

fn mp_duality(c: ExperimentConfig) -> Result<Report> {
    let sub = load_subspace(&c)?;
    let pts = load_points(&c, &sub, c.n)?;
    let (p, tol) = (c.p.unwrap(), c.tolerance.unwrap());
    let kernel = dirichlet_kernel(&sub)?;
    let values = par::try_map_range(pts.len(), |i| {
        let x = pts.indices[i];
        let direct = m_p_direct_at(&sub, x, p, tol)?.value;
        let dual = m_p_dual_at(&sub, &kernel, x, p, tol)?.value;
        Ok::<_, Error>((direct, dual))
    })?;
    let gap_tol = mp_gap_tolerance(p);
    let mut report = Report::new(c, &["point", "direct", "dual", "gap"]);
    for (&x, &(direct, dual)) in pts.indices.iter().zip(&values) {
        let gap = (dual - direct) / dual.abs().max(f64::MIN_POSITIVE);
        report.push_row(vec![Some(x as f64), Some(direct), Some(dual), Some(gap)]);
        if gap.abs() > gap_tol {
            report.violations.push(format!(
                "point {x}: direct {direct} and dual {dual} differ by {gap:.3e} (allowed {gap_tol:.0e})"
            ));
        }
    }
    let max = |f: fn(&(f64, f64)) -> f64| values.iter().map(f).fold(0.0, f64::max);
    report.summary.insert("m_p_direct".into(), max(|v| v.0));
    report.summary.insert("m_p_dual".into(), max(|v| v.1));
    report.summary.insert("dim".into(), sub.dim() as f64);
    report.summary.insert("s".into(), sub.measure().len() as f64);
    Ok(report)
}

fn it1(mut c: ExperimentConfig) -> Result<Report> {
    let sub = load_subspace(&c)?;
    let pts = load_points(&c, &sub, c.n)?;
    let n = pts.len();
    c.n = Some(n);
    c.k_list.get_or_insert_with(|| (default_k_min(n).max(1)..=n).collect());
    c.fit_min.get_or_insert(default_k_min(n));
    c.validate()?;
    let (p, seed) = (c.p.unwrap(), c.seed.unwrap());
    let k_list = c.k_list.clone().unwrap();
    let r = it1_experiment(&sub, &pts, p, &k_list, c.samples.unwrap(), child_seed(seed, 3))?;
    let fit_min = c.fit_min.unwrap();
    let (tol, trials) = (c.tolerance.unwrap(), c.transfer_trials.unwrap());
    let mut report = Report::new(c, &["k", "lower", "upper", "envelope", "ratio", "grid_upper"]);
    let mut base = Report::new(report.config.clone(), &["k", "lower", "upper", "envelope", "ratio"]);
    entropy_rows(&mut base, &r.profile, &r.comparison, n, fit_min);
    for (row, g) in base.rows.into_iter().zip(&r.grid_upper) {
        let mut row = row;
        row.push(Some(*g));
        report.push_row(row);
    }
    report.fit = base.fit;
    report.summary = base.summary;
    report.notes = base.notes;
    report.violations = base.violations;
    report.summary.insert("m_p".into(), r.m_p);
    report.summary.insert("sample_size".into(), r.sample_size as f64);
    match build_discretization_dictionary(&sub, &pts, p, tol)
        .and_then(|d| verify_transfer(&sub, &d, trials, child_seed(seed, 4)).map(|t| (d, t)))
    {
        Ok((d, t)) => {
            report.summary.insert("max_w_norm".into(), d.max_norm);
            report.summary.insert("transfer_max_ratio".into(), t.max_ratio);
            report.summary.insert("transfer_trials".into(), t.trials as f64);
        }
        Err(Error::PropertyViolation(msg)) => report.violations.push(msg),
        Err(e) => return Err(e),
    }
    Ok(report)
}
