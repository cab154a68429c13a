//! Acceptance gate. Each test prints one `PASS`/`FAIL` line to stderr
//! (bypassing the test harness capture) and then asserts.
//!
//! Run with `cargo test -p entropy-core --test acceptance` (test builds are
//! optimized, see the workspace manifest).

use std::io::Write;
use std::time::{Duration, Instant};

use entropy_core::discretization::{
    build_discretization_dictionary, it1_experiment, m_p_direct, m_p_dual, verify_transfer, MeasureSpace,
    SamplePointSet, Subspace,
};
use entropy_core::entropy::experiments::default_k_min;
use entropy_core::entropy::{
    ball_entropy_experiment, duality_sum_check, exact_entropy_small, exact_min_centers, farthest_point_packing,
    greedy_cover, Metric,
};
use entropy_core::fit::{fit_envelope, log_ratio_envelope, EnvelopeModel};
use entropy_core::greedy::{best_mterm_bruteforce, sigma_profile, wcga, Octahedron, WcgaOptions};
use entropy_core::sampling::{child_rng, gaussian_vec};
use entropy_core::{Dictionary, DualFunctional, NormedSpaceSpec};
use nalgebra::DMatrix;
use rand::Rng;

fn verdict(id: u32, name: &str, pass: bool, detail: String, elapsed: Duration) {
    let line = format!(
        "criterion {id:>2} {:<4} {name}: {detail} ({:.1}s)\n",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed.as_secs() <= limit_s
}

#[test]
fn criterion_01_greedy_decay() {
    let t = Instant::now();
    let ms = [4usize, 8, 16, 32, 64];
    let mut slopes = Vec::new();
    for (q, bound) in [(2.0, -0.40), (1.5, -0.25)] {
        let dict = Dictionary::random_gaussian(NormedSpaceSpec::sequence(128, q).unwrap(), 256, 101).unwrap();
        let samples = Octahedron::new(dict.clone()).sample(50, 202);
        let prof = sigma_profile(&samples, &dict, &ms, WcgaOptions::default()).unwrap();
        let xs: Vec<f64> = ms.iter().map(|&m| m as f64).collect();
        let fit = fit_envelope(&xs, &prof.sigma, 256, EnvelopeModel::PowerM).unwrap();
        slopes.push((q, fit.exponent, bound));
    }
    let e = t.elapsed();
    let pass = slopes.iter().all(|(_, s, b)| s <= b) && within(e, 120);
    let detail = slopes
        .iter()
        .map(|(q, s, b)| format!("q={q} slope {s:.3} (<= {b})"))
        .collect::<Vec<_>>()
        .join(", ");
    verdict(1, "greedy decay", pass, detail, e);
}

fn random_orthonormal(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = child_rng(seed, 0);
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
    let q = g.qr().q();
    (0..n).map(|j| q.column(j).iter().cloned().collect()).collect()
}

#[test]
fn criterion_02_orthonormal_optimality() {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for trial in 0..100u64 {
        let n = 2 + (trial as usize % 9);
        let dict = Dictionary::new(NormedSpaceSpec::sequence(n, 2.0).unwrap(), random_orthonormal(n, trial)).unwrap();
        let f = gaussian_vec(&mut child_rng(trial, 1), n);
        for m in 1..=n {
            let greedy = wcga(&f, &dict, m, WcgaOptions::default()).unwrap();
            let best = best_mterm_bruteforce(&f, &dict, m, 1e-12).unwrap();
            worst = worst.max((greedy.residual_norm - best.residual_norm).abs());
        }
    }
    let e = t.elapsed();
    verdict(2, "orthonormal optimality", worst <= 1e-9 && within(e, 60), format!("max |wcga - best| = {worst:.2e}"), e);
}

#[test]
fn criterion_03_a_ball_identity() {
    let t = Instant::now();
    let mut worst_lp = 0.0f64;
    let mut worst_sample = f64::NEG_INFINITY;
    for trial in 0..1000u64 {
        let mut rng = child_rng(trial, 7);
        let d = rng.gen_range(1..=8);
        let n = rng.gen_range(1..=20);
        let q = [1.3, 1.5, 2.0, 3.0, 4.0][trial as usize % 5];
        let dict = Dictionary::random_gaussian(NormedSpaceSpec::sequence(d, q).unwrap(), n, trial).unwrap();
        let functional = DualFunctional::new(gaussian_vec(&mut rng, d));
        let u = dict.norm_u(&functional).unwrap();
        let lp = dict.a_ball_sup(&functional).unwrap();
        worst_lp = worst_lp.max((u - lp).abs() / u.max(1.0));
        if trial < 10 {
            for f in Octahedron::new(dict.clone()).sample(10_000, trial + 1) {
                let v = functional.apply(dict.space(), &f).abs();
                worst_sample = worst_sample.max(v - u);
            }
        }
    }
    let e = t.elapsed();
    let pass = worst_lp <= 1e-9 && worst_sample <= 1e-12;
    verdict(
        3,
        "A-ball supremum",
        pass,
        format!("max |U - LP| = {worst_lp:.2e}, max sampled excess = {worst_sample:.2e}"),
        e,
    );
}

#[test]
fn criterion_04_entropy_sandwich() {
    let t = Instant::now();
    let mut failures = Vec::new();
    let mut worst_factor = 0.0f64;
    for trial in 0..50u64 {
        let mut rng = child_rng(trial, 9);
        let size = rng.gen_range(20..=200);
        let dim = rng.gen_range(1..=4);
        let k = 1 + trial as usize % 3;
        let metric = if trial % 2 == 0 {
            Metric::Sup
        } else {
            Metric::ambient(NormedSpaceSpec::sequence(dim, 2.0).unwrap())
        };
        let points: Vec<Vec<f64>> = (0..size).map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let exact = exact_entropy_small(&points, k, &metric).unwrap();
        let packing = farthest_point_packing(&points, (1 << k) + 1, &metric, trial).unwrap();
        let lower = packing.lower_bound(k).unwrap();
        if lower > exact.radius * (1.0 + 1e-12) {
            failures.push(format!("set {trial}: packing/2 {lower} > exact {}", exact.radius));
        }
        let optimal = exact_min_centers(&points, exact.radius, &metric, 1 << k).unwrap().unwrap().len();
        let greedy = greedy_cover(&points, exact.radius, &metric).unwrap().centers.len();
        let factor = greedy as f64 / optimal as f64;
        worst_factor = worst_factor.max(factor);
        if factor > 4.0 {
            failures.push(format!("set {trial}: greedy {greedy} > 4 x {optimal}"));
        }
    }
    let e = t.elapsed();
    let pass = failures.is_empty() && within(e, 120);
    verdict(4, "entropy oracle sandwich", pass, format!("worst greedy/exact = {worst_factor:.2}, {failures:?}"), e);
}

#[test]
fn criterion_05_ball_corridor() {
    let t = Instant::now();
    let mut ratios = Vec::new();
    let mut max_upper = 0.0f64;
    for n in [16usize, 32, 64] {
        let ks: Vec<usize> = (default_k_min(n)..=n).collect();
        let r = ball_entropy_experiment(2.0, n, &ks, 4096, 31 + n as u64).unwrap();
        ratios.extend(r.comparison.ratio.iter().cloned());
        max_upper = max_upper.max(r.profile.upper.iter().cloned().fold(0.0, f64::max));
    }
    let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let e = t.elapsed();
    let pass = hi / lo <= 8.0 && max_upper <= 1.0 && within(e, 300);
    verdict(5, "l2-ball corridor", pass, format!("spread {:.3} over {} (n,k), max upper {max_upper}", hi / lo, ratios.len()), e);
}

#[test]
fn criterion_06_nikolskii_duality() {
    let t = Instant::now();
    let mut worst = [0.0f64; 3];
    for trial in 0..20u64 {
        let mut rng = child_rng(trial, 11);
        let s = rng.gen_range(16..=128);
        let dim = rng.gen_range(1..=8);
        let mu = if trial % 4 == 0 {
            MeasureSpace::uniform(s).unwrap()
        } else {
            MeasureSpace::random(s, 4.0, trial).unwrap()
        };
        let sub = Subspace::random(mu, dim, trial + 100).unwrap();
        for (i, p) in [2.0, 3.0, 4.0].into_iter().enumerate() {
            let direct = m_p_direct(&sub, p, 1e-10).unwrap();
            let dual = m_p_dual(&sub, p, 1e-10).unwrap();
            worst[i] = worst[i].max((direct - dual).abs());
        }
    }
    let e = t.elapsed();
    let pass = worst[0] <= 1e-6 && worst[1] <= 1e-4 && worst[2] <= 1e-4;
    verdict(
        6,
        "Nikol'skii duality",
        pass,
        format!("max gap p=2 {:.2e}, p=3 {:.2e}, p=4 {:.2e}", worst[0], worst[1], worst[2]),
        e,
    );
}

#[test]
fn criterion_07_dictionary_construction() {
    let t = Instant::now();
    let configs: [(usize, usize, usize, f64, f64); 5] =
        [(8, 256, 64, 2.0, 0.0), (4, 128, 32, 4.0, 0.0), (6, 96, 24, 3.0, 3.0), (3, 64, 16, 2.0, 5.0), (5, 80, 40, 4.0, 1.0)];
    let mut worst_identity = 0.0f64;
    let mut worst_norm = f64::NEG_INFINITY;
    let mut violations = 0;
    let mut max_ratio = 0.0f64;
    for (i, &(dim, s, n, p, spread)) in configs.iter().enumerate() {
        let seed = 40 + i as u64;
        let mu = if spread == 0.0 { MeasureSpace::uniform(s).unwrap() } else { MeasureSpace::random(s, spread, seed).unwrap() };
        let sub = Subspace::random(mu.clone(), dim, seed).unwrap();
        let pts = SamplePointSet::random(&mu, n, seed).unwrap();
        let d = build_discretization_dictionary(&sub, &pts, p, 1e-8).unwrap();
        let pp = p / (p - 1.0);
        for (j, &x) in pts.indices.iter().enumerate() {
            for (b, u) in sub.basis().iter().enumerate() {
                let lhs = mu.inner(u, &d.w[j]);
                worst_identity = worst_identity.max((lhs - sub.basis()[b][x]).abs());
            }
            worst_norm = worst_norm.max(mu.norm(&d.w[j], pp) - 2.0 * d.m_p);
        }
        let r = verify_transfer(&sub, &d, 1000, seed).unwrap();
        violations += r.violations;
        max_ratio = max_ratio.max(r.max_ratio);
    }
    let e = t.elapsed();
    let pass = worst_identity <= 1e-8 && worst_norm <= 1e-6 && violations == 0;
    verdict(
        7,
        "discretization dictionary",
        pass,
        format!(
            "identity defect {worst_identity:.2e}, max(||w||-2M_p) {worst_norm:.2e}, transfer violations {violations} (max ratio {max_ratio:.3})"
        ),
        e,
    );
}

#[test]
fn criterion_08_it1_corridor() {
    let t = Instant::now();
    let mut spreads = Vec::new();
    for (i, (dim, s, n, p)) in [(8usize, 256usize, 64usize, 2.0), (4, 128, 32, 4.0)].into_iter().enumerate() {
        let seed = 80 + i as u64;
        let mu = MeasureSpace::uniform(s).unwrap();
        let sub = Subspace::random(mu.clone(), dim, seed).unwrap();
        let pts = SamplePointSet::random(&mu, n, seed + 1).unwrap();
        let ks: Vec<usize> = (default_k_min(n)..=n).collect();
        let r = it1_experiment(&sub, &pts, p, &ks, 2000, seed + 2).unwrap();
        spreads.push(r.comparison.spread(&ks, 0));
    }
    let e = t.elapsed();
    let pass = spreads.iter().all(|&s| s <= 8.0) && within(e, 600);
    verdict(8, "it1 corridor", pass, format!("spreads {:.3} and {:.3}", spreads[0], spreads[1]), e);
}

#[test]
fn criterion_09_duality_sums() {
    let t = Instant::now();
    let mut lines = Vec::new();
    let mut pass = true;
    for (n, m) in [(8usize, 6usize), (12, 8)] {
        let hilbert = Dictionary::canonical(NormedSpaceSpec::sequence(n, 2.0).unwrap());
        let r = duality_sum_check(&hilbert, m, 300, 5).unwrap();
        pass &= r.ratio_low <= 1.0 && 1.0 <= r.ratio_high;
        lines.push(format!("q=2 n={n} m={m} [{:.3}, {:.3}]", r.ratio_low, r.ratio_high));
        let smooth = Dictionary::canonical(NormedSpaceSpec::sequence(n, 1.5).unwrap());
        let r = duality_sum_check(&smooth, m, 300, 5).unwrap();
        pass &= r.ratio_low >= 1e-2 && r.ratio_high <= 1e2;
        lines.push(format!("q=1.5 n={n} m={m} [{:.3}, {:.3}]", r.ratio_low, r.ratio_high));
    }
    let e = t.elapsed();
    verdict(9, "entropy duality sums", pass, lines.join(", "), e);
}

#[test]
fn criterion_10_fit_exactness() {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for trial in 0..50u64 {
        let mut rng = child_rng(trial, 13);
        let r = rng.gen_range(-2.0..2.0);
        let c = rng.gen_range(0.1..10.0);
        let n = rng.gen_range(16..=512usize);
        let ks: Vec<f64> = (default_k_min(n)..=n).step_by(1 + n / 16).map(|k| k as f64).collect();
        let vals: Vec<f64> = ks.iter().map(|&k| c * log_ratio_envelope(n, k, r)).collect();
        let f = fit_envelope(&ks, &vals, n, EnvelopeModel::LogRatioK).unwrap();
        worst = worst.max((f.exponent - r).abs()).max((f.constant - c).abs() / c);
        let ms: Vec<f64> = (1..=12).map(|m| m as f64 * 3.0).collect();
        let vals: Vec<f64> = ms.iter().map(|&m: &f64| c * m.powf(r)).collect();
        let f = fit_envelope(&ms, &vals, n, EnvelopeModel::PowerM).unwrap();
        worst = worst.max((f.exponent - r).abs()).max((f.constant - c).abs() / c);
    }
    let e = t.elapsed();
    verdict(10, "fit exactness", worst <= 1e-9, format!("max error {worst:.2e}"), e);
}
