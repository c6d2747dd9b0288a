//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run a subset with `cargo test --test acceptance -- 4 6`.

use std::f64::consts::FRAC_PI_4;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use kakeya_lab::bump::BumpProfile;
use kakeya_lab::decay::{dyadic_radii, fit_decay};
use kakeya_lab::grassmannian::{covering_exponent, metric, metric_oracle, orthonormalize, random_subspace};
use kakeya_lab::kakeya_measure::{
    cone_measure_spec, dual_sphere_nodes, mu_hat, mu_hat_envelope, sample, sphere_surface_hat, split_bound,
};
use kakeya_lab::linalg::norm;
use kakeya_lab::orientation::{
    assign_translations, hyperplane_family_measure, nondegenerate_sphere_measure, uniform_grassmannian_measure,
    TranslationStrategy,
};
use kakeya_lab::scaling::{fit_beta, worst_case_slab_mass};

const SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    detail: String,
}

fn check(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn e(d: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; d];
    v[i] = 1.0;
    v
}

fn dyadic_etas(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|j| 2f64.powi(-j)).collect()
}

/// Low-discrepancy point of `[0,1)` for index `i` along an irrational rotation.
fn kronecker(i: usize, alpha: f64) -> f64 {
    (0.5 + i as f64 * alpha).fract()
}

fn metric_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for (d, k) in [(3, 1), (4, 2), (5, 2)] {
        for i in 0..100u64 {
            let s = random_subspace(d, k, SEED + 2 * i).unwrap();
            let t = random_subspace(d, k, SEED + 2 * i + 1).unwrap();
            let m = metric(&s, &t).unwrap().value();
            let o = metric_oracle(&s, &t, 4096).unwrap().value();
            worst = worst.max((m - o).abs());
        }
    }
    check(worst <= 0.02, format!("max |metric - oracle| = {worst:.3e} (limit 0.02)"))
}

fn bump_contract() -> Outcome {
    let bump = BumpProfile::new(kakeya_lab::bump::DEFAULT_U_MAX, kakeya_lab::bump::DEFAULT_STEP).unwrap();
    let at_zero = (bump.phi_hat(0.0) - 1.0).norm();
    let n = 100_000;
    let max_abs = (0..n)
        .map(|i| bump.phi_hat_abs(-2000.0 + 4000.0 * i as f64 / (n - 1) as f64))
        .fold(0.0, f64::max);
    let far = bump.phi_hat_abs(1000.0);
    let c4 = bump.decay_constants(&[4], (10.0, 1000.0), 10_000).constants[0];
    check(
        at_zero <= 1e-9 && max_abs <= 1.0 + 1e-9 && far <= 1e-6 && c4.is_finite(),
        format!("|φ̂(0)-1| = {at_zero:.1e}, max |φ̂| = {max_abs:.12}, |φ̂(1000)| = {far:.2e}, C4 = {c4:.4e}"),
    )
}

fn covering_exponents() -> Outcome {
    let cases: [(usize, usize, Vec<f64>, usize, f64); 3] = [
        (2, 1, dyadic_etas(1, 4), 20_000, 0.2),
        (3, 1, dyadic_etas(1, 4), 50_000, 0.3),
        (4, 2, (4..=8).map(|j| 2f64.powf(-j as f64 / 4.0)).collect(), 100_000, 0.6),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (d, k, grid, budget, tol) in cases {
        let fit = covering_exponent(d, k, &grid, budget, SEED).unwrap();
        let target = (k * (d - k)) as f64;
        ok &= (fit.exponent - target).abs() <= tol;
        parts.push(format!("G({d},{k}) {:.3} (target {target}, tol {tol})", fit.exponent));
    }
    check(ok, parts.join("; "))
}

fn sphere_exponents() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (d, lo, hi, predicted) in [(3, 0.35, 0.65, 0.5), (4, 0.8, 1.2, 1.0)] {
        let m = nondegenerate_sphere_measure(d, &e(d, d - 1), FRAC_PI_4, 4096, SEED).unwrap();
        let r = fit_beta(&m, &dyadic_etas(3, 7), 2000, SEED, Some(predicted)).unwrap();
        ok &= (lo..=hi).contains(&r.beta_hat);
        parts.push(format!("d={d}: β̂ = {:.3} in [{lo}, {hi}]", r.beta_hat));
    }
    check(ok, parts.join("; "))
}

fn hyperplane_sharpness() -> Outcome {
    let v = orthonormalize(&[e(3, 0), e(3, 1)]).unwrap();
    let m = hyperplane_family_measure(3, 1, &v, 256, 50_000, SEED).unwrap();
    let grid = dyadic_etas(3, 7);
    let min_worst = grid
        .iter()
        .map(|&eta| worst_case_slab_mass(&m, eta, 1000, SEED).unwrap().mass)
        .fold(f64::INFINITY, f64::min);
    let beta = fit_beta(&m, &grid, 1000, SEED, Some(0.0)).unwrap().beta_hat;
    let ts: Vec<Vec<f64>> = (0..m.len())
        .map(|j| vec![3.0 * kronecker(j, 0.618_033_988_749_895), 3.0 * kronecker(j, 0.414_213_562_373_095), 0.0])
        .collect();
    let spec = assign_translations(&m, &TranslationStrategy::Fixed(ts), SEED).unwrap();
    let normal_dev = (1..=9)
        .map(|j| (mu_hat(&spec, &[0.0, 0.0, 2f64.powi(j)]).norm() - 1.0).abs())
        .fold(0.0, f64::max);
    check(
        min_worst == 1.0 && beta.abs() <= 0.1 && normal_dev <= 1e-9,
        format!("min worst-case slab mass = {min_worst}, β̂ = {beta:.3e}, max ||μ̂(R n)| - 1| = {normal_dev:.1e}"),
    )
}

/// Decay fit of `μ̂` that also records the largest `|μ̂| - envelope` seen.
fn decay_with_envelope(
    spec: &kakeya_lab::orientation::KakeyaMeasureSpec,
    d: usize,
) -> (kakeya_lab::decay::DecayFit, f64) {
    let excess = Mutex::new(f64::NEG_INFINITY);
    let f = |xi: &[f64]| {
        let s = sample(spec, xi);
        let gap = s.value.norm() - s.envelope;
        let mut worst = excess.lock().unwrap();
        *worst = worst.max(gap);
        s.value
    };
    let fit = fit_decay(&f, d, &dyadic_radii(2, 9), 2048, SEED).unwrap();
    let worst = *excess.lock().unwrap();
    (fit, worst)
}

fn kakeya_decay_plane() -> Outcome {
    let m = uniform_grassmannian_measure(2, 1, 256, 200_000, SEED).unwrap();
    let spec = assign_translations(&m, &TranslationStrategy::Zero, SEED).unwrap();
    let (fit, excess) = decay_with_envelope(&spec, 2);
    check(
        fit.fourier_dim_estimate >= 1.6 && excess <= 1e-9,
        format!(
            "estimate = {:.3} (need >= 1.6, r² = {:.3}, {} atoms), max |μ̂| - envelope = {excess:.1e}",
            fit.fourier_dim_estimate,
            fit.r_squared,
            m.len()
        ),
    )
}

fn cone_probe() -> Outcome {
    let spec = cone_measure_spec(3, 4096, SEED).unwrap();
    let (fit, _) = decay_with_envelope(&spec, 3);
    let two_slope = 2.0 * fit.slope;
    check(
        (0.7..=1.3).contains(&two_slope),
        format!("exploratory: 2·slope = {two_slope:.3} in [0.7, 1.3] (r² = {:.3})", fit.r_squared),
    )
}

fn sphere_calibration() -> Outcome {
    let f = |xi: &[f64]| {
        let (_, n_theta) = dual_sphere_nodes(2, norm(xi), 0.0);
        sphere_surface_hat(2, xi, n_theta).unwrap()
    };
    let fit = fit_decay(&f, 2, &dyadic_radii(2, 9), 2048, SEED).unwrap();
    check(
        (fit.slope - 0.5).abs() <= 0.1,
        format!("slope = {:.3} (target 0.5 ± 0.1, r² = {:.3})", fit.slope, fit.r_squared),
    )
}

fn proof_identities() -> Outcome {
    let mut worst_rel: f64 = 0.0;
    for i in 0..1000 {
        let alpha = 0.001 + 0.998 * kronecker(i, 0.754_877_666_246_692_7);
        let beta = 0.05 + 3.95 * kronecker(i, 0.569_840_290_998_053_3);
        let xi = 10f64.powf(0.01 + 5.99 * kronecker(i, 0.438_744_805_418_034_8));
        let b = split_bound(beta, alpha, xi).unwrap();
        worst_rel = worst_rel.max((b.slab_term - b.tail_term).abs() / b.slab_term);
    }
    let m = uniform_grassmannian_measure(3, 2, 8, 5000, SEED).unwrap();
    let base = assign_translations(&m, &TranslationStrategy::Zero, SEED).unwrap();
    let xis: Vec<Vec<f64>> = (0..200)
        .map(|i| {
            let t = i as f64;
            vec![40.0 * (t * 0.7).sin(), 25.0 * (t * 1.3).cos(), t * 0.2 - 20.0]
        })
        .collect();
    let reference: Vec<u64> = xis.iter().map(|x| mu_hat_envelope(&base, x).to_bits()).collect();
    let invariant = (0..10u64).all(|s| {
        let moved = assign_translations(&m, &TranslationStrategy::RandomBox { side: 4.0 }, SEED + s).unwrap();
        xis.iter().map(|x| mu_hat_envelope(&moved, x).to_bits()).eq(reference.iter().copied())
    });
    check(
        worst_rel <= 1e-12 && invariant,
        format!("split-bound term mismatch = {worst_rel:.1e}, envelope bit-identical = {invariant}"),
    )
}

type Criterion = (u32, &'static str, u64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "metric identity", 60, metric_identity),
        (2, "bump contract", 30, bump_contract),
        (3, "covering exponents", 120, covering_exponents),
        (4, "sphere scaling exponents", 240, sphere_exponents),
        (5, "hyperplane sharpness", 60, hyperplane_sharpness),
        (6, "Kakeya decay in the plane", 180, kakeya_decay_plane),
        (7, "cone probe", 180, cone_probe),
        (8, "circle calibration", 60, sphere_calibration),
        (9, "proof identities", 10, proof_identities),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failures = 0;
    for (id, name, limit, run) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let passed = outcome.passed && in_time;
        failures += usize::from(!passed);
        println!(
            "{} criterion {id} ({name}): {}; {:.1} s (limit {limit} s)",
            if passed { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64()
        );
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
