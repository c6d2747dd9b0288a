//! Runs a validated [`Plan`] and collects rows, fits and predictions.

use std::sync::{Arc, Mutex};

use serde_json::{json, Value};

use super::config::{FamilyPlan, Plan};
use super::report::{Columns, Flags, PlotHints, Prediction, Row};
use crate::bump::{BumpProfile, DEFAULT_STEP, DEFAULT_U_MAX};
use crate::decay::{fit_decay, DecayFit, RELIABLE_R_SQUARED};
use crate::error::Result;
use crate::grassmannian::{covering_exponent, metric, metric_oracle, random_subspace, Frame};
use crate::kakeya_measure::{
    cone_measure_spec, dual_sphere_nodes, mu_hat_envelope, sample, sphere_dual_mu_hat, sphere_surface_hat, split_bound,
};
use crate::linalg::norm;
use crate::orientation::{
    assign_translations_shared, hyperplane_family_measure, nondegenerate_sphere_measure, uniform_grassmannian_measure,
    DiscreteOrientationMeasure, KakeyaMeasureSpec, TranslationStrategy,
};
use crate::rng::{self, Domain};
use crate::scaling::fit_beta;

/// Everything an experiment produces apart from bookkeeping.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub columns: Columns,
    pub rows: Vec<Row>,
    pub results: Value,
    pub predicted: Vec<Prediction>,
    pub flags: Flags,
    pub plot: PlotHints,
}

fn columns(grid: &str, value: &str, aux: &str) -> Columns {
    Columns {
        grid: grid.into(),
        value: value.into(),
        aux: aux.into(),
    }
}

fn log_plot(overlay: Option<(String, Vec<f64>)>) -> PlotHints {
    PlotHints {
        log_x: true,
        log_y: true,
        overlay,
    }
}

/// Runs `plan` with all randomness derived from `seed`.
pub fn execute(plan: &Plan, seed: u64) -> Result<Outcome> {
    match plan {
        Plan::Scaling { family, eta, search } => scaling(family, eta, *search, seed),
        Plan::Decay {
            family,
            translations,
            radii,
            samples,
            alpha,
        } => kakeya_decay(family, translations, radii, *samples, *alpha, seed),
        Plan::SurfaceDecay { d, radii, samples } => surface_decay(*d, radii, *samples, seed),
        Plan::DualSphere {
            d,
            velocity,
            radii,
            samples,
        } => dual_sphere(*d, velocity, radii, *samples, seed),
        Plan::MetricOracle { d, k, pairs, samples } => metric_check(*d, *k, *pairs, *samples, seed),
        Plan::Covering { d, k, eta, net } => covering(*d, *k, eta, *net, seed),
        Plan::Bump { u, samples } => bump(u, *samples),
        Plan::Identities {
            triples,
            assignments,
            family,
        } => identities(*triples, *assignments, family, seed),
    }
}

fn build_measure(family: &FamilyPlan, seed: u64) -> Result<Option<DiscreteOrientationMeasure>> {
    let axis_frame = |d: usize| -> Result<Frame> {
        let basis: Vec<Vec<f64>> = (0..d - 1)
            .map(|i| {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                e
            })
            .collect();
        crate::grassmannian::orthonormalize(&basis)
    };
    Ok(Some(match family {
        FamilyPlan::Uniform { d, k, n, net } => uniform_grassmannian_measure(*d, *k, *n, *net, seed)?,
        FamilyPlan::Sphere {
            d,
            axis,
            polar_angle,
            atoms,
        } => nondegenerate_sphere_measure(*d, axis, *polar_angle, *atoms, seed)?,
        FamilyPlan::Hyperplane { d, k, n, net } => hyperplane_family_measure(*d, *k, &axis_frame(*d)?, *n, *net, seed)?,
        FamilyPlan::Cone { .. } => return Ok(None),
    }))
}

fn build_spec(family: &FamilyPlan, translations: &TranslationStrategy, seed: u64) -> Result<KakeyaMeasureSpec> {
    match family {
        FamilyPlan::Cone { d, atoms } => cone_measure_spec(*d, *atoms, seed),
        _ => {
            let measure = build_measure(family, seed)?.expect("non-cone families build a measure");
            assign_translations_shared(Arc::new(measure), translations, seed)
        }
    }
}

/// Predicted scaling exponent of a family, with its basis.
fn predicted_beta(family: &FamilyPlan) -> Option<(f64, String)> {
    match family {
        FamilyPlan::Uniform { d, k, .. } => Some((
            *k as f64,
            format!("G({d},{k}) has dimension k(d-k); subsets of dimension b are (b - k(d-1-k))-scaling, so every β < k is attained"),
        )),
        FamilyPlan::Sphere { d, .. } | FamilyPlan::Cone { d, .. } => Some((
            (*d as f64 / 2.0 - 1.0).min(1.0),
            "a non-degenerate sphere of directions is min(1, d/2 - 1)-scaling".into(),
        )),
        FamilyPlan::Hyperplane { .. } => Some((
            0.0,
            "every k-plane inside a fixed hyperplane lies in the slab normal to it, so no positive β holds".into(),
        )),
    }
}

fn scaling(family: &FamilyPlan, eta: &[f64], search: usize, seed: u64) -> Result<Outcome> {
    let measure = build_measure(family, seed)?.expect("scaling families build a measure");
    let predicted = predicted_beta(family);
    let report = fit_beta(&measure, eta, search, seed, predicted.as_ref().map(|p| p.0))?;
    let fitted = fitted_power(&report.eta_grid, &report.sup_masses);
    let rows = report
        .eta_grid
        .iter()
        .zip(&report.sup_masses)
        .zip(&fitted)
        .map(|((&g, &v), &a)| Row { grid: g, value: v, aux: Some(a) })
        .collect();
    let d = measure.ambient_dim();
    let flags = Flags {
        exploratory: false,
        unreliable_fit: report.r_squared < RELIABLE_R_SQUARED,
        positive_measure_regime: report.beta_hat > d as f64 / 2.0,
    };
    Ok(Outcome {
        columns: columns("eta", "largest slab mass found", "fitted power law"),
        rows,
        results: json!({
            "beta_hat": report.beta_hat,
            "r_squared": report.r_squared,
            "predicted_beta": report.predicted_beta,
            "atoms": measure.len(),
            "separation": measure.separation(),
            "search_budget": search,
            "directions": report.directions,
            "note": "slab masses come from a finite search and are lower bounds for the supremum",
        }),
        predicted: predicted
            .map(|(value, basis)| Prediction {
                quantity: "beta".into(),
                value,
                basis,
            })
            .into_iter()
            .collect(),
        flags,
        plot: log_plot(None),
    })
}

/// The least-squares power law `c·x^p` through `(x, y)`, evaluated at `x`.
fn fitted_power(x: &[f64], y: &[f64]) -> Vec<f64> {
    let floored: Vec<f64> = y.iter().map(|v| v.max(1e-300)).collect();
    match crate::fit::log_log(x, &floored) {
        Some(line) => x.iter().map(|g| (line.intercept + line.slope * g.ln()).exp()).collect(),
        None => vec![f64::NAN; x.len()],
    }
}

fn decay_rows(fit: &DecayFit) -> Vec<Row> {
    let fitted = fitted_power(&fit.radii, &fit.shell_maxima);
    fit.radii
        .iter()
        .zip(&fit.shell_maxima)
        .zip(fitted)
        .map(|((&g, &v), a)| Row { grid: g, value: v, aux: Some(a) })
        .collect()
}

fn decay_results(fit: &DecayFit, extra: Value) -> Value {
    let mut v = json!({
        "slope": fit.slope,
        "fourier_dim_estimate": fit.fourier_dim_estimate,
        "r_squared": fit.r_squared,
        "reliable": fit.reliable,
        "samples_per_shell": fit.samples_per_shell,
        "radii": fit.radii,
        "radius_range_note": "the dyadic radius range is a chosen window; no rate is known at which the asymptotic decay takes over",
    });
    if let (Value::Object(base), Value::Object(more)) = (&mut v, extra) {
        base.extend(more);
    }
    v
}

fn kakeya_decay(
    family: &FamilyPlan,
    translations: &TranslationStrategy,
    radii: &[f64],
    samples: usize,
    alpha: f64,
    seed: u64,
) -> Result<Outcome> {
    let spec = build_spec(family, translations, seed)?;
    let d = spec.ambient_dim();
    let excess = Mutex::new(f64::NEG_INFINITY);
    let f = |xi: &[f64]| {
        let s = sample(&spec, xi);
        let gap = s.value.norm() - s.envelope;
        let mut worst = excess.lock().expect("no panics while held");
        *worst = worst.max(gap);
        s.value
    };
    let fit = fit_decay(&f, d, radii, samples, seed)?;
    let excess = excess.into_inner().expect("no panics while held");

    let cone = matches!(family, FamilyPlan::Cone { .. });
    let beta = predicted_beta(family);
    let mut predicted = Vec::new();
    let mut overlay = None;
    if let Some((beta, basis)) = &beta {
        let dim = (2.0 * beta).min(d as f64);
        predicted.push(Prediction {
            quantity: "fourier_dim_lower_bound".into(),
            value: dim,
            basis: format!("dim_F >= min(2β, d) for β-scaling orientations; {basis}"),
        });
        if *beta > 0.0 {
            let curve = radii
                .iter()
                .map(|&r| split_bound(*beta, alpha, r).map(|b| b.total))
                .collect::<Result<Vec<_>>>()?;
            overlay = Some((format!("split bound, α = {alpha}, up to constants"), curve));
        }
    }
    if cone {
        predicted.push(Prediction {
            quantity: "conjectured_fourier_dim".into(),
            value: d as f64 - 2.0,
            basis: "open question: the cone may have Fourier dimension exactly d - 2".into(),
        });
    }
    Ok(Outcome {
        columns: columns("radius", "shell maximum of |mu_hat|", "fitted power law"),
        rows: decay_rows(&fit),
        results: decay_results(
            &fit,
            json!({
                "atoms": spec.orientation().len(),
                "max_envelope_excess": excess,
                "envelope_dominates": excess <= 1e-9,
            }),
        ),
        predicted,
        flags: Flags {
            exploratory: cone,
            unreliable_fit: !fit.reliable,
            positive_measure_regime: false,
        },
        plot: log_plot(overlay),
    })
}

fn surface_decay(d: usize, radii: &[f64], samples: usize, seed: u64) -> Result<Outcome> {
    let f = |xi: &[f64]| {
        let (_, n_theta) = dual_sphere_nodes(d, norm(xi), 0.0);
        sphere_surface_hat(d, xi, n_theta).expect("dimensions validated")
    };
    let fit = fit_decay(&f, d, radii, samples, seed)?;
    Ok(Outcome {
        columns: columns("radius", "shell maximum of |sigma_hat|", "fitted power law"),
        rows: decay_rows(&fit),
        results: decay_results(&fit, json!({})),
        predicted: vec![Prediction {
            quantity: "fourier_dim".into(),
            value: d as f64 - 1.0,
            basis: "a single sphere in R^d has Fourier dimension d - 1".into(),
        }],
        flags: Flags {
            exploratory: false,
            unreliable_fit: !fit.reliable,
            positive_measure_regime: false,
        },
        plot: log_plot(None),
    })
}

fn dual_sphere(d: usize, velocity: &[f64], radii: &[f64], samples: usize, seed: u64) -> Result<Outcome> {
    let speed = norm(velocity);
    let failure = Mutex::new(None);
    let f = |xi: &[f64]| {
        let (n_r, n_theta) = dual_sphere_nodes(d, norm(xi), speed);
        let centers = |r: f64| velocity.iter().map(|v| r * v).collect();
        match sphere_dual_mu_hat(d, centers, xi, n_r, n_theta) {
            Ok(v) => v,
            Err(e) => {
                failure.lock().expect("no panics while held").get_or_insert(e);
                num_complex::Complex64::new(0.0, 0.0)
            }
        }
    };
    let fit = fit_decay(&f, d, radii, samples, seed)?;
    if let Some(e) = failure.into_inner().expect("no panics while held") {
        return Err(e);
    }
    Ok(Outcome {
        columns: columns("radius", "shell maximum of |mu_hat|", "fitted power law"),
        rows: decay_rows(&fit),
        results: decay_results(
            &fit,
            json!({
                "center_velocity": velocity,
                "angular_node_cap": crate::kakeya_measure::MAX_ANGULAR_NODES,
            }),
        ),
        predicted: Vec::new(),
        flags: Flags {
            exploratory: true,
            unreliable_fit: !fit.reliable,
            positive_measure_regime: false,
        },
        plot: log_plot(None),
    })
}

fn metric_check(d: usize, k: usize, pairs: usize, samples: usize, seed: u64) -> Result<Outcome> {
    let mut rows = Vec::with_capacity(pairs);
    for i in 0..pairs as u64 {
        let s = random_subspace(d, k, rng_seed(seed, 2 * i))?;
        let t = random_subspace(d, k, rng_seed(seed, 2 * i + 1))?;
        let m = metric(&s, &t)?.value();
        let o = metric_oracle(&s, &t, samples)?.value();
        rows.push(Row {
            grid: i as f64,
            value: (m - o).abs(),
            aux: Some(m),
        });
    }
    let max = rows.iter().map(|r| r.value).fold(0.0, f64::max);
    let mean = rows.iter().map(|r| r.value).sum::<f64>() / rows.len() as f64;
    Ok(Outcome {
        columns: columns("pair", "|metric - oracle|", "metric"),
        rows,
        results: json!({ "max_abs_error": max, "mean_abs_error": mean, "oracle_samples": samples }),
        predicted: vec![Prediction {
            quantity: "max_abs_error".into(),
            value: 0.0,
            basis: "the sphere Hausdorff distance equals sqrt(2 - 2 cos θ_max) for the largest principal angle".into(),
        }],
        flags: Flags::default(),
        plot: PlotHints {
            log_x: false,
            log_y: false,
            overlay: None,
        },
    })
}

/// Per-pair seeds drawn from the metric-pair stream.
fn rng_seed(seed: u64, index: u64) -> u64 {
    use rand::RngExt;
    rng::stream(seed, Domain::MetricPairs, index).random()
}

fn covering(d: usize, k: usize, eta: &[f64], net: usize, seed: u64) -> Result<Outcome> {
    let fit = covering_exponent(d, k, eta, net, seed)?;
    let sizes: Vec<f64> = fit.net_sizes.iter().map(|&n| n as f64).collect();
    let fitted = fitted_power(eta, &sizes);
    let rows = eta
        .iter()
        .zip(&sizes)
        .zip(fitted)
        .map(|((&g, &v), a)| Row { grid: g, value: v, aux: Some(a) })
        .collect();
    Ok(Outcome {
        columns: columns("eta", "greedy net size", "fitted power law"),
        rows,
        results: json!({
            "exponent": fit.exponent,
            "r_squared": fit.r_squared,
            "net_sizes": fit.net_sizes,
            "budget": net,
        }),
        predicted: vec![Prediction {
            quantity: "exponent".into(),
            value: (k * (d - k)) as f64,
            basis: "covering numbers of G(d,k) grow like η^{-k(d-k)}".into(),
        }],
        flags: Flags {
            unreliable_fit: fit.r_squared < RELIABLE_R_SQUARED,
            ..Flags::default()
        },
        plot: log_plot(None),
    })
}

fn bump(u: &[f64], samples: usize) -> Result<Outcome> {
    let bump = BumpProfile::new(DEFAULT_U_MAX, DEFAULT_STEP)?;
    let at_zero = (bump.phi_hat(0.0) - 1.0).norm();
    let span = 2000.0;
    let max_abs = (0..samples)
        .map(|i| bump.phi_hat_abs(-span + 2.0 * span * i as f64 / (samples.max(2) - 1) as f64))
        .fold(0.0, f64::max);
    let constants = bump.decay_constants(&[2, 4, 6, 8], (10.0, 1000.0), 10_000);
    let rows = u
        .iter()
        .map(|&x| {
            let a = bump.phi_hat_abs(x);
            Row {
                grid: x,
                value: a,
                aux: Some(a * x.powi(4)),
            }
        })
        .collect();
    Ok(Outcome {
        columns: columns("u", "|phi_hat(u)|", "u^4 |phi_hat(u)|"),
        rows,
        results: json!({
            "phi_hat_zero_error": at_zero,
            "max_abs_phi_hat": max_abs,
            "max_grid_points": samples,
            "abs_phi_hat_at_1000": bump.phi_hat_abs(1000.0),
            "decay_constants": constants,
            "raw_integral": crate::bump::raw_integral(),
        }),
        predicted: vec![
            Prediction {
                quantity: "phi_hat_zero".into(),
                value: 1.0,
                basis: "φ has unit integral".into(),
            },
            Prediction {
                quantity: "max_abs_phi_hat".into(),
                value: 1.0,
                basis: "|φ̂| <= ∫φ = 1 for nonnegative φ".into(),
            },
        ],
        flags: Flags::default(),
        plot: PlotHints {
            log_x: true,
            log_y: true,
            overlay: None,
        },
    })
}

fn identities(triples: usize, assignments: usize, family: &FamilyPlan, seed: u64) -> Result<Outcome> {
    use rand::RngExt;
    let mut rows = Vec::with_capacity(triples);
    let mut worst: f64 = 0.0;
    for i in 0..triples as u64 {
        let mut r = rng::stream(seed, Domain::OraclePoints, i);
        let alpha = 0.001 + 0.998 * r.random::<f64>();
        let beta = 0.05 + 3.95 * r.random::<f64>();
        let xi = 10f64.powf(0.01 + 5.99 * r.random::<f64>());
        let b = split_bound(beta, alpha, xi)?;
        let rel = (b.slab_term - b.tail_term).abs() / b.slab_term;
        worst = worst.max(rel);
        rows.push(Row {
            grid: i as f64,
            value: rel,
            aux: Some(b.total),
        });
    }

    let measure = Arc::new(build_measure(family, seed)?.expect("identity families build a measure"));
    let d = measure.ambient_dim();
    let base = assign_translations_shared(measure.clone(), &TranslationStrategy::Zero, seed)?;
    let frequencies: Vec<Vec<f64>> = (0..200u64)
        .map(|i| {
            let mut r = rng::stream(seed, Domain::SearchDirections, i);
            (0..d).map(|_| 80.0 * (r.random::<f64>() - 0.5)).collect()
        })
        .collect();
    let reference: Vec<u64> = frequencies.iter().map(|x| mu_hat_envelope(&base, x).to_bits()).collect();
    let side = (crate::orientation::MAX_TRANSLATION_NORM / (d as f64).sqrt()).min(4.0);
    let mut invariant = true;
    for a in 0..assignments as u64 {
        let moved = assign_translations_shared(
            measure.clone(),
            &TranslationStrategy::RandomBox { side },
            seed.wrapping_add(a + 1),
        )?;
        invariant &= frequencies
            .iter()
            .map(|x| mu_hat_envelope(&moved, x).to_bits())
            .eq(reference.iter().copied());
    }
    Ok(Outcome {
        columns: columns("triple", "relative gap between split-bound terms", "split bound"),
        rows,
        results: json!({
            "max_relative_term_gap": worst,
            "envelope_bit_identical": invariant,
            "translation_assignments": assignments,
            "frequencies": frequencies.len(),
        }),
        predicted: vec![Prediction {
            quantity: "max_relative_term_gap".into(),
            value: 0.0,
            basis: "with η = |ξ|^{-α} and N = αβ/(1-α) both terms equal |ξ|^{-αβ}".into(),
        }],
        flags: Flags::default(),
        plot: PlotHints {
            log_x: false,
            log_y: true,
            overlay: None,
        },
    })
}
