//! Slab masses `γ(S_{ξ,η})` and empirical scaling exponents.
//!
//! `S_{ξ,η}` holds the subspaces whose basis vectors all satisfy
//! `|ξ·x_i| < η|ξ|`. An orientation measure is `β`-scaling when every slab has
//! mass `≲ η^β`. The supremum over `ξ` is approximated by random search plus
//! hill climbing, so reported masses are lower bounds for the true supremum.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit;
use crate::grassmannian::Frame;
use crate::linalg::{dot, norm, normalize};
use crate::orientation::DiscreteOrientationMeasure;
use crate::rng::{self, Domain};

const HILL_CLIMB_STEPS: usize = 50;
const HILL_CLIMB_STARTS: usize = 3;

/// Fitted scaling exponent with the raw slab masses it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub eta_grid: Vec<f64>,
    /// Largest slab mass found at each `η`.
    pub sup_masses: Vec<f64>,
    /// Direction attaining each entry of `sup_masses`.
    pub directions: Vec<Vec<f64>>,
    pub beta_hat: f64,
    pub r_squared: f64,
    pub predicted_beta: Option<f64>,
}

/// Worst slab found by [`worst_case_slab_mass`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstSlab {
    pub direction: Vec<f64>,
    pub mass: f64,
}

fn check_frequency(xi: &[f64], eta: f64) -> Result<f64> {
    let n = norm(xi);
    if !(n > 0.0) {
        return Err(Error::ZeroFrequency);
    }
    if !(eta > 0.0) {
        return Err(Error::BadParameters(format!("η must be positive, got {eta}")));
    }
    Ok(n)
}

#[inline]
fn in_slab_unchecked(s: &Frame, xi: &[f64], bound: f64) -> bool {
    s.basis_vectors().all(|x| dot(xi, x).abs() < bound)
}

/// Whether `s ∈ S_{ξ,η}`: every basis vector has `|ξ·x_i| < η|ξ|`.
pub fn in_slab(s: &Frame, xi: &[f64], eta: f64) -> Result<bool> {
    if xi.len() != s.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("frequency of length {}", s.ambient_dim()),
            found: format!("{}", xi.len()),
        });
    }
    let n = check_frequency(xi, eta)?;
    Ok(in_slab_unchecked(s, xi, eta * n))
}

/// `γ_n(S_{ξ,η})`.
pub fn slab_mass(measure: &DiscreteOrientationMeasure, xi: &[f64], eta: f64) -> Result<f64> {
    if xi.len() != measure.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("frequency of length {}", measure.ambient_dim()),
            found: format!("{}", xi.len()),
        });
    }
    let n = check_frequency(xi, eta)?;
    Ok(slab_mass_unchecked(measure, xi, eta * n))
}

/// Mass inside the slab relative to the total, so that a slab holding every
/// atom has mass exactly 1 despite rounding in the stored weights.
fn slab_mass_unchecked(measure: &DiscreteOrientationMeasure, xi: &[f64], bound: f64) -> f64 {
    let inside: f64 = measure
        .atoms()
        .iter()
        .filter(|a| in_slab_unchecked(&a.frame, xi, bound))
        .map(|a| a.mass)
        .sum();
    inside / measure.total_mass()
}

/// `search_budget` unit directions; direction `i` depends only on `(seed, i)`.
pub fn search_directions(d: usize, search_budget: usize, seed: u64) -> Vec<Vec<f64>> {
    (0..search_budget as u64)
        .map(|i| rng::unit_vector(&mut rng::stream(seed, Domain::SearchDirections, i), d))
        .collect()
}

/// Heaviest slab over a fixed set of unit directions; ties go to the earliest.
pub fn best_of(measure: &DiscreteOrientationMeasure, candidates: &[Vec<f64>], eta: f64) -> Result<WorstSlab> {
    if candidates.is_empty() {
        return Err(Error::BadParameters("no candidate directions".into()));
    }
    let masses = candidates
        .iter()
        .map(|c| slab_mass(measure, c, eta))
        .collect::<Result<Vec<_>>>()?;
    let (i, &mass) = masses
        .iter()
        .enumerate()
        .fold((0, &masses[0]), |best, cur| if cur.1 > best.1 { cur } else { best });
    let mut direction = candidates[i].clone();
    normalize(&mut direction);
    Ok(WorstSlab { direction, mass })
}

/// Largest slab mass over `search_budget` random unit directions, refined by a
/// coordinate-perturbation hill climb (50 steps, step halved on failure)
/// from the best few candidates.
pub fn worst_case_slab_mass(
    measure: &DiscreteOrientationMeasure,
    eta: f64,
    search_budget: usize,
    seed: u64,
) -> Result<WorstSlab> {
    if search_budget < 10 {
        return Err(Error::BadParameters(format!(
            "search budget must be at least 10, got {search_budget}"
        )));
    }
    if !(eta > 0.0) {
        return Err(Error::BadParameters(format!("η must be positive, got {eta}")));
    }
    let d = measure.ambient_dim();
    let candidates = search_directions(d, search_budget, seed);
    let masses: Vec<f64> = candidates
        .par_iter()
        .map(|c| slab_mass_unchecked(measure, c, eta))
        .collect();

    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| masses[b].total_cmp(&masses[a]).then(a.cmp(&b)));

    let mut best = WorstSlab {
        direction: candidates[order[0]].clone(),
        mass: masses[order[0]],
    };
    if best.mass >= 1.0 {
        return Ok(best);
    }
    let step0 = initial_step(d, search_budget);
    for &start in order.iter().take(HILL_CLIMB_STARTS) {
        let climbed = hill_climb(measure, &candidates[start], masses[start], eta, step0);
        if climbed.mass > best.mass {
            best = climbed;
        }
        if best.mass >= 1.0 {
            break;
        }
    }
    Ok(best)
}

fn initial_step(d: usize, budget: usize) -> f64 {
    (2.0 * crate::sphere_points::typical_spacing(d, budget)).min(0.5)
}

fn hill_climb(
    measure: &DiscreteOrientationMeasure,
    start: &[f64],
    start_mass: f64,
    eta: f64,
    mut step: f64,
) -> WorstSlab {
    let mut point = start.to_vec();
    let mut mass = start_mass;
    let d = point.len();
    for _ in 0..HILL_CLIMB_STEPS {
        let mut improved: Option<(Vec<f64>, f64)> = None;
        for j in 0..d {
            for sign in [1.0, -1.0] {
                let mut trial = point.clone();
                trial[j] += sign * step;
                if normalize(&mut trial) == 0.0 {
                    continue;
                }
                let m = slab_mass_unchecked(measure, &trial, eta);
                if m > improved.as_ref().map_or(mass, |(_, b)| *b) {
                    improved = Some((trial, m));
                }
            }
        }
        match improved {
            Some((p, m)) => {
                point = p;
                mass = m;
                if mass >= 1.0 {
                    break;
                }
            }
            None => step *= 0.5,
        }
    }
    WorstSlab { direction: point, mass }
}

/// Fits `β̂` as the slope of `log sup_ξ γ_n(S_{ξ,η})` against `log η`.
///
/// Every direction found at some `η` is re-evaluated at every other grid
/// point, so the reported masses are nondecreasing in `η`. The grid needs at
/// least five strictly decreasing values with `max η <= 1/4` and
/// `min η >= 2·separation`; below the net scale the discrete measure no longer
/// resembles the family it samples.
pub fn fit_beta(
    measure: &DiscreteOrientationMeasure,
    eta_grid: &[f64],
    search_budget: usize,
    seed: u64,
    predicted_beta: Option<f64>,
) -> Result<ScalingReport> {
    crate::grassmannian::validate_decreasing_grid(eta_grid, 5, 0.25)?;
    let min_eta = *eta_grid.last().expect("grid is nonempty");
    let separation = measure.separation();
    if min_eta < 2.0 * separation {
        return Err(Error::GridBelowResolution { min_eta, separation });
    }

    let found = eta_grid
        .iter()
        .map(|&eta| worst_case_slab_mass(measure, eta, search_budget, seed))
        .collect::<Result<Vec<_>>>()?;

    let mut sup_masses = Vec::with_capacity(eta_grid.len());
    let mut directions = Vec::with_capacity(eta_grid.len());
    for (i, &eta) in eta_grid.iter().enumerate() {
        let mut best = found[i].clone();
        for (j, other) in found.iter().enumerate() {
            if j == i {
                continue;
            }
            let m = slab_mass_unchecked(measure, &other.direction, eta);
            if m > best.mass {
                best = WorstSlab {
                    direction: other.direction.clone(),
                    mass: m,
                };
            }
        }
        sup_masses.push(best.mass);
        directions.push(best.direction);
    }

    let line = fit::log_log(eta_grid, &sup_masses).ok_or_else(|| {
        Error::BadParameters("slab masses vanish on the grid; use a larger η or more atoms".into())
    })?;
    Ok(ScalingReport {
        eta_grid: eta_grid.to_vec(),
        sup_masses,
        directions,
        beta_hat: line.slope,
        r_squared: line.r_squared,
        predicted_beta,
    })
}
