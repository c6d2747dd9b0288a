//! Fourier-decay exponents from maxima over dyadic frequency shells.
//!
//! A measure with `|μ̂(ξ)| ≲ |ξ|^{-s/2}` has Fourier dimension at least `s`.
//! The maximum of `|F|` over `|ξ| = R` is approximated by sampling directions
//! and refining the best one, then `log max` is regressed on `log R`. Sampled
//! maxima under-estimate the true supremum, so fitted slopes lean optimistic.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit;
use crate::linalg::normalize;
use crate::rng::{self, Domain};
use crate::sphere_points::typical_spacing;

/// Hill-climb steps applied to the best sampled direction by default.
pub const DEFAULT_REFINEMENTS: usize = 20;
/// Directions per shell used by the CLI when none are configured.
pub const DEFAULT_SAMPLES: usize = 2048;
/// Fits with `r² < RELIABLE_R_SQUARED` are flagged.
pub const RELIABLE_R_SQUARED: f64 = 0.9;
/// Shell maxima are floored here before taking logarithms.
const FLOOR: f64 = 1e-300;
const GOLDEN_FRACTION: f64 = 0.618_033_988_749_894_9;

/// A fitted decay exponent over dyadic shells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub radii: Vec<f64>,
    pub shell_maxima: Vec<f64>,
    /// `s/2` in `|F(ξ)| ≲ |ξ|^{-s/2}`.
    pub slope: f64,
    /// `2·slope` clamped to `[0, d]`.
    pub fourier_dim_estimate: f64,
    pub r_squared: f64,
    pub samples_per_shell: usize,
    pub reliable: bool,
    pub ambient_dim: usize,
}

/// Sample direction `i` on the unit sphere of `R^d`.
///
/// In the plane these are golden-ratio angles, elsewhere independent
/// counter-based draws; either way the first `m` directions do not depend on
/// how many more are requested.
pub fn shell_direction(d: usize, seed: u64, i: u64) -> Vec<f64> {
    if d == 2 {
        let offset: f64 = rng::unit_vector(&mut rng::stream(seed, Domain::ShellDirections, u64::MAX), 2)[0];
        let turns = (offset + i as f64 * GOLDEN_FRACTION).rem_euclid(1.0);
        let (s, c) = (2.0 * std::f64::consts::PI * turns).sin_cos();
        vec![c, s]
    } else {
        rng::unit_vector(&mut rng::stream(seed, Domain::ShellDirections, i), d)
    }
}

fn check_shell(d: usize, radius: f64, m: usize) -> Result<()> {
    if d < 1 {
        return Err(Error::BadDimensions("frequency space needs d >= 1".into()));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::BadParameters(format!("shell radius must be positive, got {radius}")));
    }
    if m < 16 {
        return Err(Error::BadParameters(format!("need at least 16 directions per shell, got {m}")));
    }
    Ok(())
}

/// `max |F(R·θ)|` over `m` sampled directions, followed by
/// [`DEFAULT_REFINEMENTS`] hill-climb steps from the best one.
pub fn shell_max<F>(f: &F, d: usize, radius: f64, m: usize, seed: u64) -> Result<f64>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    shell_max_refined(f, d, radius, m, seed, DEFAULT_REFINEMENTS)
}

/// [`shell_max`] with an explicit number of refinement steps.
pub fn shell_max_refined<F>(f: &F, d: usize, radius: f64, m: usize, seed: u64, refinements: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    check_shell(d, radius, m)?;
    let at = |theta: &[f64]| {
        let xi: Vec<f64> = theta.iter().map(|x| radius * x).collect();
        f(&xi).norm()
    };
    let values: Vec<f64> = (0..m as u64)
        .into_par_iter()
        .map(|i| at(&shell_direction(d, seed, i)))
        .collect();
    let (best_index, mut best) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
    if refinements == 0 {
        return Ok(best);
    }

    let mut point = shell_direction(d, seed, best_index as u64);
    let mut step = typical_spacing(d, m).min(0.5);
    for _ in 0..refinements {
        let trials: Vec<Vec<f64>> = (0..d)
            .flat_map(|j| [1.0, -1.0].map(|sign| (j, sign)))
            .filter_map(|(j, sign)| {
                let mut t = point.clone();
                t[j] += sign * step;
                (normalize(&mut t) > 0.0).then_some(t)
            })
            .collect();
        let scores: Vec<f64> = trials.par_iter().map(|t| at(t)).collect();
        let improved = scores
            .iter()
            .copied()
            .enumerate()
            .fold(None, |b: Option<(usize, f64)>, c| match b {
                Some(b) if b.1 >= c.1 => Some(b),
                _ if c.1 > best => Some(c),
                _ => b,
            });
        match improved {
            Some((i, v)) => {
                point = trials[i].clone();
                best = v;
            }
            None => step *= 0.5,
        }
    }
    Ok(best)
}

/// Checks that `radii` are at least five increasing powers of two from 4 up.
pub fn validate_radii(radii: &[f64]) -> Result<()> {
    if radii.len() < 5 {
        return Err(Error::InsufficientGrid(format!("need at least 5 shells, got {}", radii.len())));
    }
    if radii[0] < 4.0 {
        return Err(Error::InsufficientGrid(format!("smallest radius must be at least 4, got {}", radii[0])));
    }
    if let Some(r) = radii.iter().find(|r| !(r.is_finite() && r.log2().fract() == 0.0)) {
        return Err(Error::InsufficientGrid(format!("radii must be powers of two, got {r}")));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InsufficientGrid("radii must be strictly increasing".into()));
    }
    Ok(())
}

/// Shell maxima of `F` at each radius and the fitted decay exponent.
///
/// `radii` must hold at least five increasing powers of two, the smallest at
/// least 4.
pub fn fit_decay<F>(f: &F, d: usize, radii: &[f64], m: usize, seed: u64) -> Result<DecayFit>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    validate_radii(radii)?;
    let maxima = radii
        .iter()
        .map(|&r| shell_max(f, d, r, m, seed))
        .collect::<Result<Vec<_>>>()?;
    fit_shell_maxima(radii, &maxima, d, m)
}

/// Fits already computed shell maxima.
pub fn fit_shell_maxima(radii: &[f64], maxima: &[f64], d: usize, samples_per_shell: usize) -> Result<DecayFit> {
    validate_radii(radii)?;
    if maxima.len() != radii.len() {
        return Err(Error::LengthMismatch {
            expected: radii.len(),
            found: maxima.len(),
        });
    }
    if let Some(v) = maxima.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::BadParameters(format!("shell maxima must be finite and nonnegative, got {v}")));
    }
    let floored: Vec<f64> = maxima.iter().map(|v| v.max(FLOOR)).collect();
    let line = fit::log_log(radii, &floored).expect("validated positive inputs");
    let slope = -line.slope;
    Ok(DecayFit {
        radii: radii.to_vec(),
        shell_maxima: maxima.to_vec(),
        slope,
        fourier_dim_estimate: (2.0 * slope).clamp(0.0, d as f64),
        r_squared: line.r_squared,
        samples_per_shell,
        reliable: line.r_squared >= RELIABLE_R_SQUARED,
        ambient_dim: d,
    })
}

/// `2^lo, …, 2^hi`.
pub fn dyadic_radii(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|j| 2f64.powi(j)).collect()
}
