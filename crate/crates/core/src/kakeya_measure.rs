//! Fourier transforms of the measures `μ` built from a [`KakeyaMeasureSpec`].
//!
//! For an atom `s` with translation `t` and basis `x_1, …, x_k`, the measure
//! spreads `φ(r_1)⋯φ(r_k) dr` over `t + Σ r_i x_i`, so its transform factors
//! as `e^{-2πi t·ξ} Π φ̂(ξ·x_i)`. No quadrature over `r` is needed.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bump::{unit_phase, BumpProfile};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::orientation::{assign_translations, nondegenerate_sphere_measure, KakeyaMeasureSpec, TranslationStrategy};
use crate::quadrature::GaussLegendre;
use crate::sphere_points;

const RADIAL_ORDER: usize = 16;
/// Cap on angular nodes for the dual-sphere defaults in `d >= 3`.
pub const MAX_ANGULAR_NODES: usize = 1 << 20;

/// `μ̂(ξ)` together with the translation-free envelope `Σ w Π|φ̂(ξ·x_i)|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencySample {
    pub xi: Vec<f64>,
    pub value: Complex64,
    pub envelope: f64,
}

fn check_frequency(spec: &KakeyaMeasureSpec, xi: &[f64]) {
    assert_eq!(
        xi.len(),
        spec.ambient_dim(),
        "frequency has length {} but the measure lives in R^{}",
        xi.len(),
        spec.ambient_dim()
    );
}

/// `μ̂(ξ) = Σ_j w_j e^{-2πi t_j·ξ} Π_i φ̂(ξ·x_i^{(j)})`.
///
/// # Panics
/// If `xi` does not have the ambient dimension of `spec`.
pub fn mu_hat(spec: &KakeyaMeasureSpec, xi: &[f64]) -> Complex64 {
    check_frequency(spec, xi);
    mu_hat_unchecked(spec, xi)
}

fn mu_hat_unchecked(spec: &KakeyaMeasureSpec, xi: &[f64]) -> Complex64 {
    let bump = spec.bump();
    spec.orientation()
        .atoms()
        .iter()
        .zip(spec.translations())
        .map(|(atom, t)| {
            // φ̂(u) = e^{-iπu} g(u), so all phases collect into one factor.
            let mut half_turns = 2.0 * dot(t, xi);
            let mut amplitude = atom.mass;
            for x in atom.frame.basis_vectors() {
                let u = dot(xi, x);
                half_turns += u;
                amplitude *= bump.symmetric_part(u);
            }
            amplitude * unit_phase(half_turns)
        })
        .sum()
}

/// `Σ_j w_j Π_i |φ̂(ξ·x_i^{(j)})|`; never reads the translations.
///
/// # Panics
/// If `xi` does not have the ambient dimension of `spec`.
pub fn mu_hat_envelope(spec: &KakeyaMeasureSpec, xi: &[f64]) -> f64 {
    check_frequency(spec, xi);
    envelope_unchecked(spec.orientation().atoms(), spec.bump(), xi)
}

fn envelope_unchecked(atoms: &[crate::orientation::Atom], bump: &BumpProfile, xi: &[f64]) -> f64 {
    atoms
        .iter()
        .map(|atom| {
            atom.frame
                .basis_vectors()
                .fold(atom.mass, |acc, x| acc * bump.phi_hat_abs(dot(xi, x)))
        })
        .sum()
}

/// Value and envelope at one frequency.
pub fn sample(spec: &KakeyaMeasureSpec, xi: &[f64]) -> FrequencySample {
    FrequencySample {
        xi: xi.to_vec(),
        value: mu_hat(spec, xi),
        envelope: mu_hat_envelope(spec, xi),
    }
}

/// [`sample`] over many frequencies, in parallel; output order matches input.
pub fn sample_batch(spec: &KakeyaMeasureSpec, frequencies: &[Vec<f64>]) -> Vec<FrequencySample> {
    frequencies.par_iter().map(|xi| sample(spec, xi)).collect()
}

/// The two terms of the slab/tail split at `η = |ξ|^{-α}`, `N = αβ/(1-α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitBound {
    pub eta: f64,
    pub n: f64,
    /// `η^β`
    pub slab_term: f64,
    /// `(η|ξ|)^{-N}`
    pub tail_term: f64,
    pub total: f64,
}

/// `η^β + (η|ξ|)^{-N}` with suppressed constants dropped.
///
/// Both terms equal `|ξ|^{-αβ}`; they are computed from their own
/// definitions (in log form, which keeps large `N` accurate).
pub fn split_bound(beta: f64, alpha: f64, xi_norm: f64) -> Result<SplitBound> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::BadParameters(format!("α must lie in (0, 1), got {alpha}")));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::BadParameters(format!("β must be positive, got {beta}")));
    }
    if !(xi_norm > 1.0) || !xi_norm.is_finite() {
        return Err(Error::BadParameters(format!("|ξ| must exceed 1, got {xi_norm}")));
    }
    let log_xi = xi_norm.ln();
    let log_eta = -alpha * log_xi;
    let n = alpha * beta / (1.0 - alpha);
    let slab_term = (beta * log_eta).exp();
    // log(η|ξ|) = (1-α) log|ξ|, formed without cancellation.
    let tail_term = (-n * ((1.0 - alpha) * log_xi)).exp();
    Ok(SplitBound {
        eta: log_eta.exp(),
        n,
        slab_term,
        tail_term,
        total: slab_term + tail_term,
    })
}

/// Default `(n_r, n_θ)` for [`sphere_dual_mu_hat`] at frequency `|ξ|`, for
/// centers moving at speed at most `center_speed` in `r`.
///
/// Radial panels of order 16 each cover at most three oscillations;
/// angular counts exceed the largest phase `2π|ξ|` (`d = 2`) or its square
/// (`d = 3`), capped at [`MAX_ANGULAR_NODES`].
pub fn dual_sphere_nodes(d: usize, xi_norm: f64, center_speed: f64) -> (usize, usize) {
    let freq = xi_norm * (1.0 + center_speed.abs());
    let n_r = RADIAL_ORDER * ((freq / 3.0).ceil() as usize + 4);
    let phase = 2.0 * PI * xi_norm;
    let n_theta = match d {
        2 => (1.1 * phase).ceil() as usize + 64,
        _ => ((phase + 8.0).powi(d as i32 - 1).ceil() as usize).min(MAX_ANGULAR_NODES),
    };
    (n_r.max(64), n_theta.max(64))
}

/// Transform of `f ↦ ∫₀¹ ∫_{S^{d-1}} f(x_r + rθ) φ(r) dσ(θ) dr` at `ξ`, the
/// measure on spheres of radius `r` centered at `x_r`.
///
/// Tensor quadrature: composite Gauss–Legendre in `r` and `n_theta`
/// quasi-uniform directions, both normalized to unit mass.
pub fn sphere_dual_mu_hat<C>(d: usize, centers: C, xi: &[f64], n_r: usize, n_theta: usize) -> Result<Complex64>
where
    C: Fn(f64) -> Vec<f64>,
{
    if d < 2 {
        return Err(Error::BadDimensions(format!("spheres need d >= 2, got {d}")));
    }
    if xi.len() != d {
        return Err(Error::DimensionMismatch {
            expected: format!("frequency of length {d}"),
            found: format!("{}", xi.len()),
        });
    }
    if n_r < 64 || n_theta < 64 {
        return Err(Error::BadParameters(format!(
            "need at least 64 radial and 64 angular nodes, got {n_r} and {n_theta}"
        )));
    }
    let bump = BumpProfile::standard();
    let gl = GaussLegendre::new(RADIAL_ORDER);
    let (rs, ws) = gl.composite(0.0, 1.0, n_r.div_ceil(RADIAL_ORDER));
    let radial: Vec<(f64, f64, f64)> = rs
        .iter()
        .zip(&ws)
        .map(|(&r, &w)| {
            let c = centers(r);
            if c.len() != d || c.iter().any(|v| !v.is_finite()) {
                return Err(Error::BadParameters(format!("center at r = {r} is not a finite point of R^{d}")));
            }
            Ok((r, w * bump.phi(r), dot(&c, xi)))
        })
        .collect::<Result<_>>()?;
    let radial_mass: f64 = radial.iter().map(|(_, w, _)| w).sum();

    let projections: Vec<f64> = sphere_points::quasi_uniform(d, n_theta, 0.0, 0)
        .iter()
        .map(|theta| dot(theta, xi))
        .collect();
    let total: Complex64 = radial
        .par_iter()
        .map(|&(r, w, center_phase)| {
            let angular: Complex64 = projections.iter().map(|a| unit_phase(2.0 * (center_phase + r * a))).sum();
            w * angular
        })
        .sum();
    Ok(total / (radial_mass * projections.len() as f64))
}

/// Transform of normalized surface measure on the unit sphere of `R^d`,
/// averaged over `n_theta` quasi-uniform nodes.
pub fn sphere_surface_hat(d: usize, xi: &[f64], n_theta: usize) -> Result<Complex64> {
    if d < 2 || xi.len() != d {
        return Err(Error::DimensionMismatch {
            expected: format!("frequency of length {d} >= 2"),
            found: format!("{}", xi.len()),
        });
    }
    if n_theta < 64 {
        return Err(Error::BadParameters(format!("need at least 64 angular nodes, got {n_theta}")));
    }
    let pts = sphere_points::quasi_uniform(d, n_theta, 0.0, 0);
    let sum: Complex64 = pts.iter().map(|theta| unit_phase(2.0 * dot(theta, xi))).sum();
    Ok(sum / pts.len() as f64)
}

/// The 45° cone through the origin: `m` rays at polar angle `π/4` from
/// `e_d`, zero translations, so every support point has last coordinate
/// equal to the norm of the others.
pub fn cone_measure_spec(d: usize, m: usize, seed: u64) -> Result<KakeyaMeasureSpec> {
    if d < 3 {
        return Err(Error::BadDimensions(format!("the cone needs d >= 3, got {d}")));
    }
    if m < 64 {
        return Err(Error::BadParameters(format!("need at least 64 rays, got {m}")));
    }
    let mut axis = vec![0.0; d];
    axis[d - 1] = 1.0;
    let measure = nondegenerate_sphere_measure(d, &axis, FRAC_PI_4, m, seed)?;
    assign_translations(&measure, &TranslationStrategy::Zero, seed)
}

/// Largest `|μ̂(ξ)| - envelope(ξ)` over `frequencies`; nonpositive up to
/// rounding when the envelope dominates.
pub fn envelope_excess(spec: &KakeyaMeasureSpec, frequencies: &[Vec<f64>]) -> f64 {
    sample_batch(spec, frequencies)
        .iter()
        .map(|s| s.value.norm() - s.envelope)
        .fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmannian::orthonormalize;
    use crate::orientation::{
        assign_translations, hyperplane_family_measure, uniform_grassmannian_measure, Atom,
        DiscreteOrientationMeasure,
    };
    use crate::rng::{self, Domain};
    use crate::linalg::norm;
    use proptest::prelude::*;

    fn e(d: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        v
    }

    fn single_atom(basis: &[Vec<f64>], t: Vec<f64>) -> KakeyaMeasureSpec {
        let frame = orthonormalize(basis).unwrap();
        let m = DiscreteOrientationMeasure::new(vec![Atom { frame, mass: 1.0 }], 0.0).unwrap();
        assign_translations(&m, &TranslationStrategy::Fixed(vec![t]), 0).unwrap()
    }

    fn random_spec(d: usize, k: usize, seed: u64) -> KakeyaMeasureSpec {
        let m = uniform_grassmannian_measure(d, k, 6, 3000, seed).unwrap();
        assign_translations(&m, &TranslationStrategy::RandomBox { side: 1.0 }, seed).unwrap()
    }

    fn random_xi(d: usize, scale: f64, i: u64) -> Vec<f64> {
        let mut r = rng::stream(99, Domain::OraclePoints, i);
        rng::gaussian_vec(&mut r, d).into_iter().map(|x| scale * x).collect()
    }

    #[test]
    fn zero_frequency_gives_total_mass() {
        for (d, k) in [(2, 1), (3, 1), (3, 2), (4, 2)] {
            let spec = random_spec(d, k, 3);
            let z = vec![0.0; d];
            assert!((mu_hat(&spec, &z) - 1.0).norm() < 1e-9);
            assert!((mu_hat_envelope(&spec, &z) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn single_segment_collapses_to_phi_hat() {
        let spec = single_atom(&[e(3, 0)], vec![0.0; 3]);
        let bump = BumpProfile::standard();
        for u in [0.3, -2.5, 17.0, 300.25] {
            let got = mu_hat(&spec, &[u, 0.0, 0.0]);
            assert!((got - bump.phi_hat(u)).norm() < 1e-12, "u = {u}");
        }
    }

    #[test]
    fn square_atom_matches_direct_double_integral() {
        // Oracle: tensor Gauss–Legendre directly on φ(r1)φ(r2), no cached φ̂.
        let b1 = vec![0.6, 0.8, 0.0];
        let b2 = vec![0.0, 0.0, 1.0];
        let t = vec![0.3, -0.2, 0.5];
        let spec = single_atom(&[b1.clone(), b2.clone()], t.clone());
        let bump = BumpProfile::standard();
        let (rs, ws) = GaussLegendre::new(20).composite(0.0, 1.0, 60);
        for xi in [vec![1.5, -2.0, 3.0], vec![7.0, 4.0, -11.0]] {
            let a1 = dot(&b1, &xi);
            let a2 = dot(&b2, &xi);
            let mut want = Complex64::new(0.0, 0.0);
            for (r1, w1) in rs.iter().zip(&ws) {
                for (r2, w2) in rs.iter().zip(&ws) {
                    let phase = -2.0 * PI * (dot(&t, &xi) + r1 * a1 + r2 * a2);
                    want += w1 * w2 * bump.phi(*r1) * bump.phi(*r2) * Complex64::from_polar(1.0, phase);
                }
            }
            let got = mu_hat(&spec, &xi);
            assert!((got - want).norm() < 2e-8, "{got} vs {want}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn envelope_dominates_and_is_bounded(seed in 0u64..200, scale in 0.1f64..300.0, i in 0u64..1000) {
            let spec = random_spec(3, 1, seed % 7);
            let xi = random_xi(3, scale, i);
            let s = sample(&spec, &xi);
            prop_assert!(s.value.norm() <= s.envelope + 1e-9);
            prop_assert!(s.envelope <= 1.0 + 1e-9);
        }

        #[test]
        fn negated_frequency_conjugates(seed in 0usize..3, scale in 0.1f64..500.0, i in 0u64..1000) {
            static SPECS: std::sync::OnceLock<Vec<KakeyaMeasureSpec>> = std::sync::OnceLock::new();
            let spec = &SPECS.get_or_init(|| (0..3).map(|s| random_spec(4, 2, s)).collect())[seed];
            let xi = random_xi(4, scale, i);
            let neg: Vec<f64> = xi.iter().map(|x| -x).collect();
            prop_assert_eq!(mu_hat(spec, &neg), mu_hat(spec, &xi).conj());
        }
    }

    #[test]
    fn envelope_ignores_translations_bitwise() {
        let m = uniform_grassmannian_measure(3, 2, 6, 3000, 1).unwrap();
        let base = assign_translations(&m, &TranslationStrategy::Zero, 0).unwrap();
        let xis: Vec<Vec<f64>> = (0..40).map(|i| random_xi(3, 20.0, i)).collect();
        let reference: Vec<u64> = xis.iter().map(|x| mu_hat_envelope(&base, x).to_bits()).collect();
        for seed in 0..5 {
            let moved = assign_translations(&m, &TranslationStrategy::RandomBox { side: 3.0 }, seed).unwrap();
            let got: Vec<u64> = xis.iter().map(|x| mu_hat_envelope(&moved, x).to_bits()).collect();
            assert_eq!(got, reference);
        }
    }

    #[test]
    fn hyperplane_family_does_not_decay_along_the_normal() {
        let v = orthonormalize(&[e(3, 0), e(3, 1)]).unwrap();
        let m = hyperplane_family_measure(3, 1, &v, 32, 5000, 2).unwrap();
        let ts: Vec<Vec<f64>> = (0..m.len()).map(|j| vec![(j % 5) as f64 * 0.7, -(j as f64 % 3.0), 0.0]).collect();
        let spec = assign_translations(&m, &TranslationStrategy::Fixed(ts), 0).unwrap();
        for j in 1..=9 {
            let r = (1u64 << j) as f64;
            assert!((mu_hat(&spec, &[0.0, 0.0, r]).norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn split_bound_example_and_identity() {
        let b = split_bound(1.0, 0.5, 16.0).unwrap();
        assert!((b.eta - 0.25).abs() < 1e-15);
        assert!((b.n - 1.0).abs() < 1e-15);
        assert!((b.total - 0.5).abs() < 1e-14);
        for (beta, alpha, x) in [(0.5, 0.9, 1e3), (2.0, 0.999_99, 1e6), (1.0, 1e-4, 1.0001)] {
            let b = split_bound(beta, alpha, x).unwrap();
            assert!((b.slab_term - b.tail_term).abs() <= 1e-12 * b.slab_term);
            assert!((b.slab_term - x.powf(-alpha * beta)).abs() <= 1e-12 * b.slab_term);
        }
        assert!(split_bound(1.0, 1.0, 4.0).is_err());
        assert!(split_bound(0.0, 0.5, 4.0).is_err());
        assert!(split_bound(1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn dual_sphere_is_normalized_and_bounded() {
        let zero = |_: f64| vec![0.0, 0.0];
        let v = sphere_dual_mu_hat(2, zero, &[0.0, 0.0], 64, 64).unwrap();
        assert!((v - 1.0).norm() < 1e-6);
        let moving = |r: f64| vec![0.5 * r, -0.25];
        for i in 0..10 {
            let xi = random_xi(2, 5.0, i);
            let (nr, nt) = dual_sphere_nodes(2, norm(&xi), 0.5);
            assert!(sphere_dual_mu_hat(2, moving, &xi, nr, nt).unwrap().norm() <= 1.0 + 1e-6);
        }
        assert!(sphere_dual_mu_hat(2, zero, &[1.0, 0.0], 32, 64).is_err());
    }

    #[test]
    fn centered_dual_sphere_matches_polar_oracle() {
        // With zero centers the r-integral is φ̂ along each direction, so
        // μ̂(ξ) = (1/2π)∫ φ̂(|ξ| cos θ) dθ; the angular integral is resolved
        // with a fine trapezoid rule over directly integrated φ̂.
        let bump = BumpProfile::standard();
        for radius in [6.0, 40.0] {
            let xi = [radius * 0.6, radius * 0.8];
            let (nr, nt) = dual_sphere_nodes(2, radius, 0.0);
            let got = sphere_dual_mu_hat(2, |_| vec![0.0, 0.0], &xi, nr, nt).unwrap();
            let n = 4096;
            let want: Complex64 = (0..n)
                .map(|j| bump.phi_hat_direct(radius * (2.0 * PI * j as f64 / n as f64).cos()))
                .sum::<Complex64>()
                / n as f64;
            assert!((got - want).norm() < 1e-9, "R = {radius}: {got} vs {want}");
        }
    }

    #[test]
    fn circle_surface_matches_bessel_series() {
        fn j0(x: f64) -> f64 {
            let mut term = 1.0;
            let mut sum = 1.0;
            for m in 1..200 {
                term *= -(x * x) / (4.0 * (m * m) as f64);
                sum += term;
            }
            sum
        }
        for r in [0.3, 1.0, 1.7, 2.2] {
            let got = sphere_surface_hat(2, &[r, 0.0], 256).unwrap();
            assert!((got.re - j0(2.0 * PI * r)).abs() < 1e-10, "r = {r}");
            assert!(got.im.abs() < 1e-12);
        }
    }

    #[test]
    fn cone_rays_and_support() {
        let spec = cone_measure_spec(3, 128, 0).unwrap();
        let half = 0.5f64.sqrt();
        for (atom, t) in spec.orientation().atoms().iter().zip(spec.translations()) {
            let u = atom.frame.basis_vector(0);
            assert!((u[2] - half).abs() < 1e-12);
            for r in [0.1, 0.5, 1.0] {
                let p: Vec<f64> = t.iter().zip(u).map(|(t, u)| t + r * u).collect();
                assert!((p[2] - (p[0] * p[0] + p[1] * p[1]).sqrt()).abs() < 1e-9);
            }
        }
        assert!(matches!(cone_measure_spec(2, 128, 0), Err(Error::BadDimensions(_))));
        assert!(cone_measure_spec(3, 32, 0).is_err());
    }

    #[test]
    fn batch_matches_pointwise() {
        let spec = random_spec(3, 2, 4);
        let xis: Vec<Vec<f64>> = (0..16).map(|i| random_xi(3, 9.0, i)).collect();
        let batch = sample_batch(&spec, &xis);
        for (s, xi) in batch.iter().zip(&xis) {
            assert_eq!(s, &sample(&spec, xi));
        }
        assert!(envelope_excess(&spec, &xis) <= 1e-9);
    }
}
