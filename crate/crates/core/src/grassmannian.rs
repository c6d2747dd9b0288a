//! Points of the Grassmannian `G(d,k)` as orthonormal frames.
//!
//! A subspace is stored through one orthonormal basis `x_1, ..., x_k`. The
//! distance between two subspaces is the Hausdorff distance between their
//! unit spheres. For equal dimensions this equals `sqrt(2 - 2 cos θ_max)`,
//! where `θ_max` is the largest principal angle; [`metric`] evaluates that
//! closed form and [`metric_oracle`] estimates the Hausdorff distance by brute
//! force so the identity can be checked.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit;
use crate::linalg::{dot, norm};
use crate::rng::{self, Domain};
use crate::sphere_points;

const ORTHO_TOL: f64 = 1e-9;
const RANK_TOL: f64 = 1e-8;

/// Orthonormal `k`-frame in `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    ambient_dim: usize,
    plane_dim: usize,
    /// Basis vectors stored contiguously, vector `i` at `[i*d, (i+1)*d)`.
    basis: Vec<f64>,
}

/// Distance between two points of `G(d,k)`, in `[0, √2]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Distance(f64);

impl Distance {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Distance> for f64 {
    fn from(d: Distance) -> f64 {
        d.0
    }
}

impl Frame {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn plane_dim(&self) -> usize {
        self.plane_dim
    }

    pub fn basis_vector(&self, i: usize) -> &[f64] {
        let d = self.ambient_dim;
        &self.basis[i * d..(i + 1) * d]
    }

    pub fn basis_vectors(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.basis.chunks_exact(self.ambient_dim)
    }

    /// Flat row-major storage of the basis, `k` rows of length `d`.
    pub fn as_slice(&self) -> &[f64] {
        &self.basis
    }

    /// Same subspace with every basis vector oriented so that its last
    /// non-negligible coordinate is positive.
    ///
    /// For lines this picks one direction per line consistently, which makes
    /// the map from subspace to segment direction piecewise continuous.
    pub fn canonical(&self) -> Frame {
        let mut out = self.clone();
        let d = self.ambient_dim;
        for v in out.basis.chunks_exact_mut(d) {
            if let Some(&lead) = v.iter().rev().find(|x| x.abs() > 1e-12) {
                if lead < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
            }
        }
        out
    }

    /// Maps a frame of `R^m` into `R^d` through an orthonormal `m`-frame `into`:
    /// coordinate `j` of each vector becomes a multiple of `into`'s `j`-th vector.
    pub fn embed(&self, into: &Frame) -> Result<Frame> {
        if into.plane_dim != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: format!("embedding frame of dimension {}", self.ambient_dim),
                found: format!("{}", into.plane_dim),
            });
        }
        let d = into.ambient_dim;
        let mut basis = vec![0.0; self.plane_dim * d];
        for (i, v) in self.basis_vectors().enumerate() {
            let out = &mut basis[i * d..(i + 1) * d];
            for (c, w) in v.iter().zip(into.basis_vectors()) {
                out.iter_mut().zip(w).for_each(|(o, x)| *o += c * x);
            }
        }
        Ok(Frame {
            ambient_dim: d,
            plane_dim: self.plane_dim,
            basis,
        })
    }

    fn check_compatible(&self, other: &Frame) -> Result<()> {
        if self.ambient_dim != other.ambient_dim || self.plane_dim != other.plane_dim {
            return Err(Error::DimensionMismatch {
                expected: format!("G({},{})", self.ambient_dim, self.plane_dim),
                found: format!("G({},{})", other.ambient_dim, other.plane_dim),
            });
        }
        Ok(())
    }

    fn total_cmp(&self, other: &Frame) -> Ordering {
        self.basis
            .iter()
            .zip(&other.basis)
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }
}

/// Gram–Schmidt orthonormalization of `raw` (k vectors of equal length d).
pub fn orthonormalize(raw: &[Vec<f64>]) -> Result<Frame> {
    let k = raw.len();
    let d = raw.first().map_or(0, Vec::len);
    if k == 0 || d < 2 || k >= d {
        return Err(Error::BadDimensions(format!(
            "need 1 <= k < d with d >= 2, got k = {k}, d = {d}"
        )));
    }
    if let Some(bad) = raw.iter().find(|v| v.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: format!("vectors of length {d}"),
            found: format!("{}", bad.len()),
        });
    }
    if raw.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::BadParameters("non-finite coordinate".into()));
    }

    let m = DMatrix::from_fn(d, k, |r, c| raw[c][r]);
    let smallest = m
        .singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if !(smallest > RANK_TOL) {
        return Err(Error::RankDeficient {
            smallest_singular_value: smallest,
        });
    }

    let mut basis: Vec<f64> = Vec::with_capacity(k * d);
    for v in raw {
        let mut w = v.clone();
        // Two passes of modified Gram-Schmidt keep the Gram matrix at machine precision.
        for _ in 0..2 {
            for prev in basis.chunks_exact(d) {
                let c = dot(&w, prev);
                w.iter_mut().zip(prev).for_each(|(x, p)| *x -= c * p);
            }
        }
        let n = norm(&w);
        w.iter_mut().for_each(|x| *x /= n);
        basis.extend_from_slice(&w);
    }
    let frame = Frame {
        ambient_dim: d,
        plane_dim: k,
        basis,
    };
    debug_assert!(gram_defect(&frame) <= ORTHO_TOL);
    Ok(frame)
}

/// Largest deviation of the Gram matrix from the identity.
pub fn gram_defect(frame: &Frame) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, u) in frame.basis_vectors().enumerate() {
        for (j, v) in frame.basis_vectors().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(u, v) - want).abs());
        }
    }
    worst
}

/// Hausdorff distance between the unit spheres of `span(s)` and `span(t)`.
pub fn metric(s: &Frame, t: &Frame) -> Result<Distance> {
    s.check_compatible(t)?;
    Ok(Distance(metric_unchecked(s, t)))
}

/// [`metric`] without the dimension check; callers guarantee compatibility.
pub(crate) fn metric_unchecked(s: &Frame, t: &Frame) -> f64 {
    // Fixed argument order makes the result bitwise symmetric.
    let (a, b) = match s.total_cmp(t) {
        Ordering::Greater => (t, s),
        _ => (s, t),
    };
    let cos_max = smallest_cross_singular_value(a, b);
    let value = if cos_max > 0.9 {
        // Small angles: the projection residual keeps full relative accuracy.
        let sin_max = largest_residual_singular_value(a, b).min(1.0);
        2.0 * (0.5 * sin_max.asin()).sin()
    } else {
        (2.0 - 2.0 * cos_max).max(0.0).sqrt()
    };
    value.min(std::f64::consts::SQRT_2)
}

/// True when `metric(s, t) < separation`, skipping the small-angle refinement
/// whenever the coarse value decides it.
pub(crate) fn closer_than(s: &Frame, t: &Frame, separation: f64) -> bool {
    let cos_max = smallest_cross_singular_value(s, t);
    let coarse = (2.0 - 2.0 * cos_max).max(0.0).sqrt();
    if (coarse - separation).abs() > 1e-6 {
        return coarse < separation;
    }
    metric_unchecked(s, t) < separation
}

/// Smallest singular value of the cross-Gram matrix `M_ij = x_i^s · x_j^t`,
/// i.e. the cosine of the largest principal angle.
fn smallest_cross_singular_value(s: &Frame, t: &Frame) -> f64 {
    let k = s.plane_dim;
    match k {
        1 => dot(&s.basis, &t.basis).abs().min(1.0),
        2 => {
            let m00 = dot(s.basis_vector(0), t.basis_vector(0));
            let m01 = dot(s.basis_vector(0), t.basis_vector(1));
            let m10 = dot(s.basis_vector(1), t.basis_vector(0));
            let m11 = dot(s.basis_vector(1), t.basis_vector(1));
            let (_, small) = singular_values_2x2(m00, m01, m10, m11);
            small.min(1.0)
        }
        _ => {
            let m = DMatrix::from_fn(k, k, |i, j| dot(s.basis_vector(i), t.basis_vector(j)));
            m.singular_values()
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min)
                .clamp(0.0, 1.0)
        }
    }
}

/// Largest singular value of `(I - P_s) X_t`, the sine of the largest principal angle.
fn largest_residual_singular_value(s: &Frame, t: &Frame) -> f64 {
    let d = s.ambient_dim;
    let k = s.plane_dim;
    let mut residual = t.basis.clone();
    for r in residual.chunks_exact_mut(d) {
        for _ in 0..2 {
            for x in s.basis_vectors() {
                let c = dot(r, x);
                r.iter_mut().zip(x).for_each(|(a, b)| *a -= c * b);
            }
        }
    }
    match k {
        1 => norm(&residual),
        _ => {
            let g = DMatrix::from_fn(k, k, |i, j| {
                dot(&residual[i * d..(i + 1) * d], &residual[j * d..(j + 1) * d])
            });
            g.symmetric_eigenvalues()
                .iter()
                .copied()
                .fold(0.0, f64::max)
                .max(0.0)
                .sqrt()
        }
    }
}

/// Singular values `(large, small)` of `[[a, b], [c, e]]`.
fn singular_values_2x2(a: f64, b: f64, c: f64, e: f64) -> (f64, f64) {
    let t = a * a + b * b + c * c + e * e;
    let det = (a * e - b * c).abs();
    let disc = ((t - 2.0 * det) * (t + 2.0 * det)).max(0.0).sqrt();
    let large = (0.5 * (t + disc)).sqrt();
    let small = if large > 0.0 { det / large } else { 0.0 };
    (large, small)
}

/// Brute-force Hausdorff distance between the unit spheres of the two spans,
/// from `n_samples` quasi-uniform points on each.
pub fn metric_oracle(s: &Frame, t: &Frame, n_samples: usize) -> Result<Distance> {
    s.check_compatible(t)?;
    if n_samples < 100 {
        return Err(Error::BadParameters(format!(
            "metric oracle needs at least 100 samples, got {n_samples}"
        )));
    }
    let a = subspace_sphere_points(s, n_samples);
    let b = subspace_sphere_points(t, n_samples);
    let d = s.ambient_dim;
    let ab = directed_hausdorff(&a, &b, d);
    let ba = directed_hausdorff(&b, &a, d);
    Ok(Distance(ab.max(ba)))
}

fn subspace_sphere_points(frame: &Frame, n: usize) -> Vec<f64> {
    let d = frame.ambient_dim;
    let coeffs = sphere_points::quasi_uniform(frame.plane_dim, n, 0.0, 0x5eed);
    let mut out = Vec::with_capacity(coeffs.len() * d);
    for c in coeffs {
        let mut p = vec![0.0; d];
        for (ci, x) in c.iter().zip(frame.basis_vectors()) {
            p.iter_mut().zip(x).for_each(|(o, v)| *o += ci * v);
        }
        out.extend_from_slice(&p);
    }
    out
}

/// `sup_{a ∈ A} inf_{b ∈ B} |a - b|` over flat point lists.
fn directed_hausdorff(a: &[f64], b: &[f64], d: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for p in a.chunks_exact(d) {
        let mut best = f64::INFINITY;
        for q in b.chunks_exact(d) {
            let mut s = 0.0;
            for (x, y) in p.iter().zip(q) {
                let t = x - y;
                s += t * t;
            }
            if s < best {
                best = s;
            }
        }
        worst = worst.max(best);
    }
    worst.sqrt()
}

pub(crate) fn check_dims(d: usize, k: usize) -> Result<()> {
    if d < 2 || k < 1 || k >= d {
        return Err(Error::BadDimensions(format!(
            "need 1 <= k < d with d >= 2, got d = {d}, k = {k}"
        )));
    }
    Ok(())
}

fn gaussian_frame(rng: &mut rand_chacha::ChaCha8Rng, d: usize, k: usize) -> Frame {
    loop {
        let raw: Vec<Vec<f64>> = (0..k).map(|_| rng::gaussian_vec(rng, d)).collect();
        // Rank deficiency has probability zero; redraw if it ever happens.
        if let Ok(f) = orthonormalize(&raw) {
            return f;
        }
    }
}

/// Draw from the orthogonally invariant distribution on `G(d,k)`.
pub fn random_subspace(d: usize, k: usize, seed: u64) -> Result<Frame> {
    check_dims(d, k)?;
    Ok(gaussian_frame(&mut rng::stream(seed, Domain::Subspace, 0), d, k))
}

/// Infinite stream of invariant draws; item `i` depends only on `(seed, i)`.
pub fn uniform_stream(d: usize, k: usize, seed: u64) -> Result<impl Iterator<Item = Frame>> {
    invariant_stream(d, k, seed, Domain::NetStream)
}

pub(crate) fn invariant_stream(
    d: usize,
    k: usize,
    seed: u64,
    domain: Domain,
) -> Result<impl Iterator<Item = Frame>> {
    check_dims(d, k)?;
    Ok((0u64..).map(move |i| gaussian_frame(&mut rng::stream(seed, domain, i), d, k)))
}

/// Greedy `separation`-net over the first `budget` frames of `stream`.
///
/// A candidate becomes a center when it is at distance `>= separation` from
/// every existing center, so the output is separated and every examined
/// candidate lies within `separation` of some center.
pub fn greedy_net<I>(stream: I, separation: f64, budget: usize) -> Vec<Frame>
where
    I: IntoIterator<Item = Frame>,
{
    let mut centers: Vec<Frame> = Vec::new();
    for candidate in stream.into_iter().take(budget) {
        if let Some(first) = centers.first() {
            if first.check_compatible(&candidate).is_err() {
                continue;
            }
        }
        if centers.iter().all(|c| !closer_than(c, &candidate, separation)) {
            centers.push(candidate);
        }
    }
    centers
}

/// Result of [`covering_exponent`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringFit {
    pub etas: Vec<f64>,
    pub net_sizes: Vec<usize>,
    pub exponent: f64,
    pub r_squared: f64,
}

/// Slope of `log N_η` against `-log η` for greedy nets of `budget` invariant draws.
///
/// The grid must hold at least four strictly decreasing values in `(0, 1/2]`.
pub fn covering_exponent(
    d: usize,
    k: usize,
    eta_grid: &[f64],
    budget: usize,
    seed: u64,
) -> Result<CoveringFit> {
    check_dims(d, k)?;
    validate_decreasing_grid(eta_grid, 4, 0.5)?;
    if budget == 0 {
        return Err(Error::BadParameters("budget must be positive".into()));
    }
    let stream: Vec<Frame> = uniform_stream(d, k, seed)?.take(budget).collect();
    let net_sizes: Vec<usize> = eta_grid
        .iter()
        .map(|&eta| greedy_net(stream.iter().cloned(), eta, budget).len())
        .collect();
    let sizes: Vec<f64> = net_sizes.iter().map(|&n| n as f64).collect();
    let inv: Vec<f64> = eta_grid.iter().map(|e| 1.0 / e).collect();
    let line = fit::log_log(&inv, &sizes)
        .ok_or_else(|| Error::InsufficientGrid("degenerate covering data".into()))?;
    Ok(CoveringFit {
        etas: eta_grid.to_vec(),
        net_sizes,
        exponent: line.slope,
        r_squared: line.r_squared,
    })
}

pub(crate) fn validate_decreasing_grid(grid: &[f64], min_len: usize, max_value: f64) -> Result<()> {
    if grid.len() < min_len {
        return Err(Error::InsufficientGrid(format!(
            "need at least {min_len} grid values, got {}",
            grid.len()
        )));
    }
    if grid.iter().any(|&e| !(e > 0.0 && e <= max_value)) {
        return Err(Error::InsufficientGrid(format!(
            "grid values must lie in (0, {max_value}]"
        )));
    }
    if grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InsufficientGrid("grid must be strictly decreasing".into()));
    }
    Ok(())
}
