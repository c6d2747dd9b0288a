//! Discrete orientation measures `γ_n` on `G(d,k)` and the translated
//! measure specifications built from them.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use rand::RngExt;
use serde::{Deserialize, Serialize};

use crate::bump::BumpProfile;
use crate::error::{Error, Result};
use crate::grassmannian::{self, metric_unchecked, orthonormalize, Frame};
use crate::linalg::{self, complement_basis, norm};
use crate::rng::{self, Domain};
use crate::sphere_points;

const MASS_TOL: f64 = 1e-9;
/// Translations are kept inside this ball so that supports stay compact.
pub const MAX_TRANSLATION_NORM: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub frame: Frame,
    pub mass: f64,
}

/// Probability measure on finitely many points of `G(d,k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteOrientationMeasure {
    atoms: Vec<Atom>,
    ambient_dim: usize,
    plane_dim: usize,
    /// Net scale `1/n`, or 0 for families given exactly.
    separation: f64,
}

impl DiscreteOrientationMeasure {
    /// Validates dimensions and that the masses are positive and sum to one.
    pub fn new(atoms: Vec<Atom>, separation: f64) -> Result<Self> {
        let first = atoms
            .first()
            .ok_or_else(|| Error::BadParameters("orientation measure needs at least one atom".into()))?;
        let (d, k) = (first.frame.ambient_dim(), first.frame.plane_dim());
        if let Some(a) = atoms
            .iter()
            .find(|a| a.frame.ambient_dim() != d || a.frame.plane_dim() != k)
        {
            return Err(Error::DimensionMismatch {
                expected: format!("G({d},{k})"),
                found: format!("G({},{})", a.frame.ambient_dim(), a.frame.plane_dim()),
            });
        }
        if atoms.iter().any(|a| !(a.mass > 0.0) || !a.mass.is_finite()) {
            return Err(Error::BadParameters("atom masses must be positive".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.mass).sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::BadParameters(format!("masses sum to {total}, not 1")));
        }
        if !(separation >= 0.0) {
            return Err(Error::BadParameters("separation must be nonnegative".into()));
        }
        Ok(Self {
            atoms,
            ambient_dim: d,
            plane_dim: k,
            separation,
        })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn plane_dim(&self) -> usize {
        self.plane_dim
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }
}

/// Net of `G(d,k)` at scale `1/n` weighted by Monte-Carlo Voronoi masses of
/// the invariant measure.
///
/// The net is greedy over `budget` invariant draws; the masses come from a
/// second, independent set of `budget` draws, each assigned to its nearest
/// center. Centers that capture no sample carry no mass and are dropped.
/// Basis vectors are oriented with [`Frame::canonical`].
pub fn uniform_grassmannian_measure(
    d: usize,
    k: usize,
    n: usize,
    budget: usize,
    seed: u64,
) -> Result<DiscreteOrientationMeasure> {
    grassmannian::check_dims(d, k)?;
    if n < 2 {
        return Err(Error::BadParameters(format!("net parameter must be >= 2, got {n}")));
    }
    if budget == 0 {
        return Err(Error::BadParameters("budget must be positive".into()));
    }
    let separation = 1.0 / n as f64;
    let centers = grassmannian::greedy_net(grassmannian::uniform_stream(d, k, seed)?, separation, budget);

    let mut counts = vec![0usize; centers.len()];
    for sample in grassmannian::invariant_stream(d, k, seed, Domain::VoronoiSamples)?.take(budget) {
        let nearest = centers
            .iter()
            .enumerate()
            .map(|(i, c)| (i, metric_unchecked(c, &sample)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
            .expect("net is nonempty");
        counts[nearest] += 1;
    }
    let captured: usize = counts.iter().sum();
    let atoms = centers
        .into_iter()
        .zip(counts)
        .filter(|(_, c)| *c > 0)
        .map(|(frame, c)| Atom {
            frame: frame.canonical(),
            mass: c as f64 / captured as f64,
        })
        .collect();
    DiscreteOrientationMeasure::new(atoms, separation)
}

/// Lines through `cos(a)·e + sin(a)·v` for `v` quasi-uniform on the unit
/// sphere of `e^⊥`, with equal masses.
///
/// The directions form a `(d-2)`-sphere of chordal diameter `2 sin a < 2`.
pub fn nondegenerate_sphere_measure(
    d: usize,
    axis: &[f64],
    polar_angle: f64,
    m: usize,
    seed: u64,
) -> Result<DiscreteOrientationMeasure> {
    if d < 3 {
        return Err(Error::BadDimensions(format!("sphere families need d >= 3, got {d}")));
    }
    if axis.len() != d {
        return Err(Error::DimensionMismatch {
            expected: format!("axis of length {d}"),
            found: format!("{}", axis.len()),
        });
    }
    if polar_angle >= FRAC_PI_2 - 1e-6 {
        return Err(Error::DegenerateSphere { polar_angle });
    }
    if !(polar_angle > 0.0) {
        return Err(Error::BadParameters(format!("polar angle must be positive, got {polar_angle}")));
    }
    if m < 8 {
        return Err(Error::BadParameters(format!("need at least 8 atoms, got {m}")));
    }
    let mut e = axis.to_vec();
    if !(linalg::normalize(&mut e) > 1e-12) {
        return Err(Error::BadParameters("axis must be nonzero".into()));
    }
    let perp = complement_basis(&e);
    let offset: f64 = rng::stream(seed, Domain::SphereRotation, 0).random();
    let coords = sphere_points::quasi_uniform(d - 1, m, offset, seed);
    let (ca, sa) = (polar_angle.cos(), polar_angle.sin());
    let mass = 1.0 / m as f64;
    let atoms = coords
        .iter()
        .map(|c| {
            let mut u: Vec<f64> = e.iter().map(|x| ca * x).collect();
            for (ci, b) in c.iter().zip(&perp) {
                u.iter_mut().zip(b).for_each(|(o, x)| *o += sa * ci * x);
            }
            orthonormalize(&[u]).map(|frame| Atom { frame, mass })
        })
        .collect::<Result<Vec<_>>>()?;
    DiscreteOrientationMeasure::new(atoms, 0.0)
}

/// Uniform measure on the `k`-planes contained in the hyperplane `span(v)`.
///
/// Built as [`uniform_grassmannian_measure`] on `G(d-1,k)` and embedded
/// through the orthonormal `(d-1)`-frame `v`.
pub fn hyperplane_family_measure(
    d: usize,
    k: usize,
    v: &Frame,
    n: usize,
    budget: usize,
    seed: u64,
) -> Result<DiscreteOrientationMeasure> {
    if d < 3 || k < 1 || k >= d - 1 {
        return Err(Error::BadDimensions(format!(
            "hyperplane families need 1 <= k < d - 1, got d = {d}, k = {k}"
        )));
    }
    if v.ambient_dim() != d || v.plane_dim() != d - 1 {
        return Err(Error::BadDimensions(format!(
            "hyperplane frame must be a ({}, {}) frame, got ({}, {})",
            d,
            d - 1,
            v.ambient_dim(),
            v.plane_dim()
        )));
    }
    let inner = uniform_grassmannian_measure(d - 1, k, n, budget, seed)?;
    let atoms = inner
        .atoms
        .iter()
        .map(|a| {
            Ok(Atom {
                frame: a.frame.embed(v)?.canonical(),
                mass: a.mass,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    DiscreteOrientationMeasure::new(atoms, inner.separation)
}

/// How to choose the translation `t_s` of each atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TranslationStrategy {
    Zero,
    /// Independent uniform points of `[0, side]^d`.
    RandomBox { side: f64 },
    /// One vector per atom, in atom order.
    Fixed(Vec<Vec<f64>>),
}

/// An orientation measure with one translation per atom and a bump profile;
/// determines the measure `μ` supported on the union of translated cubes.
#[derive(Debug, Clone)]
pub struct KakeyaMeasureSpec {
    orientation: Arc<DiscreteOrientationMeasure>,
    /// Translations stored contiguously, atom `j` at `[j*d, (j+1)*d)`.
    translations: Vec<f64>,
    bump: Arc<BumpProfile>,
}

impl KakeyaMeasureSpec {
    pub fn orientation(&self) -> &DiscreteOrientationMeasure {
        &self.orientation
    }

    pub fn translation(&self, atom: usize) -> &[f64] {
        let d = self.orientation.ambient_dim;
        &self.translations[atom * d..(atom + 1) * d]
    }

    pub fn translations(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.translations.chunks_exact(self.orientation.ambient_dim)
    }

    pub fn bump(&self) -> &BumpProfile {
        &self.bump
    }

    pub fn ambient_dim(&self) -> usize {
        self.orientation.ambient_dim
    }

    /// Replaces the bump profile.
    pub fn with_bump(mut self, bump: Arc<BumpProfile>) -> Self {
        self.bump = bump;
        self
    }
}

/// Attaches translations to `measure` using the shared default bump profile.
pub fn assign_translations(
    measure: &DiscreteOrientationMeasure,
    strategy: &TranslationStrategy,
    seed: u64,
) -> Result<KakeyaMeasureSpec> {
    assign_translations_shared(Arc::new(measure.clone()), strategy, seed)
}

/// [`assign_translations`] without copying the orientation measure.
pub fn assign_translations_shared(
    measure: Arc<DiscreteOrientationMeasure>,
    strategy: &TranslationStrategy,
    seed: u64,
) -> Result<KakeyaMeasureSpec> {
    let d = measure.ambient_dim;
    let n = measure.len();
    let translations: Vec<f64> = match strategy {
        TranslationStrategy::Zero => vec![0.0; n * d],
        TranslationStrategy::RandomBox { side } => {
            if !(*side >= 0.0) || side * (d as f64).sqrt() > MAX_TRANSLATION_NORM {
                return Err(Error::BadParameters(format!(
                    "box side {side} leaves the translation ball of radius {MAX_TRANSLATION_NORM}"
                )));
            }
            (0..n as u64)
                .flat_map(|j| {
                    let mut r = rng::stream(seed, Domain::Translations, j);
                    (0..d).map(move |_| side * r.random::<f64>()).collect::<Vec<_>>()
                })
                .collect()
        }
        TranslationStrategy::Fixed(list) => {
            if list.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: list.len(),
                });
            }
            if let Some(bad) = list.iter().find(|t| t.len() != d) {
                return Err(Error::DimensionMismatch {
                    expected: format!("translations of length {d}"),
                    found: format!("{}", bad.len()),
                });
            }
            if list
                .iter()
                .any(|t| t.iter().any(|x| !x.is_finite()) || norm(t) > MAX_TRANSLATION_NORM)
            {
                return Err(Error::BadParameters(format!(
                    "translations must be finite with norm <= {MAX_TRANSLATION_NORM}"
                )));
            }
            list.iter().flatten().copied().collect()
        }
    };
    Ok(KakeyaMeasureSpec {
        orientation: measure,
        translations,
        bump: BumpProfile::shared(),
    })
}
