//! Experiment configs: TOML with flat dotted keys such as `family.d = 3`.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::orientation::TranslationStrategy;

/// Which experiment to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Scaling,
    Decay,
    MetricOracle,
    Covering,
    DualSphere,
    Cone,
    Bump,
    Identities,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Scaling => "scaling",
            Kind::Decay => "decay",
            Kind::MetricOracle => "metric-oracle",
            Kind::Covering => "covering",
            Kind::DualSphere => "dual-sphere",
            Kind::Cone => "cone",
            Kind::Bump => "bump",
            Kind::Identities => "identities",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    /// The whole Grassmannian `G(d,k)`.
    Uniform,
    /// Lines through a non-degenerate `(d-2)`-sphere of directions.
    Sphere,
    /// All `k`-planes inside the hyperplane `x_d = 0`.
    Hyperplane,
    /// Rays of the 45° cone about `e_d`.
    Cone,
    /// Surface measure of the unit sphere of `R^d`.
    Surface,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TranslationKind {
    Zero,
    RandomBox,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<FamilyName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Net parameter: atoms are `1/n`-separated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Atom count for sphere and cone families.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polar_angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<Vec<f64>>,
    /// Dual-sphere centers move as `x_r = r·v`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_velocity: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetConfig {
    /// Invariant draws for greedy nets and Voronoi masses.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub net: Option<usize>,
    /// Random directions tried per slab search.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<usize>,
    /// Directions per shell, oracle points, or grid points, by kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Random pairs or triples checked.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranslationConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<TranslationKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlayConfig {
    /// `α` of the slab/tail split bound drawn over decay plots.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// File name stem for the report, CSV and plot script.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stem: Option<String>,
}

/// A parsed experiment config. The seed is mandatory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default)]
    pub family: FamilyConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub budget: BudgetConfig,
    #[serde(default)]
    pub translations: TranslationConfig,
    #[serde(default)]
    pub overlay: OverlayConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// A config that failed to parse or validate, naming the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn at(field: &str, message: impl Into<String>) -> Self {
        ConfigError {
            field: Some(field.to_string()),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.field {
            Some(field) => write!(f, "{field}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// An orientation family with every parameter resolved.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyPlan {
    Uniform { d: usize, k: usize, n: usize, net: usize },
    Sphere { d: usize, axis: Vec<f64>, polar_angle: f64, atoms: usize },
    Hyperplane { d: usize, k: usize, n: usize, net: usize },
    Cone { d: usize, atoms: usize },
}

impl FamilyPlan {
    pub fn ambient_dim(&self) -> usize {
        match self {
            FamilyPlan::Uniform { d, .. }
            | FamilyPlan::Sphere { d, .. }
            | FamilyPlan::Hyperplane { d, .. }
            | FamilyPlan::Cone { d, .. } => *d,
        }
    }
}

/// What a validated config asks for.
#[derive(Debug, Clone, PartialEq)]
pub enum Plan {
    Scaling { family: FamilyPlan, eta: Vec<f64>, search: usize },
    Decay { family: FamilyPlan, translations: TranslationStrategy, radii: Vec<f64>, samples: usize, alpha: f64 },
    SurfaceDecay { d: usize, radii: Vec<f64>, samples: usize },
    DualSphere { d: usize, velocity: Vec<f64>, radii: Vec<f64>, samples: usize },
    MetricOracle { d: usize, k: usize, pairs: usize, samples: usize },
    Covering { d: usize, k: usize, eta: Vec<f64>, net: usize },
    Bump { u: Vec<f64>, samples: usize },
    Identities { triples: usize, assignments: usize, family: FamilyPlan },
}

const DEFAULT_NET_BUDGET: usize = 50_000;
const DEFAULT_SEARCH_BUDGET: usize = 2000;
const DEFAULT_ALPHA: f64 = 0.9;

impl ExperimentConfig {
    /// Parses and validates TOML text.
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError {
            field: None,
            message: e.to_string().trim_end().to_string(),
        })?;
        config.plan()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configs always serialize")
    }

    /// Resolves defaults and checks every field the experiment needs.
    pub fn plan(&self) -> Result<Plan, ConfigError> {
        let b = &self.budget;
        match self.kind {
            Kind::Scaling => {
                let family = self.family_plan(&[FamilyName::Uniform, FamilyName::Sphere, FamilyName::Hyperplane])?;
                let eta = self.eta_grid(5, 0.25)?;
                let search = positive(b.search, "budget.search", DEFAULT_SEARCH_BUDGET)?;
                if search < 10 {
                    return Err(ConfigError::at("budget.search", "must be at least 10"));
                }
                Ok(Plan::Scaling { family, eta, search })
            }
            Kind::Decay => {
                let radii = self.radii()?;
                let samples = self.shell_samples()?;
                if self.family.name == Some(FamilyName::Surface) {
                    let d = self.dim(2)?;
                    return Ok(Plan::SurfaceDecay { d, radii, samples });
                }
                let family = self.family_plan(&[
                    FamilyName::Uniform,
                    FamilyName::Sphere,
                    FamilyName::Hyperplane,
                    FamilyName::Cone,
                    FamilyName::Surface,
                ])?;
                let translations = self.translations(family.ambient_dim())?;
                let alpha = self.overlay.alpha.unwrap_or(DEFAULT_ALPHA);
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(ConfigError::at("overlay.alpha", "must lie in (0, 1)"));
                }
                Ok(Plan::Decay { family, translations, radii, samples, alpha })
            }
            Kind::Cone => {
                if let Some(name) = self.family.name {
                    if name != FamilyName::Cone {
                        return Err(ConfigError::at("family.name", "cone experiments use the cone family"));
                    }
                }
                let family = self.cone_family()?;
                Ok(Plan::Decay {
                    family,
                    translations: TranslationStrategy::Zero,
                    radii: self.radii()?,
                    samples: self.shell_samples()?,
                    alpha: self.overlay.alpha.unwrap_or(DEFAULT_ALPHA),
                })
            }
            Kind::DualSphere => {
                let d = self.dim(2)?;
                let velocity = self.family.center_velocity.clone().unwrap_or_else(|| vec![0.0; d]);
                if velocity.len() != d || velocity.iter().any(|v| !v.is_finite()) {
                    return Err(ConfigError::at("family.center_velocity", format!("must be a finite vector of length {d}")));
                }
                Ok(Plan::DualSphere {
                    d,
                    velocity,
                    radii: self.radii()?,
                    samples: self.shell_samples()?,
                })
            }
            Kind::MetricOracle => {
                let (d, k) = self.dims()?;
                let samples = positive(b.samples, "budget.samples", 4096)?;
                if samples < 100 {
                    return Err(ConfigError::at("budget.samples", "the oracle needs at least 100 points"));
                }
                Ok(Plan::MetricOracle {
                    d,
                    k,
                    pairs: positive(b.pairs, "budget.pairs", 100)?,
                    samples,
                })
            }
            Kind::Covering => {
                let (d, k) = self.dims()?;
                Ok(Plan::Covering {
                    d,
                    k,
                    eta: self.eta_grid(4, 0.5)?,
                    net: positive(b.net, "budget.net", DEFAULT_NET_BUDGET)?,
                })
            }
            Kind::Bump => {
                let u = self.grid.u.clone().unwrap_or_else(|| (0..=30).map(|j| 10f64.powf(j as f64 / 10.0)).collect());
                if u.is_empty() || u.iter().any(|v| !v.is_finite()) {
                    return Err(ConfigError::at("grid.u", "must be a nonempty list of finite values"));
                }
                Ok(Plan::Bump {
                    u,
                    samples: positive(b.samples, "budget.samples", 100_000)?,
                })
            }
            Kind::Identities => Ok(Plan::Identities {
                triples: positive(b.pairs, "budget.pairs", 1000)?,
                assignments: positive(b.samples, "budget.samples", 10)?,
                family: self.family_plan(&[FamilyName::Uniform, FamilyName::Sphere, FamilyName::Hyperplane])?,
            }),
        }
    }

    fn dim(&self, min: usize) -> Result<usize, ConfigError> {
        let d = self.family.d.ok_or_else(|| ConfigError::at("family.d", "missing"))?;
        if d < min {
            return Err(ConfigError::at("family.d", format!("must be at least {min}")));
        }
        Ok(d)
    }

    fn dims(&self) -> Result<(usize, usize), ConfigError> {
        let d = self.dim(2)?;
        let k = self.family.k.ok_or_else(|| ConfigError::at("family.k", "missing"))?;
        if k < 1 || k >= d {
            return Err(ConfigError::at("family.k", format!("must satisfy 1 <= k < d = {d}")));
        }
        Ok((d, k))
    }

    fn net_parameter(&self) -> Result<usize, ConfigError> {
        let n = self.family.n.ok_or_else(|| ConfigError::at("family.n", "missing"))?;
        if n < 2 {
            return Err(ConfigError::at("family.n", "must be at least 2"));
        }
        Ok(n)
    }

    fn cone_family(&self) -> Result<FamilyPlan, ConfigError> {
        let d = self.dim(3)?;
        let atoms = positive(self.family.atoms, "family.atoms", 4096)?;
        if atoms < 64 {
            return Err(ConfigError::at("family.atoms", "the cone needs at least 64 rays"));
        }
        Ok(FamilyPlan::Cone { d, atoms })
    }

    fn family_plan(&self, allowed: &[FamilyName]) -> Result<FamilyPlan, ConfigError> {
        let name = self.family.name.ok_or_else(|| ConfigError::at("family.name", "missing"))?;
        if !allowed.contains(&name) || name == FamilyName::Surface {
            return Err(ConfigError::at(
                "family.name",
                format!("{} experiments do not support this family", self.kind.as_str()),
            ));
        }
        let net = positive(self.budget.net, "budget.net", DEFAULT_NET_BUDGET)?;
        match name {
            FamilyName::Uniform => {
                let (d, k) = self.dims()?;
                Ok(FamilyPlan::Uniform { d, k, n: self.net_parameter()?, net })
            }
            FamilyName::Hyperplane => {
                let (d, k) = self.dims()?;
                if d < 3 || k >= d - 1 {
                    return Err(ConfigError::at("family.k", "hyperplane families need 1 <= k < d - 1"));
                }
                Ok(FamilyPlan::Hyperplane { d, k, n: self.net_parameter()?, net })
            }
            FamilyName::Sphere => {
                let d = self.dim(3)?;
                let axis = self.family.axis.clone().unwrap_or_else(|| {
                    let mut e = vec![0.0; d];
                    e[d - 1] = 1.0;
                    e
                });
                if axis.len() != d || !(crate::linalg::norm(&axis) > 0.0) {
                    return Err(ConfigError::at("family.axis", format!("must be a nonzero vector of length {d}")));
                }
                let polar_angle = self.family.polar_angle.unwrap_or(FRAC_PI_4);
                if !(polar_angle > 0.0 && polar_angle < std::f64::consts::FRAC_PI_2) {
                    return Err(ConfigError::at("family.polar_angle", "must lie in (0, π/2)"));
                }
                let atoms = positive(self.family.atoms, "family.atoms", 4096)?;
                if atoms < 8 {
                    return Err(ConfigError::at("family.atoms", "must be at least 8"));
                }
                Ok(FamilyPlan::Sphere { d, axis, polar_angle, atoms })
            }
            FamilyName::Cone => self.cone_family(),
            FamilyName::Surface => unreachable!("rejected above"),
        }
    }

    fn translations(&self, d: usize) -> Result<TranslationStrategy, ConfigError> {
        match self.translations.strategy.unwrap_or(TranslationKind::Zero) {
            TranslationKind::Zero => Ok(TranslationStrategy::Zero),
            TranslationKind::RandomBox => {
                let side = self.translations.side.unwrap_or(1.0);
                if !(side >= 0.0) || side * (d as f64).sqrt() > crate::orientation::MAX_TRANSLATION_NORM {
                    return Err(ConfigError::at(
                        "translations.side",
                        "box must be nonnegative and fit in the translation ball of radius 10",
                    ));
                }
                Ok(TranslationStrategy::RandomBox { side })
            }
        }
    }

    fn eta_grid(&self, min_len: usize, max_value: f64) -> Result<Vec<f64>, ConfigError> {
        let eta = self.grid.eta.clone().ok_or_else(|| ConfigError::at("grid.eta", "missing"))?;
        crate::grassmannian::validate_decreasing_grid(&eta, min_len, max_value)
            .map_err(|e| ConfigError::at("grid.eta", strip_prefix(&e.to_string())))?;
        Ok(eta)
    }

    fn radii(&self) -> Result<Vec<f64>, ConfigError> {
        let radii = self
            .grid
            .radii
            .clone()
            .unwrap_or_else(|| crate::decay::dyadic_radii(2, 9));
        crate::decay::validate_radii(&radii).map_err(|e| ConfigError::at("grid.radii", strip_prefix(&e.to_string())))?;
        Ok(radii)
    }

    fn shell_samples(&self) -> Result<usize, ConfigError> {
        let m = positive(self.budget.samples, "budget.samples", crate::decay::DEFAULT_SAMPLES)?;
        if m < 16 {
            return Err(ConfigError::at("budget.samples", "need at least 16 directions per shell"));
        }
        Ok(m)
    }
}

fn positive(value: Option<usize>, field: &str, default: usize) -> Result<usize, ConfigError> {
    match value {
        Some(0) => Err(ConfigError::at(field, "must be positive")),
        Some(v) => Ok(v),
        None => Ok(default),
    }
}

fn strip_prefix(message: &str) -> String {
    message
        .split_once(": ")
        .map_or(message, |(_, rest)| rest)
        .to_string()
}
