//! Bundled configs, one or more per acceptance criterion.

use super::config::ExperimentConfig;

/// A named config shipped inside the binary.
#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    pub text: &'static str,
}

impl Fixture {
    pub fn config(&self) -> ExperimentConfig {
        ExperimentConfig::from_toml_str(self.text).expect("bundled fixtures are valid")
    }

    pub fn description(&self) -> String {
        self.config().description.unwrap_or_default()
    }
}

macro_rules! fixtures {
    ($($name:literal),* $(,)?) => {
        &[$(Fixture { name: $name, text: include_str!(concat!("../../fixtures/", $name, ".toml")) }),*]
    };
}

pub const FIXTURES: &[Fixture] = fixtures![
    "bump_contract",
    "cone_d3",
    "covering_g21",
    "covering_g31",
    "covering_g42",
    "decay_circle",
    "decay_kakeya_d2",
    "dual_sphere_d2",
    "metric_oracle_g31",
    "metric_oracle_g42",
    "metric_oracle_g52",
    "proof_identities",
    "scaling_hyperplane_d3",
    "scaling_sphere_d3",
    "scaling_sphere_d4",
];

pub fn fixture(name: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_parses_and_plans() {
        assert!(FIXTURES.len() >= 8);
        for f in FIXTURES {
            let c = f.config();
            c.plan().unwrap_or_else(|e| panic!("{}: {e}", f.name));
            assert!(!f.description().is_empty(), "{} has no description", f.name);
        }
        assert!(fixture("decay_kakeya_d2").is_some());
        assert!(fixture("cone_d3").is_some());
        assert!(fixture("nope").is_none());
    }
}
