//! Scenario configuration: a flat TOML schema selecting a domain, a catalog
//! map, a profile, sweep directions, a t grid, and the checks to run.

use fharmonic::error::Error as CoreError;
use fharmonic::manifold::{build_sphere_domain, build_torus_domain, DomainManifold};
use fharmonic::map::{
    clifford_torus, constant_map, equator_inclusion, identity_sphere, spherical_cap, SmoothMap,
};
use fharmonic::profile::FProfile;
use fharmonic::sphere::SpherePoint;
use fharmonic::variation::seeded_directions;
use nalgebra::DVector;
use serde::Deserialize;
use std::path::PathBuf;
use std::sync::Arc;

/// Errors surfaced by the runner, split by exit code: configuration
/// problems exit with 2, verdict failures with 1.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Internal(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::Config(msg) => CliError::Config(msg),
            other => CliError::Internal(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Energy,
    Stress,
    Sweep,
    Admissibility,
    Lemma2,
    Decomposition,
    Theorem,
}

impl CheckKind {
    pub fn label(&self) -> &'static str {
        match self {
            CheckKind::Energy => "energy",
            CheckKind::Stress => "stress",
            CheckKind::Sweep => "sweep",
            CheckKind::Admissibility => "admissibility",
            CheckKind::Lemma2 => "lemma2",
            CheckKind::Decomposition => "decomposition",
            CheckKind::Theorem => "theorem",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    /// The theorem pipeline must end Verified (strict or not).
    TheoremVerified,
    /// The theorem pipeline must end Verified with strict positivity.
    TheoremVerifiedStrict,
    /// The theorem pipeline must reject the hypotheses.
    HypothesesFail,
    /// Only the admissibility verdict is gating.
    Admissible,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub kind: String,
    pub dim: usize,
    pub resolution: usize,
    #[serde(default)]
    pub periods: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    pub name: String,
    #[serde(default)]
    pub target_dim: Option<usize>,
    #[serde(default)]
    pub latitude: Option<f64>,
    #[serde(default)]
    pub base_point: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub name: String,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DirectionsConfig {
    pub count: usize,
    pub seed: u64,
    pub explicit: Option<Vec<Vec<f64>>>,
}

impl Default for DirectionsConfig {
    fn default() -> Self {
        DirectionsConfig {
            count: 8,
            seed: 42,
            explicit: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub explicit: Option<Vec<f64>>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            start: 0.0,
            stop: 2.0,
            step: 0.1,
            explicit: None,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub checks: Vec<CheckKind>,
    #[serde(default)]
    pub expect: Option<Expectation>,
    pub domain: DomainConfig,
    pub map: MapConfig,
    pub profile: ProfileConfig,
    #[serde(default)]
    pub directions: DirectionsConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ScenarioConfig {
    /// Parses a TOML scenario; parse errors carry line/column anchors.
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// The gating expectation: explicit when configured, otherwise the
    /// theorem check gates when present, else admissibility.
    pub fn effective_expectation(&self) -> Expectation {
        if let Some(e) = self.expect {
            return e;
        }
        if self.checks.contains(&CheckKind::Theorem) {
            Expectation::TheoremVerified
        } else {
            Expectation::Admissible
        }
    }
}

/// A scenario with all of its objects constructed.
pub struct BuiltScenario {
    pub config: ScenarioConfig,
    pub domain: Arc<DomainManifold>,
    pub map: SmoothMap,
    pub profile: FProfile,
    pub directions: Vec<DVector<f64>>,
    pub grid: Vec<f64>,
}

pub fn build_scenario(config: ScenarioConfig) -> CliResult<BuiltScenario> {
    let domain = match config.domain.kind.as_str() {
        "sphere" => Arc::new(build_sphere_domain(
            config.domain.dim,
            config.domain.resolution,
        )?),
        "torus" => {
            let periods = config.domain.periods.clone().ok_or_else(|| {
                CliError::Config("torus domains need a [domain] periods array".into())
            })?;
            Arc::new(build_torus_domain(
                config.domain.dim,
                &periods,
                config.domain.resolution,
            )?)
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown domain kind '{other}' (expected 'sphere' or 'torus')"
            )))
        }
    };

    let map = match config.map.name.as_str() {
        "identity" => identity_sphere(domain.clone())?,
        "equator" => {
            let n = config
                .map
                .target_dim
                .ok_or_else(|| CliError::Config("the equator map needs [map] target_dim".into()))?;
            equator_inclusion(domain.clone(), n)?
        }
        "constant" => {
            let point = config.map.base_point.clone().ok_or_else(|| {
                CliError::Config("the constant map needs [map] base_point".into())
            })?;
            constant_map(domain.clone(), SpherePoint::new(DVector::from_vec(point))?)?
        }
        "clifford" => clifford_torus(domain.clone())?,
        "cap" => {
            let latitude = config
                .map
                .latitude
                .ok_or_else(|| CliError::Config("the cap map needs [map] latitude".into()))?;
            spherical_cap(domain.clone(), latitude)?
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown map '{other}' (catalog: identity, equator, constant, clifford, cap)"
            )))
        }
    };

    let profile = match config.profile.name.as_str() {
        "power" => {
            let p = config
                .profile
                .p
                .ok_or_else(|| CliError::Config("the power profile needs [profile] p".into()))?;
            FProfile::power(p)?
        }
        "exp" => {
            let a = match config.profile.a {
                Some(a) => a,
                // default: the maximum energy density of the scenario map
                None => {
                    let densities = map.par_node_map(|_, ne| Ok(ne.density))?;
                    densities.iter().cloned().fold(0.0, f64::max)
                }
            };
            FProfile::exp_type(a)?
        }
        "sacks-uhlenbeck" => {
            let alpha = config.profile.alpha.ok_or_else(|| {
                CliError::Config("the sacks-uhlenbeck profile needs [profile] alpha".into())
            })?;
            FProfile::sacks_uhlenbeck(alpha)?
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown profile '{other}' (catalog: power, exp, sacks-uhlenbeck)"
            )))
        }
    };

    let ambient = map.ambient_dim();
    let directions = match &config.directions.explicit {
        Some(vectors) => {
            let mut out = Vec::with_capacity(vectors.len());
            for v in vectors {
                if v.len() != ambient {
                    return Err(CliError::Config(format!(
                        "explicit direction has {} components, expected {ambient}",
                        v.len()
                    )));
                }
                let dv = DVector::from_vec(v.clone());
                if dv.norm() == 0.0 {
                    return Err(CliError::Config("explicit direction is zero".into()));
                }
                out.push(dv.clone() / dv.norm());
            }
            out
        }
        None => seeded_directions(ambient, config.directions.count, config.directions.seed),
    };
    if directions.is_empty() {
        return Err(CliError::Config("scenario has no sweep directions".into()));
    }

    let grid = match &config.grid.explicit {
        Some(g) => g.clone(),
        None => {
            let g = &config.grid;
            if !(g.step > 0.0) || g.stop < g.start {
                return Err(CliError::Config(format!(
                    "bad sweep grid: start {}, stop {}, step {}",
                    g.start, g.stop, g.step
                )));
            }
            let n = ((g.stop - g.start) / g.step).round() as usize;
            (0..=n).map(|i| g.start + i as f64 * g.step).collect()
        }
    };

    Ok(BuiltScenario {
        config,
        domain,
        map,
        profile,
        directions,
        grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_minimal_scenario() {
        let text = r#"
name = "demo"
checks = ["energy", "stress"]

[domain]
kind = "sphere"
dim = 2
resolution = 16

[map]
name = "identity"

[profile]
name = "power"
p = 2.0
"#;
        let config = ScenarioConfig::from_toml(text).unwrap();
        assert_eq!(config.name, "demo");
        let built = build_scenario(config).unwrap();
        assert_eq!(built.map.target_dim(), 2);
        assert_eq!(built.directions.len(), 8);
        assert_eq!(built.grid.len(), 21);
    }

    #[test]
    fn rejects_unknown_keys_with_location() {
        let text = "name = \"x\"\nchecks = []\nbogus = 1\n";
        let err = ScenarioConfig::from_toml(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus") || msg.contains("line"), "{msg}");
    }

    #[test]
    fn rejects_out_of_family_profile() {
        let text = r#"
name = "bad-p"
checks = ["energy"]

[domain]
kind = "sphere"
dim = 2
resolution = 16

[map]
name = "identity"

[profile]
name = "power"
p = 3.0
"#;
        let config = ScenarioConfig::from_toml(text).unwrap();
        match build_scenario(config) {
            Err(CliError::Config(msg)) => assert!(msg.contains("p = 2 or p >= 4")),
            other => panic!("expected config error, got {:?}", other.is_ok()),
        }
    }
}
