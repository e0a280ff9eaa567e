//! Built-in scenario catalog: the standard sweeps over the profile families
//! and catalog maps, runnable by name with zero user input.

use crate::scenario::{CliError, CliResult, ScenarioConfig};

struct CatalogEntry {
    name: &'static str,
    blurb: &'static str,
    toml: &'static str,
}

const PI_THIRD: &str = "1.0471975511965976"; // pi / 3

macro_rules! entry {
    ($name:literal, $blurb:literal, $toml:expr) => {
        CatalogEntry {
            name: $name,
            blurb: $blurb,
            toml: $toml,
        }
    };
}

fn entries() -> Vec<CatalogEntry> {
    vec![
        entry!(
            "equator-s3-s4-p2",
            "equator inclusion S^3 -> S^4 with F(t) = t: strict global maximum",
            r#"
name = "equator-s3-s4-p2"
checks = ["energy", "stress", "admissibility", "lemma2", "decomposition", "theorem"]
expect = "theorem-verified-strict"

[domain]
kind = "sphere"
dim = 3
resolution = 40

[map]
name = "equator"
target_dim = 4

[profile]
name = "power"
p = 2.0

[directions]
count = 8
seed = 42
"#
        ),
        entry!(
            "identity-s2-p2",
            "identity of S^2 with F(t) = t: the conformally invariant equality case",
            r#"
name = "identity-s2-p2"
checks = ["energy", "stress", "sweep", "admissibility", "theorem"]
expect = "theorem-verified"

[domain]
kind = "sphere"
dim = 2
resolution = 64

[map]
name = "identity"

[profile]
name = "power"
p = 2.0

[directions]
count = 8
seed = 42
"#
        ),
        entry!(
            "identity-s2-p4-negative-control",
            "identity of S^2 with the quartic profile: negative stress, hypotheses rejected",
            r#"
name = "identity-s2-p4-negative-control"
checks = ["stress", "sweep", "admissibility", "theorem"]
expect = "hypotheses-fail"

[domain]
kind = "sphere"
dim = 2
resolution = 64

[map]
name = "identity"

[profile]
name = "power"
p = 4.0

[directions]
count = 8
seed = 42
"#
        ),
        entry!(
            "equator-s3-s4-su",
            "equator inclusion with the Sacks-Uhlenbeck profile along the orthogonal direction",
            r#"
name = "equator-s3-s4-su"
checks = ["energy", "stress", "admissibility", "decomposition", "theorem"]
expect = "theorem-verified-strict"

[domain]
kind = "sphere"
dim = 3
resolution = 40

[map]
name = "equator"
target_dim = 4

[profile]
name = "sacks-uhlenbeck"
alpha = 0.5

[directions]
explicit = [[0.0, 0.0, 0.0, 0.0, 1.0]]
"#
        ),
        entry!(
            "equator-s3-s4-exp",
            "equator inclusion with the exp profile (a = max density) along the orthogonal direction",
            r#"
name = "equator-s3-s4-exp"
checks = ["energy", "stress", "admissibility", "decomposition", "theorem"]
expect = "theorem-verified-strict"

[domain]
kind = "sphere"
dim = 3
resolution = 40

[map]
name = "equator"
target_dim = 4

[profile]
name = "exp"

[directions]
explicit = [[0.0, 0.0, 0.0, 0.0, 1.0]]
"#
        ),
        entry!(
            "clifford-t2-s3-p2",
            "Clifford-type torus map into S^3 with F(t) = t: flat stress floor",
            r#"
name = "clifford-t2-s3-p2"
checks = ["energy", "stress", "admissibility", "theorem"]
expect = "theorem-verified"

[domain]
kind = "torus"
dim = 2
resolution = 64
periods = [6.283185307179586, 6.283185307179586]

[map]
name = "clifford"

[profile]
name = "power"
p = 2.0

[directions]
count = 8
seed = 42
"#
        ),
        entry!(
            "clifford-t2-s3-su",
            "Clifford-type torus map with Sacks-Uhlenbeck: mixed-sign phi_v breaks admissibility",
            r#"
name = "clifford-t2-s3-su"
checks = ["energy", "stress", "admissibility", "theorem"]
expect = "hypotheses-fail"

[domain]
kind = "torus"
dim = 2
resolution = 64
periods = [6.283185307179586, 6.283185307179586]

[map]
name = "clifford"

[profile]
name = "sacks-uhlenbeck"
alpha = 0.5

[directions]
count = 8
seed = 42
"#
        ),
        entry!(
            "identity-s2-su",
            "identity of S^2 with Sacks-Uhlenbeck: positive stress but mixed-sign phi_v",
            r#"
name = "identity-s2-su"
checks = ["energy", "stress", "admissibility", "theorem"]
expect = "hypotheses-fail"

[domain]
kind = "sphere"
dim = 2
resolution = 64

[map]
name = "identity"

[profile]
name = "sacks-uhlenbeck"
alpha = 0.5

[directions]
count = 8
seed = 42
"#
        ),
        entry!(
            "identity-s2-exp",
            "identity of S^2 with the exp profile: mixed-sign phi_v breaks the comparison",
            r#"
name = "identity-s2-exp"
checks = ["energy", "stress", "admissibility", "theorem"]
expect = "hypotheses-fail"

[domain]
kind = "sphere"
dim = 2
resolution = 64

[map]
name = "identity"

[profile]
name = "exp"

[directions]
count = 8
seed = 42
"#
        ),
        entry!(
            "clifford-t2-s3-exp",
            "Clifford-type torus map with the exp profile: mixed-sign phi_v breaks admissibility",
            r#"
name = "clifford-t2-s3-exp"
checks = ["energy", "stress", "admissibility", "theorem"]
expect = "hypotheses-fail"

[domain]
kind = "torus"
dim = 2
resolution = 64
periods = [6.283185307179586, 6.283185307179586]

[map]
name = "clifford"

[profile]
name = "exp"

[directions]
count = 8
seed = 42
"#
        ),
    ]
}

fn cap_entries() -> Vec<CatalogEntry> {
    vec![
        entry!(
            "cap-s2-s3-p2-halfsphere",
            "latitude-pi/3 cap into the upper half of S^3, power-family admissibility",
            r#"
name = "cap-s2-s3-p2-halfsphere"
checks = ["energy", "stress", "admissibility"]
expect = "admissible"

[domain]
kind = "sphere"
dim = 2
resolution = 64

[map]
name = "cap"
latitude = @LAT@

[profile]
name = "power"
p = 2.0

[directions]
explicit = [[0.0, 0.0, 0.0, 1.0]]
"#
        ),
        entry!(
            "cap-s2-s3-su-halfsphere",
            "latitude-pi/3 cap into the upper half of S^3, Sacks-Uhlenbeck admissibility",
            r#"
name = "cap-s2-s3-su-halfsphere"
checks = ["energy", "stress", "admissibility"]
expect = "admissible"

[domain]
kind = "sphere"
dim = 2
resolution = 64

[map]
name = "cap"
latitude = @LAT@

[profile]
name = "sacks-uhlenbeck"
alpha = 0.5

[directions]
explicit = [[0.0, 0.0, 0.0, 1.0]]
"#
        ),
        entry!(
            "cap-s2-s3-exp-halfsphere",
            "latitude-pi/3 cap into the upper half of S^3, exp-profile admissibility",
            r#"
name = "cap-s2-s3-exp-halfsphere"
checks = ["energy", "stress", "admissibility"]
expect = "admissible"

[domain]
kind = "sphere"
dim = 2
resolution = 64

[map]
name = "cap"
latitude = @LAT@

[profile]
name = "exp"

[directions]
explicit = [[0.0, 0.0, 0.0, 1.0]]
"#
        ),
    ]
}

/// Names and one-line descriptions of every built-in scenario.
pub fn list() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = entries()
        .iter()
        .map(|e| (e.name.to_string(), e.blurb.to_string()))
        .collect();
    for e in cap_entries() {
        out.push((e.name.to_string(), e.blurb.to_string()));
    }
    out
}

/// Fetches a built-in scenario configuration by name.
pub fn get(name: &str) -> CliResult<ScenarioConfig> {
    for e in entries() {
        if e.name == name {
            return ScenarioConfig::from_toml(e.toml);
        }
    }
    for e in cap_entries() {
        if e.name == name {
            let toml = e.toml.replace("@LAT@", PI_THIRD);
            return ScenarioConfig::from_toml(&toml);
        }
    }
    let known: Vec<String> = list().into_iter().map(|(n, _)| n).collect();
    Err(CliError::Config(format!(
        "unknown catalog scenario '{name}'; available: {}",
        known.join(", ")
    )))
}
