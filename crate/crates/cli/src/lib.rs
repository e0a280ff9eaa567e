//! Scenario runner for the fharmonic laboratory: TOML scenario configs, a
//! built-in catalog, CSV/SVG reports, and exit-code plumbing.

pub mod catalog;
pub mod plot;
pub mod runner;
pub mod scenario;

pub use runner::{run_scenario, ScenarioOutcome};
pub use scenario::{build_scenario, BuiltScenario, CliError, CliResult, ScenarioConfig};
