use clap::{Parser, Subcommand};
use fharmonic_cli::scenario::{build_scenario, CliError, ScenarioConfig};
use fharmonic_cli::{catalog, plot, runner};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "fharmonic",
    about = "Energy sweeps of sphere-valued maps over the conformal group",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a TOML config file
    Run {
        /// Path to the scenario config
        config: PathBuf,
        /// Output directory root (overrides the config)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in scenario catalog
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Render a sweep CSV into an SVG plot
    Plot {
        /// Sweep CSV produced by `run`
        csv: PathBuf,
        /// Output SVG path
        svg: PathBuf,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// List the built-in scenarios
    List,
    /// Run a built-in scenario by name
    Run {
        name: String,
        /// Output directory root
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn configure_threads() {
    if let Ok(value) = std::env::var("FHARMONIC_THREADS") {
        match value.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => eprintln!("ignoring FHARMONIC_THREADS={value}: expected a positive integer"),
        }
    }
}

fn exit_code_for(err: &CliError) -> u8 {
    match err {
        CliError::Config(_) => 2,
        CliError::Internal(_) => 1,
    }
}

fn run_config(config: ScenarioConfig, out: Option<PathBuf>) -> Result<bool, CliError> {
    let built = build_scenario(config)?;
    let outcome = runner::run_scenario(&built, out.as_deref())?;
    for check in &outcome.outcomes {
        println!(
            "{}: {} {}",
            check.check.label(),
            if check.passed { "PASS" } else { "FAIL" },
            check.detail
        );
    }
    println!(
        "scenario {}: {} (reports in {})",
        outcome.name,
        if outcome.all_passed() { "PASS" } else { "FAIL" },
        outcome.out_dir.display()
    );
    Ok(outcome.all_passed())
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let result: Result<bool, CliError> = match cli.command {
        Command::Run { config, out } => std::fs::read_to_string(&config)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", config.display())))
            .and_then(|text| ScenarioConfig::from_toml(&text))
            .and_then(|cfg| run_config(cfg, out)),
        Command::Catalog { action } => match action {
            CatalogAction::List => {
                for (name, blurb) in catalog::list() {
                    println!("{name:36} {blurb}");
                }
                Ok(true)
            }
            CatalogAction::Run { name, out } => {
                catalog::get(&name).and_then(|cfg| run_config(cfg, out))
            }
        },
        Command::Plot { csv, svg } => std::fs::read_to_string(&csv)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", csv.display())))
            .and_then(|text| plot::render_sweep_svg(&text))
            .and_then(|out| {
                std::fs::write(&svg, out)
                    .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", svg.display())))
            })
            .map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
