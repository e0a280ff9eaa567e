//! Executes a built scenario: runs the requested checks, writes one CSV per
//! check plus a text summary, and aggregates the gating verdicts.

use crate::scenario::{BuiltScenario, CheckKind, CliError, CliResult, Expectation};
use fharmonic::functionals::{f_energy, f_energy_composed_both, first_variation, stress_field};
use fharmonic::profile::check_tensor_comparison;
use fharmonic::sphere::ConformalFlow;
use fharmonic::variation::{
    admissibility_scan, energy_sweep, fd_derivative_oracle, verify_theorem, RhsVariant,
    SweepResult, TheoremVerdict,
};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// Formats a float with 17 significant digits, stable across runs.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub check: CheckKind,
    pub passed: bool,
    /// Whether this check's verdict gates the exit code.
    pub gating: bool,
    pub detail: String,
}

#[derive(Debug)]
pub struct ScenarioOutcome {
    pub name: String,
    pub out_dir: PathBuf,
    pub outcomes: Vec<CheckOutcome>,
}

impl ScenarioOutcome {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| !o.gating || o.passed)
    }
}

fn write_file(dir: &Path, name: &str, content: &str) -> CliResult<()> {
    fs::write(dir.join(name), content)
        .map_err(|e| CliError::Internal(format!("cannot write {name}: {e}")))
}

/// Runs every requested check and writes the report files.
pub fn run_scenario(
    scenario: &BuiltScenario,
    out_root: Option<&Path>,
) -> CliResult<ScenarioOutcome> {
    let config = &scenario.config;
    let out_dir = out_root
        .map(Path::to_path_buf)
        .or_else(|| config.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("reports"))
        .join(&config.name);
    fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", out_dir.display())))?;

    let expectation = config.effective_expectation();
    let mut outcomes = Vec::new();
    let mut summary = String::new();
    let _ = writeln!(summary, "scenario: {}", config.name);
    let _ = writeln!(
        summary,
        "domain: {} dim {} resolution {}",
        config.domain.kind, config.domain.dim, config.domain.resolution
    );
    let _ = writeln!(summary, "map: {}", scenario.map.name());
    let _ = writeln!(summary, "profile: {}", scenario.profile.label());
    let _ = writeln!(
        summary,
        "directions: {} unit vectors (flow times reported at |v| = 1; the \
         flow of v at time t is the unit flow at |v| t)",
        scenario.directions.len()
    );
    for (k, v) in scenario.directions.iter().enumerate() {
        let coords: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
        let _ = writeln!(summary, "  d{k} = [{}]", coords.join(", "));
    }
    let _ = writeln!(summary, "expectation: {expectation:?}");

    for &check in &config.checks {
        let outcome = match check {
            CheckKind::Energy => run_energy_check(scenario, &out_dir)?,
            CheckKind::Stress => run_stress_check(scenario, &out_dir)?,
            CheckKind::Sweep => run_sweep_check(scenario, &out_dir, expectation)?,
            CheckKind::Admissibility => run_admissibility_check(scenario, &out_dir, expectation)?,
            CheckKind::Lemma2 => run_lemma2_check(scenario, &out_dir)?,
            CheckKind::Decomposition => run_decomposition_check(scenario, &out_dir)?,
            CheckKind::Theorem => {
                // when no standalone sweep check runs, the theorem's sweeps
                // are the scenario's canonical sweep.csv
                let owns_sweep_csv = !config.checks.contains(&CheckKind::Sweep);
                run_theorem_check(scenario, &out_dir, expectation, owns_sweep_csv)?
            }
        };
        let _ = writeln!(
            summary,
            "check {}: {} ({}){}",
            outcome.check.label(),
            if outcome.passed { "PASS" } else { "FAIL" },
            outcome.detail,
            if outcome.gating {
                ""
            } else {
                " [informational]"
            }
        );
        outcomes.push(outcome);
    }

    let all = outcomes.iter().all(|o| !o.gating || o.passed);
    let _ = writeln!(summary, "verdict: {}", if all { "PASS" } else { "FAIL" });
    write_file(&out_dir, "summary.txt", &summary)?;

    Ok(ScenarioOutcome {
        name: config.name.clone(),
        out_dir,
        outcomes,
    })
}

fn run_energy_check(scenario: &BuiltScenario, dir: &Path) -> CliResult<CheckOutcome> {
    let energy = f_energy(&scenario.map, &scenario.profile)?;
    let v = &scenario.directions[0];
    let fv = first_variation(&scenario.map, &scenario.profile, v)?;
    let fd0 = fd_derivative_oracle(&scenario.map, &scenario.profile, v, 0.0, 1e-4)?;
    let t_probe = 1.0;
    let flow = ConformalFlow::new(v.clone(), t_probe)?;
    let both = f_energy_composed_both(&scenario.map, &scenario.profile, &flow)?;

    let mut csv = String::from("quantity,value\n");
    let _ = writeln!(csv, "energy,{}", fmt_float(energy));
    let _ = writeln!(csv, "first_variation,{}", fmt_float(fv));
    let _ = writeln!(csv, "fd_derivative_at_0,{}", fmt_float(fd0));
    let _ = writeln!(csv, "composed_energy_t1,{}", fmt_float(both.value));
    let _ = writeln!(csv, "composed_energy_t1_fast,{}", fmt_float(both.fast_path));
    write_file(dir, "energy.csv", &csv)?;

    let passed = both.consistent();
    Ok(CheckOutcome {
        check: CheckKind::Energy,
        passed,
        gating: true,
        detail: format!(
            "E = {energy:.9}, first variation {fv:.3e}, composed cross-check deviation {:.3e}",
            both.deviation()
        ),
    })
}

fn run_stress_check(scenario: &BuiltScenario, dir: &Path) -> CliResult<CheckOutcome> {
    let stress = stress_field(&scenario.map, &scenario.profile)?;
    let max_eig = stress
        .min_eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let mut csv = String::from("statistic,value\n");
    let _ = writeln!(csv, "stress_floor,{}", fmt_float(stress.global_min));
    let _ = writeln!(csv, "max_node_min_eigenvalue,{}", fmt_float(max_eig));
    let _ = writeln!(csv, "nodes,{}", stress.min_eigenvalues.len());
    write_file(dir, "stress.csv", &csv)?;
    Ok(CheckOutcome {
        check: CheckKind::Stress,
        passed: true,
        gating: false,
        detail: format!("S^(o,F) = {:.9}", stress.global_min),
    })
}

const SWEEP_HEADER: &str =
    "t,E,dE_fd,lemma2_statement,lemma2_proof,Phi,Chi,minB,minStressEig,verdict";

fn sweep_rows(csv: &mut String, sweep: &SweepResult) {
    for p in &sweep.points {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_float(p.t),
            fmt_float(p.energy),
            fmt_float(p.fd_derivative),
            fmt_float(p.rhs_full),
            fmt_float(p.rhs_half),
            fmt_float(p.phi),
            fmt_float(p.chi),
            fmt_float(p.min_b),
            fmt_float(p.min_stress_eig),
            if p.energy_ok { "PASS" } else { "FAIL" },
        );
    }
}

fn run_sweep_check(
    scenario: &BuiltScenario,
    dir: &Path,
    expectation: Expectation,
) -> CliResult<CheckOutcome> {
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    let mut all_energy_ok = true;
    let mut all_cross_ok = true;
    for v in &scenario.directions {
        let sweep = energy_sweep(&scenario.map, &scenario.profile, v, &scenario.grid, false)?;
        all_energy_ok &= sweep.pass;
        all_cross_ok &= sweep.points.iter().all(|p| p.cross_check_ok);
        sweep_rows(&mut csv, &sweep);
    }
    write_file(dir, "sweep.csv", &csv)?;

    // the energy inequality gates only when the scenario expects it to hold
    let monotone_gates = matches!(
        expectation,
        Expectation::TheoremVerified | Expectation::TheoremVerifiedStrict
    );
    let passed = all_cross_ok && (!monotone_gates || all_energy_ok);
    Ok(CheckOutcome {
        check: CheckKind::Sweep,
        passed,
        gating: true,
        detail: format!(
            "energy inequality {} cross-check {}",
            if all_energy_ok { "held" } else { "violated" },
            if all_cross_ok { "ok" } else { "FAILED" }
        ),
    })
}

fn run_admissibility_check(
    scenario: &BuiltScenario,
    dir: &Path,
    expectation: Expectation,
) -> CliResult<CheckOutcome> {
    // transform-route scan over the full grid; the finite-difference
    // composed stress is cross-checked at the top of the grid only
    let mut csv = String::from("direction,t,minB,minComparisonEig\n");
    let mut min_b = f64::INFINITY;
    let mut min_cmp = f64::INFINITY;
    for (k, v) in scenario.directions.iter().enumerate() {
        let samples = admissibility_scan(&scenario.map, &scenario.profile, v, &scenario.grid)?;
        for s in &samples {
            min_b = min_b.min(s.min_b);
            min_cmp = min_cmp.min(s.min_comparison_eig);
            let _ = writeln!(
                csv,
                "{k},{},{},{}",
                fmt_float(s.t),
                fmt_float(s.min_b),
                fmt_float(s.min_comparison_eig),
            );
        }
    }
    write_file(dir, "admissibility.csv", &csv)?;

    let t_probe = scenario.grid.iter().cloned().fold(0.0f64, f64::max).max(0.5);
    let flow = ConformalFlow::new(scenario.directions[0].clone(), t_probe)?;
    let fd_report = check_tensor_comparison(&scenario.map, &scenario.profile, &flow)?;

    let admissible = min_b >= -fharmonic::profile::B_TOLERANCE
        && min_cmp >= -fharmonic::profile::COMPARISON_EIG_TOLERANCE;
    // scenarios expecting a hypotheses failure report admissibility as data
    let passed = if expectation == Expectation::HypothesesFail {
        true
    } else {
        admissible
    };
    Ok(CheckOutcome {
        check: CheckKind::Admissibility,
        passed,
        gating: true,
        detail: format!(
            "min B = {min_b:.3e}, min comparison eigenvalue = {min_cmp:.3e}, \
             fd cross-check at t = {t_probe}: {:.3e}",
            fd_report.fd_max_entry_dev
        ),
    })
}

fn run_lemma2_check(scenario: &BuiltScenario, dir: &Path) -> CliResult<CheckOutcome> {
    let v = &scenario.directions[0];
    let map = &scenario.map;
    let profile = &scenario.profile;
    let t0 = 0.5;
    let fd = fd_derivative_oracle(map, profile, v, t0, 1e-4)?;
    let statement =
        fharmonic::variation::energy_derivative_rhs(map, profile, v, t0, RhsVariant::FullDensity)?;
    let proof =
        fharmonic::variation::energy_derivative_rhs(map, profile, v, t0, RhsVariant::HalfDensity)?;
    let tol = 1e-4 * (1.0 + fd.abs());
    let statement_ok = (statement - fd).abs() <= tol;
    let proof_ok = (proof - fd).abs() <= tol;
    let matched = match (statement_ok, proof_ok) {
        (true, false) => "statement",
        (false, true) => "proof",
        (true, true) => "both",
        (false, false) => "neither",
    };

    let mut csv = String::from("t0,dE_fd,lemma2_statement,lemma2_proof,matched\n");
    let _ = writeln!(
        csv,
        "{},{},{},{},{matched}",
        fmt_float(t0),
        fmt_float(fd),
        fmt_float(statement),
        fmt_float(proof),
    );
    write_file(dir, "lemma2.csv", &csv)?;

    Ok(CheckOutcome {
        check: CheckKind::Lemma2,
        passed: statement_ok ^ proof_ok,
        gating: true,
        detail: format!(
            "matched variant: {matched} (fd {fd:.6}, statement {statement:.6}, proof {proof:.6})"
        ),
    })
}

fn run_decomposition_check(scenario: &BuiltScenario, dir: &Path) -> CliResult<CheckOutcome> {
    let grid = [0.25, 0.5, 1.0, 1.5];
    let mut csv = String::from("direction,t0,dE_fd,Phi,Chi,gap\n");
    let mut worst_gap = 0.0f64;
    let mut pass = true;
    for (k, v) in scenario.directions.iter().enumerate() {
        let sweep = energy_sweep(&scenario.map, &scenario.profile, v, &grid, false)?;
        for p in &sweep.points {
            let gap = (p.phi + p.chi - p.fd_derivative).abs();
            let rel = gap / (1.0 + p.fd_derivative.abs());
            worst_gap = worst_gap.max(rel);
            pass &= rel <= 1e-4;
            let _ = writeln!(
                csv,
                "{k},{},{},{},{},{}",
                fmt_float(p.t),
                fmt_float(p.fd_derivative),
                fmt_float(p.phi),
                fmt_float(p.chi),
                fmt_float(gap),
            );
        }
    }
    write_file(dir, "decomposition.csv", &csv)?;
    Ok(CheckOutcome {
        check: CheckKind::Decomposition,
        passed: pass,
        gating: true,
        detail: format!("worst relative derivative gap {worst_gap:.3e}"),
    })
}

fn run_theorem_check(
    scenario: &BuiltScenario,
    dir: &Path,
    expectation: Expectation,
    owns_sweep_csv: bool,
) -> CliResult<CheckOutcome> {
    let report = verify_theorem(
        &scenario.map,
        &scenario.profile,
        &scenario.directions,
        &scenario.grid,
    )?;

    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for sweep in &report.sweeps {
        sweep_rows(&mut csv, sweep);
    }
    let sweep_name = if owns_sweep_csv { "sweep.csv" } else { "theorem_sweeps.csv" };
    write_file(dir, sweep_name, &csv)?;

    let verdict_name = match &report.verdict {
        TheoremVerdict::Verified { strict: true } => "THEOREM-VERIFIED (strict)".to_string(),
        TheoremVerdict::Verified { strict: false } => "THEOREM-VERIFIED".to_string(),
        TheoremVerdict::HypothesesFail(reasons) => {
            format!("HYPOTHESES-FAIL [{}]", reasons.join("; "))
        }
        TheoremVerdict::CounterexampleFlag => "COUNTEREXAMPLE-FLAG".to_string(),
    };
    let variant = match report.matched_variant {
        Some(RhsVariant::HalfDensity) => "proof",
        Some(RhsVariant::FullDensity) => "statement",
        None => "unresolved",
    };

    let mut info = String::from("field,value\n");
    let _ = writeln!(info, "verdict,{verdict_name}");
    let _ = writeln!(info, "tension_sup,{}", fmt_float(report.tension_sup));
    let _ = writeln!(info, "stress_floor,{}", fmt_float(report.stress_min));
    let _ = writeln!(info, "min_B,{}", fmt_float(report.min_b));
    let _ = writeln!(
        info,
        "min_comparison_eig,{}",
        fmt_float(report.min_comparison_eig)
    );
    let _ = writeln!(info, "lemma2_matched_variant,{variant}");
    write_file(dir, "theorem.csv", &info)?;

    let passed = match expectation {
        Expectation::TheoremVerified => matches!(report.verdict, TheoremVerdict::Verified { .. }),
        Expectation::TheoremVerifiedStrict => {
            matches!(report.verdict, TheoremVerdict::Verified { strict: true })
        }
        Expectation::HypothesesFail => {
            matches!(report.verdict, TheoremVerdict::HypothesesFail(_))
        }
        Expectation::Admissible => matches!(report.verdict, TheoremVerdict::Verified { .. }),
    };
    Ok(CheckOutcome {
        check: CheckKind::Theorem,
        passed,
        gating: true,
        detail: verdict_name,
    })
}
