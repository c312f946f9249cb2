//! `posctl`: run closed-loop scenarios and property suites.

mod config;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use posctl::sim::write_atomic;
use posctl::suites::{run_suite, SuiteOptions, SUITE_NAMES};
use posctl::sysmodel::SystemRegistry;

use crate::config::{Law, ScenarioConfig};
use crate::scenario::{run_scenario, ScenarioError};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "posctl", version, about = "Positive-input feedback design: scenarios and property suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory (overrides the config's `outputs`)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomly sampled suite checks
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Points per axis for 2-D grid checks
    #[arg(long, global = true)]
    grid: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario config
    Run { config: PathBuf },
    /// Run a property suite: lemma1, hjb, universal, direct, symmetry, asymptotics or all
    Suite { name: String },
    /// List registered systems
    ListSystems,
    /// List feedback laws
    ListLaws,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { ref config } => run(&cli, config),
        Command::Suite { ref name } => suite(&cli, name),
        Command::ListSystems => {
            for (name, plant) in SystemRegistry::<f64>::builtin().iter() {
                println!("{name}\t{}", plant.description);
            }
            ExitCode::SUCCESS
        }
        Command::ListLaws => {
            for law in Law::ALL {
                println!("{}\t{}", law.name(), law.description());
            }
            ExitCode::SUCCESS
        }
    }
}

fn run(cli: &Cli, path: &std::path::Path) -> ExitCode {
    let mut cfg = match ScenarioConfig::load(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(g) = cli.grid {
        cfg.check_grid = g.max(2);
    }
    let out = cli.out.clone().or_else(|| cfg.outputs.clone()).unwrap_or_else(|| PathBuf::from("out").join(&cfg.name));
    match run_scenario(&cfg, &SystemRegistry::builtin(), &out) {
        Ok(m) => {
            for r in &m.runs {
                match (&r.summary, &r.error) {
                    (Some(s), _) => println!(
                        "ic{} {:<18} J = {:.10e}  V0 = {:.10e}  stop = {:?} at t = {}",
                        r.ic_index, r.law.name(), s.cost, r.initial_clf, s.stop, s.final_time
                    ),
                    (None, Some(e)) => println!("ic{} {:<18} error: {e}", r.ic_index, r.law.name()),
                    _ => {}
                }
            }
            for c in &m.comparisons {
                println!(
                    "ic{} J(nominal) = {:.6e}  J({}) = {:.6e}  saving = {}  Sigma(rho0) = {:.6}",
                    c.ic_index,
                    c.nominal_cost,
                    c.optimal_law,
                    c.optimal_cost,
                    c.relative_saving.map_or("n/a".into(), |s| format!("{:.2}%", 100.0 * s)),
                    c.sigma_rho0
                );
            }
            println!("manifest: {}", out.join("manifest.json").display());
            if m.passed {
                ExitCode::SUCCESS
            } else {
                for c in m.checks.iter().filter(|c| !c.passed) {
                    eprintln!("check failed: {}", c.name);
                }
                ExitCode::from(EXIT_CHECK_FAILED)
            }
        }
        Err(e @ ScenarioError::Config(_)) => {
            eprintln!("config error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CHECK_FAILED)
        }
    }
}

fn suite(cli: &Cli, name: &str) -> ExitCode {
    if name != "all" && !SUITE_NAMES.contains(&name) {
        eprintln!("config error: unknown suite `{name}` (expected one of {}, all)", SUITE_NAMES.join(", "));
        return ExitCode::from(EXIT_CONFIG);
    }
    let mut opts = SuiteOptions::default();
    if let Some(s) = cli.seed {
        opts.seed = s;
    }
    if let Some(g) = cli.grid {
        opts.grid = g.max(2);
    }
    let reports = match run_suite(name, &opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CHECK_FAILED);
        }
    };
    for r in &reports {
        for c in &r.checks {
            println!("[{}] {}: {} ({})", if c.passed { "PASS" } else { "FAIL" }, r.suite, c.name, c.detail);
        }
        for f in &r.findings {
            println!("[NOTE] {}: {f}", r.suite);
        }
    }
    let json = serde_json::json!({ "suite": name, "options": opts, "reports": reports });
    let mut text = serde_json::to_string_pretty(&json).expect("report serializes");
    text.push('\n');
    if let Some(dir) = &cli.out {
        let path = dir.join(format!("suite_{name}.json"));
        if let Err(e) = write_atomic(&path, text.as_bytes()) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(EXIT_CHECK_FAILED);
        }
        println!("report: {}", path.display());
    }
    if reports.iter().all(|r| r.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}
