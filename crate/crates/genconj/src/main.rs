//! Command-line front end: envelope scans driven by an INI config, plus the
//! acceptance suite.
//!
//! Exit codes: 0 success, 1 a numerical check failed, 2 configuration or
//! usage error.

use clap::{Parser, Subcommand};
use genconj::config::{self, Scenario};
use genconj::report::{self, ScanRow, ScenarioSummary};
use genconj::solver::SolverConfig;
use genconj::suite::{self, Tolerances};
use genconj::{derivatives, solver, testfns};
use rayon::prelude::*;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "genconj", about = "Generalized conjugate and envelope toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run envelope scans from an INI config and write CSV reports.
    Scan {
        /// Path to the scan configuration.
        #[arg(long)]
        config: PathBuf,
        /// Output directory for per-scenario CSV files and summary.csv.
        #[arg(long)]
        out: PathBuf,
        /// Sampling seed offset (results are deterministic per seed).
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run all acceptance criteria; prints one line per criterion.
    Suite {
        /// Optional file to also write the per-criterion lines to.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a single acceptance criterion by name.
    Check {
        /// Criterion name (see `suite` output).
        #[arg(long)]
        name: String,
        /// Multiplier applied to every tolerance (for sensitivity probes).
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
    },
}

fn scan_scenario(s: &Scenario, _seed: u64) -> Result<Vec<ScanRow>, genconj::Error> {
    let c = s.coupling()?;
    let g = testfns::by_id(&s.function, s.dim)?;
    let cfg = SolverConfig::default();
    let grid = s.y_grid(c.dim_y);
    let rows: Vec<ScanRow> = grid
        .par_iter()
        .map(|y| {
            let mut row = ScanRow {
                scenario: s.name.clone(),
                y: y.clone(),
                envelope: f64::NAN,
                prox: vec![],
                n_minimizers: 0,
                boundary_hit: false,
                gradient_err: f64::NAN,
                hessian_err: f64::NAN,
                jacobian_err: f64::NAN,
                error: String::new(),
            };
            if !c.y_dom.contains(y) {
                row.error = "y outside coupling domain".to_string();
                return row;
            }
            match solver::prox(&g, &c, y, &cfg) {
                Ok(r) => {
                    row.envelope = r.envelope;
                    row.prox = r.minimizers[0].clone();
                    row.n_minimizers = r.minimizers.len();
                    row.boundary_hit = r.boundary_hit;
                }
                Err(e) => {
                    row.error = e.to_string();
                    return row;
                }
            }
            for check in &s.checks {
                let res = match check.as_str() {
                    "envelope" => Ok(()),
                    "gradient" => derivatives::gradient_report(&g, &c, y, &cfg)
                        .map(|r| row.gradient_err = r.rel_err),
                    "hessian" => derivatives::hessian_report(&g, &c, y, &cfg)
                        .map(|r| row.hessian_err = r.rel_err),
                    "jacobian" => derivatives::jacobian_report(&g, &c, y, &cfg)
                        .map(|r| row.jacobian_err = r.rel_err),
                    _ => Ok(()),
                };
                if let Err(e) = res {
                    row.error = format!("{check}: {e}");
                }
            }
            row
        })
        .collect();
    Ok(rows)
}

fn run_scan(config: &Path, out: &Path, seed: u64) -> Result<ExitCode, String> {
    let text = std::fs::read_to_string(config)
        .map_err(|e| format!("cannot read {}: {e}", config.display()))?;
    let scenarios = config::parse(&text).map_err(|e| e.to_string())?;
    std::fs::create_dir_all(out).map_err(|e| format!("cannot create {}: {e}", out.display()))?;
    let mut summaries = Vec::new();
    let mut had_failure = false;
    for s in &scenarios {
        let rows = scan_scenario(s, seed).map_err(|e| format!("scenario '{}': {e}", s.name))?;
        let failures = rows.iter().filter(|r| !r.error.is_empty()).count();
        let worst = |f: fn(&ScanRow) -> f64| {
            rows.iter().map(f).filter(|v| v.is_finite()).fold(f64::NAN, f64::max)
        };
        summaries.push(ScenarioSummary {
            scenario: s.name.clone(),
            rows: rows.len(),
            failures,
            worst_gradient_err: worst(|r| r.gradient_err),
            worst_hessian_err: worst(|r| r.hessian_err),
            worst_jacobian_err: worst(|r| r.jacobian_err),
        });
        had_failure |= failures > 0;
        let path = out.join(format!("{}.csv", s.name));
        std::fs::write(&path, report::scan_csv(&rows))
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        eprintln!("wrote {} ({} rows, {} failures)", path.display(), rows.len(), failures);
    }
    let spath = out.join("summary.csv");
    std::fs::write(&spath, report::summary_csv(&summaries))
        .map_err(|e| format!("cannot write {}: {e}", spath.display()))?;
    Ok(if had_failure { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Scan { config, out, seed } => match run_scan(&config, &out, seed) {
            Ok(code) => code,
            Err(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
        },
        Command::Suite { out } => {
            let results = suite::run_all(&Tolerances::default());
            let mut text = String::new();
            for r in &results {
                println!("{}", r.line());
                text.push_str(&r.line());
                text.push('\n');
            }
            if let Some(path) = out {
                if let Err(e) = std::fs::write(&path, text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            let failing: Vec<&str> =
                results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
            if failing.is_empty() {
                ExitCode::SUCCESS
            } else {
                eprintln!("failing criteria: {}", failing.join(", "));
                ExitCode::from(1)
            }
        }
        Command::Check { name, tol_scale } => {
            if !(tol_scale.is_finite() && tol_scale > 0.0) {
                eprintln!("error: --tol-scale must be a positive number");
                return ExitCode::from(2);
            }
            let tol = Tolerances { scale: tol_scale };
            match suite::run_one(&name, &tol) {
                Some(r) => {
                    println!("{}", r.line());
                    if r.passed {
                        ExitCode::SUCCESS
                    } else {
                        eprintln!("check failed: {}", r.name);
                        ExitCode::from(1)
                    }
                }
                None => {
                    eprintln!(
                        "error: unknown criterion '{name}'; known: {}",
                        suite::CRITERION_NAMES.join(", ")
                    );
                    ExitCode::from(2)
                }
            }
        }
    }
}
