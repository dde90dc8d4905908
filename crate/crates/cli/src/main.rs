use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bitangent_core::aronhold::REFERENCE_TABLE;
use bitangent_core::pipeline::{
    random_tau, run, selftest, RunConfig, DEFAULT_DEGENERACY_THRESHOLD, EXIT_INPUT, EXIT_PASS,
    EXIT_VERIFICATION,
};
use bitangent_core::theta::TruncationConfig;
use bitangent_core::PeriodMatrix;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bitangent", version, about = "Bitangent matrix of a plane quartic from its period matrix")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exhaustive checks of the characteristic combinatorics.
    Selftest {
        /// Alternative golden characteristic table.
        #[arg(long, value_name = "FILE")]
        golden: Option<PathBuf>,
    },
    /// Draw a seeded period matrix near i*I and write it as JSON.
    RandomTau {
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        numeric: Numeric,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Build the matrix and quartic for a period matrix and write the report.
    Run {
        #[arg(long, value_name = "FILE", conflicts_with = "seed", required_unless_present = "seed")]
        tau: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        numeric: Numeric,
        #[arg(long, value_enum, default_value = "on")]
        checks: Toggle,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Numeric {
    /// Perturbation size for seeded period matrices.
    #[arg(long, default_value_t = 0.1)]
    scale: f64,
    /// Theta truncation tolerance.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_DEGENERACY_THRESHOLD)]
    degeneracy_threshold: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), i32> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", p.display());
            EXIT_INPUT
        }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn cmd_selftest(golden: Option<PathBuf>) -> i32 {
    let text = match &golden {
        Some(p) => match fs::read_to_string(p) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", p.display());
                return EXIT_INPUT;
            }
        },
        None => REFERENCE_TABLE.to_string(),
    };
    let lines = selftest(&text);
    for l in &lines {
        println!("{} {}: {}", if l.passed { "PASS" } else { "FAIL" }, l.name, l.detail);
    }
    match lines.iter().find(|l| !l.passed) {
        Some(l) => {
            eprintln!("selftest failed: {}", l.name);
            EXIT_VERIFICATION
        }
        None => EXIT_PASS,
    }
}

fn cmd_random_tau(seed: u64, numeric: &Numeric, out: Option<PathBuf>) -> i32 {
    let cfg = TruncationConfig::with_tol(numeric.tol);
    match random_tau(seed, numeric.scale, numeric.degeneracy_threshold, &cfg) {
        Ok(r) => match write_output(out.as_deref(), &r.tau.to_json()) {
            Ok(()) => EXIT_PASS,
            Err(code) => code,
        },
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn cmd_run(tau: Option<PathBuf>, seed: Option<u64>, numeric: &Numeric, checks: Toggle, out: Option<PathBuf>) -> i32 {
    let cfg = RunConfig {
        truncation: TruncationConfig::with_tol(numeric.tol),
        degeneracy_threshold: numeric.degeneracy_threshold,
        checks: matches!(checks, Toggle::On),
        ..RunConfig::default()
    };
    let (period, source) = match (tau, seed) {
        (Some(path), _) => {
            let text = match fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", path.display());
                    return EXIT_INPUT;
                }
            };
            match PeriodMatrix::from_json(&text) {
                Ok(t) => (t, path.display().to_string()),
                Err(e) => {
                    eprintln!("error: {}: {e}", path.display());
                    return EXIT_INPUT;
                }
            }
        }
        (None, Some(seed)) => {
            match random_tau(seed, numeric.scale, numeric.degeneracy_threshold, &cfg.truncation) {
                Ok(r) => (r.tau, format!("seed {seed}, scale {}", numeric.scale)),
                Err(e) => {
                    eprintln!("error: {e}");
                    return e.exit_code();
                }
            }
        }
        (None, None) => unreachable!("clap requires a source"),
    };
    let report = match run(&period, &cfg, Some(source)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    if let Err(code) = write_output(out.as_deref(), &report.to_json()) {
        return code;
    }
    if let Some(v) = &report.verification {
        for c in &v.checks {
            eprintln!(
                "{} {} = {:e} (threshold {:e})",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.threshold
            );
        }
    }
    report.exit_code()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Selftest { golden } => cmd_selftest(golden),
        Command::RandomTau { seed, numeric, out } => cmd_random_tau(seed, &numeric, out),
        Command::Run {
            tau,
            seed,
            numeric,
            checks,
            out,
        } => cmd_run(tau, seed, &numeric, checks, out),
    };
    ExitCode::from(code as u8)
}
