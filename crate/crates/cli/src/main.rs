//! `cmk`: generate instances, solve them, inspect the LP and run suites.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use cmk::bench::{bench, run, write_bench, Algorithm, RunParams, Suite};
use cmk::config_lp::{solve_column_generation, LpProblem};
use cmk::constant_bins::dispatch::DEFAULT_M_SWITCH;
use cmk::constant_bins::DEFAULT_BUDGET;
use cmk::error::Error;
use cmk::generate::{generate, Family, GeneratorSpec};
use cmk::model::Instance;
use cmk::rounding::Mode;
use cmk::structure::structure_certificate;
use num::BigRational;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "cmk", version, about = "Cardinality-constrained multiple knapsack solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded instance.
    Gen {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run one algorithm and print its report.
    Solve {
        #[arg(long)]
        algo: Algorithm,
        #[arg(long, default_value_t = 0.2)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "practical")]
        mode: Mode,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
        #[arg(long, default_value_t = DEFAULT_M_SWITCH)]
        m_switch: usize,
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve the configuration LP over all items with m bins.
    Lp {
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Structural property checks.
    Structure {
        #[command(subcommand)]
        command: StructureCommand,
    },
    /// Run a suite of (instance, algorithm, seed) cells.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Subcommand)]
enum StructureCommand {
    /// Check the structural lemmas on a random packing and print a certificate.
    Verify {
        /// Granularity, e.g. `1/2` or `0.25`; its inverse must be an integer.
        #[arg(long, default_value = "1/2")]
        delta: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Failures that carry an exit code.
enum Failure {
    Solver(Error),
    Io(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Solver(e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Io(e)
    }
}

/// Guess counts can exceed what JSON numbers carry; those become strings.
fn wide(x: u128) -> Value {
    u64::try_from(x).map_or_else(|_| json!(x.to_string()), |v| json!(v))
}

fn error_json(e: &Error) -> Value {
    let mut v = json!({ "error": e.to_string(), "exit_code": e.exit_code() });
    let kind = match e {
        Error::Input(_) | Error::UnknownItem(_) => "input",
        Error::Precondition(_) => "precondition",
        Error::Capacity { size, limit, .. } => {
            v["size"] = json!(size);
            v["limit"] = json!(limit);
            "capacity"
        }
        Error::Budget { estimated, budget } => {
            v["estimated"] = wide(*estimated);
            v["budget"] = wide(*budget);
            "budget"
        }
        Error::Timeout { elapsed_ms, best_value } => {
            v["elapsed_ms"] = wide(*elapsed_ms);
            v["best_value"] = json!(best_value);
            "timeout"
        }
        Error::Convergence { .. } => "convergence",
        Error::Internal(_) => "internal",
    };
    v["kind"] = json!(kind);
    v
}

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
    Ok(Instance::from_json(&text)?)
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(p) => std::fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

fn parse_delta(s: &str) -> Result<BigRational, Error> {
    if let Ok(r) = s.parse::<BigRational>() {
        return Ok(r);
    }
    s.parse::<f64>()
        .ok()
        .and_then(BigRational::from_float)
        .ok_or_else(|| Error::input(format!("cannot parse delta '{s}'")))
}

fn execute(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Gen { family, n, m, k, seed, output } => {
            let inst = generate(&GeneratorSpec::new(family, n, m, k, seed))?;
            emit(&inst.to_json(), output.as_deref())
        }
        Command::Solve { algo, epsilon, seed, mode, budget, m_switch, input, output } => {
            let inst = read_instance(&input)?;
            let params = RunParams { epsilon, seed, mode, budget, m_switch };
            let report = run(&inst, algo, &params)?;
            emit(&pretty(&report), output.as_deref())
        }
        Command::Lp { epsilon, input } => {
            let inst = read_instance(&input)?;
            if !(epsilon > 0.0 && epsilon < 1.0) {
                return Err(Error::input("epsilon must lie in (0, 1)").into());
            }
            let lp = solve_column_generation(&LpProblem::full(&inst), epsilon)?;
            let cover: Vec<Value> = inst
                .ids()
                .map(|id| {
                    let c: f64 = lp.fractional.iter().filter(|(c, _)| c.contains(id)).map(|(_, w)| *w).sum();
                    json!({ "id": id, "cover": c })
                })
                .collect();
            emit(
                &pretty(&json!({
                    "objective": lp.objective,
                    "upper_bound": lp.upper_bound,
                    "status": lp.status,
                    "columns": lp.columns,
                    "configurations": lp.fractional.iter().map(|(c, w)| json!({ "items": c, "weight": w })).collect::<Vec<_>>(),
                    "cover": cover,
                })),
                None,
            )
        }
        Command::Structure { command: StructureCommand::Verify { delta, seed } } => {
            let cert = structure_certificate(&parse_delta(&delta)?, seed)?;
            emit(&pretty(&cert), None)
        }
        Command::Bench { suite, output } => {
            let text = std::fs::read_to_string(&suite).map_err(|e| Error::input(format!("{}: {e}", suite.display())))?;
            let result = bench(&Suite::from_json(&text)?);
            write_bench(&result, &output).with_context(|| format!("writing {}", output.display()))?;
            emit(&pretty(&result.aggregate), None)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Solver(e)) => {
            println!("{}", pretty(&error_json(&e)));
            ExitCode::from(e.exit_code() as u8)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
