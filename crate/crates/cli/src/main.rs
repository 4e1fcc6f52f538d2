//! `dynred`: generate instances, run reductions against their oracles,
//! sweep random instances, and benchmark operation counts.
//!
//! Exit codes: 0 agreement, 1 disagreement, 2 invalid input, 3 guard
//! violation (instance too large for a brute-force oracle).

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{CliError, CliResult, Context, CostModel, DiameterArgs, DiameterMode, Output};

#[derive(Debug, Parser)]
#[command(name = "dynred", version, about = "Reductions to partially dynamic graph problems")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Stdout format. Bench defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Print nothing on stdout except generated instances.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a random instance.
    Gen {
        #[command(subcommand)]
        problem: GenProblem,
    },
    /// Run one reduction and compare it with the oracle.
    Solve {
        #[command(subcommand)]
        problem: SolveProblem,
    },
    /// Sweep random instances through reduction and oracle.
    Verify {
        #[command(subcommand)]
        problem: VerifyProblem,
    },
    /// Count operations over growing sizes and fit a log-log slope.
    Bench {
        #[command(subcommand)]
        problem: BenchProblem,
    },
}

#[derive(Debug, Subcommand)]
enum GenProblem {
    Oumv {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// DIMACS output, or the JSON wrapper when `--out` ends in `.json`.
    Cnf {
        #[arg(long)]
        vars: usize,
        /// Defaults to four clauses per variable.
        #[arg(long)]
        clauses: Option<usize>,
        #[arg(long, default_value_t = 3)]
        width: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Tcstar {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        delta: usize,
        #[arg(long, default_value_t = 2)]
        p: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        /// Plant a triangle-free color triple `i,b,c` in a dense instance.
        #[arg(long, value_parser = parse_triple)]
        plant: Option<(usize, usize, usize)>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum SolveProblem {
    Matching {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        decremental: bool,
    },
    Flow {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        early_exit: bool,
        #[arg(long)]
        decremental: bool,
    },
    Diameter {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "static")]
        mode: DiameterMode,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Rollback exponent; defaults to the balancing root (about 0.618).
        #[arg(long)]
        alpha: Option<f64>,
        /// Interior nodes per subdivided edge.
        #[arg(long)]
        subdivide: Option<usize>,
        /// Engine cost model for node-add mode.
        #[arg(long, value_enum, default_value = "unit")]
        cost: CostModel,
    },
}

#[derive(Debug, Subcommand)]
enum VerifyProblem {
    Matching {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value = "2..16", value_parser = commands::parse_range)]
        n: (usize, usize),
    },
    Flow {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value = "4..14", value_parser = commands::parse_range)]
        vars: (usize, usize),
    },
    Diameter {
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value = "2..10", value_parser = commands::parse_range)]
        n: (usize, usize),
    },
}

#[derive(Debug, Subcommand)]
enum BenchProblem {
    Matching {
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
        sizes: Vec<usize>,
    },
    Flow {
        #[arg(long, value_delimiter = ',', default_value = "4,6,8")]
        sizes: Vec<usize>,
    },
    Diameter {
        #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
        sizes: Vec<usize>,
    },
}

fn parse_triple(text: &str) -> Result<(usize, usize, usize), String> {
    let parts: Vec<usize> = text
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| format!("bad triple `{text}`")))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [a, b, c] => Ok((*a, *b, *c)),
        _ => Err(format!("expected three comma-separated values, got `{text}`")),
    }
}

fn emit(cli: &Cli, out: &Output, default: Format) -> CliResult<()> {
    if let Some(path) = &cli.report {
        let text = serde_json::to_string_pretty(&out.json).expect("report serializes") + "\n";
        std::fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source })?;
    }
    if !cli.quiet {
        match cli.format.unwrap_or(default) {
            Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).expect("report serializes")),
            Format::Csv => print!("{}", out.csv),
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<bool> {
    let ctx = Context { seed: cli.seed, command: std::env::args().collect() };
    let out = match &cli.command {
        Command::Gen { problem } => {
            match problem {
                GenProblem::Oumv { n, density, out } => commands::gen_oumv_file(*n, *density, cli.seed, out.as_deref())?,
                GenProblem::Cnf { vars, clauses, width, out } => {
                    commands::gen_cnf_file(*vars, clauses.unwrap_or(4 * vars), *width, cli.seed, out.as_deref())?
                }
                GenProblem::Tcstar { n, delta, p, density, plant, out } => {
                    commands::gen_tcstar_file(*n, *delta, *p, *density, *plant, cli.seed, out.as_deref())?
                }
            }
            return Ok(true);
        }
        Command::Solve { problem } => match problem {
            SolveProblem::Matching { instance, decremental } => commands::solve_matching(&ctx, instance, *decremental)?,
            SolveProblem::Flow { cnf, early_exit, decremental } => {
                commands::solve_flow(&ctx, cnf, *early_exit, *decremental)?
            }
            SolveProblem::Diameter { instance, mode, gamma, alpha, subdivide, cost } => {
                let args = DiameterArgs { mode: *mode, gamma: *gamma, alpha: *alpha, subdivide: *subdivide, cost: *cost };
                commands::solve_diameter(&ctx, instance, &args)?
            }
        },
        Command::Verify { problem } => match problem {
            VerifyProblem::Matching { count, n } => commands::verify_matching(&ctx, *count, *n)?,
            VerifyProblem::Flow { count, vars } => commands::verify_flow(&ctx, *count, *vars)?,
            VerifyProblem::Diameter { count, n } => commands::verify_diameter(&ctx, *count, *n)?,
        },
        Command::Bench { problem } => {
            let out = match problem {
                BenchProblem::Matching { sizes } => commands::bench_matching(&ctx, sizes)?,
                BenchProblem::Flow { sizes } => commands::bench_flow(&ctx, sizes)?,
                BenchProblem::Diameter { sizes } => commands::bench_diameter(&ctx, sizes)?,
            };
            emit(cli, &out, Format::Csv)?;
            return Ok(out.ok);
        }
    };
    emit(cli, &out, Format::Json)?;
    Ok(out.ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
