// Copyright 2026 qsw-thermo Contributors
// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qsw_thermo::cli::{self, RunConfig, EXIT_NUMERICAL, EXIT_USAGE};
use qsw_thermo::tilt::LimitMode;
use qsw_thermo::trajectory::InitialState;

/// Worker-count override for the parallel scan and ensemble.
const WORKERS_ENV: &str = "QSWT_WORKERS";

#[derive(Parser, Debug)]
#[command(
    name = "qswt",
    version,
    about = "Counting statistics of dissipative quantum walks on directed graphs"
)]
struct Args {
    #[command(subcommand)]
    command: Command,

    /// Edge-list file
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0.85)]
    damping: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    coherent_weight: f64,
    #[arg(long, global = true, default_value_t = -3.0, allow_hyphen_values = true)]
    s_min: f64,
    #[arg(long, global = true, default_value_t = 3.0, allow_hyphen_values = true)]
    s_max: f64,
    #[arg(long, global = true, default_value_t = 61)]
    s_steps: usize,
    /// Finite-difference step for derivatives of theta
    #[arg(long, global = true, default_value_t = 1e-4)]
    fd_step: f64,
    #[arg(long, global = true, default_value_t = 200.0)]
    t_max: f64,
    #[arg(long, global = true, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, global = true, default_value_t = 1000)]
    n_traj: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output CSV (stdout if omitted)
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Limit::None)]
    limit_mode: Limit,
    /// Initial trajectory state
    #[arg(long, global = true, value_enum, default_value_t = Initial::Uniform)]
    initial: Initial,
    /// Per-jump event log (simulate only)
    #[arg(long, global = true)]
    events: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Classical pagerank of the Google matrix
    Pagerank,
    /// Pagerank vs activity at s=0 vs steady-state populations
    Ranks,
    /// Theta, activity and dispersion over a uniform s grid
    Scan,
    /// Quantum-jump Monte Carlo ensemble statistics
    Simulate,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Limit {
    None,
    Inactive,
    Active,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Initial {
    Uniform,
    Steady,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Ok(workers) = std::env::var(WORKERS_ENV) {
        match workers.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                eprintln!("error: {WORKERS_ENV} must be a positive integer");
                return ExitCode::from(EXIT_USAGE as u8);
            }
        }
    }
    let Some(input) = args.input.clone() else {
        eprintln!("error: --input is required");
        return ExitCode::from(EXIT_USAGE as u8);
    };
    let positive = |x: f64| x > 0.0;
    if args.s_steps == 0 || !positive(args.fd_step) || !positive(args.dt) || !positive(args.t_max) {
        eprintln!("error: --s-steps, --fd-step, --dt and --t-max must be positive");
        return ExitCode::from(EXIT_USAGE as u8);
    }
    let config = RunConfig {
        input,
        damping: args.damping,
        coherent_weight: args.coherent_weight,
        s_min: args.s_min,
        s_max: args.s_max,
        s_steps: args.s_steps,
        fd_step: args.fd_step,
        t_max: args.t_max,
        dt: args.dt,
        n_traj: args.n_traj,
        seed: args.seed,
        output: args.output.clone(),
        limit_mode: match args.limit_mode {
            Limit::None => LimitMode::None,
            Limit::Inactive => LimitMode::Inactive,
            Limit::Active => LimitMode::Active,
        },
        initial: match args.initial {
            Initial::Uniform => InitialState::UniformSuperposition,
            Initial::Steady => InitialState::SteadyState,
        },
        events: args.events.clone(),
    };

    match run(args.command, &config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_USAGE
            };
            ExitCode::from(code as u8)
        }
    }
}

fn run(command: Command, config: &RunConfig) -> qsw_thermo::Result<()> {
    let out: Box<dyn Write> = match &config.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match command {
        Command::Pagerank => cli::cmd_pagerank(config, out),
        Command::Ranks => cli::cmd_ranks(config, out),
        Command::Simulate => cli::cmd_simulate(config, out),
        Command::Scan => {
            let summary = cli::cmd_scan(config, out)?;
            if summary.failures > 0 {
                eprintln!(
                    "{} of {} grid points failed",
                    summary.failures, summary.points
                );
            }
            match summary.crossover {
                Some((s, c)) if c.interior => {
                    eprintln!(
                        "delta_global maximum {:.6} at interior s = {s}",
                        c.delta_global
                    )
                }
                Some((s, c)) => {
                    eprintln!(
                        "delta_global has no interior maximum (largest {:.6} at edge s = {s})",
                        c.delta_global
                    )
                }
                None => eprintln!("delta_global undefined on the whole grid"),
            }
            Ok(())
        }
    }
}
