use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sbl_cli::{parse_scenario, run_and_emit, scenario_suite, CliError, Overrides, Result};
use sbl_core::harness::complexity_probe;
use sbl_core::Hyperparameters;

#[derive(Parser)]
#[command(name = "sbl", version, about = "Social bandit learning simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file.
    Run {
        scenario: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run a built-in suite of scenarios.
    Suite {
        /// nonlearners, learners, detection, subsets, crowded, two_arm_sweep or noise
        name: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Time the social learner's decision step over society and arm counts.
    Probe {
        #[arg(long, value_delimiter = ',', default_value = "2,4,8,16")]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "10")]
        k: Vec<usize>,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
    },
}

#[derive(Args)]
struct RunOpts {
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    horizon: Option<usize>,
    /// Master seed; takes precedence over SBL_SEED and the scenario file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_svg: bool,
    /// Also write per-run trial logs.
    #[arg(long)]
    raw_records: bool,
    /// Worker threads for run-level parallelism (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl RunOpts {
    fn overrides(&self) -> Overrides {
        Overrides {
            runs: self.runs,
            horizon: self.horizon,
            seed: self.seed,
            no_svg: self.no_svg,
            raw_records: self.raw_records,
        }
    }
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var("SBL_SEED") {
        Ok(v) => {
            v.trim().parse().map(Some).map_err(|_| {
                CliError::scenario("SBL_SEED", format!("not an unsigned integer: `{v}`"))
            })
        }
        Err(_) => Ok(None),
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { scenario, opts } => {
            let mut s = parse_scenario(&scenario)?;
            opts.overrides().apply(&mut s, env_seed()?);
            let dir = opts
                .out
                .clone()
                .or_else(|| s.output.directory.clone())
                .unwrap_or_else(|| PathBuf::from("results"));
            let files = run_and_emit(&s, &dir, opts.threads)?;
            println!(
                "{}: wrote {} files to {}",
                s.name,
                files.len(),
                dir.display()
            );
        }
        Command::Suite { name, opts } => {
            let seed = env_seed()?;
            let root = opts.out.clone().unwrap_or_else(|| PathBuf::from("results"));
            for mut s in scenario_suite(&name)? {
                opts.overrides().apply(&mut s, seed);
                let dir = root.join(&name).join(&s.name);
                let files = run_and_emit(&s, &dir, opts.threads)?;
                println!(
                    "{}: wrote {} files to {}",
                    s.name,
                    files.len(),
                    dir.display()
                );
            }
        }
        Command::Probe { n, k, trials } => {
            let rows = complexity_probe(&n, &k, &Hyperparameters::default(), trials)?;
            println!("n,k,nanos_per_trial");
            for r in rows {
                println!("{},{},{:.0}", r.n, r.k, r.nanos_per_trial);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
