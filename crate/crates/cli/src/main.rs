mod config;
mod error;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kmlab::Execution;

use config::{read_json, run, write_text, ExperimentConfig, ParamsInput, ResultRecord, Task};
use error::CliResult;
use plot::{emit_plot_data, Selector};

/// Experiments on k-monotone Boolean functions.
#[derive(Parser)]
#[command(name = "kmlab", version)]
struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true, env = "KMLAB_THREADS")]
    threads: Option<usize>,
    /// Run every batch on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a function and write it as JSON.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Exact properties of a function.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Certified bounds on the distance to k-monotonicity.
    Dist {
        #[arg(long = "fn")]
        function: PathBuf,
        #[arg(long)]
        k: usize,
        /// Where to write the matching certificate.
        #[arg(long)]
        certificate: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a tester repeatedly and log every trial.
    #[command(subcommand)]
    Test(TestCommand),
    /// Exact single-chain rejection probability on a hard function.
    ExactProb {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numerical checks of tail bounds.
    #[command(subcommand)]
    Bounds(BoundsCommand),
    /// Statistics over sampled chains.
    #[command(subcommand)]
    Stats(StatsCommand),
    /// Two-column data file from result records.
    Plot {
        #[arg(long, num_args = 1.., required = true)]
        records: Vec<PathBuf>,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, requires = "err_high")]
        err_low: Option<String>,
        #[arg(long, requires = "err_low")]
        err_high: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Symmetric balanced blocks function.
    Bb {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        blocks: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hidden-block hard function; a seed draws a random relabelling.
    Hard {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        c_split: Option<f64>,
        #[arg(long)]
        c_mid: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Symmetric function with two bands of ones.
    Band {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Maximum alternation over all chains.
    Km {
        #[arg(long = "fn")]
        function: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Source {
    #[arg(long = "fn", conflicts_with = "params", required_unless_present = "params")]
    function: Option<PathBuf>,
    /// Hard-function parameters instead of a function file.
    #[arg(long)]
    params: Option<PathBuf>,
}

#[derive(Subcommand)]
enum TestCommand {
    /// The chain tester.
    Chain {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        chains: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Per-trial CSV log.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Result record; stdout when absent.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Compare the rejection rate with the exact probability.
        #[arg(long)]
        compare_exact: bool,
    },
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// Chernoff bound against exact hypergeometric tails.
    Hypergeom {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum StatsCommand {
    /// Sizes of the block sets a chain meets inside the middle band.
    V {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn to_config(cmd: Command) -> CliResult<Option<ExperimentConfig>> {
    let base = |task| ExperimentConfig { task: Some(task), ..Default::default() };
    let kind = |task, kind: &str| ExperimentConfig { kind: Some(kind.into()), ..base(task) };
    Ok(Some(match cmd {
        Command::Gen(GenCommand::Bb { n, blocks, out }) => {
            ExperimentConfig { n: Some(n), blocks: Some(blocks), out, ..kind(Task::Gen, "bb") }
        }
        Command::Gen(GenCommand::Hard { n, k, s, c_split, c_mid, seed, out }) => {
            ExperimentConfig { n: Some(n), k: Some(k), s: Some(s), c_split, c_mid, seed, out, ..kind(Task::Gen, "hard") }
        }
        Command::Gen(GenCommand::Band { n, out }) => ExperimentConfig { n: Some(n), out, ..kind(Task::Gen, "band") },
        Command::Check(CheckCommand::Km { function, out }) => {
            ExperimentConfig { function: Some(function), out, ..kind(Task::Check, "km") }
        }
        Command::Dist { function, k, certificate, out } => {
            ExperimentConfig { function: Some(function), k: Some(k), certificate, out, ..base(Task::Dist) }
        }
        Command::Test(TestCommand::Chain { source, k, chains, trials, seed, epsilon, out, summary, compare_exact }) => {
            ExperimentConfig {
                function: source.function,
                params: source.params.map(ParamsInput::Path),
                k: Some(k),
                chains: Some(chains),
                trials: Some(trials),
                seed: Some(seed),
                epsilon,
                compare_exact,
                csv: out,
                out: summary,
                ..kind(Task::Test, "chain")
            }
        }
        Command::ExactProb { params, k, out } => {
            ExperimentConfig { params: Some(ParamsInput::Path(params)), k, out, ..base(Task::ExactProb) }
        }
        Command::Bounds(BoundsCommand::Hypergeom { grid, csv, out }) => {
            ExperimentConfig { grid: Some(grid), csv, out, ..kind(Task::Bounds, "hypergeom") }
        }
        Command::Stats(StatsCommand::V { params, trials, seed, k, csv, out }) => ExperimentConfig {
            params: Some(ParamsInput::Path(params)),
            trials: Some(trials),
            seed: Some(seed),
            k,
            csv,
            out,
            ..kind(Task::Stats, "v")
        },
        Command::Run { config } => read_json(&config)?,
        Command::Plot { records, x, y, err_low, err_high, out } => {
            let recs = records.iter().map(|p| read_json::<ResultRecord>(p)).collect::<CliResult<Vec<_>>>()?;
            let (x, y): (Selector, Selector) = (x.parse()?, y.parse()?);
            let err = match (err_low, err_high) {
                (Some(lo), Some(hi)) => Some((lo.parse::<Selector>()?, hi.parse::<Selector>()?)),
                _ => None,
            };
            let data = emit_plot_data(&recs, &x, &y, err.as_ref().map(|(a, b)| (a, b)))?;
            match out {
                Some(p) => write_text(&p, &data)?,
                None => print!("{data}"),
            }
            return Ok(None);
        }
    }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    let result = (|| {
        if let Some(t) = cli.threads {
            kmlab::exec::configure_threads(t)?;
        }
        if let Some(cfg) = to_config(cli.command)? {
            run(&cfg, exec)?;
        }
        Ok(())
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let e: error::CliError = e;
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
