use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use swarm_guidance::Algorithm;
use swarm_guidance_cli::{cmd_compare, cmd_export_matrix, cmd_run, cmd_verify, Fixture, VerifyTarget};

#[derive(Parser)]
#[command(name = "swarm-guide", version, about = "Markov chain swarm guidance experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for agent moves (results do not depend on it).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run several algorithms on one scenario with the same seed.
    Compare {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "dsmc,mh")]
        algorithms: Vec<Algorithm>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the spectral contraction certificates of a topology.
    #[command(alias = "verify-spectral")]
    Verify(VerifyArgs),
    /// Write the transition matrix used at a step as CSV.
    ExportMatrix {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        step: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, requires_all = ["cols", "hop"], conflicts_with = "fixture")]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long)]
    hop: Option<usize>,
    /// cycle4, edge2 or disconnected2
    #[arg(long, required_unless_present = "rows")]
    fixture: Option<String>,
    #[arg(long)]
    d_chsn: Option<f64>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run { scenario, out, seed, workers } => {
            let output = cmd_run(&scenario, &out, seed, workers)?;
            let last = output.metrics.last().expect("at least one row");
            println!(
                "steps={} total_variation={} cumulative_transitions={} d_chsn={}",
                last.step, last.total_variation, last.cumulative_transitions, output.d_chsn
            );
        }
        Command::Compare { scenario, algorithms, out } => {
            let comparison = cmd_compare(&scenario, &algorithms, &out)?;
            print!("{}", comparison.summary);
        }
        Command::Verify(args) => {
            let target = match (args.fixture, args.rows, args.cols, args.hop) {
                (Some(name), ..) => VerifyTarget::Fixture(Fixture::parse(&name)?),
                (None, Some(rows), Some(cols), Some(hop)) => VerifyTarget::Grid { rows, cols, hop },
                _ => anyhow::bail!("pass --fixture or all of --rows, --cols, --hop"),
            };
            let verification = cmd_verify(target, args.d_chsn)?;
            print!("{}", verification.render());
            if !verification.ok() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::ExportMatrix { scenario, step, out } => {
            let matrix = cmd_export_matrix(&scenario, step, &out)?;
            println!("wrote {}x{} matrix to {}", matrix.rows(), matrix.cols(), out.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}
