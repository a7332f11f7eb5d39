use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use blindrec::protocol::Status;
use blindrec_cli::commands::{cmd_build_code, cmd_connect, cmd_run, cmd_schedule, cmd_serve};
use blindrec_cli::sweep::cmd_sweep;
use blindrec_cli::{CliError, RunConfig};

const EXIT_TOOL_ERROR: u8 = 1;
const EXIT_PROTOCOL_FAILURE: u8 = 2;

#[derive(Parser)]
#[command(name = "blindrec", version, about = "Blind rate-adaptive LDPC reconciliation")]
struct Cli {
    /// key = value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    keys: ConfigFlags,

    #[command(subcommand)]
    command: Command,
}

/// One flag per configuration key; each overrides the file.
#[derive(Args)]
struct ConfigFlags {
    #[arg(long, global = true)]
    code: Option<String>,
    #[arg(long, global = true)]
    n: Option<String>,
    #[arg(long, global = true)]
    distribution: Option<String>,
    #[arg(long = "code_seed", global = true)]
    code_seed: Option<String>,
    #[arg(long, global = true)]
    r0: Option<String>,
    #[arg(long, global = true)]
    delta: Option<String>,
    #[arg(long, global = true)]
    rounds: Option<String>,
    #[arg(long, global = true)]
    e0: Option<String>,
    #[arg(long, global = true)]
    e1: Option<String>,
    #[arg(long, global = true)]
    e: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long, global = true)]
    trials: Option<String>,
    #[arg(long = "max_iters", global = true)]
    max_iters: Option<String>,
    #[arg(long = "assumed_crossover", global = true)]
    assumed_crossover: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, short = 'o', global = true)]
    output: Option<String>,
    #[arg(long, global = true)]
    parallel: Option<String>,
}

impl ConfigFlags {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        [
            ("code", &self.code),
            ("n", &self.n),
            ("distribution", &self.distribution),
            ("code_seed", &self.code_seed),
            ("r0", &self.r0),
            ("delta", &self.delta),
            ("rounds", &self.rounds),
            ("e0", &self.e0),
            ("e1", &self.e1),
            ("e", &self.e),
            ("grid", &self.grid),
            ("trials", &self.trials),
            ("max_iters", &self.max_iters),
            ("assumed_crossover", &self.assumed_crossover),
            ("seed", &self.seed),
            ("output", &self.output),
            ("parallel", &self.parallel),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
        .collect()
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a PEG code and write it as alist
    BuildCode,
    /// Print the round schedule as CSV
    Schedule,
    /// Run one seeded session at crossover `e`
    Run,
    /// Monte-Carlo sweep over the crossover grid
    Sweep,
    /// Bob endpoint over TCP
    Serve {
        #[arg(long, default_value = "127.0.0.1:7878")]
        listen: String,
    },
    /// Alice endpoint over TCP
    Connect {
        #[arg(long, default_value = "127.0.0.1:7878")]
        peer: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_TOOL_ERROR)
        }
    }
}

fn status_exit(success: bool) -> ExitCode {
    if success {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_PROTOCOL_FAILURE)
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let config = RunConfig::load(cli.config.as_deref(), &cli.keys.pairs())?;
    match cli.command {
        Command::BuildCode => {
            let built = cmd_build_code(&config)?;
            if config.output.is_some() {
                print!("{built}");
            } else {
                eprint!("{built}");
                print!("{}", built.alist);
            }
        }
        Command::Schedule => print!("{}", cmd_schedule(&config)?),
        Command::Run => {
            let report = cmd_run(&config)?;
            print!("{report}");
            return Ok(status_exit(report.result.success));
        }
        Command::Sweep => {
            let csv = cmd_sweep(&config)?;
            if config.output.is_none() {
                print!("{csv}");
            }
        }
        Command::Serve { listen } => {
            let outcome = cmd_serve(&config, &listen)?;
            println!("status = {:?}", outcome.status);
            println!("rounds = {}", outcome.rounds_used);
            return Ok(status_exit(outcome.status == Status::Success));
        }
        Command::Connect { peer } => {
            let outcome = cmd_connect(&config, &peer)?;
            println!("status = {:?}", outcome.status);
            println!("rounds = {}", outcome.rounds_used);
            return Ok(status_exit(outcome.status == Status::Success));
        }
    }
    Ok(ExitCode::SUCCESS)
}
