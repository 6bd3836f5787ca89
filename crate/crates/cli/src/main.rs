use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cosearch_cli::app::{cmd_examples, cmd_figure, cmd_run, cmd_sweep, Outcome};
use cosearch_cli::{AppError, Format, OutputOpts};

/// Monte Carlo simulator of joint AI-human adaptive search.
#[derive(Parser)]
#[command(name = "cosearch", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Output encoding; defaults to the config, then the --out extension, then csv
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write results here (atomically) instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the number of runs per cell
    #[arg(long)]
    runs: Option<u64>,
}

impl From<Output> for OutputOpts {
    fn from(o: Output) -> Self {
        OutputOpts {
            format: o.format,
            out: o.out,
            seed: o.seed,
            runs: o.runs,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a single Monte Carlo cell
    Run {
        config: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Run the grid described by the config's [sweep] table
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Replicate a figure (3, 4, 5, 6 or 8)
    Figure {
        id: u8,
        /// Parameter override, e.g. --set n_h=12 (repeatable)
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        /// SVG destination; defaults to the --out path with an .svg extension
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Recompute the worked examples and compare with the published values
    Examples,
}

fn execute(cmd: Command) -> Result<Outcome, AppError> {
    match cmd {
        Command::Run { config, output } => cmd_run(&config, &output.into()),
        Command::Sweep { config, output } => cmd_sweep(&config, &output.into()),
        Command::Figure {
            id,
            sets,
            svg,
            output,
        } => cmd_figure(id, &sets, svg.as_deref(), &output.into()),
        Command::Examples => cmd_examples(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(outcome.stdout.as_bytes()).is_err() {
                return ExitCode::from(3);
            }
            for (path, bytes) in &outcome.written {
                eprintln!("wrote {} ({bytes} bytes)", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
