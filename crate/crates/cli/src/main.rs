use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod output;
mod table1;

use commands::{Command, Outcome};

#[derive(Parser, Debug)]
#[command(name = "gldpc", version, about = "Iterative hard-decision decoding thresholds and simulation for BCH-based GLDPC ensembles")]
struct Cli {
    /// Directory for JSON/CSV artifacts.
    #[arg(long, env = "GLDPC_OUT_DIR", default_value = ".", global = true)]
    out_dir: PathBuf,

    /// Artifact file stem (defaults to the command name).
    #[arg(long, global = true)]
    name: Option<String>,

    #[command(subcommand)]
    command: Top,
}

#[derive(Subcommand, Debug)]
enum Top {
    #[command(flatten)]
    Run(Command),

    /// Re-execute the config embedded in a JSON artifact.
    Replay {
        /// A `.json` or `.meta.json` file written by a previous run.
        artifact: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Top::Run(c) => c,
        Top::Replay { artifact } => match commands::load_config(&artifact) {
            Ok(c) => c,
            Err(e) => return fail(&e),
        },
    };
    match commands::execute(&command, &cli.out_dir, cli.name.as_deref()) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Deviation) => ExitCode::from(1),
        Err(e) => fail(&e),
    }
}

fn fail(e: &gldpc::Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(commands::exit_code(e))
}
