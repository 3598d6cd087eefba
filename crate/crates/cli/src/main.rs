use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crn_cli::commands::{self, CliError, MsaOptions, Output};
use crn_cli::report::render;

#[derive(Parser)]
#[command(name = "crn", version, about = "Multistationarity analysis of poly-PL reaction networks")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the report to this path instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structural numbers and classifications of a network.
    Analyze { file: String },
    /// STAR-MSC transform with its identity and equivalence checks.
    Transform {
        file: String,
        /// Sample points for the dynamic equivalence check.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decomposition tests on a given or fundamental partition.
    Decompose {
        file: String,
        /// Parts as label lists, e.g. `r1,r2;r3`.
        #[arg(long)]
        parts: Option<String>,
        /// Orientation for the fundamental partition, e.g. `r1,r3`.
        #[arg(long, conflicts_with = "parts")]
        orientation: Option<String>,
    },
    /// Full multistationarity search.
    Msa {
        file: String,
        /// Maximum number of branch systems solved.
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        #[arg(long, default_value_t = 4096)]
        max_orientations: usize,
        /// Seed for the verification sampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restrict the search to one orientation of the transformed network.
        #[arg(long)]
        orientation: Option<String>,
    },
    /// Re-check the witness in a JSON `msa` report.
    Verify { report: String },
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Analyze { file } => Ok(commands::analyze(&commands::load(file)?)),
        Command::Transform { file, trials, seed } => commands::transform(&commands::load(file)?, *trials, *seed),
        Command::Decompose {
            file,
            parts,
            orientation,
        } => commands::decompose(&commands::load(file)?, parts.as_deref(), orientation.as_deref()),
        Command::Msa {
            file,
            budget,
            max_orientations,
            seed,
            orientation,
        } => commands::msa(
            &commands::load(file)?,
            &MsaOptions {
                budget: *budget,
                max_orientations: *max_orientations,
                orientation: orientation.clone(),
                seed: *seed,
            },
        ),
        Command::Verify { report } => {
            let text = std::fs::read_to_string(report)
                .map_err(|e| CliError::Precondition(format!("{report}: {e}")))?;
            let doc = serde_json::from_str(&text).map_err(|e| CliError::Precondition(format!("{report}: {e}")))?;
            commands::verify(&doc)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("crn: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = render(&output.report, cli.json);
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("crn: {path}: {e}");
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(output.exit as u8)
}
