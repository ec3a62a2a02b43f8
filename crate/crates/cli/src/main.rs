use std::path::PathBuf;
use std::process::ExitCode;

use alphamod_cli::{config, run_text, Command, Options};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "alphamod", version, about = "Alpha-modulation norm and NLS experiments")]
struct Cli {
    #[command(subcommand)]
    action: Action,
}

#[derive(Subcommand)]
enum Action {
    /// Run an experiment command.
    #[command(flatten)]
    Run(RunArgs),
    /// Print the configuration JSON schema.
    Schema,
}

#[derive(Subcommand)]
enum RunArgs {
    Decompose(Flags),
    Norm(Flags),
    Evolve(Flags),
    Strichartz(Flags),
    Bilinear(Flags),
    Construct(Flags),
    Inflate(Flags),
    Picard(Flags),
    Glassey(Flags),
}

#[derive(clap::Args)]
struct Flags {
    /// JSON configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads for sweep parallelism.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a gnuplot script per table.
    #[arg(long)]
    emit_gnuplot: bool,
}

impl RunArgs {
    fn split(self) -> (Command, Flags) {
        match self {
            Self::Decompose(f) => (Command::Decompose, f),
            Self::Norm(f) => (Command::Norm, f),
            Self::Evolve(f) => (Command::Evolve, f),
            Self::Strichartz(f) => (Command::Strichartz, f),
            Self::Bilinear(f) => (Command::Bilinear, f),
            Self::Construct(f) => (Command::Construct, f),
            Self::Inflate(f) => (Command::Inflate, f),
            Self::Picard(f) => (Command::Picard, f),
            Self::Glassey(f) => (Command::Glassey, f),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = match cli.action {
        Action::Schema => {
            print!("{}", config::schema_json());
            return ExitCode::SUCCESS;
        }
        Action::Run(args) => args.split(),
    };
    let text = match &flags.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => Some(t),
            Err(e) => {
                eprintln!("cannot read {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => None,
    };
    let opts = Options { jobs: flags.jobs, out: flags.out, emit_gnuplot: flags.emit_gnuplot };
    match run_text(command, text.as_deref(), &opts) {
        Ok(outcome) => {
            for (name, ok) in &outcome.report.checks {
                println!("{:<32} {}", name, if *ok { "pass" } else { "FAIL" });
            }
            for file in &outcome.files {
                println!("wrote {}", file.display());
            }
            println!("{}: {}", command.name(), if outcome.pass() { "pass" } else { "FAIL" });
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
