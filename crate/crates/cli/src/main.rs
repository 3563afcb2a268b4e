use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use posture_core::{ActionClass, Strategy};

mod commands;
mod error;
mod io;
mod report;

/// Recognise arm postures from skeleton recordings.
#[derive(Debug, Parser)]
#[command(name = "posture", version)]
struct Cli {
    /// Model configuration (partitions, rule tables, ground parameters, decision).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the modal fuzzy subset of every frame as JSON lines.
    Fuzzify {
        /// JSON-lines recording, `-` for stdin.
        #[arg(long, default_value = "-")]
        input: PathBuf,
        #[arg(long)]
        skip_bad_frames: bool,
    },
    /// Learn a reference posture from frames and store it under `--name`.
    Learn {
        #[arg(long, default_value = "-")]
        input: PathBuf,
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        name: String,
        #[arg(long, allow_negative_numbers = true)]
        tolerance: f64,
        #[arg(long, value_enum, default_value = "classical")]
        action_class: ClassArg,
        /// Defaults to the reference name.
        #[arg(long)]
        action_id: Option<String>,
        #[arg(long)]
        skip_bad_frames: bool,
    },
    /// Recognise every frame against the stored references.
    Decide {
        #[arg(long, default_value = "-")]
        input: PathBuf,
        #[arg(long)]
        store: PathBuf,
        /// Ground distance file; defaults to the generated one.
        #[arg(long)]
        ground: Option<PathBuf>,
        /// Overrides the configured strategy.
        #[arg(long)]
        strategy: Option<Strategy>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        skip_bad_frames: bool,
        /// Number of heaviest modal terms reported per frame.
        #[arg(long, default_value_t = 3)]
        top: usize,
    },
    /// Pairwise distances between stored references.
    Distance {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        ground: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Check a configuration, store and ground distance for consistency.
    Validate {
        #[arg(long)]
        store: Option<PathBuf>,
        #[arg(long)]
        ground: Option<PathBuf>,
        #[arg(long)]
        strategy: Option<Strategy>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ClassArg {
    Classical,
    Emergency,
}

impl From<ClassArg> for ActionClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Classical => ActionClass::Classical,
            ClassArg::Emergency => ActionClass::Emergency,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = cli.config.as_deref();
    let result = match cli.command {
        Command::Fuzzify { input, skip_bad_frames } => commands::fuzzify(config, &input, skip_bad_frames),
        Command::Learn { input, store, name, tolerance, action_class, action_id, skip_bad_frames } => {
            let action_id = action_id.unwrap_or_else(|| name.clone());
            commands::learn(
                config,
                &input,
                &store,
                commands::LearnArgs { name, tolerance, action_class: action_class.into(), action_id },
                skip_bad_frames,
            )
        }
        Command::Decide { input, store, ground, strategy, json, skip_bad_frames, top } => commands::decide(
            config,
            &input,
            &store,
            ground.as_deref(),
            commands::DecideArgs { strategy, json, skip_bad_frames, top },
        ),
        Command::Distance { store, ground, json } => commands::distance(config, &store, ground.as_deref(), json),
        Command::Validate { store, ground, strategy, json } => {
            commands::validate(config, store.as_deref(), ground.as_deref(), strategy, json)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
