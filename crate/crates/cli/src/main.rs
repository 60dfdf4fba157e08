use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use moncat_cli::commands::{self, read, CliError, ScriptFormat};

/// Decide, render and prove equations in monoidal categories.
#[derive(Parser)]
#[command(name = "moncat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Neutral,
    Rocq,
}

impl From<Format> for ScriptFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Neutral => ScriptFormat::Neutral,
            Format::Rocq => ScriptFormat::Rocq,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide the conclusion and each hypothesis. Exit 0 equal, 1 not equal, 2 unknown.
    Check {
        #[arg(long)]
        goal: PathBuf,
    },
    /// Replay a proof script against a goal.
    Replay {
        #[arg(long)]
        goal: PathBuf,
        #[arg(long)]
        script: PathBuf,
        /// Defaults to rocq for `.v` files, neutral otherwise.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Write an SVG for every side of every equation.
    Render {
        #[arg(long)]
        goal: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Print the conclusion sides as read back from their diagrams.
    Extract {
        #[arg(long)]
        goal: PathBuf,
        /// Replay this script first.
        #[arg(long)]
        script: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Also write the diagrams as JSON into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the session API.
    Serve {
        #[arg(long, env = "MONCAT_PORT", default_value_t = 7878)]
        port: u16,
    },
}

const INPUT_ERROR: u8 = 3;

fn format_for(script: &std::path::Path, f: Option<Format>) -> ScriptFormat {
    f.map(Into::into).unwrap_or_else(|| ScriptFormat::guess(script))
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Check { goal } => {
            let report = commands::check(&read(&goal)?)?;
            println!("{report}");
            Ok(report.exit_code())
        }
        Command::Replay { goal, script, format } => {
            let fmt = format_for(&script, format);
            match commands::replay_script(&read(&goal)?, &read(&script)?, fmt)? {
                Ok(st) if st.closed => {
                    println!("ok");
                    Ok(0)
                }
                Ok(_) => {
                    println!("all steps replayed but the proof is not closed");
                    Ok(1)
                }
                Err(f) => {
                    println!("{f}");
                    Ok(1)
                }
            }
        }
        Command::Render { goal, out } => {
            for p in commands::render(&read(&goal)?, &out)? {
                println!("{}", p.display());
            }
            Ok(0)
        }
        Command::Extract { goal, script, format, out } => {
            let text = script.as_deref().map(read).transpose()?;
            let s = text.as_deref().zip(script.as_deref()).map(|(t, p)| (t, format_for(p, format)));
            let e = commands::extract(&read(&goal)?, s)?;
            println!("lhs: {}\nrhs: {}", e.lhs, e.rhs);
            if let Some(dir) = out {
                commands::write_diagrams(&e, &dir)?;
            }
            Ok(0)
        }
        Command::Serve { port } => {
            let rt =
                tokio::runtime::Runtime::new().map_err(|source| CliError::Io { path: "runtime".into(), source })?;
            rt.block_on(moncat_cli::api::serve(port))
                .map_err(|source| CliError::Io { path: format!("port {port}").into(), source })?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}
