use std::path::{Path, PathBuf};
use std::process::ExitCode;

use captionkit::layout::DEFAULT_WIDTH;
use captionkit::{OutputFormat, RunResult, Scenario};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "captionkit", version, about = "Lay out captions described by a scenario file")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render every caption and list of the scenario.
    Run {
        file: PathBuf,
        /// Line width in cells.
        #[arg(long, default_value_t = DEFAULT_WIDTH, value_parser = parse_width)]
        width: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Fail on warnings too.
        #[arg(long)]
        strict: bool,
    },
    /// Execute the scenario and report diagnostics only.
    Check {
        file: PathBuf,
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Annotated,
}

fn parse_width(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(w) if w >= 1 => Ok(w),
        _ => Err(format!("`{s}' is not a positive number of cells")),
    }
}

fn load(path: &Path) -> Result<Scenario, String> {
    let src = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Scenario::parse(&src).map_err(|e| format!("{}: {e}", path.display()))
}

fn status(result: &RunResult, strict: bool) -> ExitCode {
    if result.has_errors() || (strict && result.has_warnings()) {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (file, width, format, strict, render) = match cli.command {
        Command::Run { file, width, format, strict } => (file, width, format, strict, true),
        Command::Check { file, strict } => (file, DEFAULT_WIDTH, Format::Text, strict, false),
    };
    let scenario = match load(&file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("captionkit: {e}");
            return ExitCode::from(2);
        }
    };
    let result = scenario.run(width);
    if render {
        let format = match format {
            Format::Text => OutputFormat::Text,
            Format::Annotated => OutputFormat::Annotated,
        };
        print!("{}", result.render(format));
    }
    eprint!("{}", result.render_diagnostics());
    status(&result, strict)
}
