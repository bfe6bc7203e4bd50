use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qlbm_cli::commands::{self, Format, FormulasArgs, FullGridArgs, NogoArgs, Report, SimulateArgs, ValidateArgs};
use qlbm_cli::error::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "qlbm",
    version,
    about = "Space-time quantum lattice Boltzmann reproduction recipes"
)]
struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gram-matrix test of the amplitude or basis-state encoding.
    Nogo(NogoArgs),
    /// Register, collision and swap counts against enumeration.
    Formulas(FormulasArgs),
    /// Run a window around one focal site.
    Simulate(SimulateArgs),
    /// Run a whole periodic grid as one register.
    Fullgrid(FullGridArgs),
    /// Run the acceptance checks.
    Validate(ValidateArgs),
}

fn dispatch(cli: &Cli) -> CliResult<(Report, Format)> {
    Ok(match &cli.command {
        Command::Nogo(a) => (commands::nogo(a)?, Format::Json),
        Command::Formulas(a) => (commands::formulas(a)?, Format::Csv),
        Command::Simulate(a) => (commands::simulate(a)?, Format::Json),
        Command::Fullgrid(a) => (commands::fullgrid(a)?, Format::Json),
        Command::Validate(a) => (commands::validate(a)?, Format::Human),
    })
}

fn emit(cli: &Cli, text: &str) -> CliResult<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = dispatch(&cli).and_then(|(report, default)| {
        emit(&cli, &report.render(cli.format.unwrap_or(default)))?;
        Ok(report.exit)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("qlbm: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
