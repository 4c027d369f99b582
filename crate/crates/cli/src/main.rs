use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use thermowalk::commands::{
    cmd_compare, cmd_mc, cmd_pde, cmd_soret, cmd_steady, cmd_variance, CompareArgs, McArgs,
    PdeArgs, SoretArgs, SteadyArgs, VarianceArgs,
};

/// Random-walk transport experiments: particle ensembles, flux-law
/// solvers, and grid comparisons.
#[derive(Parser, Debug)]
#[command(name = "thermowalk", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Advance a walker ensemble and histogram the result
    Mc(McArgs),
    /// Integrate a flux law to steady state or a fixed horizon
    Pde(PdeArgs),
    /// Write a law's analytic steady state without integrating
    Steady(SteadyArgs),
    /// Compare two grid files and report difference norms
    Compare(CompareArgs),
    /// Steady-profile Soret fit against a temperature ramp
    Soret(SoretArgs),
    /// Estimate the diffusivity from mean-square displacements
    Variance(VarianceArgs),
}

fn error_line(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": kind, "message": message }).to_string()
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                print!("{e}");
                std::process::exit(0);
            }
            _ => {
                eprintln!("{}", error_line("config", &e.to_string().replace('\n', " ")));
                std::process::exit(2);
            }
        },
    };
    let result = match &cli.command {
        Command::Mc(args) => cmd_mc(args),
        Command::Pde(args) => cmd_pde(args),
        Command::Steady(args) => cmd_steady(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Soret(args) => cmd_soret(args),
        Command::Variance(args) => cmd_variance(args),
    };
    if let Err(err) = result {
        let (kind, code) = if err.is_usage() { ("config", 2) } else { ("numerical", 3) };
        eprintln!("{}", error_line(kind, &err.to_string()));
        std::process::exit(code);
    }
}
