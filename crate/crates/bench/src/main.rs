use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hyperpint_bench::config::{parse_flat_config, Kind, Overrides, RunConfig};
use hyperpint_bench::run::{execute, status_code};
use hyperpint_bench::BenchError;

#[derive(Parser)]
#[command(name = "hyperpint", version, about = "All-at-once space-time solves of 1D hyperbolic systems")]
struct Cli {
    #[command(subcommand)]
    model: Model,
}

#[derive(Subcommand)]
enum Model {
    /// Heterogeneous linear acoustics.
    Acoustics(Overrides),
    /// Shallow water equations.
    Swe(Overrides),
    /// Euler equations of gas dynamics.
    Euler(Overrides),
}

fn resolve(model: Model) -> Result<RunConfig, BenchError> {
    let (kind, cli) = match model {
        Model::Acoustics(o) => (Kind::Acoustics, o),
        Model::Swe(o) => (Kind::Swe, o),
        Model::Euler(o) => (Kind::Euler, o),
    };
    let merged = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            let file = Overrides::from_pairs(&parse_flat_config(&text)?)?;
            cli.or(file)
        }
        None => cli,
    };
    RunConfig::resolve(kind, merged)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = resolve(cli.model).and_then(|cfg| execute(&cfg));
    match outcome {
        Ok(rep) => {
            println!(
                "{:?} after {} iterations, relative residual {:.3e} (nx {}, nt {})",
                rep.status, rep.iterations, rep.final_relative_residual, rep.grid.nx, rep.grid.nt
            );
            ExitCode::from(status_code(rep.status))
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
