mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kkm_core::wire::parse_rat;
use kkm_core::Rat;

#[derive(Debug, Parser)]
#[command(name = "kkm", version, about = "Exact colorful KKM solver with piercing and cake-division frontends")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a colorful KKM instance and write the certificate.
    SolveKkm(Common),
    /// Find a colorful matching in a family of d-interval families.
    Pierce(Common),
    /// Divide one or more cakes among players.
    Divide(Common),
    /// Report matching, cover and fractional matching numbers of a hypergraph.
    Hypergraph(Common),
    /// Search for a point where a cover fails.
    CheckCover {
        #[command(flatten)]
        common: Common,
        /// Weak-cover parameter; defaults to dim + 1.
        #[arg(long)]
        m: Option<usize>,
        /// Random samples per face.
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Input JSON file.
    pub input: PathBuf,
    /// Mesh size as NUM/DEN.
    #[arg(long, value_parser = parse_eps)]
    pub eps: Option<Rat>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Include the elimination trace in the output.
    #[arg(long)]
    pub trace: bool,
    /// Skip the elimination's runtime invariant checks. Certificates are still re-validated.
    #[arg(long)]
    pub unchecked: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_eps(s: &str) -> Result<Rat, String> {
    let r = parse_rat(s)?;
    if r <= Rat::from_integer(0.into()) {
        return Err(format!("eps must be positive, got {r}"));
    }
    Ok(r)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::SolveKkm(c) => commands::solve_kkm(c),
        Command::Pierce(c) => commands::pierce(c),
        Command::Divide(c) => commands::divide(c),
        Command::Hypergraph(c) => commands::hypergraph(c),
        Command::CheckCover { common, m, samples } => commands::check_cover(common, *m, *samples),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
