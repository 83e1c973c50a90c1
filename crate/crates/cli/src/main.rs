//! Command-line front end: analyze | cauchy | null-solution | runge-check |
//! pconvex-check | tube-check, with machine-readable JSON/CSV reports.
//!
//! Exit codes: 0 = pass, 2 = analytic/geometric fail, 1 = usage or runtime
//! error. Every report embeds the fully resolved run configuration and the
//! crate version, so identical configurations reproduce byte-identical
//! output.

mod commands;
mod report;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "charpde",
    version,
    about = "Cauchy-series solver, null solutions, and Runge-pair / P-convexity checks \
             for constant-coefficient operators with a single characteristic direction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structural analysis of an operator symbol (slab decomposition,
    /// characteristic directions, hypothesis report).
    Analyze(commands::analyze::AnalyzeArgs),
    /// Solve the non-characteristic Cauchy problem and verify the boundary
    /// identities.
    Cauchy(commands::cauchy::CauchyArgs),
    /// Construct null solutions: the half-space-supported v and the
    /// slab-supported u.
    #[command(name = "null-solution")]
    NullSolution(commands::nullsolution::NullSolutionArgs),
    /// Runge-pair verdict for a rasterized domain pair.
    #[command(name = "runge-check")]
    RungeCheck(commands::geometry::RungeArgs),
    /// P-convexity verdict for a rasterized domain.
    #[command(name = "pconvex-check")]
    PconvexCheck(commands::geometry::PconvexArgs),
    /// Tube-domain Runge verdict from the spatial factor.
    #[command(name = "tube-check")]
    TubeCheck(commands::geometry::TubeArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => commands::analyze::run(args),
        Command::Cauchy(args) => commands::cauchy::run(args),
        Command::NullSolution(args) => commands::nullsolution::run(args),
        Command::RungeCheck(args) => commands::geometry::run_runge(args),
        Command::PconvexCheck(args) => commands::geometry::run_pconvex(args),
        Command::TubeCheck(args) => commands::geometry::run_tube(args),
    };
    match result {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
