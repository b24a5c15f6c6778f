//! `fitzkit` — conjugation, representing functions, and the verification
//! battery from the library crate, behind a reproducible command line.
//!
//! Exit codes: 0 when every assertion of the invoked command holds, 1 when
//! a mathematical assertion failed (the report, including witnesses, is
//! still written), 2 for input or configuration errors.

mod commands;
mod io;
mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::{Ctx, Method, Suite, Which};

const DEFAULT_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "fitzkit",
    version,
    about = "Discrete convex conjugation and monotone-operator verification",
    after_help = "The FITZKIT_TOL environment variable overrides the default \
                  comparison tolerance (1e-9); per-command --tol flags beat both."
)]
struct Cli {
    /// Directory the command writes its artifacts into.
    #[arg(long, global = true, default_value = "fitzkit-out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Conjugate a function document onto a grid, or exactly.
    Conjugate {
        /// JSON function or operator document.
        input: PathBuf,
        /// Grid as `lo:hi:m` triples, comma-separated (one per axis, or a
        /// single triple used for every axis).  Defaults to [-2,2] with 17
        /// nodes per axis.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Conjugation route.
        #[arg(long, value_enum, default_value_t = Method::Llt)]
        method: Method,
        /// Swap primal and dual blocks after conjugating (the grid methods
        /// then need a block-symmetric window).
        #[arg(long)]
        j: bool,
    },
    /// Materialize the minimal and/or maximal representing function of an
    /// operator on a grid.
    Fitzpatrick {
        /// JSON operator document (finite graph, plane curve, or linear map).
        operator: PathBuf,
        /// Which representative(s) to materialize.
        #[arg(long, value_enum, default_value_t = Which::Both)]
        which: Which,
        /// Grid as `lo:hi:m` triples, comma-separated.  Defaults to [-2,2]
        /// with 17 nodes per axis.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
    },
    /// Check the two pairing inequalities for a function document.
    Gate {
        /// JSON function or operator document.
        input: PathBuf,
        /// Grid as `lo:hi:m` triples, comma-separated.  Defaults to [-2,2]
        /// with 17 nodes per axis.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Gate tolerance; defaults to the global tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run the gate, then extract the equality-set graph and check its
    /// monotonicity.
    Extract {
        /// JSON function or operator document.
        input: PathBuf,
        /// Grid as `lo:hi:m` triples, comma-separated.  Defaults to [-2,2]
        /// with 17 nodes per axis.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Gate tolerance; defaults to the global tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Fixed node-acceptance threshold for extraction; defaults to a
        /// value-scaled threshold.
        #[arg(long)]
        extraction_tol: Option<f64>,
    },
    /// Build the bounded-range operator on a four-dimensional window and
    /// run the full gate/extraction pipeline on it.
    #[command(
        name = "cw-example",
        long_about = "Builds a grid sample of a convex function on a \
four-dimensional product window whose gate equality set is the graph of a \
maximal monotone operator with full domain and range inside the unit ball, \
then runs the gate, extracts the graph, and checks the range bound, fiber \
coverage, monotonicity, and the distance to the closed-form reference graph.\n\n\
In its original infinite-dimensional setting the operator this discretizes \
is notable for not being of dense type (type (D)).  That property cannot be \
reproduced here and is out of scope: in finite dimension every maximal \
monotone operator is of type (D), so this command checks only the \
sample-level conclusions listed above."
    )]
    CwExample {
        /// Nodes per axis (odd, at least 9).
        #[arg(long, default_value_t = 17)]
        resolution: usize,
        /// Half-width of the symmetric window; must exceed 1.
        #[arg(long, default_value_t = 2.0)]
        window: f64,
    },
    /// Run the checker battery over an operator catalog, with negative
    /// controls, and optionally the gate and pipeline suites.
    #[command(name = "verify-lemmas")]
    VerifyLemmas {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// `default` for the built-in catalog, or a path to a JSON catalog
        /// file `[{"name": ..., "operator": {...}}, ...]`.
        #[arg(long, default_value = "default")]
        catalog: String,
        /// Seed for the randomized catalog entries.
        #[arg(long, default_value_t = fitzkit::catalog::DEFAULT_SEED)]
        seed: u64,
    },
}

fn main() {
    // Clap itself exits 2 on usage errors, matching the contract.
    let cli = Cli::parse();
    let tol = match std::env::var("FITZKIT_TOL") {
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t.is_finite() && t >= 0.0 => t,
            _ => {
                eprintln!("error: FITZKIT_TOL must be a nonnegative number, got `{s}`");
                std::process::exit(2);
            }
        },
        Err(std::env::VarError::NotPresent) => DEFAULT_TOL,
        Err(e) => {
            eprintln!("error: FITZKIT_TOL is unreadable: {e}");
            std::process::exit(2);
        }
    };
    let ctx = Ctx { tol };
    let out = cli.out.clone();
    let result = match cli.command {
        Command::Conjugate {
            input,
            grid,
            method,
            j,
        } => commands::cmd_conjugate(&input, grid.as_deref(), method, j, &out, &ctx),
        Command::Fitzpatrick {
            operator,
            which,
            grid,
        } => commands::cmd_fitzpatrick(&operator, which, grid.as_deref(), &out, &ctx),
        Command::Gate { input, grid, tol } => {
            commands::cmd_gate(&input, grid.as_deref(), tol, &out, &ctx)
        }
        Command::Extract {
            input,
            grid,
            tol,
            extraction_tol,
        } => commands::cmd_extract(&input, grid.as_deref(), tol, extraction_tol, &out, &ctx),
        Command::CwExample { resolution, window } => commands::cmd_cw(resolution, window, &out),
        Command::VerifyLemmas {
            suite,
            catalog,
            seed,
        } => commands::cmd_verify(suite, &catalog, seed, &out, &ctx),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}
