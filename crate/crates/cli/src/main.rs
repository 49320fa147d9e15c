//! `treeopt`: design graphs that (nearly) maximize the weighted number of
//! spanning trees.

mod bench;
mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use treeopt::convex::SolverOptions;
use treeopt::error::Error;

#[derive(Parser)]
#[command(
    name = "treeopt",
    about = "Spanning-tree maximizing graph design",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Greedy,
    Convex,
    Exact,
    All,
}

impl Method {
    pub fn runs_greedy(self) -> bool {
        matches!(self, Method::Greedy | Method::All)
    }
    pub fn runs_convex(self) -> bool {
        matches!(self, Method::Convex | Method::All)
    }
    pub fn runs_exact(self) -> bool {
        matches!(self, Method::Exact | Method::All)
    }
}

#[derive(Args, Clone)]
pub struct SolverFlags {
    /// Stationarity tolerance for the relaxation solver
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Iteration cap for the relaxation solver
    #[arg(long, default_value_t = 2000)]
    pub max_iters: usize,
    /// Solve the l1-penalized relaxation with this penalty instead of the
    /// budgeted one; the result is rounded to k edges but the relaxation
    /// objective no longer certifies an upper bound
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Seed for randomized rounding
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Round the relaxation by seeded sampling repaired to exactly k edges
    /// instead of taking the k largest selectors
    #[arg(long)]
    pub repair: bool,
    /// Report all wall times as 0 so reruns are byte-identical
    #[arg(long)]
    pub fixed_timing: bool,
}

impl SolverFlags {
    pub fn solver_options(&self) -> SolverOptions<f64> {
        SolverOptions {
            tol: self.tol,
            max_iters: self.max_iters,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Select k edges to add, maximizing the spanning-tree count
    Synth {
        /// Base graph file ("n N" header, then "u v [w]" lines)
        #[arg(long)]
        graph: PathBuf,
        /// Candidate edge file (same format; weights taken from the file)
        #[arg(long)]
        candidates: Option<PathBuf>,
        /// Use every non-edge of the base graph as a unit-weight candidate
        #[arg(long)]
        complete_complement: bool,
        /// Number of edges to add
        #[arg(short)]
        k: usize,
        #[arg(long, value_enum)]
        method: Method,
        /// Output JSON path (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        flags: SolverFlags,
    },
    /// Remove k edges while keeping the spanning-tree count maximal
    Sparsify {
        #[arg(long)]
        graph: PathBuf,
        /// Removable edge file (weights ignored; base weights apply)
        #[arg(long)]
        removable: PathBuf,
        /// Number of edges to remove
        #[arg(short)]
        k: usize,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        flags: SolverFlags,
    },
    /// Add as few edges as possible to reach a tree-connectivity target
    Dual {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        candidates: PathBuf,
        /// Required gain in log tree count (or absolute value with
        /// --absolute-delta)
        #[arg(long)]
        delta: f64,
        /// Interpret --delta as an absolute log tree count target
        #[arg(long)]
        absolute_delta: bool,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        flags: SolverFlags,
    },
    /// Sweep random instances per a TOML config and emit CSV rows
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_csv: PathBuf,
    },
    /// Print ground-truth tree counts (enumeration is exponential; small
    /// graphs only)
    Oracle {
        #[arg(long)]
        graph: PathBuf,
        /// List every spanning tree
        #[arg(long)]
        enumerate: bool,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::GuardExceeded(_)
        | Error::Infeasible(_)
        | Error::BudgetTooLarge { .. }
        | Error::Disconnected => 2,
        Error::NotPositiveDefinite | Error::Inconsistent(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are not usage errors
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Synth {
            graph,
            candidates,
            complete_complement,
            k,
            method,
            out,
            flags,
        } => commands::cmd_synth(&commands::SynthArgs {
            graph,
            candidates,
            complete_complement,
            k,
            method,
            out,
            flags,
        }),
        Command::Sparsify {
            graph,
            removable,
            k,
            method,
            out,
            flags,
        } => commands::cmd_sparsify(&commands::SparsifyArgs {
            graph,
            removable,
            k,
            method,
            out,
            flags,
        }),
        Command::Dual {
            graph,
            candidates,
            delta,
            absolute_delta,
            method,
            out,
            flags,
        } => commands::cmd_dual(&commands::DualArgs {
            graph,
            candidates,
            delta,
            absolute_delta,
            method,
            out,
            flags,
        }),
        Command::Bench { config, out_csv } => bench::cmd_bench(&bench::BenchArgs { config, out_csv }),
        Command::Oracle { graph, enumerate } => {
            commands::cmd_oracle(&commands::OracleArgs { graph, enumerate })
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
