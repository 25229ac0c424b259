//! `faceted`: run programs, start a REPL, check programs against the
//! multi-execution oracle, or serve the battleship game.

mod check;
mod repl;
mod run;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use faceted_core::eval::Fault;
use faceted_core::oracle::DEFAULT_MAX_LABELS;

/// Language errors: evaluation failed or the oracle found a mismatch.
pub const EXIT_ERROR: u8 = 1;
/// Syntax errors, unreadable paths and bad input files.
pub const EXIT_USAGE: u8 = 2;

/// Deep recursion in user programs runs on the interpreter's Rust stack.
const STACK_SIZE: usize = 512 << 20;

#[derive(Debug, Parser)]
#[command(name = "faceted", version, about = "Faceted execution interpreter")]
pub struct Cli {
    /// Print each evaluation rule as it fires, to stderr.
    #[arg(long, global = true)]
    trace: bool,
    /// Most labels a program may use under `check`.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_LABELS)]
    max_labels: usize,
    /// Dump the store to stderr after running.
    #[arg(long, global = true)]
    print_store: bool,
    /// Break store protection on purpose, to test the checker.
    #[arg(long, global = true, hide = true)]
    inject_fault: Option<FaultArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a file and print the value of each top-level expression.
    Run { path: PathBuf },
    /// Interactive session; `:trace on|off` toggles tracing, `:quit` exits.
    Repl,
    /// Compare faceted execution against one standard run per label view.
    Check {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Serve the battleship game over HTTP.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long)]
        board1: PathBuf,
        #[arg(long)]
        board2: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FaultArg {
    Box,
    Set,
    Both,
}

impl From<FaultArg> for Fault {
    fn from(f: FaultArg) -> Fault {
        match f {
            FaultArg::Box => Fault::RawBox,
            FaultArg::Set => Fault::RawSet,
            FaultArg::Both => Fault::RawBoxAndSet,
        }
    }
}

/// Settings shared by `run`, `repl` and `check`.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub trace: bool,
    pub max_labels: usize,
    pub print_store: bool,
    pub fault: Option<Fault>,
}

fn serve(port: u16, board1: PathBuf, board2: PathBuf) -> u8 {
    let read = |path: &PathBuf| -> Result<_, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        faceted_battleship::parse_board(&text).map_err(|e| format!("{}: {e}", path.display()))
    };
    let (b1, b2) = match (read(&board1), read(&board2)) {
        (Ok(b1), Ok(b2)) => (b1, b2),
        (Err(e), _) | (_, Err(e)) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let game = match faceted_battleship::GameState::new(&b1, &b2) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let rt = tokio::runtime::Runtime::new().expect("tokio runtime");
    let result = rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(SocketAddr::from(([127, 0, 0, 1], port))).await?;
        eprintln!("serving on http://{}", listener.local_addr()?);
        faceted_battleship::serve(listener, game).await
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn dispatch(cli: Cli) -> u8 {
    let config = RunConfig {
        trace: cli.trace,
        max_labels: cli.max_labels,
        print_store: cli.print_store,
        fault: cli.inject_fault.map(Fault::from),
    };
    match cli.command {
        Command::Run { path } => run::run_file(&path, &config),
        Command::Repl => repl::repl(&config),
        Command::Check { paths } => check::check_paths(&paths, &config),
        Command::Serve { port, board1, board2 } => serve(port, board1, board2),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = std::thread::Builder::new()
        .stack_size(STACK_SIZE)
        .spawn(move || dispatch(cli))
        .expect("spawn interpreter thread")
        .join()
        .unwrap_or(101);
    ExitCode::from(code)
}
