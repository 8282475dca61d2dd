use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dtac_cli::commands::{self, ApplyArgs, Output};

#[derive(Parser)]
#[command(name = "dtac", about = "Apply verification tactics to contract-annotated programs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a tactic script against a program.
    Apply {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        script: PathBuf,
        /// Verifier fixture.
        #[arg(long)]
        errors: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Extra tactic definitions.
        #[arg(long)]
        lib: Option<PathBuf>,
        #[arg(long)]
        diff: bool,
        #[arg(long)]
        trace: bool,
    },
    /// Check that `after` is a legal refactoring of `before`.
    Check {
        #[arg(long)]
        before: PathBuf,
        #[arg(long)]
        after: PathBuf,
    },
    /// Parse a program and print it in canonical form.
    Parse { program: PathBuf },
    /// Show the standard tactic library.
    Stdlib {
        #[arg(long)]
        list: bool,
    },
    /// Serve the session API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
    },
}

fn run(cli: Cli) -> anyhow::Result<Output> {
    match cli.cmd {
        Cmd::Apply { program, script, errors, out, lib, diff, trace } => {
            commands::apply(&ApplyArgs { program, script, errors, out, library: lib, diff, trace })
        }
        Cmd::Check { before, after } => commands::check(&before, &after),
        Cmd::Parse { program } => commands::parse(&program),
        Cmd::Stdlib { .. } => commands::stdlib_list(),
        Cmd::Serve { addr } => {
            tokio::runtime::Runtime::new()?.block_on(dtac_cli::server::serve(&addr))?;
            Ok(Output { stdout: String::new(), stderr: String::new(), code: 0 })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(o) => {
            print!("{}", o.stdout);
            eprint!("{}", o.stderr);
            ExitCode::from(o.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
