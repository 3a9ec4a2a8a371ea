use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use treeshift::Execution;
use treeshift_cli::{
    cap_from_env, cmd_automaton_check, cmd_branch_check, cmd_law_check, cmd_odometer_demo, cmd_quotient,
    cmd_sft_roundtrip, load_automaton, load_group, CliError, Outcome,
};

/// Finite-depth checks for self-similar groups and tree shifts.
///
/// Groups are given as JSON files or as `preset:NAME` with NAME one of
/// odometer, grigorchuk, trivial, finitary. Exit codes: 0 pass, 1 checked
/// and failed, 2 input error, 3 enumeration cap reached.
#[derive(Debug, Parser)]
#[command(name = "treeshift", version)]
struct Cli {
    /// Element cap for enumerations (overrides TREESHIFT_CAP).
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Print only the JSON report.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run single-threaded.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Orders of the level quotients and their Triv/Stab subsets.
    Quotient {
        group: String,
        #[arg(long)]
        depth: usize,
    },
    /// Symbolic branching over Triv(size), checked in the quotient of the given size.
    BranchCheck {
        group: String,
        #[arg(long)]
        size: usize,
        /// Quotient size; defaults to size + 2.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Compares the group with the shift of finite type given by its blocks.
    SftRoundtrip {
        group: String,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        depth: usize,
    },
    /// Whether an automaton allows the root blocks of every generator.
    AutomatonCheck {
        /// Automaton file, or preset:example1 | preset:identity | preset:full.
        automaton: String,
        /// Group whose generators are checked.
        config: String,
        #[arg(long)]
        depth: usize,
    },
    /// The odometer element that is locally allowed but outside the closure.
    OdometerDemo {
        #[arg(long)]
        n: usize,
    },
    /// Checks a law such as "[x,y]" in the level quotients.
    LawCheck {
        group: String,
        #[arg(long)]
        law: String,
        #[arg(long)]
        depth: usize,
    },
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let cap = match cli.cap {
        Some(0) => return Err(CliError::Input("--cap must be at least 1".into())),
        Some(c) => c,
        None => cap_from_env()?,
    };
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    match &cli.command {
        Command::Quotient { group, depth } => cmd_quotient(&load_group(group)?, *depth, cap, exec),
        Command::BranchCheck { group, size, depth } => {
            cmd_branch_check(&load_group(group)?, *size, depth.unwrap_or(size + 2), cap, exec)
        }
        Command::SftRoundtrip { group, size, depth } => cmd_sft_roundtrip(&load_group(group)?, *size, *depth, cap, exec),
        Command::AutomatonCheck {
            automaton,
            config,
            depth,
        } => {
            let spec = load_group(config)?;
            let aut = load_automaton(automaton, spec.signature.clone())?;
            cmd_automaton_check(&aut, &spec, *depth)
        }
        Command::OdometerDemo { n } => cmd_odometer_demo(*n, cap, exec),
        Command::LawCheck { group, law, depth } => cmd_law_check(&load_group(group)?, law, *depth, cap, exec),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let json = outcome.report.to_json();
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, format!("{json}\n")) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    let text = if cli.json {
        format!("{json}\n")
    } else {
        format!("{}{json}\n", outcome.table)
    };
    // a closed pipe (e.g. `| head`) is not an error worth reporting
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(outcome.exit_code() as u8)
}
