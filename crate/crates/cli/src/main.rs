//! `relctl`: winners, control by deleting voters, relational scripts and
//! the hardness construction from the command line.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use relctl::control::Rule;

#[derive(Parser, Debug)]
#[command(name = "relctl", version, about = "Exact control of Condorcet elections by deleting voters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ElectionArgs {
    /// Election file.
    file: PathBuf,
    /// Accept ties and partial ballots.
    #[arg(long)]
    permissive: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Condorcet winner, dominance and covering matrices, uncovered set.
    Winners {
        #[command(flatten)]
        election: ElectionArgs,
        #[arg(long)]
        json: bool,
    },
    /// Minimum voter deletions that make the target win.
    Control {
        #[command(flatten)]
        election: ElectionArgs,
        #[arg(long)]
        target: String,
        #[arg(long, value_parser = parse_rule)]
        rule: Rule,
        /// Number of optimal solutions to list.
        #[arg(long, default_value_t = 10)]
        enumerate: usize,
        /// Use the brute-force solver instead of the symbolic one.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        json: bool,
    },
    /// Check whether deleting the given voters makes the target win.
    Check {
        #[command(flatten)]
        election: ElectionArgs,
        #[arg(long)]
        target: String,
        #[arg(long, value_parser = parse_rule)]
        rule: Rule,
        /// Voters to delete, numbered from 1.
        #[arg(long, value_delimiter = ',')]
        delete: Vec<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a relational script.
    Eval {
        script: PathBuf,
        /// Binds `P` and the carriers `N`, `A`, `A2`, `PN`.
        #[arg(long)]
        election: Option<PathBuf>,
        /// Binds the point `p` of this alternative.
        #[arg(long, requires = "election")]
        target: Option<String>,
        #[arg(long)]
        permissive: bool,
        /// Entries listed when the relation is too large for a matrix.
        #[arg(long, default_value_t = 20)]
        limit: usize,
        #[arg(long)]
        json: bool,
        /// Print the BDD of the result in DOT format.
        #[arg(long, conflicts_with = "json")]
        dot: bool,
    },
    /// Build the control election for an X4C instance.
    Reduce {
        instance: PathBuf,
        /// Election file to write.
        #[arg(long)]
        out: PathBuf,
        /// Layout file; defaults to the election path with `.layout.json` appended.
        #[arg(long)]
        layout: Option<PathBuf>,
        /// Compare the constructed margins with their predicted values.
        #[arg(long)]
        audit: bool,
    },
    /// Generate an X4C instance.
    GenX4c {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random instance without a planted exact cover.
        #[arg(long)]
        random: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Translate a 1-in-3-SAT instance into X4C.
    #[command(name = "reduce-1in3")]
    Reduce1in3 {
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_rule(s: &str) -> Result<Rule, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
