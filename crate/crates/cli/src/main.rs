use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use finegraph::Error;

mod commands;

/// Fine graphs, coned-off Cayley graphs and edge-orbit attachments at desk scale.
///
/// Exit status: 0 all assertions pass, 1 a property is violated (the report
/// carries a witness), 2 window exceeded or inconclusive, 3 invalid input.
#[derive(Parser, Debug)]
#[command(name = "finegraph", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Word-length radius of the window (ignored for finite groups, which are enumerated completely).
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    window: u64,
    /// Element-count limit for enumerations.
    #[arg(long, default_value_t = finegraph::group::DEFAULT_CAP, value_parser = positive)]
    cap: usize,
    /// Seed for generated test corpora.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the coned-off Cayley graph Γ̂(G, H, X) and write it as a graph file.
    BuildConedOff {
        #[arg(long)]
        group: PathBuf,
        /// Comma-separated elements of X.
        #[arg(long, default_value = "")]
        gens: String,
        #[command(flatten)]
        common: Common,
    },
    /// Build the relative Cayley graph Γ(G, X ⊔ H) and report its degrees.
    BuildRelative {
        #[arg(long)]
        group: PathBuf,
        #[arg(long, default_value = "")]
        gens: String,
        #[command(flatten)]
        common: Common,
    },
    /// Shortest admissible path length d̂_H(h, k).
    HatDistance {
        #[arg(long)]
        group: PathBuf,
        #[arg(long, default_value = "")]
        gens: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[command(flatten)]
        common: Common,
    },
    /// Attach the orbit of the edge {u, v} and write the new graph.
    Attach {
        #[arg(long)]
        group: Option<PathBuf>,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[command(flatten)]
        common: Common,
    },
    /// Connectivity, δ estimate, orbits and (with a subgroup) the (G, H)-graph checks.
    Analyze {
        #[arg(long)]
        group: Option<PathBuf>,
        /// Graph file; without it the coned-off graph of `--gens` is used.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value = "")]
        gens: String,
        /// Probe fineness at the infinite-stabilizer vertices (or `--vertex`).
        #[arg(long)]
        fineness: bool,
        #[arg(long)]
        vertex: Option<String>,
        #[arg(long, default_value_t = 4)]
        k_max: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Make a (G, H)-graph thick and write it.
    Thicken {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        /// Comma-separated relative generating set S.
        #[arg(long, default_value = "")]
        gens: String,
        /// Base vertex with trivial stabilizer (found or created when absent).
        #[arg(long)]
        u0: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Extract the set X from a thick graph.
    ExtractX {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        u0: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a construction's assertions and emit one record per assertion.
    Certify {
        #[arg(long, value_enum)]
        lemma: Lemma,
        #[arg(long)]
        group: Option<PathBuf>,
        #[arg(long)]
        graph: Option<PathBuf>,
        /// X for the coned-off graph used when `--graph` is absent.
        #[arg(long, default_value = "")]
        gens: String,
        /// Relative generating set for `qi53` (default: generators outside H).
        #[arg(long)]
        s: Option<String>,
        #[arg(long)]
        u: Option<String>,
        #[arg(long)]
        v: Option<String>,
        #[arg(long, default_value_t = 3)]
        k_max: usize,
        /// Number of random graphs for `escaping`.
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Lemma {
    /// W/Z filtration: chain, containment and per-path audit.
    Wz,
    /// α-replacement and the attachment distance sandwich.
    Alpha,
    /// Coned-off comparison map with constants 3 and 2.
    Qi53,
    /// Escaping-set / angle-ball sandwich on seeded random graphs.
    Escaping,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::WindowExceeded(_) | Error::ResourceCap { .. } => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("finegraph: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
