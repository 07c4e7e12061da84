use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ivp_atoms::oracle::DEFAULT_GUARD;
use ivp_atoms::report::{self, AnalysisOptions, GraphFormat, GraphKind};
use ivp_atoms::Error;

/// Irreducibility and absolute irreducibility of integer-valued polynomials.
#[derive(Parser, Debug)]
#[command(name = "ivp-atoms", version)]
struct Cli {
    /// Run the command on every non-empty line of FILE (`-` for stdin),
    /// substituting the line for EXPR.
    #[arg(long, global = true, value_name = "FILE")]
    batch: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full report: standard form, membership, graphs, verdicts.
    Analyze {
        expr: Option<String>,
        /// Also run the brute-force oracle on f^n for n up to N.
        #[arg(long, value_name = "N")]
        oracle: Option<u32>,
        #[arg(long)]
        json: bool,
        /// Print only the two verdicts.
        #[arg(long)]
        quiet: bool,
    },
    /// Essential or quintessential graph.
    Graph {
        expr: Option<String>,
        #[arg(long, value_enum, default_value_t = KindArg::Essential)]
        kind: KindArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Dot)]
        format: FormatArg,
    },
    /// Membership in Int(Z) and image-primitivity.
    Member {
        expr: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Fixed divisor of a polynomial.
    Fd {
        poly: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// All factorizations of f^N up to associates, by exhaustive search.
    Oracle {
        expr: Option<String>,
        #[arg(long, value_name = "N")]
        power: u32,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum KindArg {
    Essential,
    Quintessential,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FormatArg {
    Dot,
    Json,
}

fn guard_from_env() -> Result<u64, String> {
    match std::env::var("IVP_ATOMS_GUARD") {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map_err(|_| format!("IVP_ATOMS_GUARD must be a non-negative integer, got '{v}'")),
        Err(_) => Ok(DEFAULT_GUARD),
    }
}

fn run_one(command: &Command, input: &str, guard: u64) -> Result<String, Error> {
    match command {
        Command::Analyze { oracle, json, quiet, .. } => {
            let opts = AnalysisOptions { oracle: *oracle, guard };
            let r = report::analyze(input, &opts)?;
            Ok(if *json {
                r.to_json()
            } else if *quiet {
                let show = |v: &Option<ivp_atoms::criteria::Verdict>| {
                    v.as_ref().map_or("n/a".to_string(), |v| v.status.to_string())
                };
                format!(
                    "irreducible={} absolutely_irreducible={}\n",
                    show(&r.irreducible),
                    show(&r.absolutely_irreducible)
                )
            } else {
                r.to_text()
            })
        }
        Command::Graph { kind, format, .. } => {
            let kind = match kind {
                KindArg::Essential => GraphKind::Essential,
                KindArg::Quintessential => GraphKind::Quintessential,
            };
            let format = match format {
                FormatArg::Dot => GraphFormat::Dot,
                FormatArg::Json => GraphFormat::Json,
            };
            report::graph_command(input, kind, format)
        }
        Command::Member { json, .. } => report::member_command(input, *json),
        Command::Fd { json, .. } => report::fd_command(input, *json),
        Command::Oracle { power, json, .. } => report::oracle_command(input, *power, guard, *json),
    }
}

fn positional(command: &Command) -> Option<&String> {
    match command {
        Command::Analyze { expr, .. }
        | Command::Graph { expr, .. }
        | Command::Member { expr, .. }
        | Command::Oracle { expr, .. } => expr.as_ref(),
        Command::Fd { poly, .. } => poly.as_ref(),
    }
}

fn read_batch(path: &str) -> std::io::Result<String> {
    if path == "-" {
        std::io::read_to_string(std::io::stdin())
    } else {
        std::fs::read_to_string(path)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let guard = match guard_from_env() {
        Ok(g) => g,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();

    let Some(path) = &cli.batch else {
        let Some(input) = positional(&cli.command) else {
            eprintln!("error: missing expression argument");
            return ExitCode::from(2);
        };
        return match run_one(&cli.command, input, guard) {
            Ok(text) => {
                let _ = out.write_all(text.as_bytes());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code())
            }
        };
    };

    if positional(&cli.command).is_some() {
        eprintln!("error: an expression argument cannot be combined with --batch");
        return ExitCode::from(2);
    }
    let contents = match read_batch(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: cannot read {path}: {e}");
            return ExitCode::from(2);
        }
    };
    // The worst exit code wins; every line is still processed.
    let mut code = 0u8;
    for (lineno, line) in contents.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match run_one(&cli.command, line, guard) {
            Ok(text) => {
                // JSON documents become one compact line each
                let text = match serde_json::from_str::<serde_json::Value>(&text) {
                    Ok(v) => format!("{v}\n"),
                    Err(_) => text,
                };
                let _ = out.write_all(text.as_bytes());
            }
            Err(e) => {
                eprintln!("error: line {}: {e}", lineno + 1);
                code = code.max(e.exit_code());
            }
        }
    }
    ExitCode::from(code)
}
