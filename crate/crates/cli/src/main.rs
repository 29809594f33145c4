use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nilpotent_actions::chern::{complement_plan, EvenClass, LineBundleSymbol};
use nilpotent_actions::pipeline::{self, Config, Mode};
use nilpotent_actions::waring::{waring_extend, waring_minimal};
use nilpotent_actions::{Bounds, Error};

#[derive(Parser)]
#[command(name = "nilpotent-actions", version, about = "Certified constructions for actions of finite nilpotent groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline from a group config.
    Pipeline {
        #[command(subcommand)]
        action: PipelineCmd,
    },
    /// Sums of k-th powers modulo a number.
    Waring {
        #[command(subcommand)]
        action: WaringCmd,
    },
    /// Chern character certificates on a real torus.
    Chern {
        #[command(subcommand)]
        action: ChernCmd,
    },
    /// Theta-group parametrisation checks.
    Theta {
        #[command(subcommand)]
        action: CheckCmd,
    },
    /// Lattice construction and cocycle checks.
    Lattice {
        #[command(subcommand)]
        action: CheckCmd,
    },
}

#[derive(Subcommand)]
enum PipelineCmd {
    Run {
        #[arg(long)]
        config: PathBuf,
        /// birational, diff or both; overrides the config's "mode".
        #[arg(long)]
        mode: Option<String>,
    },
}

#[derive(Subcommand)]
enum WaringCmd {
    Solve {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        delta: u64,
        /// Comma-separated integers.
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        set: String,
        /// Also search for a smallest superset with at most this many entries.
        #[arg(long)]
        minimal: Option<usize>,
    },
}

#[derive(Subcommand)]
enum ChernCmd {
    Certify {
        /// Real dimension of the torus.
        #[arg(long)]
        dim: usize,
        /// Degree-two class, e.g. "e12:1,e34:-1".
        #[arg(long, allow_hyphen_values = true)]
        c1: String,
        #[arg(long, default_value_t = 1)]
        d: u64,
    },
}

#[derive(Subcommand)]
enum CheckCmd {
    Check {
        #[arg(long)]
        config: PathBuf,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Coprimality { .. } => 3,
        Error::BoundExceeded { .. } => 4,
        Error::InvalidInput(_)
        | Error::InvalidGroup(_)
        | Error::GroupMismatch(_)
        | Error::Degenerate(_)
        | Error::NonCyclicCentre(_)
        | Error::InfiniteCokernel { .. } => 2,
        Error::SquareNotCommuting(_) | Error::NoSolution(_) | Error::Internal(_) => 1,
    }
}

fn read_config(path: &PathBuf) -> Result<Config, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    Config::from_json(&text)
}

fn parse_set(s: &str) -> Result<Vec<i64>, Error> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<i64>()
                .map_err(|_| Error::InvalidInput(format!("set entry {t:?} is not an integer")))
        })
        .collect()
}

/// Returns the JSON document, a one-line summary and the pass flag.
fn execute(cmd: Command, bounds: &Bounds) -> Result<(String, String, bool), Error> {
    match cmd {
        Command::Pipeline {
            action: PipelineCmd::Run { config, mode },
        } => {
            let cfg = read_config(&config)?;
            let mode = match mode {
                Some(m) => Mode::parse(&m)?,
                None => cfg.mode.unwrap_or(Mode::Both),
            };
            let report = pipeline::run(&cfg, mode, bounds)?;
            Ok((report.to_json(), report.summary(), report.ok))
        }
        Command::Waring {
            action: WaringCmd::Solve { n, delta, set, minimal },
        } => {
            let s = parse_set(&set)?;
            let cert = waring_extend(n, &s, delta)?;
            let mut value = serde_json::to_value(&cert).expect("certificate serializes");
            value["entries"] = serde_json::to_value(&cert.output.entries).expect("entries serialize");
            let mut ok = cert.checks.all();
            if let Some(cap) = minimal {
                let found = waring_minimal(n, &s, delta, cap, bounds)?;
                ok &= found.is_some();
                value["minimal"] = serde_json::to_value(&found).expect("multiset serializes");
            }
            let summary = format!(
                "waring solve: |T| = {} (bound {}), checks {}",
                cert.output.len(),
                cert.bound,
                if cert.checks.all() { "pass" } else { "fail" }
            );
            Ok((serde_json::to_string_pretty(&value).expect("json"), summary, ok))
        }
        Command::Chern {
            action: ChernCmd::Certify { dim, c1, d },
        } => {
            let class = LineBundleSymbol::new(EvenClass::parse(dim, &c1)?)?;
            let plan = complement_plan(&class, d, dim)?;
            let summary = format!(
                "chern certify: rank {} / target {}, {}",
                plan.total.rank,
                plan.target_rank,
                if plan.ok() { "pass" } else { "fail" }
            );
            let ok = plan.ok();
            Ok((serde_json::to_string_pretty(&plan).expect("json"), summary, ok))
        }
        Command::Theta {
            action: CheckCmd::Check { config },
        } => {
            let out = pipeline::theta_check(&read_config(&config)?, bounds)?;
            Ok((out.to_json(), out.summary(), out.ok))
        }
        Command::Lattice {
            action: CheckCmd::Check { config },
        } => {
            let out = pipeline::lattice_check(&read_config(&config)?, bounds)?;
            Ok((out.to_json(), out.summary(), out.ok))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = Bounds::from_env().and_then(|b| execute(cli.command, &b));
    match result {
        Ok((json, summary, ok)) => {
            // A closed stdout (e.g. piped into `head`) is not an error.
            let _ = writeln!(std::io::stdout().lock(), "{json}");
            eprintln!("{summary}");
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
