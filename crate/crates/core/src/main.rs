use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gsubmod::caps::DEFAULT_SEED;
use gsubmod::export::{render, Format};
use gsubmod::scenario::{parse_scenario, run};
use gsubmod::search::{search, Family, Predicate, SearchConfig};
use gsubmod::{Caps, Error};

/// Exact experiments on finite group actions and their submodular set functions.
///
/// Size limits can be raised with GSUBMOD_CAP_<FIELD> environment variables,
/// e.g. GSUBMOD_CAP_GROUP_ORDER=40320.
#[derive(Parser)]
#[command(name = "gsubmod", version)]
struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (`-` reads stdin) and print its report.
    Run { scenario: PathBuf },
    /// Search a family of actions for instances of a predicate.
    Search {
        /// symmetric:N, cyclic:N, dihedral:N, affine:P or cyclic_product:M,N
        #[arg(long)]
        family: String,
        /// A statement id (kneser, ruzsa, petridis, ...) or kneser_trivial_stabilizer.
        #[arg(long)]
        predicate: String,
        /// Number of instances.
        #[arg(long, default_value_t = 1000)]
        budget: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// First instance; pass a previous report's next_cursor to resume.
        #[arg(long, default_value_t = 0)]
        cursor: u64,
        #[arg(long, default_value_t = 100)]
        max_records: usize,
        /// Also record instances where the statement holds.
        #[arg(long)]
        record_satisfied: bool,
    },
    /// Re-render a saved run or search report.
    Report {
        #[arg(long, default_value = "json")]
        format: String,
        report: PathBuf,
    },
}

fn read_input(path: &Path) -> Result<String, Error> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Validation(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Validation(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

/// Returns whether a theorem-backed check failed.
fn execute(cli: &Cli) -> Result<bool, Error> {
    match &cli.command {
        Command::Run { scenario } => {
            let s = parse_scenario(&read_input(scenario)?)?;
            let caps = s.effective_caps(|k| std::env::var(k).ok())?;
            let report = run(&s, &caps)?;
            emit(&cli.out, &pretty(&report))?;
            for t in report.violating_tasks() {
                eprintln!("violation in task {} ({})", t.index, t.task);
            }
            Ok(report.violations > 0)
        }
        Command::Search { family, predicate, budget, seed, cursor, max_records, record_satisfied } => {
            let family: Family = family.parse()?;
            let predicate: Predicate = predicate.parse()?;
            let mut config = SearchConfig::new(family, predicate, *budget, *seed);
            config.cursor = *cursor;
            config.max_records = *max_records;
            config.record_satisfied = *record_satisfied;
            let report = search(&config, &Caps::from_env()?)?;
            emit(&cli.out, &pretty(&report))?;
            eprintln!(
                "{} instances, {} with hypotheses, {} hits, {} violations, next cursor {}",
                report.instances, report.hypotheses_held, report.hits, report.violations, report.next_cursor
            );
            Ok(report.violations > 0)
        }
        Command::Report { format, report } => {
            let format: Format = format.parse()?;
            let value: serde_json::Value =
                serde_json::from_str(&read_input(report)?).map_err(|e| Error::Parse(e.to_string()))?;
            emit(&cli.out, &render(&value, format)?)?;
            Ok(false)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Invariant(_) => 1,
                Error::Capacity { .. } => 3,
                _ => 2,
            })
        }
    }
}
