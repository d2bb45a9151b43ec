use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eventloc_cli::{bundled, run_scenario, selftest, CliError, Pipeline, ScenarioConfig};

#[derive(Parser)]
#[command(name = "eventloc", version, about = "Covariant event-localization scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Kernel contraction and isometry checks.
    Certify(Common),
    /// Space-time density and its invariants.
    Density(Common),
    /// Mean coordinates by every applicable route.
    Coords(Common),
    /// Baricentric class, Casimir values and Ξ per kernel entry.
    Classify(Common),
    /// Scaled-family probe of P_λ(I).
    Definiteness(Common),
    /// Pipelines listed in the config.
    Run(Common),
    /// Built-in invariant suite.
    Selftest {
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print a bundled scenario's TOML.
    Show { name: String },
}

#[derive(Args)]
struct Common {
    #[arg(long, conflicts_with = "bundled", required_unless_present = "bundled")]
    config: Option<PathBuf>,
    /// Name of a scenario shipped with the binary.
    #[arg(long)]
    bundled: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// Recorded in the report metadata; scenarios are deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn threads(n: Option<usize>) {
    if let Some(n) = n {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("thread pool: {e}");
        }
    }
}

fn execute(c: &Common, only: Option<&[Pipeline]>) -> Result<i32, CliError> {
    threads(c.threads);
    let config = match (&c.config, &c.bundled) {
        (Some(p), _) => ScenarioConfig::from_path(p)?,
        (None, Some(name)) => bundled::load(name)?,
        (None, None) => return Err(CliError::Config("need --config or --bundled".into())),
    };
    let mut outcome = run_scenario(&config, only)?;
    if let Some(m) = outcome.report.meta.as_object_mut() {
        m.insert("seed".into(), c.seed.into());
    }
    let dir = c.out.clone().unwrap_or_else(|| Path::new("out").join(&config.name));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let write = |name: &str, text: &str| {
        std::fs::write(dir.join(name), text).map_err(|e| CliError::Io(format!("{name}: {e}")))
    };
    write("report.json", &outcome.report.to_json())?;
    for (name, text) in &outcome.exports {
        write(name, text)?;
    }
    println!("{} {:?} {}", config.name, outcome.status, outcome.report.body_sha256);
    println!("report: {}", dir.join("report.json").display());
    Ok(outcome.status.exit_code())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("EVENTLOC_LOG", "warn")).init();
    let cli = Cli::parse();
    use Pipeline::*;
    let result = match &cli.command {
        Command::Certify(c) => execute(c, Some(&[Certify])),
        Command::Density(c) => execute(c, Some(&[Certify, Density])),
        Command::Coords(c) => execute(c, Some(&[Certify, Density, Coords])),
        Command::Classify(c) => execute(c, Some(&[Classify])),
        Command::Definiteness(c) => execute(c, Some(&[Certify, Definiteness])),
        Command::Run(c) => execute(c, None),
        Command::Selftest { threads: t, seed } => {
            threads(*t);
            let checks = selftest::run_all(*seed);
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            Ok(if checks.iter().all(|c| c.passed) { 0 } else { 1 })
        }
        Command::Show { name } => match bundled::source(name) {
            Some(text) => {
                print!("{text}");
                Ok(0)
            }
            None => Err(CliError::Config(format!("no bundled scenario '{name}'; available: {}", bundled::names().join(", ")))),
        },
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
