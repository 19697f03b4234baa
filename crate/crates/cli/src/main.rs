use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use loopmod_cli::config::JobConfig;
use loopmod_cli::report::{error_kind, Report};
use loopmod_cli::tasks;
use loopmod_core::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Build truncated loop-module families from a JSON job file and check
/// their structural properties.
#[derive(Debug, Parser)]
#[command(name = "loopmod", version)]
struct Cli {
    /// Job configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for report.json and tables.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// `csv` also writes one CSV file per dimension table.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    quiet: bool,
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) | Error::LevelZero(_) => 2,
        Error::TruncationOverflow(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let mut cfg = match JobConfig::load(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("loopmod: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let outcome = match tasks::run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("loopmod: {} ({})", e, error_kind(&e));
            return ExitCode::from(exit_for(&e));
        }
    };
    let report = Report::new(&cfg, outcome);
    if let Err(e) = std::fs::create_dir_all(&cli.out).and_then(|_| report.write_json(&cli.out)) {
        eprintln!("loopmod: cannot write report: {e}");
        return ExitCode::from(2);
    }
    if cli.format == Format::Csv {
        if let Err(e) = report.write_csv(&cli.out) {
            eprintln!("loopmod: cannot write tables: {e}");
            return ExitCode::from(2);
        }
    }
    if !cli.quiet {
        for c in &report.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            match (&c.count, &c.witness) {
                (Some(n), _) => println!("{mark} {} ({n})", c.name),
                (None, Some(w)) => println!("{mark} {}: {w}", c.name),
                _ => println!("{mark} {}", c.name),
            }
        }
        println!("{}: {}", report.task, report.status);
    }
    ExitCode::from(report.exit_code as u8)
}
