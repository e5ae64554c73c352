//! `tlf` — truncated Lévy flight experiments from the command line.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use tlf_core::{Error, Result};

const USAGE: &str = "\
tlf — truncated Lévy flight simulation and analysis

USAGE:
    tlf <COMMAND> [OPTIONS]

COMMANDS:
    cumulants        analytic (expansion) and oracle increment cumulants
    simulate         generate a reproducible walk ensemble
    correlate        theory-vs-simulation correlation reports + R3 surface
    regime           Lévy/crossover/Gaussian classification over a step sweep
    tailcheck        tail-density comparison table
    reproduce-paper  run the built-in desk-scale reproduction checks

OPTIONS:
    --config PATH    experiment config file (required except reproduce-paper)
    --out DIR        override the output directory
    --seed U64       override the experiment seed
    --threads N      cap the worker thread count
    --format F       restrict output to one format: csv | json | binary
    -h, --help       print this help

Exit codes: 0 success, 1 validation error, 2 numeric failure, 3 I/O error.
Config file grammar and output schemas are documented in the README.";

struct Cli {
    command: String,
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    threads: Option<usize>,
    format: Option<String>,
}

fn parse_cli(mut args: std::env::Args) -> Result<Option<Cli>> {
    let _argv0 = args.next();
    let command = match args.next() {
        None => return Ok(None),
        Some(c) if c == "-h" || c == "--help" => return Ok(None),
        Some(c) => c,
    };
    let mut cli = Cli {
        command,
        config: None,
        out: None,
        seed: None,
        threads: None,
        format: None,
    };
    while let Some(flag) = args.next() {
        let mut value = |name: &str| -> Result<String> {
            args.next()
                .ok_or_else(|| Error::Parse(format!("flag {name} needs a value")))
        };
        match flag.as_str() {
            "--config" => cli.config = Some(PathBuf::from(value("--config")?)),
            "--out" => cli.out = Some(PathBuf::from(value("--out")?)),
            "--seed" => {
                let v = value("--seed")?;
                cli.seed = Some(
                    v.parse()
                        .map_err(|_| Error::Parse(format!("bad --seed value '{v}'")))?,
                );
            }
            "--threads" => {
                let v = value("--threads")?;
                cli.threads = Some(
                    v.parse()
                        .map_err(|_| Error::Parse(format!("bad --threads value '{v}'")))?,
                );
            }
            "--format" => cli.format = Some(value("--format")?),
            "-h" | "--help" => return Ok(None),
            other => return Err(Error::Parse(format!("unknown flag '{other}'"))),
        }
    }
    Ok(Some(cli))
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Validation(_) | Error::Domain(_) | Error::Parse(_) | Error::Budget(_) => 1,
        Error::Quadrature { .. } | Error::Sampling(_) => 2,
        Error::Io(_) => 3,
    }
}

fn run(cli: Cli) -> Result<u8> {
    if let Some(n) = cli.threads {
        // ignore "already initialized": only the first call can win
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }

    if cli.command == "reproduce-paper" {
        let all_passed = commands::cmd_reproduce_paper(cli.out.as_deref())?;
        return Ok(if all_passed { 0 } else { 2 });
    }

    let config_path = cli.config.ok_or_else(|| {
        Error::Parse(format!(
            "command '{}' requires --config PATH (see --help)",
            cli.command
        ))
    })?;
    let mut cfg = config::load(&config_path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = cli.out {
        cfg.out_dir = out;
    }
    if let Some(fmt) = &cli.format {
        cfg.formats = vec![match fmt.as_str() {
            "csv" => config::Format::Csv,
            "json" => config::Format::Json,
            "binary" => config::Format::Binary,
            other => return Err(Error::Parse(format!("unknown --format '{other}'"))),
        }];
    }

    match cli.command.as_str() {
        "cumulants" => commands::cmd_cumulants(&cfg)?,
        "simulate" => commands::cmd_simulate(&cfg)?,
        "correlate" => commands::cmd_correlate(&cfg)?,
        "regime" => commands::cmd_regime(&cfg)?,
        "tailcheck" => commands::cmd_tailcheck(&cfg)?,
        other => {
            return Err(Error::Parse(format!(
                "unknown command '{other}' (see --help)"
            )))
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match parse_cli(std::env::args()) {
        Ok(None) => {
            println!("{USAGE}");
            ExitCode::SUCCESS
        }
        Ok(Some(cli)) => match run(cli) {
            Ok(code) => ExitCode::from(code),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(exit_code_for(&e))
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("{USAGE}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
