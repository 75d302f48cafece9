//! `rkan`: decide reachability, collapse preorders, compute monotone
//! extensions, verify their properties and export Lorenz curves.
//!
//! Exit status: 0 on success, 1 when a verified property fails, 2 on usage
//! or input errors.

mod commands;
mod config;
mod verify;

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use commands::{Output, Run};
use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "rkan", version, about = "Monotone extensions between resource theories")]
struct Args {
    /// JSON run configuration; `-` or omitted reads standard input.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for sampled objects; overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the result here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_config(path: Option<&PathBuf>) -> Result<RunConfig> {
    let text = match path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?
        }
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
            s
        }
    };
    serde_json::from_str(&text).context("malformed config")
}

fn render(output: &Output) -> Result<String> {
    Ok(match output {
        Output::Json(v) => serde_json::to_string_pretty(v)? + "\n",
        Output::Text(t) => t.clone(),
    })
}

fn execute(args: &Args) -> Result<Run> {
    let cfg = read_config(args.config.as_ref())?;
    let seed = args.seed.or(cfg.seed).unwrap_or(0);
    let run = commands::run(&cfg, seed)?;
    let text = render(&run.output)?;
    match &args.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(run)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(run) if run.passed => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
