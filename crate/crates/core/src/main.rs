use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use darkpol::cli::{self, RunConfig};
use darkpol::output::Format;
use darkpol::Error;

#[derive(Parser)]
#[command(name = "darkpol", version, about = "Dark-state polarization of a 13C spin near an NV center")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its table.
    #[command(after_help = cli::help_text())]
    Run {
        #[arg(long)]
        scenario: Option<String>,
        /// key = value file; '#' starts a comment.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override one key, e.g. --set kappa=1 (repeatable).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        /// csv or json; inferred from the file extension when omitted.
        #[arg(long)]
        format: Option<String>,
    },
}

fn build(
    scenario: Option<String>,
    config: Option<PathBuf>,
    set: Vec<String>,
    out: PathBuf,
    format: Option<String>,
) -> darkpol::Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = config {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::Config { line: 0, message: format!("cannot read {}: {e}", path.display()) })?;
        cli::apply_config(&mut cfg, &text)?;
    }
    if let Some(s) = scenario {
        cfg.set("scenario", &s, 0)?;
    }
    for pair in &set {
        cfg.set_pair(pair)?;
    }
    cfg.out = Some(out);
    if let Some(f) = format {
        cfg.format = Some(
            Format::parse(&f)
                .ok_or_else(|| Error::Config { line: 0, message: format!("unknown format '{f}' (csv or json)") })?,
        );
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let Command::Run { scenario, config, set, out, format } = Args::parse().command;
    let result = build(scenario, config, set, out, format).and_then(|cfg| cli::run(&cfg));
    match result {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("darkpol: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
