use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use floquet_pt_cli::{load_config, run, threads_from_env, CliError, Command, THREADS_ENV};

/// Floquet phase diagrams of a square-wave driven non-Hermitian two-level system.
#[derive(Debug, Parser)]
#[command(name = "floquet-pt", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Figure preset: fig1, fig2, fig3a, fig3b, fig3c, fig4a, fig4b or fig5.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory (default: `out` from the config, else the current directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a config key, e.g. `--set protocol.gamma0=0.3`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

fn main_inner(args: Args) -> Result<(), CliError> {
    let cfg = load_config(args.preset.as_deref(), args.config.as_deref(), &args.sets)?;
    let threads = threads_from_env(std::env::var(THREADS_ENV).ok().as_deref())?;
    let out = args
        .out
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let report = run(args.command, &cfg, &out, threads)?;
    for line in &report.stdout {
        println!("{line}");
    }
    for f in &report.files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match main_inner(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
