use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use slitlab::{execute, CommandName, Overrides, OUT_ENV};

#[derive(Parser)]
#[command(name = "slitlab", version, about = "Single-slit matter-wave diffraction workbench")]
struct Cli {
    command: CommandName,
    #[arg(long)]
    config: PathBuf,
    /// Output directory; SLITLAB_OUT takes precedence.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated subset of csv,json,svg.
    #[arg(long, value_delimiter = ',')]
    format: Option<Vec<String>>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let overrides = Overrides {
        out: cli.out,
        env_out: std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from),
        seed: cli.seed,
        formats: cli.format,
    };
    match execute(cli.command, &cli.config, &overrides) {
        Ok(manifest) => {
            for w in &manifest.warnings {
                eprintln!("warning: {w}");
            }
            println!("{} ok: {} outputs, config {}", manifest.command, manifest.outputs.len(), &manifest.config_digest[..12]);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
