//! Configuration, dispatch and output emission for the `slitlab` binary.

pub mod config;
pub mod output;
pub mod run;
pub mod svg;
pub mod units;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

pub use config::{parse_config, CommandName, ConfigError, Format, RunConfig};
pub use output::RunManifest;
pub use run::{run, CliError};

/// Environment variable that overrides `--out`.
pub const OUT_ENV: &str = "SLITLAB_OUT";

/// Command-line overrides applied on top of a parsed config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub env_out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub formats: Option<Vec<String>>,
}

/// Applies seed and format overrides and pins the command. The output
/// directory recorded in the config is left alone so the digest does not
/// depend on where a run is written.
pub fn resolve(mut cfg: RunConfig, command: CommandName, o: &Overrides) -> Result<RunConfig, CliError> {
    if let Some(declared) = cfg.command {
        if declared != command {
            return Err(CliError::Validation(format!("config declares command `{declared}` but `{command}` was requested")));
        }
    }
    cfg.command = Some(command);
    if let Some(seed) = o.seed {
        cfg.sampling.seed = seed;
    }
    if let Some(list) = &o.formats {
        let formats: BTreeSet<Format> = list
            .iter()
            .map(|f| Format::parse(f).ok_or_else(|| CliError::Validation(format!("unknown output format `{f}`"))))
            .collect::<Result<_, _>>()?;
        if formats.is_empty() {
            return Err(CliError::Validation("--format needs at least one of csv, json, svg".into()));
        }
        cfg.output.formats = formats;
    }
    Ok(cfg)
}

/// `SLITLAB_OUT`, then `--out`, then the config's `output.directory`.
pub fn output_dir(cfg: &RunConfig, o: &Overrides) -> PathBuf {
    o.env_out.clone().or_else(|| o.out.clone()).unwrap_or_else(|| PathBuf::from(&cfg.output.directory))
}

/// Reads, resolves and runs one config file.
pub fn execute(command: CommandName, config_path: &Path, o: &Overrides) -> Result<RunManifest, CliError> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", config_path.display())))?;
    let cfg = resolve(parse_config(&text)?, command, o)?;
    run(&cfg, command, &output_dir(&cfg, o))
}
