//! Command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

use crate::draw::SeedingPolicy;
use crate::error::SimError;
use crate::format::FormatId;
use crate::mc::{convergence_trace, run_experiment, Design, SimulationConfig};
use crate::presets::{convergence_checkpoints, run_validation, ExperimentPreset};
use crate::report::{convergence_csv, figure_data, render_report, summary, Emit};
use crate::strength::{StrengthParams, WinModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum PresetArg {
    Baseline,
    SensitivityAlpha,
    SensitivityBeta,
    Convergence,
    Validation,
}

impl From<PresetArg> for ExperimentPreset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Baseline => ExperimentPreset::Baseline,
            PresetArg::SensitivityAlpha => ExperimentPreset::SensitivityAlpha,
            PresetArg::SensitivityBeta => ExperimentPreset::SensitivityBeta,
            PresetArg::Convergence => ExperimentPreset::Convergence,
            PresetArg::Validation => ExperimentPreset::Validation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Rr,
    Ko,
    G64,
    G66,
    G46,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeedingArg {
    Seeded,
    Random,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmitArg {
    Csv,
    Json,
    Table,
    Figdata,
}

impl From<EmitArg> for Emit {
    fn from(e: EmitArg) -> Self {
        match e {
            EmitArg::Csv => Emit::Csv,
            EmitArg::Json => Emit::Json,
            EmitArg::Table => Emit::Table,
            EmitArg::Figdata => Emit::FigData,
        }
    }
}

/// Monte Carlo comparison of 24-team championship designs.
#[derive(Debug, Clone, Parser)]
#[command(name = "tourney-sim", version)]
pub struct Cli {
    /// Run a named experiment instead of a single configuration.
    #[arg(long, value_enum)]
    pub preset: Option<PresetArg>,
    #[arg(long, value_enum, default_value = "all")]
    pub format: FormatArg,
    #[arg(long, value_enum, default_value = "both")]
    pub seeding: SeedingArg,
    #[arg(long, default_value_t = 4.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 24.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub runs: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Worker threads; defaults to one per core.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub emit: EmitArg,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{0} validation check(s) failed")]
    ValidationFailed(usize),
}

impl Cli {
    /// Designs selected by `--format` and `--seeding`; RR appears at most once.
    pub fn designs(&self) -> Vec<Design> {
        let formats: Vec<FormatId> = match self.format {
            FormatArg::Rr => vec![FormatId::RR],
            FormatArg::Ko => vec![FormatId::KO],
            FormatArg::G64 => vec![FormatId::G64],
            FormatArg::G66 => vec![FormatId::G66],
            FormatArg::G46 => vec![FormatId::G46],
            FormatArg::All => FormatId::STANDARD.to_vec(),
        };
        let seedings: &[SeedingPolicy] = match self.seeding {
            SeedingArg::Seeded => &[SeedingPolicy::Seeded],
            SeedingArg::Random => &[SeedingPolicy::Random],
            SeedingArg::Both => &SeedingPolicy::BOTH,
        };
        let mut designs = Vec::new();
        for f in formats {
            if f == FormatId::RR {
                designs.push(Design::new(f, SeedingPolicy::Random));
                continue;
            }
            designs.extend(seedings.iter().map(|&s| Design::new(f, s)));
        }
        designs
    }

    fn threads(&self) -> Option<usize> {
        self.threads.map(|t| t as usize)
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_experiment(config: &SimulationConfig, dir: &Path, emit: Emit) -> Result<String, CliError> {
    create_dir(dir)?;
    let reports = run_experiment(config)?;
    let ext = emit.extension();
    for rep in &reports {
        write_file(
            &dir.join(format!("{}.{ext}", rep.design.slug())),
            &render_report(rep, emit),
        )?;
    }
    let table = summary(&reports, emit)?;
    write_file(&dir.join(format!("summary.{ext}")), &table)?;
    if emit == Emit::FigData {
        for fig in figure_data(&reports)? {
            write_file(&dir.join(format!("{}.csv", fig.name)), &fig.csv)?;
        }
    }
    Ok(table)
}

/// Executes the command, writing result files under `--out` and a short
/// summary to `stdout`.
pub fn run(cli: &Cli, stdout: &mut impl Write) -> Result<(), CliError> {
    let emit = Emit::from(cli.emit);
    let echo = |stdout: &mut dyn Write, text: &str| {
        let _ = stdout.write_all(text.as_bytes());
    };
    let Some(preset) = cli.preset.map(ExperimentPreset::from) else {
        let model = WinModel::Jackson(StrengthParams::new(cli.alpha, cli.beta)?);
        let mut config = SimulationConfig::new(cli.runs, cli.seed, model, cli.designs());
        config.threads = cli.threads();
        let table = write_experiment(&config, &cli.out, emit)?;
        echo(stdout, &table);
        return Ok(());
    };
    match preset {
        ExperimentPreset::Validation => {
            create_dir(&cli.out)?;
            let checks = run_validation(cli.runs, cli.seed, cli.threads())?;
            let listing: String = checks.iter().map(|c| format!("{c}\n")).collect();
            write_file(&cli.out.join("validation.txt"), &listing)?;
            echo(stdout, &listing);
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(CliError::ValidationFailed(failed));
            }
        }
        ExperimentPreset::Convergence => {
            create_dir(&cli.out)?;
            for (_, config) in preset.configs(cli.runs, cli.seed, cli.threads())? {
                let trace = convergence_trace(&config, &convergence_checkpoints(cli.runs))?;
                let csv = convergence_csv(&trace);
                write_file(&cli.out.join("convergence.csv"), &csv)?;
                echo(stdout, &csv);
            }
        }
        _ => {
            for (name, config) in preset.configs(cli.runs, cli.seed, cli.threads())? {
                let table = write_experiment(&config, &cli.out.join(&name), emit)?;
                echo(stdout, &format!("== {name} ==\n{table}"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("tourney-sim").chain(args.iter().copied()))
    }

    #[test]
    fn defaults() {
        let cli = parse(&[]).unwrap();
        assert_eq!(cli.runs, 100_000);
        assert_eq!(cli.out, PathBuf::from("results"));
        assert_eq!(cli.designs(), Design::all_standard());
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(parse(&["--runs", "0"]).is_err());
        assert!(parse(&["--format", "g55"]).is_err());
        assert!(parse(&["--threads", "0"]).is_err());
        assert!(parse(&["--emit", "xml"]).is_err());
    }

    #[test]
    fn design_selection() {
        let cli = parse(&["--format", "ko", "--seeding", "random"]).unwrap();
        assert_eq!(cli.designs(), vec![Design::new(FormatId::KO, SeedingPolicy::Random)]);
        let cli = parse(&["--format", "rr", "--seeding", "both"]).unwrap();
        assert_eq!(cli.designs().len(), 1);
        let cli = parse(&["--preset", "sensitivity_alpha"]).unwrap();
        assert_eq!(cli.preset, Some(PresetArg::SensitivityAlpha));
    }
}
