use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use infonce_k::sim::SimConfig;

use crate::config::Settings;
use crate::error::{CliError, CliResult};
use crate::svg::LineChart;

pub mod estimate;
pub mod optimal;
pub mod schedule;
pub mod simulate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    CsvSvg,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "csv+svg" => Ok(Format::CsvSvg),
            other => Err(format!(
                "unknown format {other:?} (expected csv or csv+svg)"
            )),
        }
    }
}

#[derive(Debug)]
pub struct OutputFlags {
    pub config: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub format: Option<Format>,
}

impl OutputFlags {
    /// Loads the settings file and resolves the output options from it.
    pub fn open(self) -> CliResult<(Settings, Output)> {
        let mut settings = Settings::load(self.config.as_deref())?;
        let dir: Option<PathBuf> = settings.pick(self.output_dir, "output_dir")?;
        let format = settings.pick(self.format, "format")?.unwrap_or_default();
        Ok((
            settings,
            Output {
                dir: dir.unwrap_or_else(|| PathBuf::from(".")),
                format,
            },
        ))
    }
}

pub struct Output {
    dir: PathBuf,
    format: Format,
}

impl Output {
    fn write(&self, name: &str, contents: &str) -> CliResult<PathBuf> {
        std::fs::create_dir_all(&self.dir).map_err(|e| CliError::io(&self.dir, e))?;
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        eprintln!("wrote {}", path.display());
        Ok(path)
    }

    pub fn csv(&self, name: &str, header: &str, rows: &[String]) -> CliResult<PathBuf> {
        let mut text = String::with_capacity(header.len() + 1 + rows.len() * 24);
        text.push_str(header);
        text.push('\n');
        for row in rows {
            text.push_str(row);
            text.push('\n');
        }
        self.write(name, &text)
    }

    /// Writes the chart only when SVG output was requested.
    pub fn chart(&self, name: &str, chart: impl FnOnce() -> LineChart) -> CliResult<()> {
        if self.format == Format::CsvSvg {
            self.write(name, &chart().render())?;
        }
        Ok(())
    }
}

pub fn required<T>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::usage(format!("missing required --{flag}")))
}

pub fn lambdas(values: Vec<f64>) -> Vec<f64> {
    if values.is_empty() {
        vec![infonce_k::effectiveness::DEFAULT_LAMBDA]
    } else {
        values
    }
}

pub fn row(fields: &[&dyn Display]) -> String {
    fields
        .iter()
        .map(|f| f.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Simulator parameters shared by `simulate` and `turning-sweep`.
#[derive(Debug, Args)]
pub struct SimArgs {
    #[arg(long)]
    pub mu_q: Option<f64>,
    #[arg(long)]
    pub feature_dim: Option<usize>,
    #[arg(long)]
    pub noise_std: Option<f64>,
    #[arg(long)]
    pub train_instances: Option<usize>,
    #[arg(long)]
    pub eval_pairs: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
}

impl SimArgs {
    pub fn resolve(self, settings: &mut Settings) -> CliResult<SimConfig> {
        let d = SimConfig::default();
        Ok(SimConfig {
            mu_q: settings.pick(self.mu_q, "mu_q")?.unwrap_or(d.mu_q),
            feature_dim: settings
                .pick(self.feature_dim, "feature_dim")?
                .unwrap_or(d.feature_dim),
            noise_std: settings
                .pick(self.noise_std, "noise_std")?
                .unwrap_or(d.noise_std),
            train_instances: settings
                .pick(self.train_instances, "train_instances")?
                .unwrap_or(d.train_instances),
            eval_pairs: settings
                .pick(self.eval_pairs, "eval_pairs")?
                .unwrap_or(d.eval_pairs),
            learning_rate: settings
                .pick(self.learning_rate, "learning_rate")?
                .unwrap_or(d.learning_rate),
            batch_size: settings
                .pick(self.batch_size, "batch_size")?
                .unwrap_or(d.batch_size),
            epochs: settings.pick(self.epochs, "epochs")?.unwrap_or(d.epochs),
            ..d
        })
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}
