//! Command-line flags, the optional TOML config file, and their merge.
//! A flag always wins over the file; the file wins over built-in defaults.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use quboselect::classify::LogisticHyperparams;
use quboselect::pipeline::PipelineConfig;
use serde::Deserialize;

pub const DEFAULT_OUTPUT_DIR: &str = "out";

/// A problem with how the program was invoked (exit status 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Clone, Default, Args)]
pub struct DataArgs {
    /// CSV file with a header row
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Name of the binary target column
    #[arg(long)]
    pub target: Option<String>,
    /// Field delimiter (single ASCII character)
    #[arg(long)]
    pub delimiter: Option<char>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SplitArgs {
    /// Fraction of rows used for training and for the correlation profile
    #[arg(long)]
    pub split_ratio: Option<f64>,
    /// Seed of the stratified train/test split
    #[arg(long)]
    pub split_seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// Weight of the relevance term, in [0, 1]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Use absolute correlations (true) or signed ones (false)
    #[arg(long)]
    pub use_absolute: Option<bool>,
    /// Require exactly this many selected features
    #[arg(long)]
    pub cardinality: Option<usize>,
    /// Penalty weight for the cardinality constraint (default: suggested from the model)
    #[arg(long)]
    pub penalty: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SolverArgs {
    /// exhaustive, simulated-annealing or random
    #[arg(long)]
    pub solver: Option<String>,
    /// Solver seed
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub sweeps: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Starting temperature (default: the model's energy scale)
    #[arg(long)]
    pub t_initial: Option<f64>,
    #[arg(long)]
    pub t_final: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ClassifierArgs {
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub l2: Option<f64>,
}

/// Contents of the `--config` file. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub target: Option<String>,
    pub delimiter: Option<char>,
    pub output_dir: Option<PathBuf>,
    pub split_ratio: Option<f64>,
    pub split_seed: Option<u64>,
    pub alpha: Option<f64>,
    pub use_absolute: Option<bool>,
    pub cardinality: Option<usize>,
    pub penalty: Option<f64>,
    pub solver: Option<String>,
    pub seed: Option<u64>,
    pub sweeps: Option<usize>,
    pub restarts: Option<usize>,
    pub t_initial: Option<f64>,
    pub t_final: Option<f64>,
    pub learning_rate: Option<f64>,
    pub iterations: Option<usize>,
    pub l2: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).map_err(|e| usage(format!("config file {}: {e}", path.display())))
    }
}

/// Everything a command needs after merging flags, file and defaults.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub input: Option<PathBuf>,
    pub target: Option<String>,
    pub delimiter: u8,
    pub output_dir: PathBuf,
    pub pipeline: PipelineConfig,
}

#[derive(Default)]
pub struct Flags<'a> {
    pub output_dir: Option<&'a PathBuf>,
    pub data: Option<&'a DataArgs>,
    pub split: Option<&'a SplitArgs>,
    pub model: Option<&'a ModelArgs>,
    pub solver: Option<&'a SolverArgs>,
    pub classifier: Option<&'a ClassifierArgs>,
}

impl Resolved {
    pub fn merge(flags: Flags<'_>, file: FileConfig) -> anyhow::Result<Self> {
        let data = flags.data.cloned().unwrap_or_default();
        let split = flags.split.cloned().unwrap_or_default();
        let model = flags.model.cloned().unwrap_or_default();
        let solver = flags.solver.cloned().unwrap_or_default();
        let classifier = flags.classifier.cloned().unwrap_or_default();
        let defaults = PipelineConfig::default();
        let hyper = LogisticHyperparams::default();

        let delimiter = data.delimiter.or(file.delimiter).unwrap_or(',');
        if !delimiter.is_ascii() {
            return Err(usage(format!("delimiter `{delimiter}` is not a single ASCII character")));
        }

        let pipeline = PipelineConfig {
            alpha: model.alpha.or(file.alpha).unwrap_or(defaults.alpha),
            use_absolute: model.use_absolute.or(file.use_absolute).unwrap_or(defaults.use_absolute),
            solver: solver.solver.or(file.solver).unwrap_or(defaults.solver),
            seed: solver.seed.or(file.seed).unwrap_or(defaults.seed),
            sweeps: solver.sweeps.or(file.sweeps).unwrap_or(defaults.sweeps),
            restarts: solver.restarts.or(file.restarts).unwrap_or(defaults.restarts),
            t_initial: solver.t_initial.or(file.t_initial),
            t_final: solver.t_final.or(file.t_final).unwrap_or(defaults.t_final),
            split_ratio: split.split_ratio.or(file.split_ratio).unwrap_or(defaults.split_ratio),
            split_seed: split.split_seed.or(file.split_seed).unwrap_or(defaults.split_seed),
            cardinality: model.cardinality.or(file.cardinality),
            penalty: model.penalty.or(file.penalty),
            classifier: LogisticHyperparams {
                learning_rate: classifier.learning_rate.or(file.learning_rate).unwrap_or(hyper.learning_rate),
                iterations: classifier.iterations.or(file.iterations).unwrap_or(hyper.iterations),
                l2: classifier.l2.or(file.l2).unwrap_or(hyper.l2),
            },
        };
        pipeline.selection().map_err(|e| usage(e.to_string()))?;
        if !(pipeline.split_ratio > 0.0 && pipeline.split_ratio < 1.0) {
            return Err(usage(format!(
                "split ratio {} must lie strictly between 0 and 1",
                pipeline.split_ratio
            )));
        }
        if pipeline.penalty.is_some_and(|p| !(p.is_finite() && p > 0.0)) {
            return Err(usage("penalty must be strictly positive and finite"));
        }

        Ok(Self {
            input: data.input.or(file.input),
            target: data.target.or(file.target),
            delimiter: delimiter as u8,
            output_dir: flags
                .output_dir
                .cloned()
                .or(file.output_dir)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
            pipeline,
        })
    }

    pub fn input(&self) -> anyhow::Result<&Path> {
        self.input.as_deref().ok_or_else(|| usage("missing --input"))
    }

    pub fn target(&self) -> anyhow::Result<&str> {
        self.target.as_deref().ok_or_else(|| usage("missing --target"))
    }
}
