//! End-to-end feature selection: ingest → encode → normalize → split →
//! correlation profile on the training rows → QUBO → (constrain) → solve →
//! compare the selected subset against all features.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::classify::{compare_feature_sets, train_test_split, FeatureSetComparison, LogisticHyperparams, Split};
use crate::constraints::{cardinality_equals, suggest_penalty, Penalty};
use crate::error::{DataError, SolveError};
use crate::feature_select::{
    build_qubo, correlation_profile, encode_categorical, ingest_csv, normalize, CorrelationProfile, CsvOptions,
    Dataset, FeatureSelectionConfig,
};
use crate::solvers::{SolveParams, SolveResult, SolverRegistry};
use crate::Qubo;

pub const DEFAULT_SPLIT_RATIO: f64 = 0.7;
pub const DEFAULT_SOLVER: &str = "simulated-annealing";

/// Every knob of a pipeline run. All randomness comes from `seed` (solver)
/// and `split_seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub alpha: f64,
    pub use_absolute: bool,
    pub solver: String,
    pub seed: u64,
    pub sweeps: usize,
    pub restarts: usize,
    /// Starting temperature; the model's energy scale when unset.
    pub t_initial: Option<f64>,
    pub t_final: f64,
    pub split_ratio: f64,
    pub split_seed: u64,
    /// Require exactly this many selected features.
    pub cardinality: Option<usize>,
    /// Penalty weight for the cardinality constraint; [`suggest_penalty`] when unset.
    pub penalty: Option<f64>,
    pub classifier: LogisticHyperparams,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let solve = SolveParams::default();
        let selection = FeatureSelectionConfig::default();
        Self {
            alpha: selection.alpha,
            use_absolute: selection.use_absolute,
            solver: DEFAULT_SOLVER.to_string(),
            seed: solve.seed,
            sweeps: solve.sweeps,
            restarts: solve.restarts,
            t_initial: None,
            t_final: solve.t_final,
            split_ratio: DEFAULT_SPLIT_RATIO,
            split_seed: 0,
            cardinality: None,
            penalty: None,
            classifier: LogisticHyperparams::default(),
        }
    }
}

impl PipelineConfig {
    pub fn selection(&self) -> Result<FeatureSelectionConfig, DataError> {
        FeatureSelectionConfig::new(self.alpha, self.use_absolute)
    }

    /// Solver parameters for `model`, filling in the starting temperature if unset.
    pub fn solve_params(&self, model: &Qubo) -> Result<SolveParams, SolveError> {
        let base = SolveParams {
            seed: self.seed,
            sweeps: self.sweeps,
            restarts: self.restarts,
            t_initial: 1.0,
            t_final: self.t_final,
        };
        let params = match self.t_initial {
            Some(t) => SolveParams { t_initial: t, ..base },
            None => base.with_scale_of(model),
        };
        params.validate()?;
        Ok(params)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

impl From<crate::error::QuboError> for PipelineError {
    fn from(e: crate::error::QuboError) -> Self {
        PipelineError::Data(e.into())
    }
}

/// Ingests a CSV and applies categorical encoding followed by z-score normalization.
pub fn prepare_dataset<R: Read>(source: R, target: &str, options: &CsvOptions) -> Result<Dataset, DataError> {
    let raw = ingest_csv(source, target, options)?;
    normalize(&encode_categorical(&raw))
}

/// Correlation profile computed on the training rows only.
pub fn training_profile(ds: &Dataset, split: &Split) -> Result<CorrelationProfile, DataError> {
    correlation_profile(&ds.select_rows(&split.train))
}

/// Feature-selection QUBO, with the cardinality penalty applied when requested.
pub fn build_model(profile: &CorrelationProfile, config: &PipelineConfig) -> Result<Qubo, PipelineError> {
    let base = build_qubo(profile, &config.selection()?)?;
    match config.cardinality {
        None => Ok(base),
        Some(k) => {
            let penalty = match config.penalty {
                Some(p) => Penalty::new(p)?,
                None => suggest_penalty(&base),
            };
            Ok(cardinality_equals(&base, k, penalty)?)
        }
    }
}

/// Result of one full pipeline run. Records alpha next to every outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionReport {
    pub alpha: f64,
    pub use_absolute: bool,
    pub cardinality: Option<usize>,
    pub params: SolveParams,
    pub split: Split,
    pub result: SolveResult<f64>,
    pub selected: Vec<String>,
    pub dropped: Vec<String>,
    pub comparison: FeatureSetComparison,
}

/// Intermediate artifacts of [`run_selection`], kept for persistence.
#[derive(Debug, Clone)]
pub struct SelectionRun {
    pub profile: CorrelationProfile,
    pub model: Qubo,
    pub report: SelectionReport,
}

/// Runs split → profile → build → solve → evaluate on a prepared dataset.
pub fn run_selection(
    ds: &Dataset,
    config: &PipelineConfig,
    registry: &SolverRegistry<f64>,
) -> Result<SelectionRun, PipelineError> {
    let split = train_test_split(ds, config.split_ratio, config.split_seed)?;
    let profile = training_profile(ds, &split)?;
    let model = build_model(&profile, config)?;
    let params = config.solve_params(&model)?;
    let result = registry.get(&config.solver)?.solve(&model, &params)?;

    let names = ds.feature_names();
    let (mut selected, mut dropped) = (Vec::new(), Vec::new());
    for (i, name) in names.iter().enumerate() {
        if result.best.get(i) {
            selected.push(name.clone());
        } else {
            dropped.push(name.clone());
        }
    }
    if selected.is_empty() {
        return Err(DataError::EmptyMask.into());
    }
    let comparison = compare_feature_sets(ds, &split, &[result.best.clone()], &config.classifier)?;
    Ok(SelectionRun {
        profile,
        model,
        report: SelectionReport {
            alpha: config.alpha,
            use_absolute: config.use_absolute,
            cardinality: config.cardinality,
            params,
            split,
            result,
            selected,
            dropped,
            comparison,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaPoint {
    pub alpha: f64,
    pub best_energy: f64,
    pub selected_count: usize,
    pub selected: Vec<String>,
}

/// Solves the feature-selection QUBO of `profile` for each alpha with the
/// named solver. Other settings come from `config`.
pub fn alpha_sweep(
    profile: &CorrelationProfile,
    alphas: &[f64],
    config: &PipelineConfig,
    registry: &SolverRegistry<f64>,
) -> Result<Vec<AlphaPoint>, PipelineError> {
    let solver = registry.get(&config.solver)?;
    alphas
        .iter()
        .map(|&alpha| {
            let config = PipelineConfig {
                alpha,
                ..config.clone()
            };
            let model = build_model(profile, &config)?;
            let result = solver.solve(&model, &config.solve_params(&model)?)?;
            Ok(AlphaPoint {
                alpha,
                best_energy: result.best_energy,
                selected_count: result.selected_count,
                selected: result
                    .best
                    .ones_indices()
                    .into_iter()
                    .map(|i| profile.names[i].clone())
                    .collect(),
            })
        })
        .collect()
}

impl SelectionReport {
    /// Console summary: kept and dropped features, energy, metrics and deltas.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "alpha = {}  solver = {}  seed = {}\n",
            self.alpha, self.result.solver, self.params.seed
        ));
        out.push_str(&format!(
            "best energy = {:.6}  features kept = {}/{}\n",
            self.result.best_energy,
            self.selected.len(),
            self.selected.len() + self.dropped.len()
        ));
        out.push_str(&format!("kept:    {}\n", self.selected.join(", ")));
        out.push_str(&format!("dropped: {}\n\n", self.dropped.join(", ")));
        out.push_str(&self.comparison.render_table(&["selected".to_string()]));
        out
    }
}
