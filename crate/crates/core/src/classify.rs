//! Downstream validation of a feature subset: stratified train/test split,
//! logistic regression by full-batch gradient descent, and precision /
//! recall / accuracy on the held-out rows.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::DataError;
use crate::feature_select::Dataset;
use crate::qubo::BinaryVector;
use crate::solvers::render_grid;

/// Disjoint train/test row indices, both sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub ratio: f64,
    pub seed: u64,
}

/// Stratified random split with `round(ratio · rows)` training rows.
///
/// Each class contributes its proportional share of the training rows
/// (largest-remainder rounding); rows within a class are shuffled with a
/// generator seeded by `seed`.
pub fn train_test_split(ds: &Dataset, ratio: f64, seed: u64) -> Result<Split, DataError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(DataError::BadRatio(ratio));
    }
    let rows = ds.rows();
    let n_train = (ratio * rows as f64).round() as usize;
    if rows < 2 || n_train == 0 || n_train == rows {
        return Err(DataError::DegenerateSplit { rows, ratio });
    }

    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, &t) in ds.target().iter().enumerate() {
        by_class[t as usize].push(i);
    }
    let exact: Vec<f64> = by_class
        .iter()
        .map(|c| c.len() as f64 * n_train as f64 / rows as f64)
        .collect();
    let mut quota: Vec<usize> = exact.iter().map(|q| q.floor() as usize).collect();
    let mut remaining = n_train - quota.iter().sum::<usize>();
    let mut order = [0usize, 1];
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())));
    for &c in order.iter().cycle().take(4) {
        if remaining == 0 {
            break;
        }
        if quota[c] < by_class[c].len() {
            quota[c] += 1;
            remaining -= 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::with_capacity(n_train);
    let mut test = Vec::with_capacity(rows - n_train);
    for (class, members) in by_class.iter_mut().enumerate() {
        members.shuffle(&mut rng);
        train.extend_from_slice(&members[..quota[class]]);
        test.extend_from_slice(&members[quota[class]..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split {
        train,
        test,
        ratio,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogisticHyperparams {
    pub learning_rate: f64,
    pub iterations: usize,
    pub l2: f64,
}

impl Default for LogisticHyperparams {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            iterations: 500,
            l2: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    /// Dataset column index of each weight.
    pub features: Vec<usize>,
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LogisticModel {
    pub fn probability(&self, row: &[f64]) -> f64 {
        sigmoid(self.logit(row))
    }

    /// `row` holds the selected feature values in `features` order.
    fn logit(&self, row: &[f64]) -> f64 {
        self.bias + self.weights.iter().zip(row).map(|(w, x)| w * x).sum::<f64>()
    }

    /// Predicted class for dataset row `r`, thresholding the probability at 0.5.
    pub fn predict_row(&self, ds: &Dataset, r: usize) -> Result<u8, DataError> {
        let mut z = self.bias;
        for (&f, w) in self.features.iter().zip(&self.weights) {
            z += w * ds.numeric_column(f)?[r];
        }
        Ok((z >= 0.0) as u8)
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + eᶻ)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Mean cross-entropy plus `l2/2 · ‖w‖²`, with its gradient in `w` and `b`.
pub fn loss_and_gradient(
    rows: &[Vec<f64>],
    labels: &[u8],
    weights: &[f64],
    bias: f64,
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let m = rows.len() as f64;
    let mut loss = 0.0;
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for (row, &y) in rows.iter().zip(labels) {
        let z = bias + weights.iter().zip(row).map(|(w, x)| w * x).sum::<f64>();
        // −[y ln σ(z) + (1−y) ln(1−σ(z))]
        loss += if y == 1 { softplus(-z) } else { softplus(z) };
        let err = sigmoid(z) - y as f64;
        for (g, x) in grad_w.iter_mut().zip(row) {
            *g += err * x;
        }
        grad_b += err;
    }
    loss /= m;
    grad_b /= m;
    for (g, w) in grad_w.iter_mut().zip(weights) {
        *g = *g / m + l2 * w;
    }
    loss += 0.5 * l2 * weights.iter().map(|w| w * w).sum::<f64>();
    (loss, grad_w, grad_b)
}

fn check_mask(ds: &Dataset, mask: &BinaryVector) -> Result<Vec<usize>, DataError> {
    if mask.len() != ds.n_features() {
        return Err(DataError::InvalidConfig(format!(
            "mask has {} entries, dataset has {} features",
            mask.len(),
            ds.n_features()
        )));
    }
    let features = mask.ones_indices();
    if features.is_empty() {
        return Err(DataError::EmptyMask);
    }
    Ok(features)
}

fn design_rows(ds: &Dataset, features: &[usize], indices: &[usize]) -> Result<Vec<Vec<f64>>, DataError> {
    let columns: Vec<&[f64]> = features
        .iter()
        .map(|&f| ds.numeric_column(f))
        .collect::<Result<_, _>>()?;
    Ok(indices
        .iter()
        .map(|&r| columns.iter().map(|c| c[r]).collect())
        .collect())
}

/// Gradient descent from zero weights on the training rows, using only the
/// features selected by `mask`.
pub fn train_logistic(
    ds: &Dataset,
    split: &Split,
    mask: &BinaryVector,
    hyper: &LogisticHyperparams,
) -> Result<LogisticModel, DataError> {
    let features = check_mask(ds, mask)?;
    let labels: Vec<u8> = split.train.iter().map(|&r| ds.target()[r]).collect();
    let ones = labels.iter().filter(|&&y| y == 1).count();
    if ones == 0 || ones == labels.len() {
        return Err(DataError::SingleClass);
    }
    let rows = design_rows(ds, &features, &split.train)?;
    let mut weights = vec![0.0; features.len()];
    let mut bias = 0.0;
    for _ in 0..hyper.iterations {
        let (_, grad_w, grad_b) = loss_and_gradient(&rows, &labels, &weights, bias, hyper.l2);
        for (w, g) in weights.iter_mut().zip(&grad_w) {
            *w -= hyper.learning_rate * g;
        }
        bias -= hyper.learning_rate * grad_b;
    }
    Ok(LogisticModel {
        features,
        weights,
        bias,
    })
}

/// Counts with class 1 as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl Confusion {
    pub fn record(&mut self, actual: u8, predicted: u8) {
        match (actual, predicted) {
            (1, 1) => self.tp += 1,
            (0, 1) => self.fp += 1,
            (1, _) => self.fn_ += 1,
            _ => self.tn += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// `[[TN, FP], [FN, TP]]`, rows actual, columns predicted.
    pub fn matrix(&self) -> [[u64; 2]; 2] {
        [[self.tn, self.fp], [self.fn_, self.tp]]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub accuracy: f64,
    pub feature_mask: BinaryVector,
    pub confusion: [[u64; 2]; 2],
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl EvalReport {
    /// Precision and recall with an empty denominator are reported as 0 with a warning.
    pub fn from_confusion(c: Confusion, feature_mask: BinaryVector) -> Self {
        let mut warnings = Vec::new();
        let ratio = |num: u64, den: u64, name: &str, warnings: &mut Vec<String>| {
            if den == 0 {
                warnings.push(format!("{name} undefined (no {name} denominator); reported as 0"));
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let precision = ratio(c.tp, c.tp + c.fp, "precision", &mut warnings);
        let recall = ratio(c.tp, c.tp + c.fn_, "recall", &mut warnings);
        let accuracy = ratio(c.tp + c.tn, c.total(), "accuracy", &mut warnings);
        Self {
            precision,
            recall,
            accuracy,
            feature_mask,
            confusion: c.matrix(),
            warnings,
        }
    }
}

/// Metrics of `model` on the test rows of `split`.
pub fn evaluate(model: &LogisticModel, ds: &Dataset, split: &Split, mask: &BinaryVector) -> Result<EvalReport, DataError> {
    let features = check_mask(ds, mask)?;
    if features != model.features {
        return Err(DataError::InvalidConfig(
            "model was trained on a different feature mask".into(),
        ));
    }
    let mut confusion = Confusion::default();
    for &r in &split.test {
        confusion.record(ds.target()[r], model.predict_row(ds, r)?);
    }
    Ok(EvalReport::from_confusion(confusion, mask.clone()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricDeltas {
    pub precision: f64,
    pub recall: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskEvaluation {
    pub report: EvalReport,
    /// This mask's metrics minus the all-features metrics.
    pub delta_vs_all: MetricDeltas,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSetComparison {
    pub all_features: EvalReport,
    pub entries: Vec<MaskEvaluation>,
}

fn train_and_evaluate(
    ds: &Dataset,
    split: &Split,
    mask: &BinaryVector,
    hyper: &LogisticHyperparams,
) -> Result<EvalReport, DataError> {
    let model = train_logistic(ds, split, mask, hyper)?;
    evaluate(&model, ds, split, mask)
}

/// Trains and evaluates one classifier per mask plus the all-features
/// baseline. Masks are processed in parallel; results keep the input order.
pub fn compare_feature_sets(
    ds: &Dataset,
    split: &Split,
    masks: &[BinaryVector],
    hyper: &LogisticHyperparams,
) -> Result<FeatureSetComparison, DataError> {
    let all = BinaryVector::ones(ds.n_features());
    let all_features = train_and_evaluate(ds, split, &all, hyper)?;
    let reports: Vec<EvalReport> = masks
        .par_iter()
        .map(|m| train_and_evaluate(ds, split, m, hyper))
        .collect::<Result<_, _>>()?;
    let entries = reports
        .into_iter()
        .map(|report| MaskEvaluation {
            delta_vs_all: MetricDeltas {
                precision: report.precision - all_features.precision,
                recall: report.recall - all_features.recall,
                accuracy: report.accuracy - all_features.accuracy,
            },
            report,
        })
        .collect();
    Ok(FeatureSetComparison { all_features, entries })
}

impl FeatureSetComparison {
    pub fn render_table(&self, labels: &[String]) -> String {
        let mut grid = vec![vec![
            "Feature set".to_string(),
            "# features".to_string(),
            "Precision".to_string(),
            "Recall".to_string(),
            "Accuracy".to_string(),
            "dAccuracy".to_string(),
        ]];
        let line = |name: &str, r: &EvalReport, d: Option<&MetricDeltas>| {
            vec![
                name.to_string(),
                r.feature_mask.count_ones().to_string(),
                format!("{:.4}", r.precision),
                format!("{:.4}", r.recall),
                format!("{:.4}", r.accuracy),
                d.map_or("-".to_string(), |d| format!("{:+.4}", d.accuracy)),
            ]
        };
        grid.push(line("all features", &self.all_features, None));
        for (i, e) in self.entries.iter().enumerate() {
            let name = labels.get(i).cloned().unwrap_or_else(|| format!("mask {i}"));
            grid.push(line(&name, &e.report, Some(&e.delta_vs_all)));
        }
        render_grid(&grid)
    }
}
