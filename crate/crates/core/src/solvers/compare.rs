use serde::{Deserialize, Serialize};

use super::{SolveParams, SolveResult, SolverRegistry};
use crate::error::SolveError;
use crate::qubo::QuboModel;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RowStatus {
    Solved,
    Skipped { reason: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct ComparisonRow<T> {
    pub solver: String,
    #[serde(flatten)]
    pub status: RowStatus,
    pub result: Option<SolveResult<T>>,
    /// `best_energy − best_known`; zero for the best row.
    pub gap: Option<T>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct SolverComparison<T> {
    pub n: usize,
    pub params: SolveParams,
    pub best_known: T,
    pub rows: Vec<ComparisonRow<T>>,
}

/// Runs every registered solver on `model`.
///
/// A solver that refuses the model size is reported as skipped; any other
/// error aborts the comparison.
pub fn compare_solvers<T: Scalar>(
    registry: &SolverRegistry<T>,
    model: &QuboModel<T>,
    params: &SolveParams,
) -> Result<SolverComparison<T>, SolveError> {
    let mut rows = Vec::new();
    for solver in registry.iter() {
        let row = match solver.solve(model, params) {
            Ok(result) => ComparisonRow {
                solver: solver.name().to_string(),
                status: RowStatus::Solved,
                result: Some(result),
                gap: None,
            },
            Err(err @ SolveError::TooLarge { .. }) => ComparisonRow {
                solver: solver.name().to_string(),
                status: RowStatus::Skipped {
                    reason: err.to_string(),
                },
                result: None,
                gap: None,
            },
            Err(err) => return Err(err),
        };
        rows.push(row);
    }
    let best_known = rows
        .iter()
        .filter_map(|r| r.result.as_ref().map(|res| res.best_energy))
        .reduce(|a, b| if b < a { b } else { a })
        .ok_or_else(|| SolveError::InvalidParams("no solver produced a result".into()))?;
    for row in &mut rows {
        row.gap = row.result.as_ref().map(|res| res.best_energy - best_known);
    }
    Ok(SolverComparison {
        n: model.n(),
        params: params.clone(),
        best_known,
        rows,
    })
}

impl<T: Scalar> SolverComparison<T> {
    /// Plain-text table with one column per solver. Timing rows are optional
    /// because they differ from run to run.
    pub fn render_table(&self, with_timings: bool) -> String {
        let mut labels: Vec<(&str, Box<dyn Fn(&ComparisonRow<T>) -> String>)> = Vec::new();
        if with_timings {
            labels.push(("Preparation time", Box::new(|r| secs(r, |res| res.prep_seconds))));
            labels.push(("Optimization time", Box::new(|r| secs(r, |res| res.solve_seconds))));
            labels.push(("Total runtime", Box::new(|r| secs(r, SolveResult::total_seconds))));
        }
        labels.push((
            "Best value",
            Box::new(|r| cell(r, |res| format!("{:.6}", res.best_energy.to_f64_lossy()))),
        ));
        labels.push((
            "# of features found",
            Box::new(|r| cell(r, |res| res.selected_count.to_string())),
        ));
        labels.push((
            "Gap to best",
            Box::new(|r| match r.gap {
                Some(g) => format!("{:.6}", g.to_f64_lossy()),
                None => "skipped".to_string(),
            }),
        ));

        let mut grid: Vec<Vec<String>> = Vec::new();
        let mut header = vec!["Feature".to_string()];
        header.extend(self.rows.iter().map(|r| r.solver.clone()));
        grid.push(header);
        for (label, f) in &labels {
            let mut line = vec![label.to_string()];
            line.extend(self.rows.iter().map(|r| f(r)));
            grid.push(line);
        }
        render_grid(&grid)
    }
}

fn cell<T>(row: &ComparisonRow<T>, f: impl Fn(&SolveResult<T>) -> String) -> String {
    row.result.as_ref().map_or_else(|| "skipped".to_string(), f)
}

fn secs<T>(row: &ComparisonRow<T>, f: impl Fn(&SolveResult<T>) -> f64) -> String {
    cell(row, |res| format!("{:.3}", f(res)))
}

/// Left-aligned first column, right-aligned value columns.
pub(crate) fn render_grid(grid: &[Vec<String>]) -> String {
    let cols = grid.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            grid.iter()
                .filter_map(|row| row.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for (r, row) in grid.iter().enumerate() {
        let mut line = String::new();
        for (c, value) in row.iter().enumerate() {
            if c == 0 {
                line.push_str(&format!("{:<width$}", value, width = widths[c]));
            } else {
                line.push_str(&format!("  {:>width$}", value, width = widths[c]));
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
        if r == 0 {
            let total: usize = widths.iter().sum::<usize>() + 2 * (cols.saturating_sub(1));
            out.push_str(&"-".repeat(total));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_model_has_no_gaps() {
        let m = QuboModel::<f64>::zeros(4).unwrap();
        let cmp = compare_solvers(&SolverRegistry::default(), &m, &SolveParams::scaled_to(&m)).unwrap();
        assert_eq!(cmp.rows.len(), 3);
        for row in &cmp.rows {
            assert_eq!(row.status, RowStatus::Solved);
            assert_eq!(row.result.as_ref().unwrap().best_energy, 0.0);
            assert_eq!(row.gap, Some(0.0));
        }
        let table = cmp.render_table(true);
        assert!(table.starts_with("Feature"));
        for label in ["Preparation time", "Optimization time", "Total runtime", "Best value", "# of features found", "Gap to best"] {
            assert!(table.contains(label), "{label}");
        }
        assert!(!cmp.render_table(false).contains("Total runtime"));
    }

    #[test]
    fn oversized_model_skips_exhaustive() {
        let m = QuboModel::<f64>::zeros(26).unwrap();
        let params = SolveParams {
            sweeps: 5,
            restarts: 2,
            ..SolveParams::scaled_to(&m)
        };
        let cmp = compare_solvers(&SolverRegistry::default(), &m, &params).unwrap();
        assert!(matches!(cmp.rows[0].status, RowStatus::Skipped { .. }));
        assert!(cmp.rows[0].gap.is_none());
        assert!(cmp.render_table(false).contains("skipped"));
        let json = serde_json::to_string(&cmp).unwrap();
        assert!(json.contains(r#""status":"skipped""#));
    }
}
