//! Spearman rank correlation and the per-dataset correlation profile.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use crate::error::DataError;

/// Average ranks (1-based); tied values share the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation, `None` when either side has zero variance.
fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn check_lengths(x: &[f64], y: &[f64]) -> Result<(), DataError> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(DataError::BadLengths {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(())
}

/// Spearman's ρ: Pearson correlation of the average-rank transforms.
/// A constant input has no rank variance and yields 0.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, DataError> {
    check_lengths(x, y)?;
    Ok(pearson(&average_ranks(x), &average_ranks(y)).unwrap_or_else(|| {
        log::warn!("spearman: constant input, correlation defined as 0");
        0.0
    }))
}

/// Correlations of each feature with the target and between features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationProfile {
    pub names: Vec<String>,
    pub target_corr: Vec<f64>,
    /// Symmetric with unit diagonal.
    pub feature_corr: Vec<Vec<f64>>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl CorrelationProfile {
    /// Validates shape, range, symmetry and the unit diagonal.
    pub fn new(names: Vec<String>, target_corr: Vec<f64>, feature_corr: Vec<Vec<f64>>) -> Result<Self, DataError> {
        let profile = Self {
            names,
            target_corr,
            feature_corr,
            warnings: Vec::new(),
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<(), DataError> {
        let d = self.target_corr.len();
        let bad = |msg: String| Err(DataError::InvalidConfig(msg));
        if d == 0 {
            return Err(DataError::NoFeatures);
        }
        if self.names.len() != d || self.feature_corr.len() != d {
            return bad(format!("profile dimensions disagree (d = {d})"));
        }
        let in_range = |v: f64| v.is_finite() && (-1.0..=1.0).contains(&v);
        if !self.target_corr.iter().all(|&v| in_range(v)) {
            return bad("target correlation outside [-1, 1]".into());
        }
        for (i, row) in self.feature_corr.iter().enumerate() {
            if row.len() != d {
                return bad(format!("feature correlation row {i} has length {}", row.len()));
            }
            if row[i] != 1.0 {
                return bad(format!("feature correlation diagonal entry {i} is {}", row[i]));
            }
            for (j, &v) in row.iter().enumerate() {
                if !in_range(v) || v != self.feature_corr[j][i] {
                    return bad(format!("feature correlation ({i}, {j}) invalid or asymmetric"));
                }
            }
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.target_corr.len()
    }
}

/// Spearman profile of a numeric dataset.
///
/// Column ranks and the `d(d−1)/2` pairwise correlations are computed in
/// parallel; each value comes from the same sequential routine, so the output
/// does not depend on the thread count.
pub fn correlation_profile(ds: &Dataset) -> Result<CorrelationProfile, DataError> {
    let d = ds.n_features();
    if ds.rows() < 2 {
        return Err(DataError::BadLengths {
            left: ds.rows(),
            right: ds.rows(),
        });
    }
    let columns: Vec<&[f64]> = (0..d).map(|i| ds.numeric_column(i)).collect::<Result<_, _>>()?;
    let target: Vec<f64> = ds.target().iter().map(|&t| t as f64).collect();
    let target_ranks = average_ranks(&target);
    let ranks: Vec<Vec<f64>> = columns.par_iter().map(|c| average_ranks(c)).collect();

    let names = ds.feature_names();
    let mut warnings = Vec::new();
    let constant: Vec<bool> = ranks.iter().map(|r| r.iter().all(|&v| v == r[0])).collect();
    for (name, _) in names.iter().zip(&constant).filter(|(_, &c)| c) {
        warnings.push(format!("column `{name}` is constant; its correlations are set to 0"));
    }
    if target_ranks.iter().all(|&v| v == target_ranks[0]) {
        warnings.push("target is constant; target correlations are set to 0".into());
    }
    for w in &warnings {
        log::warn!("{w}");
    }

    let target_corr: Vec<f64> = ranks
        .par_iter()
        .map(|r| pearson(r, &target_ranks).unwrap_or(0.0))
        .collect();

    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| ((i + 1)..d).map(move |j| (i, j))).collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| pearson(&ranks[i], &ranks[j]).unwrap_or(0.0))
        .collect();
    let mut feature_corr = vec![vec![0.0; d]; d];
    for (i, row) in feature_corr.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for (&(i, j), &v) in pairs.iter().zip(&values) {
        feature_corr[i][j] = v;
        feature_corr[j][i] = v;
    }

    Ok(CorrelationProfile {
        names,
        target_corr,
        feature_corr,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn monotone_and_antitone() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(), 1.0);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[30.0, 20.0, 10.0]).unwrap(), -1.0);
    }

    #[test]
    fn untied_matches_rank_difference_formula() {
        // 1 − 6Σd²/(n(n²−1)) with d = [0, −1, 1, 0]
        let oracle = 1.0 - 6.0 * 2.0 / (4.0 * 15.0);
        assert_eq!(oracle, 0.8);
        let rho = spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((rho - oracle).abs() < 1e-15);
    }

    #[test]
    fn tied_ranks_are_averaged() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 5.0]), vec![2.5, 4.0, 2.5, 1.0]);
    }

    #[test]
    fn constant_vector_gives_zero() {
        assert_eq!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
    }

    #[test]
    fn length_errors() {
        assert!(matches!(spearman(&[1.0], &[1.0]), Err(DataError::BadLengths { .. })));
        assert!(matches!(spearman(&[1.0, 2.0], &[1.0]), Err(DataError::BadLengths { .. })));
    }

    #[test]
    fn profile_of_small_dataset() {
        let ds = Dataset::from_numeric(
            vec!["copy".into(), "dup".into(), "noise".into(), "flat".into()],
            vec![
                vec![0.0, 1.0, 1.0, 0.0, 1.0],
                vec![0.0, 1.0, 1.0, 0.0, 1.0],
                vec![3.0, 1.0, 4.0, 1.0, 5.0],
                vec![2.0; 5],
            ],
            "y",
            vec![0, 1, 1, 0, 1],
        )
        .unwrap();
        let p = correlation_profile(&ds).unwrap();
        assert_eq!(p.target_corr[0], 1.0);
        assert_eq!(p.feature_corr[0][1], 1.0);
        assert_eq!(p.target_corr[3], 0.0);
        assert_eq!(p.warnings.len(), 1);
        p.validate().unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { spearman(ds.numeric_column(i).unwrap(), ds.numeric_column(j).unwrap()).unwrap() };
                assert_eq!(p.feature_corr[i][j].to_bits(), want.to_bits());
            }
        }
    }

    #[test]
    fn profile_validation() {
        let names = vec!["a".to_string(), "b".to_string()];
        assert!(CorrelationProfile::new(names.clone(), vec![0.1, 0.2], vec![vec![1.0, 0.3], vec![0.3, 1.0]]).is_ok());
        assert!(CorrelationProfile::new(names.clone(), vec![0.1, 1.2], vec![vec![1.0, 0.3], vec![0.3, 1.0]]).is_err());
        assert!(CorrelationProfile::new(names.clone(), vec![0.1, 0.2], vec![vec![1.0, 0.3], vec![0.4, 1.0]]).is_err());
        assert!(CorrelationProfile::new(names, vec![0.1, 0.2], vec![vec![0.9, 0.3], vec![0.3, 1.0]]).is_err());
    }

    fn paired(max: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (2..max).prop_flat_map(|n| {
            (
                prop::collection::vec((0i32..6).prop_map(f64::from), n),
                prop::collection::vec(-50.0..50.0f64, n),
            )
        })
    }

    proptest! {
        #[test]
        fn symmetric_and_bounded((x, y) in paired(30)) {
            let a = spearman(&x, &y).unwrap();
            let b = spearman(&y, &x).unwrap();
            prop_assert_eq!(a, b);
            prop_assert!((-1.0..=1.0).contains(&a));
        }

        #[test]
        fn invariant_under_increasing_transforms((x, y) in paired(30)) {
            let base = spearman(&x, &y).unwrap();
            let cubed: Vec<f64> = x.iter().map(|v| v.powi(3)).collect();
            let expd: Vec<f64> = y.iter().map(|v| (v / 10.0).exp()).collect();
            prop_assert!((spearman(&cubed, &y).unwrap() - base).abs() < 1e-12);
            prop_assert!((spearman(&x, &expd).unwrap() - base).abs() < 1e-12);
        }
    }
}
