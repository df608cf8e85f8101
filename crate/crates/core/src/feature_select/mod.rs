//! Correlation-based feature selection as a QUBO.
//!
//! Variable `xᵢ = 1` keeps feature `i`. Keeping a feature earns a reward
//! proportional to its correlation with the target; keeping two features
//! costs a penalty proportional to their mutual correlation. `alpha` trades
//! one against the other.

mod correlation;
mod dataset;

use serde::{Deserialize, Serialize};

pub use correlation::{average_ranks, correlation_profile, spearman, CorrelationProfile};
pub use dataset::{
    encode_categorical, ingest_csv, normalize, CategoryEncoding, Column, ColumnData, ColumnKind, CsvOptions,
    Dataset, Imputation, IngestReport, MISSING_TOKENS,
};

use crate::error::DataError;
use crate::Qubo;

pub const DEFAULT_ALPHA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureSelectionConfig {
    /// Weight of the target-correlation reward; `1 − alpha` weighs redundancy.
    pub alpha: f64,
    /// Use `|ρ|` rather than signed `ρ`.
    pub use_absolute: bool,
}

impl Default for FeatureSelectionConfig {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            use_absolute: true,
        }
    }
}

impl FeatureSelectionConfig {
    pub fn new(alpha: f64, use_absolute: bool) -> Result<Self, DataError> {
        let config = Self { alpha, use_absolute };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), DataError> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(DataError::InvalidConfig(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// `bᵢ = −alpha·|ρ(i, target)|`, `qᵢⱼ = (1 − alpha)·|ρ(i, j)|` for `i < j`,
/// zero elsewhere (signed `ρ` when `use_absolute` is off).
pub fn build_qubo(profile: &CorrelationProfile, config: &FeatureSelectionConfig) -> Result<Qubo, DataError> {
    config.validate()?;
    profile.validate()?;
    let d = profile.d();
    let weight = |rho: f64| if config.use_absolute { rho.abs() } else { rho };
    let linear: Vec<f64> = profile.target_corr.iter().map(|&r| -config.alpha * weight(r)).collect();
    let mut quadratic = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in (i + 1)..d {
            quadratic[i][j] = (1.0 - config.alpha) * weight(profile.feature_corr[i][j]);
        }
    }
    Ok(Qubo::new(0.0, linear, quadratic)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::BinaryVector;

    fn profile(target: Vec<f64>, feature: Vec<Vec<f64>>) -> CorrelationProfile {
        let names = (0..target.len()).map(|i| format!("f{i}")).collect();
        CorrelationProfile::new(names, target, feature).unwrap()
    }

    /// Plain scan in integer order; the first strict minimum wins.
    fn argmin(model: &Qubo) -> BinaryVector {
        let n = model.n();
        (0..1u64 << n)
            .map(|idx| BinaryVector::from_index(idx, n))
            .fold((f64::INFINITY, BinaryVector::zeros(n)), |best, x| {
                let e = model.energy(&x).unwrap();
                if e < best.0 {
                    (e, x)
                } else {
                    best
                }
            })
            .1
    }

    #[test]
    fn single_feature() {
        let q = build_qubo(&profile(vec![1.0], vec![vec![1.0]]), &FeatureSelectionConfig::default()).unwrap();
        assert_eq!(q.linear(), &[-0.5]);
        assert_eq!(q.q(0, 0), 0.0);
        assert_eq!(q.offset(), 0.0);
    }

    #[test]
    fn alpha_one_selects_all_correlated() {
        let p = profile(
            vec![0.3, 0.0, -0.6],
            vec![vec![1.0, 0.9, 0.8], vec![0.9, 1.0, 0.7], vec![0.8, 0.7, 1.0]],
        );
        let q = build_qubo(&p, &FeatureSelectionConfig::new(1.0, true).unwrap()).unwrap();
        assert!((0..3).all(|i| (0..3).all(|j| q.q(i, j) == 0.0)));
        assert_eq!(argmin(&q).as_slice(), &[1, 0, 1]);
    }

    #[test]
    fn duplicates_are_not_both_kept() {
        let target = vec![0.9, 0.9, 0.1];
        let config = FeatureSelectionConfig::default();
        // reward of feature 2 is 0.05; its redundancy with a kept feature is 0.5·ρ
        let cheap = profile(target.clone(), vec![vec![1.0, 1.0, 0.04], vec![1.0, 1.0, 0.04], vec![0.04, 0.04, 1.0]]);
        let sel = argmin(&build_qubo(&cheap, &config).unwrap());
        assert_eq!(sel.as_slice()[0] + sel.as_slice()[1], 1);
        assert_eq!(sel.as_slice()[2], 1, "0.02 redundancy < 0.05 reward");

        let costly = profile(target, vec![vec![1.0, 1.0, 0.2], vec![1.0, 1.0, 0.2], vec![0.2, 0.2, 1.0]]);
        let sel = argmin(&build_qubo(&costly, &config).unwrap());
        assert_eq!(sel.as_slice()[0] + sel.as_slice()[1], 1);
        assert_eq!(sel.as_slice()[2], 0, "0.1 redundancy > 0.05 reward");
    }

    #[test]
    fn signed_correlations_when_requested() {
        let p = profile(vec![-0.4, 0.2], vec![vec![1.0, -0.5], vec![-0.5, 1.0]]);
        let q = build_qubo(&p, &FeatureSelectionConfig::new(0.5, false).unwrap()).unwrap();
        assert_eq!(q.linear(), &[0.2, -0.1]);
        assert_eq!(q.q(0, 1), -0.25);
        assert_eq!(q.q(1, 0), 0.0);
    }

    #[test]
    fn alpha_out_of_range() {
        assert!(FeatureSelectionConfig::new(1.5, true).is_err());
        assert!(FeatureSelectionConfig::new(-0.1, true).is_err());
    }
}
