//! Penalty encodings that fold constraints into the unconstrained objective.

use serde::{Deserialize, Serialize};

use crate::error::QuboError;
use crate::qubo::QuboModel;
use crate::scalar::Scalar;

/// A strictly positive penalty weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Penalty<T>(T);

impl<T: Scalar> Penalty<T> {
    pub fn new(value: T) -> Result<Self, QuboError> {
        if value.is_finite_value() && value > T::zero() {
            Ok(Self(value))
        } else {
            Err(QuboError::InvalidPenalty)
        }
    }

    pub fn value(&self) -> T {
        self.0
    }
}

/// Encodes `xᵢ + xⱼ ≤ 1` by adding `P·xᵢxⱼ` to the upper entry of the pair.
pub fn at_most_one_pair<T: Scalar>(
    model: &QuboModel<T>,
    i: usize,
    j: usize,
    penalty: Penalty<T>,
) -> Result<QuboModel<T>, QuboError> {
    let n = model.n();
    for index in [i, j] {
        if index >= n {
            return Err(QuboError::IndexOutOfRange { index, n });
        }
    }
    if i == j {
        return Err(QuboError::SameIndex(i));
    }
    let (lo, hi) = (i.min(j), i.max(j));
    let mut out = model.clone();
    out.add_to_quadratic(lo, hi, penalty.value());
    Ok(out)
}

/// Encodes `Σxᵢ = k` by adding `P(Σxᵢ − k)²`, expanded as
/// offset `P·k²`, linear `P(1 − 2k)` and `2P` on every pair `i < j`.
pub fn cardinality_equals<T: Scalar>(
    model: &QuboModel<T>,
    k: usize,
    penalty: Penalty<T>,
) -> Result<QuboModel<T>, QuboError> {
    let n = model.n();
    if k > n {
        return Err(QuboError::CardinalityOutOfRange { k, n });
    }
    let p = penalty.value();
    let kk = T::from_usize(k).ok_or(QuboError::CardinalityOutOfRange { k, n })?;
    let mut out = model.clone();
    out.add_to_offset(p * kk * kk);
    let linear = p * (T::one() - T::two() * kk);
    let pair = T::two() * p;
    for i in 0..n {
        out.add_to_linear(i, linear);
        for j in (i + 1)..n {
            out.add_to_quadratic(i, j, pair);
        }
    }
    Ok(out)
}

/// `P = 1 + Σ|bᵢ| + Σ|qᵢⱼ|`, which exceeds any energy difference of the base model.
pub fn suggest_penalty<T: Scalar>(model: &QuboModel<T>) -> Penalty<T> {
    Penalty(T::one() + model.coefficient_abs_sum())
}
