//! Scalar abstraction shared by the model types and solvers.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed};

/// Absolute tolerance for energy identities on desk-scale models.
pub const ENERGY_TOLERANCE: f64 = 1e-9;

/// Coefficient type for QUBO and Ising models.
///
/// Implemented for `f32`, `f64` and the exact rationals `Ratio<i64>` / `Ratio<i128>`.
/// Every transformation in this crate only needs ring operations plus halving,
/// so exact scalars give exact energy identities.
pub trait Scalar:
    Copy + PartialOrd + Debug + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    /// `false` for NaN or infinite values.
    fn is_finite_value(&self) -> bool;

    /// Lossy conversion used for temperatures, screening and reporting.
    fn to_f64_lossy(&self) -> f64;

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half(self) -> Self {
        self / Self::two()
    }
}

macro_rules! float_scalar {
    ($($t:ty)*) => ($(
        impl Scalar for $t {
            fn is_finite_value(&self) -> bool {
                self.is_finite()
            }

            fn to_f64_lossy(&self) -> f64 {
                *self as f64
            }
        }
    )*)
}

float_scalar!(f32 f64);

macro_rules! ratio_scalar {
    ($($t:ty)*) => ($(
        impl Scalar for Ratio<$t> {
            fn is_finite_value(&self) -> bool {
                true
            }

            fn to_f64_lossy(&self) -> f64 {
                *self.numer() as f64 / *self.denom() as f64
            }
        }
    )*)
}

ratio_scalar!(i64 i128);

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    #[test]
    fn halving_is_exact_for_rationals() {
        let r = Rational64::new(3, 7);
        assert_eq!(r.half() + r.half(), r);
        assert_eq!(r.to_f64_lossy(), 3.0 / 7.0);
    }

    #[test]
    fn float_finiteness() {
        assert!(1.0f64.is_finite_value());
        assert!(!f64::NAN.is_finite_value());
        assert!(!f32::INFINITY.is_finite_value());
    }
}
