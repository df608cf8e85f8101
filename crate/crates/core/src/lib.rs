//! QUBO modelling toolkit with a correlation-based feature-selection pipeline.
//!
//! The model layer ([`QuboModel`], [`IsingModel`], penalty encodings, solvers) is
//! generic over the coefficient type through [`Scalar`]; the aliases below fix
//! the common choices. The data pipeline ([`feature_select`], [`classify`]) works
//! in `f64`.

pub mod classify;
pub mod constraints;
pub mod error;
pub mod feature_select;
pub mod ising;
pub mod pipeline;
pub mod qubo;
pub mod scalar;
pub mod solvers;

pub use constraints::{at_most_one_pair, cardinality_equals, suggest_penalty, Penalty};
pub use error::{DataError, QuboError, SolveError};
pub use ising::{ising_to_qubo, qubo_to_ising, IsingModel};
pub use qubo::{binary_to_spin, spin_to_binary, BinaryVector, QuboModel, SpinVector};
pub use scalar::{Scalar, ENERGY_TOLERANCE};
pub use solvers::{SolveParams, SolveResult, Solver, SolverRegistry};

pub use num_rational::{Rational64, Ratio};

/// Double-precision QUBO model, used throughout the data pipeline.
pub type Qubo = QuboModel<f64>;
pub type Qubo32 = QuboModel<f32>;
/// Exact rational QUBO model for identities that must hold without rounding.
pub type ExactQubo = QuboModel<Rational64>;

pub type Ising = IsingModel<f64>;
pub type ExactIsing = IsingModel<Rational64>;
