//! Classical solvers for [`QuboModel`]s and a comparison harness.
//!
//! Every solver is deterministic given its [`SolveParams`]. Ties between
//! assignments of equal energy go to the one with the smaller integer value
//! (see [`BinaryVector::to_index`]).

mod annealing;
mod compare;
mod exhaustive;
mod random;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

pub use annealing::{solve_simulated_annealing, SimulatedAnnealing};
pub use compare::{compare_solvers, ComparisonRow, RowStatus, SolverComparison};
pub use exhaustive::{solve_exhaustive, Exhaustive, EXHAUSTIVE_LIMIT};
pub use random::{solve_random, RandomSampler};

pub(crate) use compare::render_grid;

use crate::error::SolveError;
use crate::qubo::{BinaryVector, QuboModel};
use crate::scalar::Scalar;

pub const DEFAULT_SWEEPS: usize = 1000;
pub const DEFAULT_RESTARTS: usize = 10;
pub const DEFAULT_T_FINAL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveParams {
    pub seed: u64,
    /// Full passes over the variables per restart (draws per restart for the random sampler).
    pub sweeps: usize,
    pub restarts: usize,
    pub t_initial: f64,
    pub t_final: f64,
}

impl Default for SolveParams {
    fn default() -> Self {
        Self {
            seed: 0,
            sweeps: DEFAULT_SWEEPS,
            restarts: DEFAULT_RESTARTS,
            t_initial: 1.0,
            t_final: DEFAULT_T_FINAL,
        }
    }
}

impl SolveParams {
    /// Defaults with the starting temperature set to the model's energy scale.
    pub fn scaled_to<T: Scalar>(model: &QuboModel<T>) -> Self {
        Self::default().with_scale_of(model)
    }

    /// Replaces `t_initial` by the model's energy scale, kept above `t_final`.
    pub fn with_scale_of<T: Scalar>(mut self, model: &QuboModel<T>) -> Self {
        let scale = model.energy_scale().to_f64_lossy();
        self.t_initial = if scale > self.t_final { scale } else { 1.0f64.max(10.0 * self.t_final) };
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        if self.sweeps == 0 || self.restarts == 0 {
            return Err(SolveError::InvalidParams(
                "sweeps and restarts must be positive".into(),
            ));
        }
        let temps_ok = self.t_initial.is_finite()
            && self.t_final.is_finite()
            && self.t_final > 0.0
            && self.t_final < self.t_initial;
        if !temps_ok {
            return Err(SolveError::InvalidParams(format!(
                "need 0 < t_final < t_initial, got t_initial={} t_final={}",
                self.t_initial, self.t_final
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct Sample<T> {
    pub assignment: BinaryVector,
    pub energy: T,
}

/// Outcome of one solver run.
///
/// The wall-clock fields are not serialized so that persisted results are
/// reproducible byte for byte.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct SolveResult<T> {
    pub solver: String,
    pub best: BinaryVector,
    pub best_energy: T,
    pub selected_count: usize,
    pub samples: Vec<Sample<T>>,
    #[serde(skip)]
    pub prep_seconds: f64,
    #[serde(skip)]
    pub solve_seconds: f64,
}

impl<T: Scalar> SolveResult<T> {
    /// Picks the best of `samples` and fills in the derived fields.
    pub(crate) fn from_samples(solver: &str, samples: Vec<Sample<T>>) -> Self {
        let best = samples
            .iter()
            .min_by(|a, b| compare_candidates(a.energy, &a.assignment, b.energy, &b.assignment))
            .expect("at least one sample")
            .clone();
        Self {
            solver: solver.to_string(),
            selected_count: best.assignment.count_ones(),
            best: best.assignment,
            best_energy: best.energy,
            samples,
            prep_seconds: 0.0,
            solve_seconds: 0.0,
        }
    }

    pub fn total_seconds(&self) -> f64 {
        self.prep_seconds + self.solve_seconds
    }
}

/// Lower energy first, then smaller integer value.
pub(crate) fn compare_candidates<T: Scalar>(
    ea: T,
    a: &BinaryVector,
    eb: T,
    b: &BinaryVector,
) -> Ordering {
    ea.partial_cmp(&eb)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.to_index().cmp(&b.to_index()))
}

pub trait Solver<T: Scalar>: Send + Sync {
    fn name(&self) -> &'static str;

    fn solve(&self, model: &QuboModel<T>, params: &SolveParams) -> Result<SolveResult<T>, SolveError>;
}

/// Named solvers in a fixed order. Additional backends can be registered
/// without touching the comparison harness.
pub struct SolverRegistry<T> {
    solvers: Vec<Box<dyn Solver<T>>>,
}

impl<T: Scalar> Default for SolverRegistry<T> {
    fn default() -> Self {
        Self {
            solvers: vec![
                Box::new(Exhaustive),
                Box::new(SimulatedAnnealing),
                Box::new(RandomSampler),
            ],
        }
    }
}

impl<T: Scalar> SolverRegistry<T> {
    pub fn empty() -> Self {
        Self { solvers: Vec::new() }
    }

    pub fn register(&mut self, solver: Box<dyn Solver<T>>) {
        self.solvers.push(solver);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Solver<T>, SolveError> {
        self.solvers
            .iter()
            .find(|s| s.name() == name)
            .map(|s| s.as_ref())
            .ok_or_else(|| SolveError::UnknownSolver(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.solvers.iter().map(|s| s.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Solver<T>> {
        self.solvers.iter().map(|s| s.as_ref())
    }
}

/// Coupling table shared by the local-search solvers: `diag[i] = bᵢ + qᵢᵢ`,
/// `pair[i][j] = qᵢⱼ + qⱼᵢ` for `i ≠ j` and zero on the diagonal. Identical
/// for every canonical view of a model.
pub(crate) struct Couplings<T> {
    pub n: usize,
    pub diag: Vec<T>,
    pub pair: Vec<T>,
}

impl<T: Scalar> Couplings<T> {
    pub fn new(model: &QuboModel<T>) -> Self {
        let n = model.n();
        let mut pair = vec![T::zero(); n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let c = model.pair_coefficient(i, j);
                pair[i * n + j] = c;
                pair[j * n + i] = c;
            }
        }
        Self {
            n,
            diag: (0..n).map(|i| model.diagonal_coefficient(i)).collect(),
            pair,
        }
    }

    /// Local fields `diag[i] + Σ_{j set} pair[i][j]` for assignment `bits`.
    pub fn fields(&self, bits: &[u8]) -> Vec<T> {
        (0..self.n)
            .map(|i| {
                let row = &self.pair[i * self.n..(i + 1) * self.n];
                (0..self.n)
                    .filter(|&j| bits[j] == 1)
                    .fold(self.diag[i], |acc, j| acc + row[j])
            })
            .collect()
    }

    #[inline]
    pub fn delta(bits: &[u8], fields: &[T], i: usize) -> T {
        if bits[i] == 1 {
            -fields[i]
        } else {
            fields[i]
        }
    }

    /// Flips bit `k` and updates the local fields of every other variable.
    #[inline]
    pub fn flip(&self, bits: &mut [u8], fields: &mut [T], k: usize) {
        bits[k] ^= 1;
        let row = &self.pair[k * self.n..(k + 1) * self.n];
        if bits[k] == 1 {
            for (f, &c) in fields.iter_mut().zip(row) {
                *f = *f + c;
            }
        } else {
            for (f, &c) in fields.iter_mut().zip(row) {
                *f = *f - c;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(SolveParams::default().validate().is_ok());
        let mut p = SolveParams::default();
        p.t_final = 2.0;
        assert!(p.validate().is_err());
        p = SolveParams { sweeps: 0, ..SolveParams::default() };
        assert!(p.validate().is_err());
        p = SolveParams { t_final: 0.0, ..SolveParams::default() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn scaled_defaults_follow_model() {
        let m = QuboModel::new(0.0, vec![1.0, -2.0], vec![vec![0.0, 3.0], vec![0.0, 0.0]]).unwrap();
        let p = SolveParams::scaled_to(&m);
        assert_eq!(p.t_initial, 6.0);
        assert_eq!(p.sweeps, 1000);
        assert_eq!(p.restarts, 10);
        assert_eq!(p.t_final, 1e-3);
        let zero = SolveParams::scaled_to(&QuboModel::<f64>::zeros(2).unwrap());
        assert!(zero.validate().is_ok());
    }

    #[test]
    fn registry_lookup() {
        let reg = SolverRegistry::<f64>::default();
        assert_eq!(reg.names(), vec!["exhaustive", "simulated-annealing", "random"]);
        assert!(reg.get("simulated-annealing").is_ok());
        assert_eq!(
            reg.get("qaoa").err(),
            Some(SolveError::UnknownSolver("qaoa".into()))
        );
    }

    #[test]
    fn incremental_fields_track_full_energy() {
        let m = QuboModel::<f64>::new(
            0.5,
            vec![1.0, -2.0, 0.25],
            vec![vec![0.5, 3.0, -1.0], vec![1.0, 0.0, 2.0], vec![-0.5, 0.0, -1.5]],
        )
        .unwrap();
        let c = Couplings::new(&m);
        let mut bits = vec![0u8, 1, 0];
        let mut fields = c.fields(&bits);
        let mut e = m.energy_bits(&bits);
        for k in [2, 0, 1, 2, 1, 0, 0] {
            e += Couplings::delta(&bits, &fields, k);
            c.flip(&mut bits, &mut fields, k);
            assert!((e - m.energy_bits(&bits)).abs() < 1e-12);
            assert_eq!(fields, c.fields(&bits));
        }
    }
}
