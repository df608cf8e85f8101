use std::cmp::Ordering;
use std::time::Instant;

use rayon::prelude::*;

use super::{Couplings, Sample, SolveParams, SolveResult, Solver};
use crate::error::SolveError;
use crate::qubo::{BinaryVector, QuboModel};
use crate::scalar::Scalar;

/// Largest model the exhaustive solver accepts.
pub const EXHAUSTIVE_LIMIT: usize = 25;

/// Assignments whose running energy lies this close (relative to the energy
/// scale) to the incumbent are re-evaluated exactly before comparison.
const SCREEN_TOLERANCE: f64 = 1e-7;

/// Enumerates all `2ⁿ` assignments in Gray-code order with `O(n)` updates.
///
/// The assignment range is split on the high bits and the chunks are searched
/// in parallel; each chunk returns its exact best and the merge uses the
/// total order (energy, integer value), so the result does not depend on
/// scheduling.
pub struct Exhaustive;

impl<T: Scalar> Solver<T> for Exhaustive {
    fn name(&self) -> &'static str {
        "exhaustive"
    }

    fn solve(&self, model: &QuboModel<T>, _params: &SolveParams) -> Result<SolveResult<T>, SolveError> {
        solve_exhaustive(model)
    }
}

pub fn solve_exhaustive<T: Scalar>(model: &QuboModel<T>) -> Result<SolveResult<T>, SolveError> {
    let n = model.n();
    if n > EXHAUSTIVE_LIMIT {
        return Err(SolveError::TooLarge {
            n,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let prep = Instant::now();
    let couplings = Couplings::new(model);
    let tol = SCREEN_TOLERANCE * (1.0 + model.energy_scale().to_f64_lossy());
    let high_bits = if n > 12 { 6 } else { 0 };
    let low_bits = n - high_bits;
    let prep_seconds = prep.elapsed().as_secs_f64();

    let start = Instant::now();
    let best = (0..1u64 << high_bits)
        .into_par_iter()
        .map(|chunk| search_chunk(model, &couplings, chunk << low_bits, low_bits, tol))
        .reduce_with(|a, b| match cmp_exact(&a, &b) {
            Ordering::Greater => b,
            _ => a,
        })
        .expect("at least one chunk");
    let solve_seconds = start.elapsed().as_secs_f64();

    let sample = Sample {
        assignment: BinaryVector::from_index(best.1, n),
        energy: best.0,
    };
    let mut result = SolveResult::from_samples("exhaustive", vec![sample]);
    result.prep_seconds = prep_seconds;
    result.solve_seconds = solve_seconds;
    Ok(result)
}

fn cmp_exact<T: Scalar>(a: &(T, u64), b: &(T, u64)) -> Ordering {
    a.0.partial_cmp(&b.0)
        .unwrap_or(Ordering::Equal)
        .then(a.1.cmp(&b.1))
}

/// Best `(exact energy, index)` among assignments agreeing with `base` on the high bits.
fn search_chunk<T: Scalar>(
    model: &QuboModel<T>,
    couplings: &Couplings<T>,
    base: u64,
    low_bits: usize,
    tol: f64,
) -> (T, u64) {
    let n = model.n();
    let mut bits: Vec<u8> = (0..n).map(|i| ((base >> i) & 1) as u8).collect();
    let mut fields = couplings.fields(&bits);
    let mut index = base;
    let mut running = model.energy_bits(&bits);
    let mut best = (running, index);
    let mut best_f = running.to_f64_lossy();

    for step in 1u64..(1u64 << low_bits) {
        let k = step.trailing_zeros() as usize;
        running = running + Couplings::delta(&bits, &fields, k);
        couplings.flip(&mut bits, &mut fields, k);
        index ^= 1 << k;
        if running.to_f64_lossy() <= best_f + tol {
            let exact = model.energy_bits(&bits);
            running = exact;
            let candidate = (exact, index);
            if cmp_exact(&candidate, &best) == Ordering::Less {
                best = candidate;
                best_f = exact.to_f64_lossy();
            }
        }
    }
    best
}
