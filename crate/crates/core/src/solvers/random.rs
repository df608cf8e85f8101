use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{compare_candidates, Sample, SolveParams, SolveResult, Solver};
use crate::error::SolveError;
use crate::qubo::{BinaryVector, QuboModel};
use crate::scalar::Scalar;

/// Best of `sweeps × restarts` uniform random assignments. Baseline only.
pub struct RandomSampler;

impl<T: Scalar> Solver<T> for RandomSampler {
    fn name(&self) -> &'static str {
        "random"
    }

    fn solve(&self, model: &QuboModel<T>, params: &SolveParams) -> Result<SolveResult<T>, SolveError> {
        solve_random(model, params)
    }
}

pub fn solve_random<T: Scalar>(
    model: &QuboModel<T>,
    params: &SolveParams,
) -> Result<SolveResult<T>, SolveError> {
    params.validate()?;
    let start = Instant::now();
    let n = model.n();
    let samples: Vec<Sample<T>> = (0..params.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ r as u64);
            let mut best: Option<Sample<T>> = None;
            for _ in 0..params.sweeps {
                let bits: Vec<u8> = (0..n).map(|_| rng.gen::<bool>() as u8).collect();
                let energy = model.energy_bits(&bits);
                let assignment = BinaryVector::new(bits).expect("bits are 0/1");
                let better = best.as_ref().map_or(true, |b| {
                    compare_candidates(energy, &assignment, b.energy, &b.assignment).is_lt()
                });
                if better {
                    best = Some(Sample { assignment, energy });
                }
            }
            best.expect("sweeps > 0")
        })
        .collect();
    let mut result = SolveResult::from_samples("random", samples);
    result.solve_seconds = start.elapsed().as_secs_f64();
    Ok(result)
}
