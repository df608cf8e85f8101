use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Couplings, Sample, SolveParams, SolveResult, Solver};
use crate::error::SolveError;
use crate::qubo::{BinaryVector, QuboModel};
use crate::scalar::Scalar;

/// Single-bit-flip Metropolis annealing with a geometric schedule.
///
/// Restart `r` draws from its own generator seeded with `seed ^ r`, so restarts
/// can run in parallel and still merge to the sequential result.
pub struct SimulatedAnnealing;

impl<T: Scalar> Solver<T> for SimulatedAnnealing {
    fn name(&self) -> &'static str {
        "simulated-annealing"
    }

    fn solve(&self, model: &QuboModel<T>, params: &SolveParams) -> Result<SolveResult<T>, SolveError> {
        solve_simulated_annealing(model, params)
    }
}

/// Temperature at sweep `step` of `sweeps`, from `t_initial` down to `t_final`.
pub(crate) fn temperature(params: &SolveParams, step: usize) -> f64 {
    if params.sweeps <= 1 {
        return params.t_initial;
    }
    let frac = step as f64 / (params.sweeps - 1) as f64;
    params.t_initial * (params.t_final / params.t_initial).powf(frac)
}

pub fn solve_simulated_annealing<T: Scalar>(
    model: &QuboModel<T>,
    params: &SolveParams,
) -> Result<SolveResult<T>, SolveError> {
    params.validate()?;
    let prep = Instant::now();
    let couplings = Couplings::new(model);
    let schedule: Vec<f64> = (0..params.sweeps).map(|s| temperature(params, s)).collect();
    let prep_seconds = prep.elapsed().as_secs_f64();

    let start = Instant::now();
    let samples: Vec<Sample<T>> = (0..params.restarts)
        .into_par_iter()
        .map(|r| anneal_once(model, &couplings, &schedule, params.seed ^ r as u64))
        .collect();
    let mut result = SolveResult::from_samples("simulated-annealing", samples);
    result.prep_seconds = prep_seconds;
    result.solve_seconds = start.elapsed().as_secs_f64();
    Ok(result)
}

fn anneal_once<T: Scalar>(
    model: &QuboModel<T>,
    couplings: &Couplings<T>,
    schedule: &[f64],
    seed: u64,
) -> Sample<T> {
    let n = model.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bits: Vec<u8> = (0..n).map(|_| rng.gen::<bool>() as u8).collect();
    let mut fields = couplings.fields(&bits);

    // Energies relative to the starting point; only deltas enter the walk.
    let mut current = T::zero();
    let mut best = T::zero();
    let mut best_bits = bits.clone();

    for &temp in schedule {
        for i in 0..n {
            let delta = Couplings::delta(&bits, &fields, i);
            let accept = delta <= T::zero()
                || rng.gen::<f64>() < (-delta.to_f64_lossy() / temp).exp();
            if accept {
                couplings.flip(&mut bits, &mut fields, i);
                current = current + delta;
                if current < best {
                    best = current;
                    best_bits.copy_from_slice(&bits);
                }
            }
        }
    }

    Sample {
        energy: model.energy_bits(&best_bits),
        assignment: BinaryVector::new(best_bits).expect("bits are 0/1"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_schedule_endpoints() {
        let p = SolveParams {
            sweeps: 5,
            t_initial: 16.0,
            t_final: 1.0,
            ..SolveParams::default()
        };
        let temps: Vec<f64> = (0..5).map(|s| temperature(&p, s)).collect();
        for (t, want) in temps.iter().zip([16.0, 8.0, 4.0, 2.0, 1.0]) {
            assert!((t - want).abs() < 1e-12);
        }
    }

    #[test]
    fn one_variable_downhill() {
        let m = QuboModel::new(0.0, vec![-1.0], vec![vec![0.0]]).unwrap();
        for seed in 0..5 {
            let p = SolveParams::scaled_to(&m).with_seed(seed);
            let r = solve_simulated_annealing(&m, &p).unwrap();
            assert_eq!(r.best.as_slice(), &[1]);
            assert_eq!(r.best_energy, -1.0);
        }
    }

    #[test]
    fn zero_model() {
        let m = QuboModel::<f64>::zeros(4).unwrap();
        let r = solve_simulated_annealing(&m, &SolveParams::scaled_to(&m)).unwrap();
        assert_eq!(r.best_energy, 0.0);
    }

    #[test]
    fn invalid_params_rejected() {
        let m = QuboModel::<f64>::zeros(2).unwrap();
        let p = SolveParams {
            restarts: 0,
            ..SolveParams::default()
        };
        assert!(solve_simulated_annealing(&m, &p).is_err());
    }

    #[test]
    fn one_sample_per_restart_and_consistent_best() {
        let m = QuboModel::new(
            0.0,
            vec![1.0, -2.0, 0.5],
            vec![vec![0.0, 3.0, -1.0], vec![0.0, 0.0, 2.0], vec![0.0, 0.0, 0.0]],
        )
        .unwrap();
        let p = SolveParams {
            sweeps: 50,
            restarts: 7,
            ..SolveParams::scaled_to(&m)
        };
        let r = solve_simulated_annealing(&m, &p).unwrap();
        assert_eq!(r.samples.len(), 7);
        assert_eq!(r.best_energy, m.energy(&r.best).unwrap());
        assert!(r.samples.iter().all(|s| r.best_energy <= s.energy));
        assert_eq!(r.selected_count, r.best.count_ones());
    }
}
