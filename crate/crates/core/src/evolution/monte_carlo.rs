//! Sampling oracle for the conditional-independence model.
//!
//! Each sample draws `x(0) ~ p₀` and then, at every step, draws each node's
//! next value independently from column `x(t)` of its lifted matrix. Sample
//! `s` uses its own ChaCha stream `(seed, s)`, so the aggregate counts do not
//! depend on how samples are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::stochastic::{Mode, StochasticTrajectory};
use crate::algebra::{ProbabilityVector, StochasticMatrix};
use crate::error::{Error, Result};
use crate::limits::check_dim;

/// Index of the bucket `u` falls into along `weights` (assumed to sum to
/// about one; any leftover mass goes to the last bucket).
fn pick(weights: impl Iterator<Item = f64>, u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        acc += w;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

/// Empirical joint distributions at `t = 0..=steps` from `samples`
/// independent runs.
pub fn monte_carlo_oracle(
    lifted: &[StochasticMatrix],
    p0: &ProbabilityVector,
    steps: usize,
    samples: usize,
    seed: u64,
) -> Result<StochasticTrajectory> {
    if samples == 0 {
        return Err(Error::Domain(
            "Monte Carlo needs at least one sample".into(),
        ));
    }
    if lifted.is_empty() {
        return Err(Error::Domain("no nodes to simulate".into()));
    }
    let alphabets: Vec<usize> = lifted.iter().map(StochasticMatrix::rows).collect();
    let k = check_dim("state space", &alphabets)?;
    if p0.dim() != k || lifted.iter().any(|q| q.cols() != k) {
        return Err(Error::shape(
            "monte_carlo_oracle",
            format!(
                "state space has {k} states; initial vector has {}",
                p0.dim()
            ),
        ));
    }
    let slots = check_dim("Monte Carlo histogram", &[k, steps + 1])?;

    let run = |mut counts: Vec<u64>, sample: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(sample as u64);
        let mut x = pick(p0.as_slice().iter().copied(), rng.random::<f64>());
        counts[x] += 1;
        for t in 1..=steps {
            let mut next = 0;
            for (q, &a) in lifted.iter().zip(&alphabets) {
                let v = pick((0..a).map(|r| q.get(r, x)), rng.random::<f64>());
                next = next * a + v;
            }
            x = next;
            counts[t * k + x] += 1;
        }
        counts
    };

    let counts = (0..samples)
        .into_par_iter()
        .fold(|| vec![0u64; slots], run)
        .reduce(
            || vec![0u64; slots],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );

    let n = samples as f64;
    let joint = counts
        .chunks_exact(k)
        .map(|c| ProbabilityVector::from_parts(c.iter().map(|&v| v as f64 / n).collect()))
        .collect();
    Ok(StochasticTrajectory {
        mode: Mode::MonteCarlo,
        joint,
        factors: None,
        stationary_at: None,
        renormalized_at: Vec::new(),
    })
}
