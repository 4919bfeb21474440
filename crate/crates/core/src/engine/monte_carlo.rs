//! Seeded Monte Carlo estimate of RG's gain.
//!
//! Trial `i` draws from a ChaCha8 stream selected by `(seed, i)`, so any
//! single trial can be replayed and the result does not depend on how trials
//! are spread over threads. Lotteries are settled by comparing a uniform
//! `u64` against the exact rational probability.

use num::BigInt;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Instance, Packet};
use crate::policies::{rg_distribution, PolicyDecision};
use crate::rational::Rational;

use super::deterministic::simulate;

#[derive(Clone, Debug, PartialEq)]
pub struct McEstimate {
    pub trials: u64,
    pub seed: u64,
    /// Exact sample mean of the total gain.
    pub mean: Rational,
    /// Standard error of the mean; 0 for a single trial.
    pub stderr: f64,
}

/// True with probability exactly `p` over a uniform `u64`: `u < p·2^64`.
fn below(u: u64, p: &Rational) -> bool {
    BigInt::from(u) * p.denom() < (p.numer() << 64)
}

fn draw<'a>(decision: &'a PolicyDecision, rng: &mut ChaCha8Rng) -> &'a Packet {
    match decision {
        PolicyDecision::Transmit(p) => p,
        PolicyDecision::Lottery(outcomes) => {
            let u = rng.next_u64();
            let mut cumulative = Rational::zero();
            for (p, q) in outcomes {
                cumulative = &cumulative + q;
                if below(u, &cumulative) {
                    return p;
                }
            }
            &outcomes.last().expect("lottery has outcomes").0
        }
    }
}

fn trial(inst: &Instance, seed: u64, i: u64) -> Result<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    let (_, gain) = simulate(inst, |o| Ok(draw(&rg_distribution(o)?, &mut rng).clone()))?;
    Ok(gain)
}

pub fn run_rg_mc(inst: &Instance, trials: u64, seed: u64) -> Result<McEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    // exact sums, so the reduction order cannot change the result
    let (sum, sum_sq) = (0..trials)
        .into_par_iter()
        .map(|i| trial(inst, seed, i).map(|g| (g.clone(), &g * &g)))
        .try_reduce(
            || (Rational::zero(), Rational::zero()),
            |a, b| Ok((&a.0 + &b.0, &a.1 + &b.1)),
        )?;
    let n = Rational::from(trials);
    let mean = &sum / &n;
    let stderr = if trials == 1 {
        0.0
    } else {
        let var = (&sum_sq - &(&mean * &sum)) / (&n - &Rational::one());
        (var.to_f64().max(0.0) / trials as f64).sqrt()
    };
    Ok(McEstimate { trials, seed, mean, stderr })
}
