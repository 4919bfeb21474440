//! Step-by-step simulation of online policies.
//!
//! At each step the buffer is advanced (expired packets dropped, arrivals
//! added), `O_t` is computed if anything is pending, and the policy picks
//! what to transmit. Steps with an empty buffer transmit nothing.

mod deterministic;
mod exact;
mod monte_carlo;

pub use deterministic::{run_policy, simulate, RunReport, StepRecord};
pub use exact::{
    rg_leaves, run_rg_exact, run_rg_exact_with, ExactExpectation, ExactOptions, Leaf,
    DEFAULT_EXACT_CAP,
};
pub use monte_carlo::{run_rg_mc, McEstimate};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// `opt / gain`, with an empty optimum counting as ratio 1.
pub fn gain_ratio(opt: &Rational, gain: &Rational) -> Result<Rational> {
    if opt.is_zero() {
        Ok(Rational::one())
    } else if gain.is_zero() {
        Err(Error::ZeroGain)
    } else {
        Ok(opt / gain)
    }
}
