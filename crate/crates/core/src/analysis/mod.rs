//! Competitive-ratio evaluation, instance generators, adversary search and
//! structural fact checks.

mod enumerate;
mod facts;
mod generate;
mod search;

pub use enumerate::{multisets, TwoBoundedSweep};
pub use facts::{check_facts, check_facts_with, Check, FactsReport, StepFacts, Verdict};
pub use generate::{
    default_golden_ratio, generate, golden_chain, golden_chain_with, Family, GeneratorSpec,
};
pub use search::{
    adversary_search, adversary_search_with, SearchOptions, SearchResult, DEFAULT_NODE_CAP,
};

use crate::engine::{gain_ratio, run_policy, run_rg_exact_with, ExactOptions};
use crate::error::Result;
use crate::model::Instance;
use crate::offline::opt_schedule;
use crate::policies::Policy;
use crate::rational::Rational;

/// `OPT / gain` for deterministic policies, `OPT / E[gain]` for rg.
pub fn competitive_ratio(inst: &Instance, policy: Policy) -> Result<Rational> {
    competitive_ratio_with(inst, policy, ExactOptions::default())
}

pub fn competitive_ratio_with(inst: &Instance, policy: Policy, exact: ExactOptions) -> Result<Rational> {
    if policy.is_deterministic() {
        return Ok(run_policy(inst, policy)?.ratio);
    }
    let expected = run_rg_exact_with(inst, exact, &mut |_, _| {})?.expected_gain;
    let (_, opt) = opt_schedule(inst.packets(), inst.first_release().unwrap_or(1));
    gain_ratio(&opt, &expected)
}
