use thiserror::Error;

use crate::model::Step;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("packet {id}: non-positive weight")]
    NonPositiveWeight { id: String },
    #[error("packet {id}: empty lifespan (deadline {deadline} <= release {release})")]
    EmptyLifespan { id: String, release: Step, deadline: Step },
    #[error("packet {id}: release step must be at least 1")]
    ZeroRelease { id: String },
    #[error("packet {id}: released at {release} after a packet released at {previous}; arrivals must be ordered by release")]
    OutOfOrderRelease { id: String, release: Step, previous: Step },
    #[error("duplicate packet id {0}")]
    DuplicateId(String),
    #[error("malformed instance: {0}")]
    Malformed(String),
    #[error("instance does not have agreeable deadlines")]
    NotAgreeable,
    #[error("packet set is not feasible from step {0}")]
    Infeasible(Step),
    #[error("oblivious schedule is empty")]
    EmptyOblivious,
    #[error("unknown policy {0:?} (expected one of: mg, mg-prime, rg, greedy-weight, edf-nondominated)")]
    UnknownPolicy(String),
    #[error("policy {0} is randomized; use the exact or Monte Carlo runner")]
    NotDeterministic(String),
    #[error("instance too large for exact mode: more than {cap} branching leaves")]
    ExactCapExceeded { cap: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("ratio undefined: positive optimum against zero gain")]
    ZeroGain,
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
