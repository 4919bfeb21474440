//! Online policies. Each one sees only the current oblivious schedule `O_t`.
//!
//! The golden ratio never appears numerically: for rationals `x > 0`,
//! `x <= φ` iff `x² <= x + 1`, and equality is impossible since `φ` is
//! irrational. All `φ`-comparisons reduce to that test.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::Packet;
use crate::offline::{select_e_h, ObliviousSchedule};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Policy {
    Mg,
    MgPrime,
    Rg,
    GreedyWeight,
    EdfNondominated,
}

impl Policy {
    pub const ALL: [Policy; 5] =
        [Policy::Mg, Policy::MgPrime, Policy::Rg, Policy::GreedyWeight, Policy::EdfNondominated];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Mg => "mg",
            Policy::MgPrime => "mg-prime",
            Policy::Rg => "rg",
            Policy::GreedyWeight => "greedy-weight",
            Policy::EdfNondominated => "edf-nondominated",
        }
    }

    pub fn is_deterministic(self) -> bool {
        self != Policy::Rg
    }

    pub fn decide(self, o: &ObliviousSchedule) -> Result<PolicyDecision> {
        match self {
            Policy::Mg => mg_choose(o).map(PolicyDecision::Transmit),
            Policy::MgPrime => mg_prime_choose(o).map(PolicyDecision::Transmit),
            Policy::Rg => rg_distribution(o),
            Policy::GreedyWeight => baseline_choose(Baseline::GreedyWeight, o).map(PolicyDecision::Transmit),
            Policy::EdfNondominated => {
                baseline_choose(Baseline::EdfNondominated, o).map(PolicyDecision::Transmit)
            }
        }
    }

    /// The packet a deterministic policy transmits.
    pub fn choose(self, o: &ObliviousSchedule) -> Result<Packet> {
        match self.decide(o)? {
            PolicyDecision::Transmit(p) => Ok(p),
            PolicyDecision::Lottery(_) => Err(Error::NotDeterministic(self.name().to_string())),
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Policy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPolicy(s.to_string()))
    }
}

/// A single packet, or a lottery over at most two packets whose
/// probabilities lie in `[0, 1]` and sum to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolicyDecision {
    Transmit(Packet),
    Lottery(Vec<(Packet, Rational)>),
}

impl PolicyDecision {
    pub fn outcomes(&self) -> Vec<(&Packet, Rational)> {
        match self {
            PolicyDecision::Transmit(p) => vec![(p, Rational::one())],
            PolicyDecision::Lottery(v) => v.iter().map(|(p, q)| (p, q.clone())).collect(),
        }
    }

    pub fn expected_gain(&self) -> Rational {
        self.outcomes().into_iter().map(|(p, q)| p.weight() * &q).sum()
    }
}

/// `φ·w_e >= w_h`, decided as `w_h² <= w_h·w_e + w_e²`.
pub fn golden_test(w_e: &Rational, w_h: &Rational) -> Result<bool> {
    if !w_e.is_positive() || !w_h.is_positive() {
        return Err(Error::InvalidParameter("golden test needs positive weights".into()));
    }
    Ok(w_h * w_h <= &(w_h * w_e) + &(w_e * w_e))
}

/// `a >= φ·b` for positive `a`, `b`, decided as `a² >= a·b + b²`.
pub fn at_least_golden_multiple(a: &Rational, b: &Rational) -> bool {
    a * a >= &(a * b) + &(b * b)
}

/// `r <= φ`, exactly.
pub fn at_most_golden(r: &Rational) -> bool {
    !r.is_positive() || r * r <= r + &Rational::one()
}

/// MG: send `e` if `φ·w_e >= w_h`, otherwise the `⊴`-minimal `f ∈ O_t` with
/// `w_f >= φ·w_e` and `φ·w_f >= w_h`.
pub fn mg_choose(o: &ObliviousSchedule) -> Result<Packet> {
    let (e, h) = select_e_h(o)?;
    if golden_test(e.weight(), h.weight())? {
        return Ok(e.clone());
    }
    let f = o
        .packets()
        .iter()
        .find(|f| {
            at_least_golden_multiple(f.weight(), e.weight())
                && golden_test(f.weight(), h.weight()).unwrap_or(false)
        })
        .ok_or_else(|| Error::Invariant("h is always an MG candidate".into()))?;
    Ok(f.clone())
}

/// MG′: `e` if `φ·w_e >= w_h`, else `h`.
pub fn mg_prime_choose(o: &ObliviousSchedule) -> Result<Packet> {
    let (e, h) = select_e_h(o)?;
    Ok(if golden_test(e.weight(), h.weight())? { e.clone() } else { h.clone() })
}

/// RG: `e` with probability `w_e/w_h`, `h` otherwise.
pub fn rg_distribution(o: &ObliviousSchedule) -> Result<PolicyDecision> {
    let (e, h) = select_e_h(o)?;
    if e.arrival() == h.arrival() {
        return Ok(PolicyDecision::Transmit(e.clone()));
    }
    let p_e = e.weight() / h.weight();
    let p_h = Rational::one() - &p_e;
    Ok(PolicyDecision::Lottery(vec![(e.clone(), p_e), (h.clone(), p_h)]))
}

/// `(w_e² − w_e·w_h + w_h²) / w_h`, RG's expected gain in one step.
pub fn rg_expected_step_gain(w_e: &Rational, w_h: &Rational) -> Rational {
    (&(w_e * w_e) - &(w_e * w_h) + (w_h * w_h)) / w_h
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Baseline {
    /// Always the heaviest non-dominated packet (`h`).
    GreedyWeight,
    /// Always the earliest non-dominated packet (`e`).
    EdfNondominated,
}

impl FromStr for Baseline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy-weight" => Ok(Baseline::GreedyWeight),
            "edf-nondominated" => Ok(Baseline::EdfNondominated),
            other => Err(Error::UnknownPolicy(other.to_string())),
        }
    }
}

pub fn baseline_choose(baseline: Baseline, o: &ObliviousSchedule) -> Result<Packet> {
    let (e, h) = select_e_h(o)?;
    Ok(match baseline {
        Baseline::GreedyWeight => h.clone(),
        Baseline::EdfNondominated => e.clone(),
    })
}
