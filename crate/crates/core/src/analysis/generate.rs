//! Seeded random instance families.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Instance, Packet, Step};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Random lifespans, deadlines pushed up just enough to stay agreeable.
    AgreeableRandom,
    /// Every lifespan is 1 or 2.
    TwoBounded,
    /// Every lifespan is exactly `s`.
    SUniform,
    /// Deterministic chain of tight/flexible pairs with geometric weights.
    GoldenChain,
}

impl Family {
    pub const ALL: [Family; 4] =
        [Family::AgreeableRandom, Family::TwoBounded, Family::SUniform, Family::GoldenChain];

    pub fn name(self) -> &'static str {
        match self {
            Family::AgreeableRandom => "agreeable-random",
            Family::TwoBounded => "two-bounded",
            Family::SUniform => "s-uniform",
            Family::GoldenChain => "golden-chain",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown family {s:?}")))
    }
}

/// The default rational stand-in for φ.
pub fn default_golden_ratio() -> Rational {
    Rational::new(987, 610)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub seed: u64,
    /// Release steps are `1..=steps`.
    pub steps: Step,
    /// Each step releases between 0 and this many packets.
    pub per_step: usize,
    /// Weights are drawn uniformly from this grid.
    pub weights: Vec<Rational>,
    /// Longest lifespan for agreeable-random.
    pub max_lifespan: Step,
    /// Lifespan for s-uniform.
    pub s: Step,
    /// Chain length for golden-chain.
    pub k: Step,
    /// Weight ratio for golden-chain.
    pub ratio: Rational,
    /// Stop once this many packets have been emitted.
    pub max_packets: Option<usize>,
}

impl GeneratorSpec {
    pub fn new(family: Family, seed: u64) -> Self {
        GeneratorSpec {
            family,
            seed,
            steps: 4,
            per_step: 2,
            weights: [1, 2, 3, 5, 8].into_iter().map(Rational::from).collect(),
            max_lifespan: 3,
            s: 2,
            k: 4,
            ratio: default_golden_ratio(),
            max_packets: None,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if self.family == Family::GoldenChain {
            if self.k < 2 {
                return bad("golden chain needs k >= 2");
            }
            if !self.ratio.is_positive() {
                return bad("golden chain ratio must be positive");
            }
            return Ok(());
        }
        if self.steps == 0 {
            return bad("steps must be at least 1");
        }
        if self.per_step == 0 {
            return bad("per-step must be at least 1");
        }
        if self.weights.is_empty() || self.weights.iter().any(|w| !w.is_positive()) {
            return bad("weight grid must be nonempty and positive");
        }
        if self.family == Family::SUniform && self.s == 0 {
            return bad("s must be at least 1");
        }
        if self.family == Family::AgreeableRandom && self.max_lifespan == 0 {
            return bad("max lifespan must be at least 1");
        }
        Ok(())
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<Instance> {
    spec.validate()?;
    let inst = match spec.family {
        Family::GoldenChain => golden_chain_with(spec.k, &spec.ratio)?,
        _ => random_instance(spec)?,
    };
    let ok = inst.is_agreeable()
        && match spec.family {
            Family::TwoBounded => inst.packets().iter().all(|p| matches!(p.lifespan(), 1 | 2)),
            Family::SUniform => inst.packets().iter().all(|p| p.lifespan() == spec.s),
            Family::GoldenChain => inst.packets().iter().all(|p| matches!(p.lifespan(), 1 | 2)),
            Family::AgreeableRandom => true,
        };
    if !ok {
        return Err(Error::Invariant(format!("{} generator broke its family property", spec.family)));
    }
    Ok(inst)
}

fn random_instance(spec: &GeneratorSpec) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let cap = spec.max_packets.unwrap_or(usize::MAX);
    let mut packets = Vec::new();
    // largest deadline among packets released at earlier steps
    let mut earlier_max: Step = 0;
    'steps: for t in 1..=spec.steps {
        let count = rng.gen_range(0..=spec.per_step);
        let mut step_max = earlier_max;
        for _ in 0..count {
            if packets.len() >= cap {
                break 'steps;
            }
            let d = match spec.family {
                Family::TwoBounded => t + rng.gen_range(1..=2),
                Family::SUniform => t + spec.s,
                _ => {
                    let lo = (t + 1).max(earlier_max);
                    let hi = (t + spec.max_lifespan).max(lo);
                    rng.gen_range(lo..=hi)
                }
            };
            let w = spec.weights.choose(&mut rng).expect("nonempty grid").clone();
            packets.push(Packet::new(format!("p{}", packets.len() + 1), t, d, w)?);
            step_max = step_max.max(d);
        }
        earlier_max = step_max;
    }
    Instance::new(packets)
}

/// Chain of `k` steps with the default ratio 987/610.
pub fn golden_chain(k: Step) -> Result<Instance> {
    golden_chain_with(k, &default_golden_ratio())
}

/// Step `t` releases a tight packet (`d = t+1`, weight `g^(t-1)`) followed
/// by a flexible one (`d = t+2`, weight `g^t`).
pub fn golden_chain_with(k: Step, g: &Rational) -> Result<Instance> {
    if k < 2 {
        return Err(Error::InvalidParameter("golden chain needs k >= 2".into()));
    }
    if !g.is_positive() {
        return Err(Error::InvalidParameter("golden chain ratio must be positive".into()));
    }
    let mut packets = Vec::with_capacity(2 * k as usize);
    for t in 1..=k {
        packets.push(Packet::new(format!("tight{t}"), t, t + 1, g.pow(t - 1))?);
        packets.push(Packet::new(format!("flex{t}"), t, t + 2, g.pow(t))?);
    }
    Instance::new(packets)
}
