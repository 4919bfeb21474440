//! Exact expected gain of RG by branching on every lottery.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{Instance, Packet, PacketId, Step};
use crate::offline::{oblivious_schedule, ObliviousSchedule};
use crate::policies::{rg_distribution, PolicyDecision};
use crate::rational::Rational;

pub const DEFAULT_EXACT_CAP: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactOptions {
    /// Maximum number of leaves of the branching tree.
    pub cap: u64,
    /// Share subtrees keyed by (step, transmitted set).
    pub memoize: bool,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions { cap: DEFAULT_EXACT_CAP, memoize: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactExpectation {
    pub expected_gain: Rational,
    /// Leaves of the full (unshared) branching tree.
    pub leaves: u64,
}

/// A complete random trajectory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leaf {
    pub probability: Rational,
    pub gain: Rational,
    pub transmitted: Vec<PacketId>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct SentSet(Vec<u64>);

impl SentSet {
    fn new(n: usize) -> Self {
        SentSet(vec![0; n.div_ceil(64)])
    }
    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn remove(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }
}

struct Brancher<'a> {
    inst: &'a Instance,
    cap: u64,
}

impl Brancher<'_> {
    /// First step `>= t` with something pending, and what is pending there.
    fn next_busy(&self, mut t: Step, sent: &SentSet) -> Option<(Step, Vec<Packet>)> {
        while t <= self.inst.horizon() {
            let pending: Vec<Packet> = self
                .inst
                .packets()
                .iter()
                .take_while(|p| p.release() <= t)
                .filter(|p| t < p.deadline() && !sent.contains(p.arrival()))
                .cloned()
                .collect();
            if !pending.is_empty() {
                return Some((t, pending));
            }
            t = self.inst.arrivals_after(t).first()?.release();
        }
        None
    }
}

struct Expectation<'a, 'v> {
    brancher: Brancher<'a>,
    memo: Option<HashMap<(Step, SentSet), (Rational, u64)>>,
    visit: &'v mut dyn FnMut(&ObliviousSchedule, &PolicyDecision),
}

impl Expectation<'_, '_> {
    fn value(&mut self, t: Step, sent: &mut SentSet) -> Result<(Rational, u64)> {
        let Some((t, pending)) = self.brancher.next_busy(t, sent) else {
            return Ok((Rational::zero(), 1));
        };
        if let Some(hit) = self.memo.as_ref().and_then(|m| m.get(&(t, sent.clone()))) {
            return Ok(hit.clone());
        }
        let o = oblivious_schedule(&pending, t);
        let decision = rg_distribution(&o)?;
        (self.visit)(&o, &decision);
        let mut expected = Rational::zero();
        let mut leaves: u64 = 0;
        for (p, prob) in decision.outcomes() {
            sent.insert(p.arrival());
            let (rest, l) = self.value(t + 1, sent)?;
            sent.remove(p.arrival());
            expected = &expected + &(&prob * &(p.weight() + &rest));
            leaves = leaves.saturating_add(l);
            if leaves > self.brancher.cap {
                return Err(Error::ExactCapExceeded { cap: self.brancher.cap });
            }
        }
        if let Some(m) = self.memo.as_mut() {
            m.insert((t, sent.clone()), (expected.clone(), leaves));
        }
        Ok((expected, leaves))
    }
}

pub fn run_rg_exact(inst: &Instance) -> Result<ExactExpectation> {
    run_rg_exact_with(inst, ExactOptions::default(), &mut |_, _| {})
}

/// Exact RG expectation. `visit` sees every branching point (once per
/// distinct state when memoizing).
pub fn run_rg_exact_with(
    inst: &Instance,
    opts: ExactOptions,
    visit: &mut dyn FnMut(&ObliviousSchedule, &PolicyDecision),
) -> Result<ExactExpectation> {
    let mut ex = Expectation {
        brancher: Brancher { inst, cap: opts.cap },
        memo: opts.memoize.then(HashMap::new),
        visit,
    };
    let mut sent = SentSet::new(inst.len());
    let start = inst.first_release().unwrap_or(1);
    let (expected_gain, leaves) = ex.value(start, &mut sent)?;
    Ok(ExactExpectation { expected_gain, leaves })
}

/// Every leaf of RG's branching tree, in depth-first order (`e` before `h`).
pub fn rg_leaves(inst: &Instance, cap: u64) -> Result<Vec<Leaf>> {
    fn walk(
        b: &Brancher<'_>,
        t: Step,
        sent: &mut SentSet,
        path: &mut Vec<(PacketId, Rational)>,
        probability: Rational,
        out: &mut Vec<Leaf>,
    ) -> Result<()> {
        let Some((t, pending)) = b.next_busy(t, sent) else {
            if out.len() as u64 >= b.cap {
                return Err(Error::ExactCapExceeded { cap: b.cap });
            }
            out.push(Leaf {
                probability,
                gain: path.iter().map(|(_, w)| w).sum(),
                transmitted: path.iter().map(|(id, _)| id.clone()).collect(),
            });
            return Ok(());
        };
        let o = oblivious_schedule(&pending, t);
        for (p, prob) in rg_distribution(&o)?.outcomes() {
            sent.insert(p.arrival());
            path.push((p.id().clone(), p.weight().clone()));
            walk(b, t + 1, sent, path, &probability * &prob, out)?;
            path.pop();
            sent.remove(p.arrival());
        }
        Ok(())
    }

    let b = Brancher { inst, cap };
    let mut out = Vec::new();
    let mut sent = SentSet::new(inst.len());
    walk(&b, inst.first_release().unwrap_or(1), &mut sent, &mut Vec::new(), Rational::one(), &mut out)?;
    Ok(out)
}
