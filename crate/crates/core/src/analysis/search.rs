//! Exhaustive adversary search over 2-bounded injection sequences.
//!
//! The adversary picks, for each of `depth` steps, a multiset of at most
//! `branching` packets with weights from a menu and lifespan 1 or 2. Such
//! sequences are always agreeable. The tree is walked depth-first, carrying
//! two incremental states down each path:
//!
//! - the policy's buffer after each step, as a probability distribution
//!   (a single point for deterministic policies), with the expected gain so
//!   far;
//! - the offline optimum as a table from the set of still-sendable packets
//!   to the best gain achieving it. With lifespans of at most 2 only packets
//!   released in the current step can be carried to the next.
//!
//! At each leaf the remaining packets are drained and `OPT / gain` is
//! compared against the best so far. The winning witness is replayed
//! through the engine and the offline matching before being returned.

use rayon::prelude::*;

use crate::engine::{gain_ratio, run_policy, run_rg_exact};
use crate::error::{Error, Result};
use crate::model::{Instance, Packet, Step};
use crate::offline::{oblivious_schedule, opt_schedule};
use crate::policies::Policy;
use crate::rational::Rational;

use super::enumerate::multisets;

pub const DEFAULT_NODE_CAP: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub depth: usize,
    pub menu: Vec<Rational>,
    /// Most packets injected in one step.
    pub branching: usize,
    /// Nodes to visit before giving up; the result is then flagged partial.
    pub node_cap: u64,
}

impl SearchOptions {
    pub fn new(depth: usize, menu: Vec<Rational>, branching: usize) -> Self {
        SearchOptions { depth, menu, branching, node_cap: DEFAULT_NODE_CAP }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub witness: Instance,
    pub policy: Policy,
    /// `OPT / gain`, or `OPT / E[gain]` for rg.
    pub ratio: Rational,
    pub nodes: u64,
    /// False if the node cap cut the search short.
    pub complete: bool,
}

pub fn adversary_search(
    policy: Policy,
    depth: usize,
    menu: &[Rational],
    branching: usize,
) -> Result<SearchResult> {
    adversary_search_with(policy, &SearchOptions::new(depth, menu.to_vec(), branching))
}

/// Best `(ratio, path)` under one root, nodes visited, and completeness.
type RootOutcome = (Option<(Rational, Vec<usize>)>, u64, bool);

#[derive(Clone)]
struct State {
    next_arrival: usize,
    /// (carried buffer, probability)
    branches: Vec<(Vec<Packet>, Rational)>,
    gain: Rational,
    /// (carried packets, best offline gain so far)
    offline: Vec<(Vec<Packet>, Rational)>,
}

fn same_set(a: &[Packet], b: &[Packet]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.arrival() == y.arrival())
}

impl State {
    fn initial() -> Self {
        State {
            next_arrival: 0,
            branches: vec![(Vec::new(), Rational::one())],
            gain: Rational::zero(),
            offline: vec![(Vec::new(), Rational::zero())],
        }
    }

    /// Runs step `t` with the given arrivals on both sides.
    fn step(&self, policy: Policy, t: Step, arrivals: &[Packet]) -> Result<State> {
        let mut gain = self.gain.clone();
        let mut branches: Vec<(Vec<Packet>, Rational)> = Vec::new();
        for (carry, prob) in &self.branches {
            let pending: Vec<Packet> = carry.iter().chain(arrivals).cloned().collect();
            if pending.is_empty() {
                merge_sum(&mut branches, Vec::new(), prob.clone());
                continue;
            }
            let o = oblivious_schedule(&pending, t);
            for (x, q) in policy.decide(&o)?.outcomes() {
                let p = prob * &q;
                gain = &gain + &(&p * x.weight());
                let next = survivors(&pending, t, Some(x.arrival()));
                merge_sum(&mut branches, next, p);
            }
        }

        let mut offline: Vec<(Vec<Packet>, Rational)> = Vec::new();
        for (carry, value) in &self.offline {
            let avail: Vec<Packet> = carry.iter().chain(arrivals).cloned().collect();
            if avail.is_empty() {
                merge_max(&mut offline, Vec::new(), value.clone());
            }
            for x in &avail {
                merge_max(&mut offline, survivors(&avail, t, Some(x.arrival())), value + x.weight());
            }
        }

        Ok(State {
            next_arrival: self.next_arrival + arrivals.len(),
            branches,
            gain,
            offline,
        })
    }

    /// Sends out whatever is still carried and returns (OPT, gain).
    fn finish(&self, policy: Policy, t: Step) -> Result<(Rational, Rational)> {
        let last = self.step(policy, t, &[])?;
        debug_assert!(last.branches.iter().all(|(c, _)| c.is_empty()));
        let opt = last.offline.into_iter().map(|(_, v)| v).max().unwrap_or_else(Rational::zero);
        Ok((opt, last.gain))
    }
}

/// Packets of `pool` still live at `t + 1`, minus the one sent.
fn survivors(pool: &[Packet], t: Step, sent: Option<usize>) -> Vec<Packet> {
    pool.iter().filter(|p| p.deadline() > t + 1 && Some(p.arrival()) != sent).cloned().collect()
}

fn merge_sum(v: &mut Vec<(Vec<Packet>, Rational)>, key: Vec<Packet>, p: Rational) {
    match v.iter_mut().find(|(k, _)| same_set(k, &key)) {
        Some((_, q)) => *q = &*q + &p,
        None => v.push((key, p)),
    }
}

fn merge_max(v: &mut Vec<(Vec<Packet>, Rational)>, key: Vec<Packet>, value: Rational) {
    match v.iter_mut().find(|(k, _)| same_set(k, &key)) {
        Some((_, best)) => {
            if value > *best {
                *best = value;
            }
        }
        None => v.push((key, value)),
    }
}

struct Space {
    kinds: Vec<(Rational, Step)>,
    options: Vec<Vec<usize>>,
    depth: usize,
    policy: Policy,
}

impl Space {
    fn arrivals(&self, t: Step, option: usize, first_arrival: usize) -> Vec<Packet> {
        self.options[option]
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let (w, life) = &self.kinds[k];
                let n = first_arrival + i;
                Packet::new(format!("p{}", n + 1), t, t + life, w.clone())
                    .expect("menu packets are valid")
                    .with_arrival(n)
            })
            .collect()
    }

    fn instance(&self, path: &[usize]) -> Instance {
        let mut packets = Vec::new();
        for (i, &opt) in path.iter().enumerate() {
            let arr = self.arrivals(i as Step + 1, opt, packets.len());
            packets.extend(arr);
        }
        Instance::new(packets).expect("search instances are valid")
    }
}

struct Walker<'a> {
    space: &'a Space,
    budget: u64,
    nodes: u64,
    path: Vec<usize>,
    best: Option<(Rational, Vec<usize>)>,
}

impl Walker<'_> {
    /// Returns false once the node budget is spent.
    fn walk(&mut self, state: &State) -> Result<bool> {
        let t = self.path.len() as Step + 1;
        if self.path.len() == self.space.depth {
            let (opt, gain) = state.finish(self.space.policy, t)?;
            let ratio = gain_ratio(&opt, &gain)?;
            if self.best.as_ref().is_none_or(|(r, _)| ratio > *r) {
                self.best = Some((ratio, self.path.clone()));
            }
            return Ok(true);
        }
        for option in 0..self.space.options.len() {
            if self.nodes >= self.budget {
                return Ok(false);
            }
            self.nodes += 1;
            let arrivals = self.space.arrivals(t, option, state.next_arrival);
            let child = state.step(self.space.policy, t, &arrivals)?;
            self.path.push(option);
            let more = self.walk(&child)?;
            self.path.pop();
            if !more {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn adversary_search_with(policy: Policy, opts: &SearchOptions) -> Result<SearchResult> {
    if opts.depth == 0 {
        return Err(Error::InvalidParameter("search depth must be at least 1".into()));
    }
    if opts.menu.is_empty() || opts.menu.iter().any(|w| !w.is_positive()) {
        return Err(Error::InvalidParameter("weight menu must be nonempty and positive".into()));
    }
    if opts.branching == 0 {
        return Err(Error::InvalidParameter("branching must be at least 1".into()));
    }
    let kinds: Vec<(Rational, Step)> =
        opts.menu.iter().flat_map(|w| [(w.clone(), 1), (w.clone(), 2)]).collect();
    let options = multisets(kinds.len(), opts.branching);
    let space = Space { kinds, options, depth: opts.depth, policy };

    // An empty first step only shifts the instance, so roots start at 1.
    let roots: Vec<usize> = (1..space.options.len()).collect();
    let budget = opts.node_cap.div_ceil(roots.len() as u64).max(1);
    let root = State::initial();
    let outcomes: Vec<Result<RootOutcome>> = roots
        .par_iter()
        .map(|&option| {
            let mut w = Walker { space: &space, budget, nodes: 1, path: vec![option], best: None };
            let child = root.step(policy, 1, &space.arrivals(1, option, 0))?;
            let complete = w.walk(&child)?;
            Ok((w.best, w.nodes, complete))
        })
        .collect();

    let mut best: Option<(Rational, Vec<usize>)> = None;
    let mut nodes = 0;
    let mut complete = true;
    // roots in order, strict improvement only: ties go to the earlier path
    for outcome in outcomes {
        let (b, n, c) = outcome?;
        nodes += n;
        complete &= c;
        if let Some((r, p)) = b {
            if best.as_ref().is_none_or(|(br, _)| r > *br) {
                best = Some((r, p));
            }
        }
    }
    let (ratio, path) = best.ok_or_else(|| Error::Invariant("search visited no leaf".into()))?;
    let witness = space.instance(&path);
    let replayed = replay_ratio(&witness, policy)?;
    if replayed != ratio {
        return Err(Error::Invariant(format!(
            "search found ratio {ratio} but the witness replays to {replayed}"
        )));
    }
    Ok(SearchResult { witness, policy, ratio, nodes, complete })
}

fn replay_ratio(inst: &Instance, policy: Policy) -> Result<Rational> {
    if policy.is_deterministic() {
        return Ok(run_policy(inst, policy)?.ratio);
    }
    let (_, opt) = opt_schedule(inst.packets(), inst.first_release().unwrap_or(1));
    gain_ratio(&opt, &run_rg_exact(inst)?.expected_gain)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn menu(ws: &[i64]) -> Vec<Rational> {
        ws.iter().map(|&w| Rational::from(w)).collect()
    }

    #[test]
    fn depth_one_single_packet_is_optimal() {
        for p in Policy::ALL {
            let r = adversary_search(p, 1, &menu(&[1, 2]), 1).unwrap();
            assert_eq!(r.ratio, Rational::one());
            assert!(r.complete);
        }
    }

    #[test]
    fn mg_prime_depth_two() {
        let r = adversary_search(Policy::MgPrime, 2, &menu(&[1, 2]), 2).unwrap();
        assert!(r.ratio >= Rational::new(8, 7));
        assert!(r.complete);
    }

    #[test]
    fn rg_depth_two_finds_the_three_packet_gap() {
        let r = adversary_search(Policy::Rg, 2, &menu(&[1, 2]), 2).unwrap();
        assert!(r.ratio >= Rational::new(8, 7), "{}", r.ratio);
        assert!(r.ratio <= Rational::new(4, 3));
    }

    #[test]
    fn node_count_and_determinism() {
        let a = adversary_search(Policy::Mg, 2, &menu(&[1, 3]), 2).unwrap();
        let b = adversary_search(Policy::Mg, 2, &menu(&[1, 3]), 2).unwrap();
        assert_eq!(a, b);
        // 4 kinds, 15 options, 14 roots each with 15 children
        assert_eq!(a.nodes, 14 + 14 * 15);
    }

    #[test]
    fn cap_flags_partial_result() {
        let mut opts = SearchOptions::new(3, menu(&[1, 2]), 2);
        opts.node_cap = 100;
        let r = adversary_search_with(Policy::MgPrime, &opts).unwrap();
        assert!(!r.complete);
        assert!(r.nodes <= 100 + 14);
    }

    #[test]
    fn monotone_in_depth_and_menu() {
        let small = adversary_search(Policy::MgPrime, 2, &menu(&[1, 2]), 2).unwrap().ratio;
        let deeper = adversary_search(Policy::MgPrime, 3, &menu(&[1, 2]), 2).unwrap().ratio;
        let wider = adversary_search(Policy::MgPrime, 2, &menu(&[1, 2, 3]), 2).unwrap().ratio;
        assert!(deeper >= small);
        assert!(wider >= small);
    }

    #[test]
    fn bad_parameters() {
        assert!(adversary_search(Policy::Mg, 0, &menu(&[1]), 1).is_err());
        assert!(adversary_search(Policy::Mg, 1, &[], 1).is_err());
        assert!(adversary_search(Policy::Mg, 1, &menu(&[1]), 0).is_err());
        assert!(adversary_search(Policy::Mg, 1, &menu(&[0]), 1).is_err());
    }
}
