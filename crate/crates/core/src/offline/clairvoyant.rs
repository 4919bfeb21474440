//! Clairvoyant schedules that conform with an oblivious schedule.
//!
//! Construction: take any optimal schedule of the pending packets plus all
//! future arrivals, push out pending packets that `O_t` dominates by
//! swapping along alternating paths of `C ⊕ O_t`, reorder the result into a
//! `⊴`-schedule, and finally swap its first packet for the `⊴`-minimal
//! non-dominated packet of the same weight.

use std::collections::HashMap;

use thiserror::Error;

use crate::model::{to_release_edf_schedule, Packet, Schedule, Step};
use crate::rational::Rational;

use super::graph::opt_schedule;
use super::oblivious::ObliviousSchedule;

/// Each of these means an input broke a precondition (typically a
/// non-optimal `O_t`) or the construction has a bug.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConformingError {
    #[error("oblivious schedule is for step {oblivious}, not {step}")]
    StepMismatch { step: Step, oblivious: Step },
    #[error("oblivious schedule contains {0}, which is not pending")]
    ForeignPacket(String),
    #[error("alternating path from {0} ends at a step free in O_t")]
    OddAlternatingPath(String),
    #[error("alternating path from {from} ends at {to} of different weight")]
    WeightMismatch { from: String, to: String },
    #[error("alternating path from {0} does not terminate")]
    Cycle(String),
    #[error("clairvoyant schedule idles at step {0} with packets pending")]
    IdleFirstStep(Step),
    #[error("packet set of the clairvoyant schedule is infeasible")]
    Infeasible,
}

/// Optimal schedule over pending packets and all future arrivals, starting
/// at `step`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClairvoyantSchedule {
    step: Step,
    schedule: Schedule,
}

impl ClairvoyantSchedule {
    pub fn step(&self) -> Step {
        self.step
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn first(&self) -> Option<&Packet> {
        self.schedule.packet_at(self.step)
    }

    pub fn contains(&self, arrival: usize) -> bool {
        self.schedule.contains(arrival)
    }

    pub fn weight(&self) -> Rational {
        self.schedule.weight()
    }
}

/// Builds a clairvoyant schedule conforming with `o`.
pub fn conforming_clairvoyant(
    pending: &[Packet],
    future: &[Packet],
    t: Step,
    o: &ObliviousSchedule,
) -> Result<ClairvoyantSchedule, ConformingError> {
    if o.step() != t {
        return Err(ConformingError::StepMismatch { step: t, oblivious: o.step() });
    }
    let universe: Vec<Packet> = pending.iter().chain(future).cloned().collect();
    let index_of: HashMap<usize, usize> =
        universe.iter().enumerate().map(|(i, p)| (p.arrival(), i)).collect();

    let mut in_o = vec![false; universe.len()];
    let mut o_step: Vec<Option<Step>> = vec![None; universe.len()];
    let mut o_at: HashMap<Step, usize> = HashMap::new();
    for (k, p) in o.packets().iter().enumerate() {
        let i = match index_of.get(&p.arrival()) {
            Some(&i) if i < pending.len() => i,
            _ => return Err(ConformingError::ForeignPacket(p.id().to_string())),
        };
        let s = t + k as Step;
        in_o[i] = true;
        o_step[i] = Some(s);
        o_at.insert(s, i);
    }

    let (opt, _) = opt_schedule(&universe, t);
    let mut c_step: Vec<Option<Step>> = vec![None; universe.len()];
    for (s, p) in opt.assignments() {
        c_step[index_of[&p.arrival()]] = Some(*s);
    }

    // Repair until no scheduled pending packet lies outside O_t; each round
    // lowers that count by one.
    while let Some(j) = (0..pending.len()).find(|&i| c_step[i].is_some() && !in_o[i]) {
        let name = || universe[j].id().to_string();
        let mut path: Vec<(Step, usize)> = Vec::new();
        let mut cur = j;
        loop {
            let s = c_step[cur].expect("path packets are scheduled in C");
            let next = *o_at.get(&s).ok_or_else(|| ConformingError::OddAlternatingPath(name()))?;
            path.push((s, next));
            if path.len() > o.len() + 1 {
                return Err(ConformingError::Cycle(name()));
            }
            if c_step[next].is_none() {
                break;
            }
            cur = next;
        }
        let end = path.last().expect("nonempty").1;
        if universe[end].weight() != universe[j].weight() {
            return Err(ConformingError::WeightMismatch {
                from: name(),
                to: universe[end].id().to_string(),
            });
        }
        c_step[j] = None;
        for &(s, p) in &path {
            debug_assert_eq!(o_step[p], Some(s));
            c_step[p] = Some(s);
        }
    }

    let chosen: Vec<Packet> = (0..universe.len())
        .filter(|&i| c_step[i].is_some())
        .map(|i| universe[i].clone())
        .collect();
    let ordered = to_release_edf_schedule(&chosen, t).map_err(|_| ConformingError::Infeasible)?;

    let first = match ordered.packet_at(t) {
        Some(p) => p.clone(),
        None if pending.is_empty() => {
            return Ok(ClairvoyantSchedule { step: t, schedule: ordered });
        }
        None => return Err(ConformingError::IdleFirstStep(t)),
    };
    let replacement = o
        .packets()
        .iter()
        .find(|p| p.weight() == first.weight())
        .cloned()
        .unwrap_or_else(|| first.clone());
    let schedule = if replacement.arrival() == first.arrival() {
        ordered
    } else {
        let slots = ordered
            .assignments()
            .iter()
            .map(|(s, p)| if *s == t { (*s, replacement.clone()) } else { (*s, p.clone()) })
            .collect();
        Schedule::from_assignments(slots).map_err(|_| ConformingError::Infeasible)?
    };
    Ok(ClairvoyantSchedule { step: t, schedule })
}

/// Lays packets out in the given order, each at the earliest step that is
/// after its predecessor and not before its release. `None` if some packet
/// would miss its deadline.
pub fn layout_in_order(sequence: &[Packet], t0: Step) -> Option<Schedule> {
    let mut next = t0;
    let mut slots = Vec::with_capacity(sequence.len());
    for p in sequence {
        let s = next.max(p.release());
        if s >= p.deadline() {
            return None;
        }
        slots.push((s, p.clone()));
        next = s + 1;
    }
    Schedule::from_assignments(slots).ok()
}

/// Reorders a conforming clairvoyant schedule so that `h` goes first: the
/// already-pending packets are moved in front of future arrivals (keeping
/// relative order within each group) and then `h` is moved to the very
/// front. Returns the reordered schedule, or `None` if `h` is not in the
/// schedule or the reordering is infeasible.
pub fn reorder_with_h_first(c: &ClairvoyantSchedule, h: &Packet) -> Option<Schedule> {
    let t = c.step();
    if !c.contains(h.arrival()) {
        return None;
    }
    let (mut now, later): (Vec<Packet>, Vec<Packet>) =
        c.schedule().packets().cloned().partition(|p| p.release() <= t);
    now.retain(|p| p.arrival() != h.arrival());
    let sequence: Vec<Packet> = std::iter::once(h.clone()).chain(now).chain(later).collect();
    layout_in_order(&sequence, t)
}
