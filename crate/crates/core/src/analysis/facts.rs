//! Executable checks of the structural facts about oblivious and
//! clairvoyant schedules.
//!
//! The instance is run under MG′. At every step with a nonempty buffer the
//! checker builds `O_t` and a conforming clairvoyant schedule `C*_t` and
//! verifies each property independently, recording a verdict per check.

use std::fmt;

use serde::Serialize;

use crate::engine::simulate;
use crate::error::Result;
use crate::model::{order_cmp, Instance, Packet, Schedule, Step};
use crate::offline::{
    conforming_clairvoyant, opt_schedule, reorder_with_h_first, ClairvoyantSchedule,
    ObliviousSchedule,
};
use crate::policies::mg_prime_choose;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    /// `O_t` is a maximum-weight feasible `⊴`-schedule of the buffer.
    ObliviousOptimal,
    /// A conforming clairvoyant schedule could be built.
    Conforming,
    /// `C*_t` has optimal weight over pending and future packets.
    ClairvoyantOptimal,
    /// Pending packets of `C*_t` all lie in `O_t`.
    Containment,
    /// `C*_t` is a `⊴`-schedule.
    OrderSchedule,
    /// Every `i ∈ O_t` with `i ◁ C*_t(t)` is strictly lighter.
    FirstPacket,
    /// `i, j ∈ O_t`, `w_i < w_j`, `i ◁ j`, `i ∈ C*_t` imply `j ∈ C*_t`.
    Monotonicity,
    /// If `e ∉ C*_t`, reordering `C*_t` puts `h` first at equal weight.
    Reordering,
}

impl Check {
    pub const ALL: [Check; 8] = [
        Check::ObliviousOptimal,
        Check::Conforming,
        Check::ClairvoyantOptimal,
        Check::Containment,
        Check::OrderSchedule,
        Check::FirstPacket,
        Check::Monotonicity,
        Check::Reordering,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::ObliviousOptimal => "oblivious-optimal",
            Check::Conforming => "conforming",
            Check::ClairvoyantOptimal => "clairvoyant-optimal",
            Check::Containment => "containment",
            Check::OrderSchedule => "order-schedule",
            Check::FirstPacket => "first-packet",
            Check::Monotonicity => "monotonicity",
            Check::Reordering => "reordering",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "detail", rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    /// The check's premise does not hold at this step.
    NotApplicable,
    Fail(String),
}

impl Verdict {
    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepFacts {
    pub step: Step,
    pub results: Vec<(Check, Verdict)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FactsReport {
    pub steps: Vec<StepFacts>,
}

impl FactsReport {
    pub fn failures(&self) -> impl Iterator<Item = (Step, Check, &str)> + '_ {
        self.steps.iter().flat_map(|s| {
            s.results.iter().filter_map(move |(c, v)| match v {
                Verdict::Fail(why) => Some((s.step, *c, why.as_str())),
                _ => None,
            })
        })
    }

    pub fn all_pass(&self) -> bool {
        self.failures().next().is_none()
    }
}

pub fn check_facts(inst: &Instance) -> Result<FactsReport> {
    check_facts_with(inst, &mut |o| o)
}

/// Like [`check_facts`], but the `O_t` handed to the checks is first passed
/// through `mutate`. The MG′ run itself always uses the true `O_t`.
pub fn check_facts_with(
    inst: &Instance,
    mutate: &mut dyn FnMut(ObliviousSchedule) -> ObliviousSchedule,
) -> Result<FactsReport> {
    inst.require_agreeable()?;
    let mut report = FactsReport::default();
    simulate(inst, |o| {
        let checked = mutate(o.clone());
        report.steps.push(check_step(inst, &checked));
        mg_prime_choose(o)
    })?;
    Ok(report)
}

fn verdict(ok: bool, why: impl FnOnce() -> String) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail(why())
    }
}

fn names<'a>(ps: impl IntoIterator<Item = &'a Packet>) -> String {
    ps.into_iter().map(|p| p.id().as_str()).collect::<Vec<_>>().join(",")
}

fn check_step(inst: &Instance, o: &ObliviousSchedule) -> StepFacts {
    let t = o.step();
    let pending: Vec<Packet> = o.packets().iter().chain(o.dominated()).cloned().collect();
    let future = inst.arrivals_after(t);
    let mut results = vec![(Check::ObliviousOptimal, oblivious_optimal(o, &pending))];

    let c = match conforming_clairvoyant(&pending, future, t, o) {
        Ok(c) => c,
        Err(err) => {
            results.push((Check::Conforming, Verdict::Fail(err.to_string())));
            return StepFacts { step: t, results };
        }
    };
    results.push((Check::Conforming, Verdict::Pass));

    let universe: Vec<Packet> = pending.iter().chain(future).cloned().collect();
    let (_, best) = opt_schedule(&universe, t);
    results.push((
        Check::ClairvoyantOptimal,
        verdict(c.weight() == best, || format!("weight {} but optimum is {best}", c.weight())),
    ));

    let outside: Vec<&Packet> =
        c.schedule().packets().filter(|p| p.release() <= t && !o.contains(p.arrival())).collect();
    results.push((
        Check::Containment,
        verdict(outside.is_empty(), || format!("pending {} scheduled but not in O_t", names(outside))),
    ));

    results.push((Check::OrderSchedule, order_schedule(c.schedule(), t)));
    results.push((Check::FirstPacket, first_packet(o, &c)));
    results.push((Check::Monotonicity, monotonicity(o, &c)));
    results.push((Check::Reordering, reordering(o, &c)));
    StepFacts { step: t, results }
}

fn oblivious_optimal(o: &ObliviousSchedule, pending: &[Packet]) -> Verdict {
    let (_, best) = opt_schedule(pending, o.step());
    if o.weight() != best {
        return Verdict::Fail(format!("weight {} but optimum is {best}", o.weight()));
    }
    let sorted = o.packets().windows(2).all(|w| order_cmp(&w[0], &w[1]).is_lt());
    let feasible = o.packets().iter().enumerate().all(|(k, p)| p.deadline() > o.step() + k as Step);
    verdict(sorted && feasible, || "not a feasible ⊴-ordered schedule".into())
}

/// At every step the schedule sends the `⊴`-least of its packets that are
/// released and not yet sent, and idles only when there is none.
fn order_schedule(s: &Schedule, t: Step) -> Verdict {
    let mut waiting: Vec<&Packet> = s.packets().collect();
    let last = s.assignments().last().map_or(t, |(step, _)| *step);
    for step in t..=last {
        let least = waiting.iter().filter(|p| p.release() <= step).min_by(|a, b| order_cmp(a, b)).copied();
        let sent = s.packet_at(step);
        match (least, sent) {
            (None, None) => {}
            (Some(l), Some(p)) if l.arrival() == p.arrival() => {
                waiting.retain(|q| q.arrival() != p.arrival());
            }
            (least, sent) => {
                return Verdict::Fail(format!(
                    "step {step} sends {} but {} is ⊴-least",
                    sent.map_or("nothing", |p| p.id().as_str()),
                    least.map_or("nothing", |p| p.id().as_str()),
                ));
            }
        }
    }
    Verdict::Pass
}

fn first_packet(o: &ObliviousSchedule, c: &ClairvoyantSchedule) -> Verdict {
    let Some(j) = c.first() else {
        return verdict(o.is_empty(), || "C*_t idles at its first step".into());
    };
    let heavy: Vec<&Packet> = o
        .packets()
        .iter()
        .filter(|i| order_cmp(i, j).is_lt() && i.weight() >= j.weight())
        .collect();
    verdict(heavy.is_empty(), || format!("{} precede {} without being lighter", names(heavy), j.id()))
}

fn monotonicity(o: &ObliviousSchedule, c: &ClairvoyantSchedule) -> Verdict {
    for i in o.packets().iter().filter(|i| c.contains(i.arrival())) {
        for j in o.packets() {
            if i.weight() < j.weight() && order_cmp(i, j).is_lt() && !c.contains(j.arrival()) {
                return Verdict::Fail(format!("{} in C*_t but heavier later {} is not", i.id(), j.id()));
            }
        }
    }
    Verdict::Pass
}

fn reordering(o: &ObliviousSchedule, c: &ClairvoyantSchedule) -> Verdict {
    let (Some(e), Some(h)) = (o.e(), o.h()) else {
        return Verdict::NotApplicable;
    };
    if c.contains(e.arrival()) {
        return Verdict::NotApplicable;
    }
    let Some(r) = reorder_with_h_first(c, h) else {
        return Verdict::Fail(format!("moving {} to the front is infeasible", h.id()));
    };
    let mut before: Vec<usize> = c.schedule().packets().map(Packet::arrival).collect();
    let mut after: Vec<usize> = r.packets().map(Packet::arrival).collect();
    before.sort_unstable();
    after.sort_unstable();
    let front = r.packet_at(c.step()).map(Packet::arrival);
    verdict(before == after && front == Some(h.arrival()), || {
        format!("reordered schedule is {}", names(r.packets()))
    })
}
