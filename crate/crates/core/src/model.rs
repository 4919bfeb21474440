//! Packets, instances, schedules and the switch buffer.
//!
//! Time is slotted into 1-based steps. A packet released at `r` with
//! deadline `d` may be transmitted in any step `t` with `r <= t < d`; at the
//! start of step `d` it is dropped from the buffer.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub type Step = u32;

/// Opaque packet identifier.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PacketId(Arc<str>);

impl PacketId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for PacketId {
    fn from(s: &str) -> Self {
        PacketId(Arc::from(s))
    }
}

impl From<String> for PacketId {
    fn from(s: String) -> Self {
        PacketId(Arc::from(s))
    }
}

impl fmt::Display for PacketId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for PacketId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Packet {
    id: PacketId,
    release: Step,
    deadline: Step,
    weight: Rational,
    arrival: usize,
}

impl Packet {
    /// Validates `release >= 1`, `deadline > release` and `weight > 0`.
    /// The arrival index starts at 0; [`Instance::new`] renumbers it.
    pub fn new(id: impl Into<PacketId>, release: Step, deadline: Step, weight: Rational) -> Result<Self> {
        let id = id.into();
        if release == 0 {
            return Err(Error::ZeroRelease { id: id.to_string() });
        }
        if deadline <= release {
            return Err(Error::EmptyLifespan { id: id.to_string(), release, deadline });
        }
        if !weight.is_positive() {
            return Err(Error::NonPositiveWeight { id: id.to_string() });
        }
        Ok(Packet { id, release, deadline, weight, arrival: 0 })
    }

    pub fn with_arrival(mut self, arrival: usize) -> Self {
        self.arrival = arrival;
        self
    }

    pub fn id(&self) -> &PacketId {
        &self.id
    }

    pub fn release(&self) -> Step {
        self.release
    }

    pub fn deadline(&self) -> Step {
        self.deadline
    }

    pub fn weight(&self) -> &Rational {
        &self.weight
    }

    /// Global arrival sequence number; breaks every remaining tie in `⊴`.
    pub fn arrival(&self) -> usize {
        self.arrival
    }

    pub fn lifespan(&self) -> Step {
        self.deadline - self.release
    }

    /// Pending at `t` if released and not yet expired (transmission is
    /// tracked by the caller).
    pub fn is_live_at(&self, t: Step) -> bool {
        self.release <= t && t < self.deadline
    }

    /// `self ⊲ other` in the linear order.
    pub fn precedes(&self, other: &Packet) -> bool {
        order_cmp(self, other) == Ordering::Less
    }
}

impl fmt::Debug for Packet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}(r={},d={},w={:?},#{})",
            self.id, self.release, self.deadline, self.weight, self.arrival
        )
    }
}

/// The linear order `⊴`: earlier deadline first, then heavier, then earlier
/// arrival. `Less` means `i` comes before `j`.
pub fn order_cmp(i: &Packet, j: &Packet) -> Ordering {
    i.deadline
        .cmp(&j.deadline)
        .then_with(|| j.weight.cmp(&i.weight))
        .then_with(|| i.arrival.cmp(&j.arrival))
}

/// `r_i < r_j  ⇒  d_i <= d_j` for all pairs.
pub fn is_agreeable(packets: &[Packet]) -> bool {
    let mut by_release: Vec<(Step, Step)> = packets.iter().map(|p| (p.release, p.deadline)).collect();
    by_release.sort_unstable();
    // max deadline over strictly earlier releases must not exceed any later deadline
    let mut earlier_max: Option<Step> = None;
    let mut i = 0;
    while i < by_release.len() {
        let r = by_release[i].0;
        let mut j = i;
        let mut group_max = 0;
        while j < by_release.len() && by_release[j].0 == r {
            if let Some(m) = earlier_max {
                if by_release[j].1 < m {
                    return false;
                }
            }
            group_max = group_max.max(by_release[j].1);
            j += 1;
        }
        earlier_max = Some(earlier_max.map_or(group_max, |m| m.max(group_max)));
        i = j;
    }
    true
}

/// Packets in arrival order with derived horizon and agreeable flag.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Instance {
    packets: Vec<Packet>,
    horizon: Step,
    agreeable: bool,
}

impl Instance {
    /// Builds an instance from packets listed in arrival order. Releases
    /// must be non-decreasing and ids unique; arrival indices are assigned
    /// from list position.
    pub fn new(packets: Vec<Packet>) -> Result<Self> {
        let mut previous = 0;
        let packets: Vec<Packet> = packets
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                if p.release < previous {
                    return Err(Error::OutOfOrderRelease {
                        id: p.id.to_string(),
                        release: p.release,
                        previous,
                    });
                }
                previous = p.release;
                Ok(p.with_arrival(i))
            })
            .collect::<Result<_>>()?;
        let mut ids: Vec<&str> = packets.iter().map(|p| p.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateId(w[0].to_string()));
        }
        let horizon = packets.iter().map(|p| p.deadline - 1).max().unwrap_or(0);
        let agreeable = is_agreeable(&packets);
        Ok(Instance { packets, horizon, agreeable })
    }

    pub fn empty() -> Self {
        Instance { packets: Vec::new(), horizon: 0, agreeable: true }
    }

    pub fn packets(&self) -> &[Packet] {
        &self.packets
    }

    pub fn len(&self) -> usize {
        self.packets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.packets.is_empty()
    }

    /// Last usable step: `max d - 1`, or 0 for an empty instance.
    pub fn horizon(&self) -> Step {
        self.horizon
    }

    pub fn is_agreeable(&self) -> bool {
        self.agreeable
    }

    pub fn first_release(&self) -> Option<Step> {
        self.packets.first().map(|p| p.release)
    }

    /// Packets released exactly at `t`, in arrival order.
    pub fn arrivals_at(&self, t: Step) -> &[Packet] {
        let lo = self.packets.partition_point(|p| p.release < t);
        let hi = self.packets.partition_point(|p| p.release <= t);
        &self.packets[lo..hi]
    }

    /// Packets released strictly after `t`.
    pub fn arrivals_after(&self, t: Step) -> &[Packet] {
        let lo = self.packets.partition_point(|p| p.release <= t);
        &self.packets[lo..]
    }

    pub fn require_agreeable(&self) -> Result<()> {
        if self.agreeable {
            Ok(())
        } else {
            Err(Error::NotAgreeable)
        }
    }
}

/// Injective, feasible assignment of packets to steps, ordered by step.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Schedule {
    slots: Vec<(Step, Packet)>,
}

impl Schedule {
    pub fn new() -> Self {
        Schedule::default()
    }

    /// Checks injectivity (on steps and packets) and `r <= t < d` for
    /// every assignment.
    pub fn from_assignments(mut slots: Vec<(Step, Packet)>) -> Result<Self> {
        slots.sort_by_key(|(t, _)| *t);
        for w in slots.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Malformed(format!("step {} assigned twice", w[0].0)));
            }
        }
        for (t, p) in &slots {
            if !p.is_live_at(*t) {
                return Err(Error::Infeasible(*t));
            }
        }
        let mut arrivals: Vec<(usize, &PacketId)> = slots.iter().map(|(_, p)| (p.arrival, &p.id)).collect();
        arrivals.sort_unstable_by_key(|(a, _)| *a);
        if let Some(w) = arrivals.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Malformed(format!("packet {} scheduled twice", w[0].1)));
        }
        Ok(Schedule { slots })
    }

    pub fn assignments(&self) -> &[(Step, Packet)] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn packets(&self) -> impl Iterator<Item = &Packet> + '_ {
        self.slots.iter().map(|(_, p)| p)
    }

    pub fn packet_at(&self, t: Step) -> Option<&Packet> {
        self.slots
            .binary_search_by_key(&t, |(s, _)| *s)
            .ok()
            .map(|i| &self.slots[i].1)
    }

    pub fn step_of(&self, arrival: usize) -> Option<Step> {
        self.slots.iter().find(|(_, p)| p.arrival == arrival).map(|(t, _)| *t)
    }

    pub fn contains(&self, arrival: usize) -> bool {
        self.slots.iter().any(|(_, p)| p.arrival == arrival)
    }

    pub fn weight(&self) -> Rational {
        self.packets().map(|p| p.weight()).sum()
    }
}

/// Packets pending at `current_step`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Buffer {
    pending: Vec<Packet>,
    current_step: Step,
}

impl Buffer {
    /// An empty buffer positioned just before `first_step`.
    pub fn before(first_step: Step) -> Self {
        Buffer { pending: Vec::new(), current_step: first_step.saturating_sub(1) }
    }

    pub fn pending(&self) -> &[Packet] {
        &self.pending
    }

    pub fn current_step(&self) -> Step {
        self.current_step
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }

    /// Moves to step `t`: drops expired packets (`d <= t`) and adds arrivals.
    pub fn advance(&mut self, t: Step, arrivals: &[Packet]) -> Result<()> {
        if t != self.current_step + 1 {
            return Err(Error::Malformed(format!(
                "buffer at step {} cannot advance to step {}",
                self.current_step, t
            )));
        }
        if let Some(bad) = arrivals.iter().find(|p| p.release != t) {
            return Err(Error::Malformed(format!(
                "packet {} released at {} arrives at step {}",
                bad.id, bad.release, t
            )));
        }
        self.pending.retain(|p| p.deadline > t);
        self.pending.extend(arrivals.iter().cloned());
        self.current_step = t;
        Ok(())
    }

    /// Removes a transmitted packet; returns it if it was pending.
    pub fn transmit(&mut self, arrival: usize) -> Option<Packet> {
        let i = self.pending.iter().position(|p| p.arrival == arrival)?;
        Some(self.pending.remove(i))
    }
}

/// Functional form of [`Buffer::advance`].
pub fn advance_buffer(buf: &Buffer, t: Step, arrivals: &[Packet]) -> Result<Buffer> {
    let mut next = buf.clone();
    next.advance(t, arrivals)?;
    Ok(next)
}

/// Whether the packets fit into distinct steps `t0, t0+1, ...`, each before
/// its deadline. Releases are ignored.
pub fn is_feasible_set(packets: &[Packet], t0: Step) -> bool {
    let mut deadlines: Vec<Step> = packets.iter().map(|p| p.deadline).collect();
    deadlines.sort_unstable();
    deadlines
        .iter()
        .enumerate()
        .all(|(k, &d)| u64::from(d) > u64::from(t0) + k as u64)
}

/// Lays a feasible set out on consecutive steps from `t0` in `⊴` order.
pub fn to_edf_schedule(packets: &[Packet], t0: Step) -> Result<Schedule> {
    let mut sorted: Vec<Packet> = packets.to_vec();
    sorted.sort_by(order_cmp);
    let slots: Vec<(Step, Packet)> = sorted
        .into_iter()
        .enumerate()
        .map(|(k, p)| (t0 + k as Step, p))
        .collect();
    if slots.iter().any(|(t, p)| !p.is_live_at(*t)) {
        return Err(Error::Infeasible(t0));
    }
    Schedule::from_assignments(slots)
}

/// The `⊴`-schedule of a set with releases: at every step from `t0` send
/// the `⊴`-minimal released, unsent packet of the set.
pub fn to_release_edf_schedule(packets: &[Packet], t0: Step) -> Result<Schedule> {
    let mut rest: Vec<Packet> = packets.to_vec();
    rest.sort_by(order_cmp);
    let mut slots = Vec::with_capacity(rest.len());
    let mut t = t0;
    while !rest.is_empty() {
        let next_release = rest.iter().map(|p| p.release).min().unwrap_or(t);
        t = t.max(next_release);
        let i = rest
            .iter()
            .position(|p| p.release <= t)
            .expect("some packet is released by now");
        let p = rest.remove(i);
        if p.deadline <= t {
            return Err(Error::Infeasible(t0));
        }
        slots.push((t, p));
        t += 1;
    }
    Schedule::from_assignments(slots)
}
