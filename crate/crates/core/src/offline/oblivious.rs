use crate::error::{Error, Result};
use crate::model::{order_cmp, Packet, Schedule, Step};
use crate::rational::Rational;

/// The canonical oblivious schedule `O_t`: an optimal feasible
/// `⊴`-schedule over the packets pending at `t`, laid out on consecutive
/// steps `t, t+1, ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObliviousSchedule {
    step: Step,
    order: Vec<Packet>,
    dominated: Vec<Packet>,
}

impl ObliviousSchedule {
    pub fn step(&self) -> Step {
        self.step
    }

    /// Non-dominated packets in `⊴` order; `packets()[k]` is sent at `step + k`.
    pub fn packets(&self) -> &[Packet] {
        &self.order
    }

    pub fn dominated(&self) -> &[Packet] {
        &self.dominated
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn contains(&self, arrival: usize) -> bool {
        self.order.iter().any(|p| p.arrival() == arrival)
    }

    pub fn position(&self, arrival: usize) -> Option<usize> {
        self.order.iter().position(|p| p.arrival() == arrival)
    }

    /// `O_t(t)`, the `⊴`-minimal non-dominated packet.
    pub fn e(&self) -> Option<&Packet> {
        self.order.first()
    }

    /// The `⊴`-minimal packet among the heaviest non-dominated ones.
    pub fn h(&self) -> Option<&Packet> {
        let max = self.order.iter().map(|p| p.weight()).max()?;
        self.order.iter().find(|p| p.weight() == max)
    }

    pub fn weight(&self) -> Rational {
        self.order.iter().map(|p| p.weight()).sum()
    }

    pub fn packet_at(&self, t: Step) -> Option<&Packet> {
        t.checked_sub(self.step).and_then(|k| self.order.get(k as usize))
    }

    pub fn schedule(&self) -> Schedule {
        Schedule::from_assignments(
            self.order
                .iter()
                .enumerate()
                .map(|(k, p)| (self.step + k as Step, p.clone()))
                .collect(),
        )
        .expect("oblivious schedule is feasible")
    }

    /// Copy with the packet at `position` demoted to dominated. Only meant
    /// for mutation testing of the fact checkers.
    pub fn with_packet_dropped(&self, position: usize) -> ObliviousSchedule {
        let mut out = self.clone();
        let p = out.order.remove(position);
        out.dominated.push(p);
        out
    }
}

/// Computes `O_t`: keep packets greedily by weight (descending, ties by `⊴`)
/// while the kept set stays feasible from `t`, then order the kept set by `⊴`.
pub fn oblivious_schedule(pending: &[Packet], t: Step) -> ObliviousSchedule {
    let mut candidates: Vec<&Packet> = pending.iter().collect();
    candidates.sort_by(|a, b| b.weight().cmp(a.weight()).then_with(|| order_cmp(a, b)));

    // kept deadlines, ascending; position k sits at step t + k
    let mut kept_deadlines: Vec<Step> = Vec::with_capacity(pending.len());
    let mut kept: Vec<Packet> = Vec::with_capacity(pending.len());
    let mut dominated = Vec::new();
    for p in candidates {
        let d = p.deadline();
        let pos = kept_deadlines.partition_point(|&x| x <= d);
        let fits = u64::from(d) > u64::from(t) + pos as u64
            && kept_deadlines[pos..]
                .iter()
                .enumerate()
                .all(|(k, &x)| u64::from(x) > u64::from(t) + (pos + k + 1) as u64);
        if fits {
            kept_deadlines.insert(pos, d);
            kept.push(p.clone());
        } else {
            dominated.push(p.clone());
        }
    }
    kept.sort_by(order_cmp);
    dominated.sort_by(order_cmp);
    ObliviousSchedule { step: t, order: kept, dominated }
}

/// `(e, h)` of a nonempty oblivious schedule.
pub fn select_e_h(o: &ObliviousSchedule) -> Result<(&Packet, &Packet)> {
    match (o.e(), o.h()) {
        (Some(e), Some(h)) => Ok((e, h)),
        _ => Err(Error::EmptyOblivious),
    }
}
