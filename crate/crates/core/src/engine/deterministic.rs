use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Buffer, Instance, Packet, PacketId, Step};
use crate::offline::{oblivious_schedule, opt_schedule, select_e_h, ObliviousSchedule};
use crate::policies::Policy;
use crate::rational::Rational;

use super::gain_ratio;

/// One non-idle step of a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: Step,
    /// `O_t` in `⊴` order.
    pub oblivious: Vec<PacketId>,
    pub dominated: Vec<PacketId>,
    pub e: PacketId,
    pub h: PacketId,
    pub transmitted: PacketId,
    pub gain: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub policy: String,
    pub per_step: Vec<StepRecord>,
    pub total_gain: Rational,
    pub opt_value: Rational,
    /// `opt_value / total_gain`; 1 when the optimum is empty.
    pub ratio: Rational,
}

/// Drives the step loop, asking `choose` for the packet to send whenever the
/// buffer is nonempty. The chosen packet must belong to `O_t`.
pub fn simulate<F>(inst: &Instance, mut choose: F) -> Result<(Vec<StepRecord>, Rational)>
where
    F: FnMut(&ObliviousSchedule) -> Result<Packet>,
{
    let mut records = Vec::new();
    let mut total = Rational::zero();
    let Some(first) = inst.first_release() else {
        return Ok((records, total));
    };
    let mut buffer = Buffer::before(first);
    let mut t = first;
    while t <= inst.horizon() {
        if buffer.is_empty() {
            // nothing pending: jump straight to the next arrival
            match inst.arrivals_after(t - 1).first() {
                Some(p) => {
                    t = p.release();
                    buffer = Buffer::before(t);
                }
                None => break,
            }
        }
        buffer.advance(t, inst.arrivals_at(t))?;
        if !buffer.is_empty() {
            let o = oblivious_schedule(buffer.pending(), t);
            let (e, h) = select_e_h(&o)?;
            let sent = choose(&o)?;
            if !o.contains(sent.arrival()) {
                return Err(Error::Invariant(format!(
                    "step {t}: transmitted {} is not in O_t",
                    sent.id()
                )));
            }
            buffer.transmit(sent.arrival());
            total = &total + sent.weight();
            records.push(StepRecord {
                step: t,
                oblivious: o.packets().iter().map(|p| p.id().clone()).collect(),
                dominated: o.dominated().iter().map(|p| p.id().clone()).collect(),
                e: e.id().clone(),
                h: h.id().clone(),
                transmitted: sent.id().clone(),
                gain: sent.weight().clone(),
            });
        }
        t += 1;
    }
    Ok((records, total))
}

/// Runs a deterministic policy and compares it to the offline optimum.
pub fn run_policy(inst: &Instance, policy: Policy) -> Result<RunReport> {
    if !policy.is_deterministic() {
        return Err(Error::NotDeterministic(policy.name().to_string()));
    }
    let (per_step, total_gain) = simulate(inst, |o| policy.choose(o))?;
    let (_, opt_value) = opt_schedule(inst.packets(), inst.first_release().unwrap_or(1));
    if total_gain > opt_value {
        return Err(Error::Invariant(format!(
            "{policy} gained {total_gain} above the optimum {opt_value}"
        )));
    }
    let ratio = gain_ratio(&opt_value, &total_gain)?;
    Ok(RunReport { policy: policy.name().to_string(), per_step, total_gain, opt_value, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pk(id: &str, r: Step, d: Step, w: i64) -> Packet {
        Packet::new(id, r, d, Rational::from(w)).unwrap()
    }

    fn three() -> Instance {
        Instance::new(vec![pk("a", 1, 2, 1), pk("b", 1, 3, 2), pk("c", 2, 3, 2)]).unwrap()
    }

    #[test]
    fn mg_prime_on_three_packets() {
        let r = run_policy(&three(), Policy::MgPrime).unwrap();
        let sent: Vec<&str> = r.per_step.iter().map(|s| s.transmitted.as_str()).collect();
        assert_eq!(sent, vec!["b", "c"]);
        assert_eq!(r.total_gain, Rational::from(4));
        assert_eq!(r.opt_value, Rational::from(4));
        assert_eq!(r.ratio, Rational::one());
    }

    #[test]
    fn single_packet_any_policy() {
        let inst = Instance::new(vec![pk("x", 1, 2, 5)]).unwrap();
        for p in Policy::ALL.into_iter().filter(|p| p.is_deterministic()) {
            let r = run_policy(&inst, p).unwrap();
            assert_eq!(r.total_gain, Rational::from(5));
            assert_eq!(r.ratio, Rational::one());
        }
    }

    #[test]
    fn empty_instance() {
        let r = run_policy(&Instance::empty(), Policy::Mg).unwrap();
        assert_eq!(r.total_gain, Rational::zero());
        assert_eq!(r.opt_value, Rational::zero());
        assert_eq!(r.ratio, Rational::one());
    }

    #[test]
    fn rg_is_rejected() {
        assert_eq!(run_policy(&three(), Policy::Rg), Err(Error::NotDeterministic("rg".into())));
    }

    #[test]
    fn idle_gap_is_skipped() {
        let inst = Instance::new(vec![pk("a", 1, 2, 1), pk("b", 7, 9, 3)]).unwrap();
        let r = run_policy(&inst, Policy::EdfNondominated).unwrap();
        assert_eq!(r.per_step.iter().map(|s| s.step).collect::<Vec<_>>(), vec![1, 7]);
        assert_eq!(r.total_gain, Rational::from(4));
    }

    #[test]
    fn chooser_outside_oblivious_is_caught() {
        let inst = Instance::new(vec![pk("a", 1, 2, 1), pk("b", 1, 2, 5)]).unwrap();
        let res = simulate(&inst, |o| Ok(o.dominated()[0].clone()));
        assert!(matches!(res, Err(Error::Invariant(_))));
    }
}
