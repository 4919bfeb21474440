use crate::model::{Packet, Schedule, Step};
use crate::rational::Rational;

use super::matching::min_cost_assignment;

/// Bipartite graph of packets against steps `first_step..=last_step`; packet
/// `j` is adjacent to every step `t` in that range with `r_j <= t < d_j`,
/// by an edge of weight `w_j`.
#[derive(Clone, Copy, Debug)]
pub struct SchedulabilityGraph<'a> {
    packets: &'a [Packet],
    first_step: Step,
    last_step: Step,
}

impl<'a> SchedulabilityGraph<'a> {
    pub fn packets(&self) -> &'a [Packet] {
        self.packets
    }

    pub fn steps(&self) -> std::ops::RangeInclusive<Step> {
        self.first_step..=self.last_step
    }

    /// Steps adjacent to the packet at `index`, ascending.
    pub fn neighbors(&self, index: usize) -> std::ops::Range<Step> {
        let p = &self.packets[index];
        let lo = p.release().max(self.first_step);
        let hi = p.deadline().min(self.last_step.saturating_add(1));
        if lo >= hi {
            lo..lo
        } else {
            lo..hi
        }
    }

    pub fn has_edge(&self, index: usize, t: Step) -> bool {
        self.neighbors(index).contains(&t)
    }

    /// `(packet index, step, weight)` triples.
    pub fn edges(&self) -> impl Iterator<Item = (usize, Step, &Rational)> + '_ {
        (0..self.packets.len()).flat_map(move |i| {
            self.neighbors(i).map(move |t| (i, t, self.packets[i].weight()))
        })
    }

    /// Maximum-weight matching (unmatched nodes allowed) as a schedule.
    pub fn max_weight_matching(&self) -> (Schedule, Rational) {
        let n = self.packets.len();
        if n == 0 || self.first_step > self.last_step {
            return (Schedule::new(), Rational::zero());
        }
        let steps = (self.last_step - self.first_step + 1) as usize;
        // Non-edges cost 0, the same as leaving a packet out, so any optimal
        // assignment restricted to real edges is a maximum-weight matching.
        // Extra zero columns keep rows <= columns.
        let cols = steps.max(n);
        let assignment = match scaled_weights(self.packets) {
            Some(ws) => min_cost_assignment(&self.costs(steps, cols, |i| -ws[i])),
            None => min_cost_assignment(&self.costs(steps, cols, |i| -self.packets[i].weight())),
        };
        let slots: Vec<(Step, Packet)> = assignment
            .into_iter()
            .enumerate()
            .filter_map(|(i, c)| {
                let t = self.first_step + c as Step;
                (c < steps && self.has_edge(i, t)).then(|| (t, self.packets[i].clone()))
            })
            .collect();
        let schedule = Schedule::from_assignments(slots).expect("matching edges are feasible");
        let value = schedule.weight();
        (schedule, value)
    }
}

impl SchedulabilityGraph<'_> {
    fn costs<T: Clone + Default>(&self, steps: usize, cols: usize, neg_weight: impl Fn(usize) -> T) -> Vec<Vec<T>> {
        (0..self.packets.len())
            .map(|i| {
                let window = self.neighbors(i);
                let neg = neg_weight(i);
                (0..cols)
                    .map(|c| {
                        let t = self.first_step + c as Step;
                        if c < steps && window.contains(&t) {
                            neg.clone()
                        } else {
                            T::default()
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Weights scaled by their common denominator to integers, when every value
/// stays far enough below `i128` limits that no sum of potentials can
/// overflow.
fn scaled_weights(packets: &[Packet]) -> Option<Vec<i128>> {
    const LIMIT: i128 = 1 << 80;
    let small: Vec<(i64, i64)> = packets.iter().map(|p| p.weight().to_small()).collect::<Option<_>>()?;
    let mut lcm: i128 = 1;
    for &(_, d) in &small {
        let d = i128::from(d);
        lcm = lcm.checked_mul(d / gcd(lcm, d))?;
        if lcm > LIMIT {
            return None;
        }
    }
    small
        .iter()
        .map(|&(n, d)| {
            let w = i128::from(n).checked_mul(lcm / i128::from(d))?;
            (w <= LIMIT).then_some(w)
        })
        .collect()
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn build_graph(packets: &[Packet], t0: Step, t1: Step) -> SchedulabilityGraph<'_> {
    SchedulabilityGraph { packets, first_step: t0, last_step: t1 }
}

/// Optimal offline schedule of `packets` using steps from `t0` on. Packets
/// are told apart by arrival index, so those must be distinct.
pub fn opt_schedule(packets: &[Packet], t0: Step) -> (Schedule, Rational) {
    let last = packets.iter().map(|p| p.deadline() - 1).max().unwrap_or(0);
    if last < t0 {
        return (Schedule::new(), Rational::zero());
    }
    build_graph(packets, t0, last).max_weight_matching()
}
