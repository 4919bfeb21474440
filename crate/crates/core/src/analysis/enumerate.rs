//! Exhaustive enumeration of small 2-bounded instances.
//!
//! Each step releases a multiset of at most `per_step` packets, each a
//! (weight, lifespan) pair with lifespan 1 or 2. Within a step the order of
//! equal-release packets is fixed canonically, and instances are normalised
//! to start at step 1 and to release something at their last step, so no
//! two enumerated instances are translates or reorderings of one another.

use crate::model::{Instance, Packet, Step};
use crate::rational::Rational;

/// Every multiset of size `0..=max` over `0..kinds`, each as a
/// non-decreasing index list, in order of size then lexicographically.
pub fn multisets(kinds: usize, max: usize) -> Vec<Vec<usize>> {
    fn extend(kinds: usize, size: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for k in from..kinds {
            cur.push(k);
            extend(kinds, size, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for size in 0..=max {
        extend(kinds, size, 0, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Clone, Debug)]
pub struct TwoBoundedSweep {
    /// (weight, lifespan) of each packet kind.
    kinds: Vec<(Rational, Step)>,
    /// Per-step release options; index 0 is the empty step.
    options: Vec<Vec<usize>>,
    max_steps: usize,
    digits: Vec<usize>,
}

impl TwoBoundedSweep {
    pub fn new(max_steps: usize, per_step: usize, menu: &[Rational]) -> Self {
        let kinds: Vec<(Rational, Step)> =
            menu.iter().flat_map(|w| [(w.clone(), 1), (w.clone(), 2)]).collect();
        let options = multisets(kinds.len(), per_step);
        let digits = if max_steps == 0 || options.len() < 2 { Vec::new() } else { vec![1] };
        TwoBoundedSweep { kinds, options, max_steps, digits }
    }

    /// Total number of instances the sweep yields.
    pub fn total(&self) -> u64 {
        let all = self.options.len() as u64;
        let nonempty = all.saturating_sub(1);
        (1..=self.max_steps)
            .map(|s| if s == 1 { nonempty } else { nonempty * nonempty * all.pow(s as u32 - 2) })
            .sum()
    }

    fn build(&self) -> Instance {
        let mut packets = Vec::new();
        for (i, &opt) in self.digits.iter().enumerate() {
            let t = i as Step + 1;
            for &k in &self.options[opt] {
                let (w, life) = &self.kinds[k];
                let p = Packet::new(format!("p{}", packets.len() + 1), t, t + life, w.clone())
                    .expect("enumerated packets are valid");
                packets.push(p);
            }
        }
        Instance::new(packets).expect("enumerated instances are valid")
    }

    fn advance(&mut self) {
        let n = self.options.len();
        let len = self.digits.len();
        // odometer, last step fastest; first and last digits skip the empty option
        for i in (0..len).rev() {
            let lo = if i == 0 || i == len - 1 { 1 } else { 0 };
            if self.digits[i] + 1 < n {
                self.digits[i] += 1;
                return;
            }
            self.digits[i] = lo;
        }
        if len < self.max_steps {
            self.digits = vec![0; len + 1];
            self.digits[0] = 1;
            self.digits[len] = 1;
        } else {
            self.digits.clear();
        }
    }
}

impl Iterator for TwoBoundedSweep {
    type Item = Instance;

    fn next(&mut self) -> Option<Instance> {
        if self.digits.is_empty() {
            return None;
        }
        let inst = self.build();
        self.advance();
        Some(inst)
    }
}
