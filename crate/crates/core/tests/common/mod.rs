//! Brute-force oracles written without the library's offline or engine code.
#![allow(dead_code)]

use pktsched::model::{order_cmp, Instance, Packet, Step};
use pktsched::Rational;

pub fn pk(id: &str, r: Step, d: Step, w: Rational) -> Packet {
    Packet::new(id, r, d, w).unwrap()
}

pub fn pki(id: &str, r: Step, d: Step, w: i64) -> Packet {
    pk(id, r, d, Rational::from(w))
}

pub fn three_packet() -> Instance {
    Instance::new(vec![pki("a", 1, 2, 1), pki("b", 1, 3, 2), pki("c", 2, 3, 2)]).unwrap()
}

/// Best weight over every injective assignment of packets to steps
/// `t >= t0` with `r <= t < d`, each packet optionally left out.
pub fn brute_opt(packets: &[Packet], t0: Step) -> Rational {
    fn go(ps: &[Packet], t0: Step, used: &mut Vec<Step>) -> Rational {
        let Some((p, rest)) = ps.split_first() else {
            return Rational::zero();
        };
        let mut best = go(rest, t0, used);
        for t in p.release().max(t0)..p.deadline() {
            if !used.contains(&t) {
                used.push(t);
                let v = p.weight() + &go(rest, t0, used);
                used.pop();
                if v > best {
                    best = v;
                }
            }
        }
        best
    }
    go(packets, t0, &mut Vec::new())
}

/// Every packet is already released: feasible from `t` iff sending in
/// deadline order meets every deadline.
fn fits_from(set: &[&Packet], t: Step) -> bool {
    let mut ds: Vec<Step> = set.iter().map(|p| p.deadline()).collect();
    ds.sort_unstable();
    ds.iter().enumerate().all(|(k, &d)| d > t + k as Step)
}

/// The oblivious schedule by exhaustion: among maximum-weight feasible
/// subsets of `pending`, the one whose members rank earliest when packets
/// are ranked by weight (descending) and then `⊴`. Returned in `⊴` order.
pub fn brute_oblivious(pending: &[Packet], t: Step) -> Vec<Packet> {
    let mut ranked: Vec<&Packet> = pending.iter().collect();
    ranked.sort_by(|a, b| b.weight().cmp(a.weight()).then_with(|| order_cmp(a, b)));
    let n = ranked.len();
    assert!(n <= 16, "oracle is exponential");
    let mut best: Option<(Rational, Vec<usize>)> = None;
    for mask in 0u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let set: Vec<&Packet> = members.iter().map(|&i| ranked[i]).collect();
        if !fits_from(&set, t) {
            continue;
        }
        let w: Rational = set.iter().map(|p| p.weight().clone()).sum();
        let better = match &best {
            None => true,
            Some((bw, bm)) => w > *bw || (w == *bw && members < *bm),
        };
        if better {
            best = Some((w, members));
        }
    }
    let (_, members) = best.expect("the empty set is feasible");
    let mut out: Vec<Packet> = members.into_iter().map(|i| ranked[i].clone()).collect();
    out.sort_by(order_cmp);
    out
}

pub fn brute_oblivious_weight(pending: &[Packet], t: Step) -> Rational {
    brute_oblivious(pending, t).iter().map(|p| p.weight().clone()).sum()
}

/// `(e, h)` of an oblivious schedule in `⊴` order.
pub fn e_h(o: &[Packet]) -> (Packet, Packet) {
    let e = o[0].clone();
    let top = o.iter().map(|p| p.weight()).max().unwrap();
    let h = o.iter().find(|p| p.weight() == top).unwrap().clone();
    (e, h)
}

fn pending_at(inst: &Instance, t: Step, sent: &[usize]) -> Vec<Packet> {
    inst.packets()
        .iter()
        .filter(|p| p.release() <= t && t < p.deadline() && !sent.contains(&p.arrival()))
        .cloned()
        .collect()
}

/// Exact RG expectation by plain branching over every lottery.
pub fn oracle_rg(inst: &Instance) -> Rational {
    fn go(inst: &Instance, t: Step, sent: &mut Vec<usize>) -> Rational {
        if t > inst.horizon() {
            return Rational::zero();
        }
        let pending = pending_at(inst, t, sent);
        if pending.is_empty() {
            return go(inst, t + 1, sent);
        }
        let o = brute_oblivious(&pending, t);
        let (e, h) = e_h(&o);
        let branch = |p: &Packet, prob: Rational, sent: &mut Vec<usize>| {
            sent.push(p.arrival());
            let v = &prob * &(p.weight() + &go(inst, t + 1, sent));
            sent.pop();
            v
        };
        if e.arrival() == h.arrival() {
            return branch(&e, Rational::one(), sent);
        }
        let pe = e.weight() / h.weight();
        let ph = Rational::one() - &pe;
        branch(&e, pe, sent) + branch(&h, ph, sent)
    }
    go(inst, 1, &mut Vec::new())
}

/// MG′ total gain by direct simulation: send `e` when `φ·w_e >= w_h`
/// (tested as `w_h² <= w_h·w_e + w_e²`), otherwise `h`.
pub fn oracle_mg_prime(inst: &Instance) -> Rational {
    let mut sent = Vec::new();
    let mut gain = Rational::zero();
    for t in 1..=inst.horizon() {
        let pending = pending_at(inst, t, &sent);
        if pending.is_empty() {
            continue;
        }
        let (e, h) = e_h(&brute_oblivious(&pending, t));
        let (we, wh) = (e.weight(), h.weight());
        let pick = if wh * wh <= &(wh * we) + &(we * we) { e } else { h };
        gain = &gain + pick.weight();
        sent.push(pick.arrival());
    }
    gain
}
