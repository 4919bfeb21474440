//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Exhaustive parts are slow (minutes on a single core).

mod common;

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use common::*;
use pktsched::analysis::{
    adversary_search, check_facts, check_facts_with, competitive_ratio, generate, Family, GeneratorSpec,
    TwoBoundedSweep,
};
use pktsched::engine::{run_policy, run_rg_exact, run_rg_exact_with, run_rg_mc, ExactOptions};
use pktsched::model::{order_cmp, Instance, Packet, Schedule, Step};
use pktsched::offline::{oblivious_schedule, opt_schedule};
use pktsched::policies::{at_most_golden, rg_expected_step_gain, Policy, PolicyDecision};
use pktsched::Rational;

const EXAMPLES: usize = 3;

fn menu() -> Vec<Rational> {
    [1, 2, 3, 5, 8].into_iter().map(Rational::from).collect()
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn approx(r: &Rational) -> String {
    format!("{r} (≈ {:.4})", r.to_f64())
}

/// Everything gathered from one pass over a set of instances.
#[derive(Default)]
struct Tally {
    instances: u64,
    lotteries: u64,
    lottery_bad: Vec<String>,
    mg_prime_max: Option<Rational>,
    mg_prime_bad: Vec<String>,
    rg_max: Option<Rational>,
    rg_bad: Vec<String>,
    fact_steps: u64,
    fact_bad: Vec<String>,
    errors: Vec<String>,
}

fn keep(v: &mut Vec<String>, more: Vec<String>) {
    for s in more {
        if v.len() < EXAMPLES {
            v.push(s);
        }
    }
}

fn max_of(a: Option<Rational>, b: Option<Rational>) -> Option<Rational> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl Tally {
    fn merge(mut self, o: Tally) -> Tally {
        self.instances += o.instances;
        self.lotteries += o.lotteries;
        keep(&mut self.lottery_bad, o.lottery_bad);
        self.mg_prime_max = max_of(self.mg_prime_max, o.mg_prime_max);
        keep(&mut self.mg_prime_bad, o.mg_prime_bad);
        self.rg_max = max_of(self.rg_max, o.rg_max);
        keep(&mut self.rg_bad, o.rg_bad);
        self.fact_steps += o.fact_steps;
        keep(&mut self.fact_bad, o.fact_bad);
        keep(&mut self.errors, o.errors);
        self
    }

    fn of(inst: &Instance) -> Tally {
        let mut t = Tally { instances: 1, ..Tally::default() };
        let show = || pktsched::format::instance_to_string(inst).replace('\n', " ");
        if let Err(e) = t.fill(inst) {
            t.errors.push(format!("{e}: {}", show()));
        }
        if !t.lottery_bad.is_empty() || !t.mg_prime_bad.is_empty() || !t.rg_bad.is_empty() || !t.fact_bad.is_empty() {
            let s = show();
            for v in [&mut t.lottery_bad, &mut t.mg_prime_bad, &mut t.rg_bad, &mut t.fact_bad] {
                for m in v.iter_mut() {
                    *m = format!("{m} on {s}");
                }
            }
        }
        t
    }

    fn fill(&mut self, inst: &Instance) -> pktsched::Result<()> {
        let three_quarters = q(3, 4);
        let mut lotteries = 0;
        let mut bad = Vec::new();
        let ex = run_rg_exact_with(inst, ExactOptions::default(), &mut |o, d| {
            if let PolicyDecision::Lottery(_) = d {
                lotteries += 1;
                let (we, wh) = (o.e().unwrap().weight(), o.h().unwrap().weight());
                let g = d.expected_gain();
                if g != rg_expected_step_gain(we, wh) || g < &three_quarters * wh {
                    bad.push(format!("step gain {g} for w_e = {we}, w_h = {wh}"));
                }
            }
        })?;
        self.lotteries += lotteries;
        keep(&mut self.lottery_bad, bad);

        let mg = run_policy(inst, Policy::MgPrime)?;
        if !at_most_golden(&mg.ratio) {
            self.mg_prime_bad.push(format!("MG′ ratio {}", mg.ratio));
        }
        self.mg_prime_max = Some(mg.ratio);

        let rg = if ex.expected_gain.is_positive() { &mg.opt_value / &ex.expected_gain } else { Rational::one() };
        if rg > q(4, 3) {
            self.rg_bad.push(format!("RG ratio {rg}"));
        }
        self.rg_max = Some(rg);

        let facts = check_facts(inst)?;
        self.fact_steps += facts.steps.len() as u64;
        keep(&mut self.fact_bad, facts.failures().map(|(t, c, w)| format!("step {t} {c}: {w}")).collect());
        Ok(())
    }

    fn line_errors(&self) -> String {
        self.errors.first().map(|e| format!("; error: {e}")).unwrap_or_default()
    }
}

fn sweep() -> Tally {
    TwoBoundedSweep::new(4, 2, &menu())
        .par_bridge()
        .map(|inst| Tally::of(&inst))
        .reduce(Tally::default, Tally::merge)
}

fn random_suite() -> Vec<Instance> {
    let weights = vec![q(1, 1), q(3, 2), q(2, 1), q(3, 1), q(5, 1), q(8, 1)];
    (0..1000)
        .map(|seed| {
            let mut spec = GeneratorSpec::new(Family::AgreeableRandom, seed);
            spec.steps = 6;
            spec.per_step = 3;
            spec.max_lifespan = 4;
            spec.max_packets = Some(10);
            spec.weights = weights.clone();
            generate(&spec).expect("generator spec is valid")
        })
        .collect()
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

fn lottery_grid() -> (u64, Vec<String>) {
    let mut bad = Vec::new();
    let mut n = 0;
    for j in 1..=100 {
        let wh = q(j, 13);
        for i in 1..=100 {
            let we = &wh * &q(i, 100);
            let g = rg_expected_step_gain(&we, &wh);
            let direct = &(&we / &wh) * &we + &(Rational::one() - &we / &wh) * &wh;
            n += 1;
            if g != direct || g < &q(3, 4) * &wh {
                bad.push(format!("w_e = {we}, w_h = {wh}: {g}"));
            }
        }
    }
    (n, bad)
}

fn criterion_1(sweep: &Tally, random: &Tally) -> Outcome {
    let (grid, mut grid_bad) = lottery_grid();
    grid_bad.truncate(EXAMPLES);
    let bad: Vec<&String> = sweep.lottery_bad.iter().chain(&random.lottery_bad).chain(&grid_bad).collect();
    let pass = bad.is_empty() && sweep.errors.is_empty() && random.errors.is_empty();
    Outcome::new(
        pass,
        format!(
            "RG step gain = (w_e²−w_e·w_h+w_h²)/w_h ≥ ¾·w_h on {} lotteries from runs and {grid} grid pairs{}{}{}",
            sweep.lotteries + random.lotteries,
            bad.iter().map(|s| format!("; {s}")).collect::<String>(),
            sweep.line_errors(),
            random.line_errors()
        ),
    )
}

fn criterion_2(sweep: &Tally) -> Outcome {
    let max = sweep.mg_prime_max.clone().unwrap_or_else(Rational::one);
    Outcome::new(
        sweep.mg_prime_bad.is_empty() && sweep.errors.is_empty() && at_most_golden(&max),
        format!(
            "MG′ ratio ≤ φ on {} 2-bounded instances, max {}{}{}",
            sweep.instances,
            approx(&max),
            sweep.mg_prime_bad.iter().map(|s| format!("; {s}")).collect::<String>(),
            sweep.line_errors()
        ),
    )
}

fn criterion_3(sweep: &Tally, random: &Tally) -> Outcome {
    let max = max_of(sweep.rg_max.clone(), random.rg_max.clone()).unwrap_or_else(Rational::one);
    let bad: Vec<&String> = sweep.rg_bad.iter().chain(&random.rg_bad).collect();
    Outcome::new(
        bad.is_empty() && sweep.errors.is_empty() && random.errors.is_empty() && max <= q(4, 3),
        format!(
            "RG ratio ≤ 4/3 on {} 2-bounded and {} agreeable random instances, max {}{}{}{}",
            sweep.instances,
            random.instances,
            approx(&max),
            bad.iter().map(|s| format!("; {s}")).collect::<String>(),
            sweep.line_errors(),
            random.line_errors()
        ),
    )
}

fn random_packets(rng: &mut ChaCha8Rng, max: usize, releases: std::ops::RangeInclusive<Step>) -> Instance {
    let n = rng.gen_range(0..=max);
    let mut raw: Vec<(Step, Step, Rational)> = (0..n)
        .map(|_| {
            let r = rng.gen_range(releases.clone());
            let life = rng.gen_range(1..=4);
            (r, r + life, q(rng.gen_range(1..=12), rng.gen_range(1..=3)))
        })
        .collect();
    raw.sort_by_key(|p| p.0);
    let ps = raw.into_iter().enumerate().map(|(i, (r, d, w))| pk(&format!("p{i}"), r, d, w)).collect();
    Instance::new(ps).expect("releases are sorted")
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = Vec::new();
    for _ in 0..1000 {
        let inst = random_packets(&mut rng, 8, 1..=5);
        let t0 = inst.first_release().unwrap_or(1);
        let (sched, v) = opt_schedule(inst.packets(), t0);
        let brute = brute_opt(inst.packets(), t0);
        if v != brute || sched.weight() != v {
            bad.push(format!("matching {v}, brute force {brute}"));
        }
    }
    Outcome::new(bad.is_empty(), format!("offline optimum equals brute force on 1000 instances of ≤ 8 packets{}", first(&bad)))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut bad = Vec::new();
    for _ in 0..1000 {
        let t: Step = rng.gen_range(1..=4);
        let inst = random_packets(&mut rng, 8, 1..=t);
        let pending: Vec<Packet> = inst.packets().iter().filter(|p| p.is_live_at(t)).cloned().collect();
        let o = oblivious_schedule(&pending, t);
        let (_, best) = opt_schedule(&pending, t);
        let sorted = o.packets().windows(2).all(|w| order_cmp(&w[0], &w[1]).is_lt());
        let laid_out = o.packets().iter().enumerate().all(|(k, p)| p.deadline() > t + k as Step);
        let slots: Vec<(Step, Packet)> =
            o.packets().iter().enumerate().map(|(k, p)| (t + k as Step, p.clone())).collect();
        let feasible = Schedule::from_assignments(slots).is_ok();
        if o.weight() != best || o.weight() != brute_oblivious_weight(&pending, t) || !sorted || !laid_out || !feasible {
            bad.push(format!(
                "step {t}: weight {} vs matching {best}, sorted {sorted}, feasible {}",
                o.weight(),
                laid_out && feasible
            ));
        }
    }
    Outcome::new(
        bad.is_empty(),
        format!("O_t has maximum weight, is ⊴-sorted and feasible on 1000 pending sets{}", first(&bad)),
    )
}

fn criterion_6(sweep: &Tally, random: &Tally, suite: &[Instance]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut trials = 0;
    let mut missed = Vec::new();
    let mut errors = Vec::new();
    for inst in suite.iter().filter(|i| !i.is_empty()).cycle().take(100) {
        let steps = match check_facts(inst) {
            Ok(r) => r.steps.len(),
            Err(e) => {
                errors.push(e.to_string());
                continue;
            }
        };
        let target = rng.gen_range(0..steps);
        let salt: usize = rng.gen();
        let mut calls = 0;
        let rep = check_facts_with(inst, &mut |o| {
            let k = calls;
            calls += 1;
            if k == target && !o.is_empty() {
                let pos = salt % o.len();
                o.with_packet_dropped(pos)
            } else {
                o
            }
        });
        trials += 1;
        match rep {
            Ok(r) if r.all_pass() => missed.push(format!("seeded defect at step index {target} went unnoticed")),
            Ok(_) => {}
            Err(e) => errors.push(e.to_string()),
        }
    }
    let bad: Vec<&String> = sweep.fact_bad.iter().chain(&random.fact_bad).collect();
    let pass = bad.is_empty() && missed.is_empty() && errors.is_empty() && sweep.errors.is_empty() && random.errors.is_empty();
    Outcome::new(
        pass,
        format!(
            "structural checks pass at {} steps; {}/{trials} seeded defects detected{}{}{}",
            sweep.fact_steps + random.fact_steps,
            trials - missed.len(),
            bad.iter().map(|s| format!("; {s}")).collect::<String>(),
            first(&missed),
            first(&errors)
        ),
    )
}

fn criterion_7() -> Outcome {
    let inst = three_packet();
    let opt = opt_schedule(inst.packets(), 1).1;
    let oracle_opt = brute_opt(inst.packets(), 1);
    let e = run_rg_exact(&inst).map(|x| x.expected_gain);
    let oracle_e = oracle_rg(&inst);
    let ratio = competitive_ratio(&inst, Policy::Rg);
    let pass = opt == Rational::from(4)
        && oracle_opt == opt
        && e.as_ref() == Ok(&q(7, 2))
        && oracle_e == q(7, 2)
        && ratio.as_ref() == Ok(&q(8, 7));
    Outcome::new(
        pass,
        format!(
            "three-packet instance: OPT {opt} (oracle {oracle_opt}), E[RG] {} (oracle {oracle_e}), ratio {}",
            e.map_or_else(|x| x.to_string(), |v| v.to_string()),
            ratio.map_or_else(|x| x.to_string(), |v| v.to_string())
        ),
    )
}

fn criterion_8() -> Outcome {
    let mg = adversary_search(Policy::MgPrime, 4, &menu(), 2);
    let rg = adversary_search(Policy::Rg, 4, &menu(), 2);
    match (mg, rg) {
        (Ok(mg), Ok(rg)) => {
            let pass = mg.ratio >= q(8, 7) && rg.ratio > Rational::one() && rg.ratio <= q(4, 3);
            Outcome::new(
                pass,
                format!(
                    "depth-4 search: MG′ {} ({} nodes{}), RG {} ({} nodes{})",
                    approx(&mg.ratio),
                    mg.nodes,
                    if mg.complete { "" } else { ", partial" },
                    approx(&rg.ratio),
                    rg.nodes,
                    if rg.complete { "" } else { ", partial" },
                ),
            )
        }
        (a, b) => Outcome::new(false, format!("search failed: {:?} / {:?}", a.err(), b.err())),
    }
}

fn criterion_9() -> Outcome {
    let inst = three_packet();
    let (a, b) = match (run_rg_mc(&inst, 100_000, 2024), run_rg_mc(&inst, 100_000, 2024)) {
        (Ok(a), Ok(b)) => (a, b),
        (a, b) => return Outcome::new(false, format!("Monte Carlo failed: {:?} / {:?}", a.err(), b.err())),
    };
    let dev = (a.mean.to_f64() - 3.5).abs();
    let same = a.mean == b.mean && a.stderr.to_bits() == b.stderr.to_bits();
    Outcome::new(
        dev <= 4.0 * a.stderr && same,
        format!(
            "10^5 trials: mean {:.5}, |mean − 3.5| = {dev:.5} vs 4·stderr = {:.5}, rerun identical: {same}",
            a.mean.to_f64(),
            4.0 * a.stderr
        ),
    )
}

fn first(v: &[String]) -> String {
    v.first().map(|s| format!("; {s}")).unwrap_or_default()
}

fn main() -> ExitCode {
    let timed = |name: &str, f: &mut dyn FnMut() -> Tally| {
        let start = Instant::now();
        let t = f();
        eprintln!("{name}: {} instances in {:.1?}", t.instances, start.elapsed());
        t
    };
    let suite = random_suite();
    let random = timed("random suite", &mut || {
        suite.par_iter().map(Tally::of).reduce(Tally::default, Tally::merge)
    });
    let sweep = timed("2-bounded sweep", &mut sweep);
    let mut results: Vec<(u32, Outcome)> = Vec::new();
    let mut record = |n: u32, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        eprintln!("criterion {n} took {:.1?}", start.elapsed());
        results.push((n, o));
    };
    record(1, &mut || criterion_1(&sweep, &random));
    record(2, &mut || criterion_2(&sweep));
    record(3, &mut || criterion_3(&sweep, &random));
    record(4, &mut criterion_4);
    record(5, &mut criterion_5);
    record(6, &mut || criterion_6(&sweep, &random, &suite));
    record(7, &mut criterion_7);
    record(8, &mut criterion_8);
    record(9, &mut criterion_9);

    let mut failed = 0;
    for (n, o) in &results {
        println!("criterion {n}: {}  {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
