//! `pktsched` command-line workbench.
//!
//! Exit status: 0 on success, 1 on bad input or usage, 2 when an internal
//! invariant or a structural fact check fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use pktsched::analysis::{
    adversary_search_with, check_facts, generate, Family, GeneratorSpec, SearchOptions,
    DEFAULT_NODE_CAP,
};
use pktsched::engine::{
    gain_ratio, run_policy, run_rg_exact_with, run_rg_mc, ExactOptions, DEFAULT_EXACT_CAP,
};
use pktsched::format::{self, FormatError};
use pktsched::offline::opt_schedule;
use pktsched::{Error, Instance, Policy, Rational};

#[derive(Parser)]
#[command(name = "pktsched", version, about = "Online packet scheduling with agreeable deadlines")]
struct Cli {
    /// Worker threads for parallel work (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a policy on an instance.
    Run {
        #[arg(long, value_parser = parse_policy)]
        policy: Policy,
        #[arg(long)]
        instance: PathBuf,
        /// Monte Carlo trials (rg only; without it rg is evaluated exactly).
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write a JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Optimal offline schedule.
    Opt {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Competitive ratio OPT / gain on one instance.
    Ratio {
        #[arg(long, value_parser = parse_policy)]
        policy: Policy,
        #[arg(long)]
        instance: PathBuf,
    },
    /// Exact expected gain of rg.
    Expected {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Generate a random instance.
    Gen(GenArgs),
    /// Search 2-bounded injection sequences for a bad ratio.
    Search {
        #[arg(long, value_parser = parse_policy)]
        policy: Policy,
        #[arg(long)]
        depth: usize,
        /// Comma-separated weights, e.g. 1,2,3/2.
        #[arg(long, value_parser = parse_menu)]
        menu: Menu,
        /// Most packets injected per step.
        #[arg(long, default_value_t = 2)]
        branching: usize,
        #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
        node_cap: u64,
        /// Write the witness instance here.
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check the structural facts at every step of an MG′ run.
    CheckFacts {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    steps: Option<u32>,
    #[arg(long)]
    per_step: Option<usize>,
    /// Comma-separated weight grid.
    #[arg(long, value_parser = parse_menu)]
    weights: Option<Menu>,
    #[arg(long)]
    max_lifespan: Option<u32>,
    #[arg(long)]
    s: Option<u32>,
    /// Chain length for golden-chain.
    #[arg(long)]
    k: Option<u32>,
    /// Weight ratio for golden-chain.
    #[arg(long)]
    ratio: Option<Rational>,
    #[arg(long)]
    max_packets: Option<usize>,
}

#[derive(Clone)]
struct Menu(Vec<Rational>);

fn parse_policy(s: &str) -> Result<Policy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_menu(s: &str) -> Result<Menu, String> {
    s.split(',')
        .map(|w| w.trim().parse::<Rational>().map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()
        .map(Menu)
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Invariant(_)) { 2 } else { 1 };
        Failure { code, message: e.to_string() }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::invalid(e.to_string())
    }
}

fn exact_options() -> Result<ExactOptions, Failure> {
    let cap = match std::env::var("SCHED_EXACT_CAP") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::invalid(format!("SCHED_EXACT_CAP must be a positive integer, got {v:?}")))?,
        Err(_) => DEFAULT_EXACT_CAP,
    };
    Ok(ExactOptions { cap, ..ExactOptions::default() })
}

fn load(path: &Path, agreeable: bool) -> Result<Instance, Failure> {
    let inst = format::read_instance(path)?;
    if agreeable {
        inst.require_agreeable()?;
    }
    Ok(inst)
}

fn approx(q: &Rational) -> String {
    format!("{q} (≈ {:.3})", q.to_f64())
}

fn opt_value(inst: &Instance) -> Rational {
    opt_schedule(inst.packets(), inst.first_release().unwrap_or(1)).1
}

fn save_report(path: Option<&Path>, v: &Value) -> Result<(), Failure> {
    if let Some(path) = path {
        let text = serde_json::to_string_pretty(v).expect("reports serialize");
        std::fs::write(path, text + "\n")
            .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Failure::invalid("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::invalid(e.to_string()))?;
    }

    match cli.command {
        Command::Run { policy, instance, trials, seed, report } => {
            let inst = load(&instance, true)?;
            if policy.is_deterministic() {
                if trials.is_some() {
                    return Err(Failure::invalid("--trials only applies to rg"));
                }
                let r = run_policy(&inst, policy)?;
                for s in &r.per_step {
                    println!("step {}: sent {} (w = {}), e = {}, h = {}", s.step, s.transmitted, s.gain, s.e, s.h);
                }
                println!("gain = {}", approx(&r.total_gain));
                println!("opt = {}", approx(&r.opt_value));
                println!("ratio = {}", approx(&r.ratio));
                save_report(report.as_deref(), &format::run_report_json(&r))?;
            } else if let Some(trials) = trials {
                let est = run_rg_mc(&inst, trials, seed)?;
                let opt = opt_value(&inst);
                println!("trials = {trials}, seed = {seed}");
                println!("mean gain = {}", approx(&est.mean));
                println!("stderr = {:.6}", est.stderr);
                println!("opt = {}", approx(&opt));
                save_report(report.as_deref(), &format::mc_report_json(&est, &opt))?;
            } else {
                expected(&inst, report.as_deref())?;
            }
        }
        Command::Opt { instance } => {
            let inst = load(&instance, false)?;
            let (sched, value) = opt_schedule(inst.packets(), inst.first_release().unwrap_or(1));
            for (t, p) in sched.assignments() {
                println!("step {t}: {} (w = {})", p.id(), p.weight());
            }
            println!("opt = {}", approx(&value));
        }
        Command::Ratio { policy, instance } => {
            let inst = load(&instance, true)?;
            let ratio = pktsched::analysis::competitive_ratio_with(&inst, policy, exact_options()?)?;
            println!("ratio = {}", approx(&ratio));
        }
        Command::Expected { instance, report } => {
            let inst = load(&instance, true)?;
            expected(&inst, report.as_deref())?;
        }
        Command::Gen(args) => {
            let inst = generate(&gen_spec(&args))?;
            format::write_instance(&inst, &args.out)?;
            println!("wrote {} packets to {}", inst.len(), args.out.display());
        }
        Command::Search { policy, depth, menu, branching, node_cap, witness, report } => {
            let opts = SearchOptions { depth, menu: menu.0, branching, node_cap };
            let res = adversary_search_with(policy, &opts)?;
            println!("ratio = {}", approx(&res.ratio));
            println!("nodes = {}{}", res.nodes, if res.complete { "" } else { " (node cap hit, partial)" });
            print!("{}", format::instance_to_string(&res.witness));
            if let Some(path) = witness {
                format::write_instance(&res.witness, &path)?;
            }
            save_report(report.as_deref(), &format::search_report_json(&res))?;
        }
        Command::CheckFacts { instance, report } => {
            let inst = load(&instance, true)?;
            let rep = check_facts(&inst)?;
            save_report(report.as_deref(), &format::facts_report_json(&rep))?;
            let failures: Vec<_> = rep.failures().collect();
            for (t, check, why) in &failures {
                println!("step {t}: {check} FAILED: {why}");
            }
            if !failures.is_empty() {
                return Err(Failure { code: 2, message: format!("{} check(s) failed", failures.len()) });
            }
            println!("all checks passed at {} step(s)", rep.steps.len());
        }
    }
    Ok(())
}

fn expected(inst: &Instance, report: Option<&Path>) -> Result<(), Failure> {
    let ex = run_rg_exact_with(inst, exact_options()?, &mut |_, _| {})?;
    let opt = opt_value(inst);
    let ratio = gain_ratio(&opt, &ex.expected_gain)?;
    println!("expected gain = {}", approx(&ex.expected_gain));
    println!("opt = {}", approx(&opt));
    println!("ratio = {}", approx(&ratio));
    println!("leaves = {}", ex.leaves);
    save_report(report, &format::expected_report_json(&ex, &opt, &ratio))
}

fn gen_spec(a: &GenArgs) -> GeneratorSpec {
    let mut spec = GeneratorSpec::new(a.family, a.seed);
    if let Some(v) = a.steps {
        spec.steps = v;
    }
    if let Some(v) = a.per_step {
        spec.per_step = v;
    }
    if let Some(v) = &a.weights {
        spec.weights = v.0.clone();
    }
    if let Some(v) = a.max_lifespan {
        spec.max_lifespan = v;
    }
    if let Some(v) = a.s {
        spec.s = v;
    }
    if let Some(v) = a.k {
        spec.k = v;
    }
    if let Some(v) = &a.ratio {
        spec.ratio = v.clone();
    }
    spec.max_packets = a.max_packets;
    spec
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
