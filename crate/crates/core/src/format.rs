//! JSON Lines instance files and JSON reports.
//!
//! An instance file has one packet per line,
//! `{"id": "a", "r": 1, "d": 2, "w": "1/1"}`, in arrival order. Blank lines
//! are skipped. Weights are exact `"num/den"` strings (a bare integer string
//! is accepted too). Reports carry every rational as an exact string and
//! add a `<field>_approx` decimal next to it for reading.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::analysis::{FactsReport, SearchResult};
use crate::engine::{ExactExpectation, McEstimate, RunReport};
use crate::error::Error;
use crate::model::{Instance, Packet, Step};
use crate::rational::Rational;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("malformed JSON, line {line}: {message}")]
    Json { line: usize, message: String },
    #[error("invalid weight {text:?}, line {line}")]
    Weight { line: usize, text: String },
    #[error("non-positive weight, line {line}")]
    NonPositiveWeight { line: usize },
    #[error("empty lifespan, line {line}")]
    EmptyLifespan { line: usize },
    #[error("release step must be at least 1, line {line}")]
    ZeroRelease { line: usize },
    #[error("{source}, line {line}")]
    Packet { line: usize, source: Error },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PacketLine {
    id: String,
    r: Step,
    d: Step,
    w: String,
}

/// Parses instance text; `line` numbers in errors are 1-based.
pub fn parse_instance_str(text: &str) -> Result<Instance, FormatError> {
    parse_lines(text.lines().map(|l| Ok(l.to_string())))
}

pub fn read_instance(path: &Path) -> Result<Instance, FormatError> {
    let io_err = |source| FormatError::Io { path: path.display().to_string(), source };
    let file = fs::File::open(path).map_err(io_err)?;
    parse_lines(io::BufReader::new(file).lines()).map_err(|e| match e {
        FormatError::Io { source, .. } => io_err(source),
        other => other,
    })
}

fn parse_lines(lines: impl Iterator<Item = io::Result<String>>) -> Result<Instance, FormatError> {
    let mut packets = Vec::new();
    let mut line_of = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 1;
        let text = line.map_err(|source| FormatError::Io { path: String::new(), source })?;
        if text.trim().is_empty() {
            continue;
        }
        let raw: PacketLine = serde_json::from_str(&text)
            .map_err(|e| FormatError::Json { line: line_no, message: e.to_string() })?;
        let w: Rational = raw
            .w
            .parse()
            .map_err(|_| FormatError::Weight { line: line_no, text: raw.w.clone() })?;
        let p = Packet::new(raw.id, raw.r, raw.d, w).map_err(|e| match e {
            Error::NonPositiveWeight { .. } => FormatError::NonPositiveWeight { line: line_no },
            Error::EmptyLifespan { .. } => FormatError::EmptyLifespan { line: line_no },
            Error::ZeroRelease { .. } => FormatError::ZeroRelease { line: line_no },
            other => FormatError::Packet { line: line_no, source: other },
        })?;
        packets.push(p);
        line_of.push(line_no);
    }
    let ids: Vec<String> = packets.iter().map(|p| p.id().to_string()).collect();
    Instance::new(packets).map_err(|e| {
        let culprit = match &e {
            Error::OutOfOrderRelease { id, .. } => ids.iter().position(|x| x == id),
            Error::DuplicateId(id) => ids.iter().rposition(|x| x == id),
            _ => None,
        };
        FormatError::Packet { line: culprit.map_or(0, |k| line_of[k]), source: e }
    })
}

/// One JSON object per packet, weights in lowest terms.
pub fn instance_to_string(inst: &Instance) -> String {
    let mut out = String::new();
    for p in inst.packets() {
        let line = PacketLine {
            id: p.id().to_string(),
            r: p.release(),
            d: p.deadline(),
            w: p.weight().to_string(),
        };
        out.push_str(&serde_json::to_string(&line).expect("packet lines serialize"));
        out.push('\n');
    }
    out
}

pub fn write_instance(inst: &Instance, path: &Path) -> Result<(), FormatError> {
    let io_err = |source| FormatError::Io { path: path.display().to_string(), source };
    let mut f = fs::File::create(path).map_err(io_err)?;
    f.write_all(instance_to_string(inst).as_bytes()).map_err(io_err)
}

fn packets_json(inst: &Instance) -> Value {
    Value::Array(
        inst.packets()
            .iter()
            .map(|p| json!({"id": p.id(), "r": p.release(), "d": p.deadline(), "w": p.weight()}))
            .collect(),
    )
}

/// Adds `<key>_approx` next to each listed exact rational field.
fn annotate(mut v: Value, keys: &[&str]) -> Value {
    if let Value::Object(map) = &mut v {
        let mut extra = Map::new();
        for &k in keys {
            if let Some(q) = map.get(k).and_then(Value::as_str).and_then(|s| s.parse::<Rational>().ok()) {
                extra.insert(format!("{k}_approx"), json!(q.to_f64()));
            }
        }
        map.extend(extra);
    }
    v
}

pub fn run_report_json(r: &RunReport) -> Value {
    let v = serde_json::to_value(r).expect("run reports serialize");
    annotate(v, &["total_gain", "opt_value", "ratio"])
}

/// Reads back the exact fields of a run report; decimal annotations are
/// ignored.
pub fn parse_run_report(text: &str) -> serde_json::Result<RunReport> {
    serde_json::from_str(text)
}

pub fn mc_report_json(est: &McEstimate, opt: &Rational) -> Value {
    annotate(
        json!({
            "policy": "rg",
            "mode": "monte-carlo",
            "trials": est.trials,
            "seed": est.seed,
            "mean": est.mean,
            "stderr": est.stderr,
            "opt_value": opt,
        }),
        &["mean", "opt_value"],
    )
}

pub fn expected_report_json(ex: &ExactExpectation, opt: &Rational, ratio: &Rational) -> Value {
    annotate(
        json!({
            "policy": "rg",
            "mode": "exact",
            "expected_gain": ex.expected_gain,
            "leaves": ex.leaves,
            "opt_value": opt,
            "ratio": ratio,
        }),
        &["expected_gain", "opt_value", "ratio"],
    )
}

pub fn search_report_json(s: &SearchResult) -> Value {
    annotate(
        json!({
            "policy": s.policy.name(),
            "ratio": s.ratio,
            "nodes": s.nodes,
            "complete": s.complete,
            "witness": packets_json(&s.witness),
        }),
        &["ratio"],
    )
}

pub fn facts_report_json(r: &FactsReport) -> Value {
    let mut v = serde_json::to_value(r).expect("fact reports serialize");
    if let Value::Object(map) = &mut v {
        map.insert("all_pass".into(), json!(r.all_pass()));
    }
    v
}
