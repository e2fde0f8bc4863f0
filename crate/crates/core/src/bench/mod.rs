//! Experiment grammars and a benchmark runner emitting per-iteration stats.

mod grammar;

pub use grammar::{
    add_children_rule, chain_rule, four_cycle, generate_grammar, methane, monomer, Grammar,
    GrammarSpec,
};

use std::fmt::Write as _;
use std::sync::Mutex;
use std::time::Duration;

use serde::Serialize;

use crate::ede::Mode;
use crate::error::Result;
use crate::network::{expand, Engine, ReactionNetwork, Status};

/// One CSV row: the state after an iteration of one mode.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BenchRow {
    pub grammar: String,
    pub mode: String,
    pub iteration: usize,
    pub molecules: usize,
    pub reactions: usize,
    pub yields: u64,
    pub millis: u64,
    /// `complete`, or why the run stopped after this iteration.
    pub status: String,
}

pub const CSV_HEADER: &str = "grammar,mode,iteration,molecules,reactions,yields,millis,status";

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub time_limit: Option<Duration>,
    /// Modes run concurrently.
    pub jobs: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            time_limit: Some(Duration::from_secs(300)),
            jobs: 1,
        }
    }
}

#[derive(Debug)]
pub struct BenchResult {
    pub rows: Vec<BenchRow>,
    /// The final network of each mode, in the order requested.
    pub networks: Vec<(Mode, ReactionNetwork)>,
}

/// Expands the grammar once per mode.
pub fn run_benchmark(
    spec: GrammarSpec,
    modes: &[Mode],
    options: &BenchOptions,
) -> Result<BenchResult> {
    let grammar = generate_grammar(spec);
    let run = |mode: Mode| -> Result<ReactionNetwork> {
        let mut policy = grammar.policy(Engine::Ede(mode));
        policy.time_limit = options.time_limit;
        expand(grammar.initial.iter().cloned(), &grammar.rules, &policy)
    };
    let results: Vec<Mutex<Option<Result<ReactionNetwork>>>> =
        modes.iter().map(|_| Mutex::new(None)).collect();
    if options.jobs <= 1 || modes.len() <= 1 {
        for (i, &m) in modes.iter().enumerate() {
            *results[i].lock().unwrap() = Some(run(m));
        }
    } else {
        let next = std::sync::atomic::AtomicUsize::new(0);
        std::thread::scope(|s| {
            for _ in 0..options.jobs.min(modes.len()) {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if i >= modes.len() {
                        break;
                    }
                    let net = run(modes[i]);
                    *results[i].lock().unwrap() = Some(net);
                });
            }
        });
    }
    let mut rows = Vec::new();
    let mut networks = Vec::new();
    for (&mode, slot) in modes.iter().zip(results) {
        let net = slot.into_inner().unwrap().expect("every mode ran")?;
        let last = net.stats().len();
        for s in net.stats() {
            let status = if s.iteration == last {
                status_name(net.status())
            } else {
                status_name(Status::Complete)
            };
            rows.push(BenchRow {
                grammar: spec.to_string(),
                mode: mode.to_string(),
                iteration: s.iteration,
                molecules: s.molecules,
                reactions: s.reactions,
                yields: s.yields,
                millis: s.millis,
                status: status.into(),
            });
        }
        networks.push((mode, net));
    }
    Ok(BenchResult { rows, networks })
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Complete => "complete",
        Status::Timeout => "timeout",
        Status::LimitExceeded => "limit-exceeded",
    }
}

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.grammar, r.mode, r.iteration, r.molecules, r.reactions, r.yields, r.millis, r.status
        );
    }
    out
}

pub fn rows_to_json(rows: &[BenchRow]) -> String {
    let value = serde_json::to_value(rows).expect("plain data");
    let mut out = serde_json::to_string_pretty(&value).expect("plain data");
    out.push('\n');
    out
}
