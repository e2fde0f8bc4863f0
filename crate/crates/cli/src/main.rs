mod config;

use std::io::{self, BufWriter, Write};
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use ede::bench::{rows_to_csv, rows_to_json, run_benchmark, BenchOptions, GrammarSpec};
use ede::canon::{canonical_code, canonicalize, is_isomorphic};
use ede::ede::{enumerate_derivations, EnumOptions, GraphSet, Mode};
use ede::graph::parse_graphs;
use ede::network::{expand, Engine, ExpansionPolicy, Status};
use ede::oracle::{proper_derivations, OracleBudget};
use ede::rule::{parse_rules, Derivation, Rule, RuleAutInfo};
use ede::{LabeledGraph, UnionGraph};

use config::Config;

const JOBS_ENV: &str = "EDE_JOBS";
const CONFIG_ENV: &str = "EDE_CONFIG";

#[derive(Parser, Debug)]
#[command(
    name = "ede",
    version,
    about = "Enumerate DPO graph transformation derivations"
)]
struct Cli {
    /// key=value file with defaults for the flags below
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the canonical code, automorphism group order and generators.
    Canon { graph: PathBuf },
    /// Exit 0 if the two graphs are isomorphic, 1 otherwise.
    Iso { first: PathBuf, second: PathBuf },
    /// Stream the derivations of one rule as JSON lines.
    Derive(DeriveArgs),
    /// Grow a reaction network.
    Expand(ExpandArgs),
    /// Run an experiment grammar and write per-iteration statistics.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct DeriveArgs {
    #[arg(long)]
    rule: PathBuf,
    /// Files with one or more connected, pairwise non-isomorphic graphs.
    #[arg(long, num_args = 1.., required = true)]
    graphs: Vec<PathBuf>,
    /// ede, ede-s, ede-ss or oracle
    #[arg(long)]
    mode: Option<String>,
    /// Emit only the first derivation of each isomorphism class.
    #[arg(long)]
    unique: bool,
}

#[derive(Args, Debug)]
struct ExpandArgs {
    #[arg(long, num_args = 1.., required = true)]
    rules: Vec<PathBuf>,
    #[arg(long, num_args = 1.., required = true)]
    graphs: Vec<PathBuf>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    max_vertices: Option<usize>,
    /// LABEL=N, repeatable
    #[arg(long)]
    max_label: Vec<String>,
    #[arg(long)]
    max_molecules: Option<usize>,
    #[arg(long)]
    timeout_s: Option<f64>,
    #[arg(long, env = JOBS_ENV)]
    jobs: Option<usize>,
    /// Network JSON; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// strings:K[:UNITS], trees[:ITERATIONS] or formose:N
    #[arg(long)]
    grammar: String,
    /// Comma-separated modes; all three by default.
    #[arg(long)]
    modes: Option<String>,
    #[arg(long)]
    timeout_s: Option<f64>,
    #[arg(long, env = JOBS_ENV)]
    jobs: Option<usize>,
    /// CSV statistics; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// The same rows as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

/// Bad flags, config or input files: exit code 2.
#[derive(Debug)]
struct Usage(anyhow::Error);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(e: anyhow::Error) -> anyhow::Error {
    anyhow::Error::new(Usage(e))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.is::<Usage>() { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let config = match &cli.config {
        Some(p) => Config::load(p).map_err(usage)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Canon { graph } => canon_cmd(&graph),
        Command::Iso { first, second } => {
            let a = read_one_graph(&first)?;
            let b = read_one_graph(&second)?;
            Ok(if is_isomorphic(&a, &b) { 0 } else { 1 })
        }
        Command::Derive(args) => derive_cmd(args, &config),
        Command::Expand(args) => expand_cmd(args, &config),
        Command::Bench(args) => bench_cmd(args, &config),
    }
}

fn read_graphs(path: &Path) -> Result<Vec<LabeledGraph>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(usage)?;
    parse_graphs(&text)
        .with_context(|| format!("in {}", path.display()))
        .map_err(usage)
}

fn read_one_graph(path: &Path) -> Result<LabeledGraph> {
    let mut gs = read_graphs(path)?;
    if gs.len() != 1 {
        return Err(usage(anyhow!(
            "{} holds {} graphs, expected one",
            path.display(),
            gs.len()
        )));
    }
    Ok(gs.pop().unwrap())
}

fn read_rules(path: &Path) -> Result<Vec<Rule>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(usage)?;
    parse_rules(&text)
        .with_context(|| format!("in {}", path.display()))
        .map_err(usage)
}

fn canon_cmd(path: &Path) -> Result<u8> {
    let g = read_one_graph(path)?;
    let c = canonicalize(&g);
    let mut out = io::stdout().lock();
    writeln!(out, "code {}", c.code.to_hex())?;
    writeln!(out, "aut {}", c.group().order())?;
    for p in &c.generators {
        writeln!(out, "generator {p}")?;
    }
    Ok(0)
}

enum EngineArg {
    Ede(Mode),
    Oracle,
}

fn engine_arg(flag: Option<String>, config: &Config) -> Result<EngineArg> {
    let s = flag
        .or_else(|| config.get("mode").map(str::to_owned))
        .unwrap_or_else(|| Mode::EdeSs.to_string());
    if s == "oracle" {
        return Ok(EngineArg::Oracle);
    }
    s.parse::<Mode>()
        .map(EngineArg::Ede)
        .map_err(|e| usage(anyhow!("--mode: {e}")))
}

fn derive_cmd(args: DeriveArgs, config: &Config) -> Result<u8> {
    let mut rules = read_rules(&args.rule)?;
    if rules.len() != 1 {
        return Err(usage(anyhow!(
            "{} holds {} rules, expected one",
            args.rule.display(),
            rules.len()
        )));
    }
    let rule = rules.pop().unwrap();
    let mut inputs = Vec::new();
    for p in &args.graphs {
        inputs.extend(read_graphs(p)?);
    }
    let set = GraphSet::new(inputs.iter().cloned()).map_err(|e| usage(anyhow::Error::from(e)))?;
    // input position of each rank in the graph set
    let input_of: Vec<usize> = {
        let mut v = vec![0; set.len()];
        for (i, g) in inputs.iter().enumerate() {
            v[set
                .rank_of(&canonical_code(g))
                .expect("input is in the set")] = i;
        }
        v
    };
    let mut out = BufWriter::new(io::stdout().lock());
    let mut seen = std::collections::HashSet::new();
    let mut emit = |hosts: Vec<usize>, host: UnionGraph, m: Vec<usize>| -> Result<()> {
        let d = Derivation::new(&rule, host, m).context("applying a yielded match")?;
        if args.unique && !seen.insert(d.code().clone()) {
            return Ok(());
        }
        let products: Vec<String> = d
            .result()
            .components()
            .iter()
            .map(|g| canonical_code(g).to_hex())
            .collect();
        let line = json!({
            "code": d.code().to_hex(),
            "hosts": hosts,
            "match": d.matching(),
            "products": products,
            "rule": rule.name(),
        });
        writeln!(out, "{line}")?;
        Ok(())
    };
    let mut count = 0u64;
    match engine_arg(args.mode, config)? {
        EngineArg::Ede(mode) => {
            let info = RuleAutInfo::compute(&rule);
            let mut failure = None;
            enumerate_derivations(&rule, &info, &set, mode, &EnumOptions::default(), |y| {
                count += 1;
                let hosts = y.host_ranks().iter().map(|&r| input_of[r]).collect();
                match emit(hosts, y.host(), y.global_match()) {
                    Ok(()) => ControlFlow::Continue(()),
                    Err(e) => {
                        failure = Some(e);
                        ControlFlow::Break(())
                    }
                }
            });
            if let Some(e) = failure {
                return Err(e);
            }
        }
        EngineArg::Oracle => {
            let ranked: Vec<Arc<LabeledGraph>> = set.graphs().to_vec();
            let ds = proper_derivations(&ranked, &rule, &OracleBudget::default())?;
            for d in ds {
                count += 1;
                let hosts = d.hosts.iter().map(|&r| input_of[r]).collect();
                emit(hosts, d.host(&ranked), d.global_match(&ranked))?;
            }
        }
    }
    out.flush()?;
    eprintln!("{count} derivations");
    Ok(0)
}

fn jobs(flag: Option<usize>, config: &Config) -> Result<usize> {
    let n = match flag {
        Some(n) => n,
        None => config.parsed("jobs").map_err(usage)?.unwrap_or(1),
    };
    if n == 0 {
        bail!(usage(anyhow!("--jobs must be positive")));
    }
    Ok(n)
}

fn timeout(flag: Option<f64>, config: &Config, default: Option<f64>) -> Result<Option<Duration>> {
    let secs = match flag {
        Some(s) => Some(s),
        None => config
            .parsed::<f64>("timeout-s")
            .map_err(usage)?
            .or(default),
    };
    match secs {
        Some(s) if !(s.is_finite() && s > 0.0) => Err(usage(anyhow!(
            "--timeout-s must be a positive number of seconds"
        ))),
        Some(s) => Ok(Some(Duration::from_secs_f64(s))),
        None => Ok(None),
    }
}

fn label_cap(s: &str) -> Result<(String, usize)> {
    let (label, n) = s
        .rsplit_once('=')
        .ok_or_else(|| usage(anyhow!("--max-label expects LABEL=N, got '{s}'")))?;
    let n = n
        .parse()
        .map_err(|_| usage(anyhow!("--max-label: '{n}' is not a count")))?;
    Ok((label.to_owned(), n))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn expand_cmd(args: ExpandArgs, config: &Config) -> Result<u8> {
    let mut rules = Vec::new();
    for p in &args.rules {
        rules.extend(read_rules(p)?);
    }
    let mut inputs = Vec::new();
    for p in &args.graphs {
        inputs.extend(read_graphs(p)?);
    }
    let engine = match engine_arg(args.mode, config)? {
        EngineArg::Ede(m) => Engine::Ede(m),
        EngineArg::Oracle => Engine::Oracle(OracleBudget::default()),
    };
    let mut policy = ExpansionPolicy::new(engine);
    let opt = |flag: Option<usize>, key: &str| -> Result<Option<usize>> {
        match flag {
            Some(n) => Ok(Some(n)),
            None => config.parsed(key).map_err(usage),
        }
    };
    policy.max_iterations = opt(args.max_iter, "max-iter")?;
    policy.max_product_vertices = opt(args.max_vertices, "max-vertices")?;
    policy.max_molecules = opt(args.max_molecules, "max-molecules")?;
    let caps: Vec<String> = if args.max_label.is_empty() {
        config.all("max-label").to_vec()
    } else {
        args.max_label
    };
    policy.max_label_counts = caps.iter().map(|s| label_cap(s)).collect::<Result<_>>()?;
    policy.time_limit = timeout(args.timeout_s, config, None)?;
    policy.jobs = jobs(args.jobs, config)?;
    if policy.max_iterations.is_none()
        && policy.max_product_vertices.is_none()
        && policy.max_label_counts.is_empty()
        && policy.max_molecules.is_none()
        && policy.time_limit.is_none()
    {
        eprintln!("warning: no limits given, expansion may not terminate");
    }
    let net = expand(inputs, &rules, &policy).map_err(|e| match e {
        ede::Error::NotConnected | ede::Error::DuplicateIsomorphicInput(..) => usage(e.into()),
        e => e.into(),
    })?;
    let json = net.to_json();
    match &args.out {
        Some(p) => write_file(p, &json)?,
        None => io::stdout().lock().write_all(json.as_bytes())?,
    }
    if let Some(p) = &args.dot {
        write_file(p, &net.to_dot())?;
    }
    eprintln!(
        "{} molecules, {} reactions, {} iterations, {:?}",
        net.molecule_count(),
        net.reaction_count(),
        net.stats().len(),
        net.status()
    );
    Ok(net.status().exit_code() as u8)
}

fn bench_cmd(args: BenchArgs, config: &Config) -> Result<u8> {
    let spec: GrammarSpec = args
        .grammar
        .parse()
        .map_err(|e: String| usage(anyhow!("--grammar: {e}")))?;
    let modes_text = args
        .modes
        .or_else(|| config.get("modes").map(str::to_owned));
    let modes: Vec<Mode> = match modes_text {
        None => Mode::ALL.to_vec(),
        Some(s) => s
            .split(',')
            .map(|m| m.trim().parse::<Mode>())
            .collect::<Result<_, _>>()
            .map_err(|e| usage(anyhow!("--modes: {e}")))?,
    };
    let options = BenchOptions {
        time_limit: timeout(args.timeout_s, config, Some(300.0))?,
        jobs: jobs(args.jobs, config)?,
    };
    let result = run_benchmark(spec, &modes, &options)?;
    let csv = rows_to_csv(&result.rows);
    match &args.out {
        Some(p) => write_file(p, &csv)?,
        None => io::stdout().lock().write_all(csv.as_bytes())?,
    }
    if let Some(p) = &args.json {
        write_file(p, &rows_to_json(&result.rows))?;
    }
    let worst = result
        .networks
        .iter()
        .map(|(_, n)| n.status())
        .find(|s| *s != Status::Complete)
        .unwrap_or(Status::Complete);
    Ok(worst.exit_code() as u8)
}
