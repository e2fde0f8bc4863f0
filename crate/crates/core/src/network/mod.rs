//! Iterative reaction network expansion.
//!
//! Each iteration applies every rule to the molecules known at its start,
//! restricted to hosts that use at least one molecule discovered in the
//! previous iteration. Derivations are deduplicated by derivation code,
//! products are filtered by the size caps, and new molecules join the
//! network at the end of the iteration.

mod export;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::canon::{canonicalize, encode_derivation, Canon, CanonicalCode};
use crate::ede::{enumerate_derivations, EnumOptions, GraphSet, Mode};
use crate::error::{Error, Result};
use crate::graph::{connected_components, LabeledGraph};
use crate::oracle::{proper_derivations, OracleBudget};
use crate::rule::{rewrite, Rule, RuleAutInfo};

/// How derivations are enumerated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Engine {
    Ede(Mode),
    Oracle(OracleBudget),
}

impl Engine {
    pub fn name(&self) -> &'static str {
        match self {
            Engine::Ede(m) => m.as_str(),
            Engine::Oracle(_) => "oracle",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExpansionPolicy {
    pub engine: Engine,
    pub max_iterations: Option<usize>,
    pub max_product_vertices: Option<usize>,
    /// Per label, the largest number of vertices with it in one product.
    pub max_label_counts: Vec<(String, usize)>,
    /// Stop with [`Status::LimitExceeded`] once the network holds more
    /// molecules than this.
    pub max_molecules: Option<usize>,
    pub time_limit: Option<Duration>,
    /// Rule enumerations run concurrently within an iteration.
    pub jobs: usize,
}

impl ExpansionPolicy {
    pub fn new(engine: Engine) -> Self {
        ExpansionPolicy {
            engine,
            max_iterations: None,
            max_product_vertices: None,
            max_label_counts: Vec::new(),
            max_molecules: None,
            time_limit: None,
            jobs: 1,
        }
    }

    pub fn mode(mode: Mode) -> Self {
        Self::new(Engine::Ede(mode))
    }

    fn accepts(&self, g: &LabeledGraph) -> bool {
        self.max_product_vertices
            .is_none_or(|n| g.vertex_count() <= n)
            && self
                .max_label_counts
                .iter()
                .all(|(l, n)| g.count_label(l) <= *n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Complete,
    Timeout,
    LimitExceeded,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Complete => 0,
            Status::Timeout => 3,
            Status::LimitExceeded => 4,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Molecule {
    pub graph: Arc<LabeledGraph>,
    /// Iteration in which the molecule was first produced, 0 for inputs.
    pub iteration: usize,
    canon: Canon,
}

impl Molecule {
    pub fn code(&self) -> &CanonicalCode {
        &self.canon.code
    }
}

impl PartialEq for Molecule {
    fn eq(&self, other: &Self) -> bool {
        self.canon.code == other.canon.code
            && self.iteration == other.iteration
            && self.graph == other.graph
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reaction {
    pub code: CanonicalCode,
    pub rule: String,
    /// Educt and product molecule codes, sorted, with multiplicity.
    pub educts: Vec<CanonicalCode>,
    pub products: Vec<CanonicalCode>,
    pub iteration: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationStats {
    pub iteration: usize,
    pub millis: u64,
    pub molecules: usize,
    pub new_molecules: usize,
    pub new_reactions: usize,
    pub reactions: usize,
    /// Per rule in declaration order.
    pub rule_yields: Vec<u64>,
    pub yields: u64,
    /// False when the iteration was cut short by the time limit.
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReactionNetwork {
    molecules: BTreeMap<CanonicalCode, Molecule>,
    reactions: BTreeMap<CanonicalCode, Reaction>,
    stats: Vec<IterationStats>,
    status: Status,
    frontier: BTreeSet<CanonicalCode>,
    rejected: HashSet<CanonicalCode>,
}

/// Expands the network generated by `rules` from `initial`.
pub fn expand(
    initial: impl IntoIterator<Item = LabeledGraph>,
    rules: &[Rule],
    policy: &ExpansionPolicy,
) -> Result<ReactionNetwork> {
    let mut net = ReactionNetwork::new(initial)?;
    net.run(rules, policy)?;
    Ok(net)
}

/// A derivation found by one rule enumeration, ready for insertion.
struct Candidate {
    code: CanonicalCode,
    educts: Vec<usize>,
    /// None when a product violates the caps.
    products: Option<Vec<Canon>>,
    graphs: Vec<LabeledGraph>,
}

struct RuleRun {
    yields: u64,
    candidates: Vec<Candidate>,
    timed_out: bool,
}

impl ReactionNetwork {
    /// A network holding the given molecules, isomorphic copies merged.
    pub fn new(initial: impl IntoIterator<Item = LabeledGraph>) -> Result<Self> {
        let mut molecules = BTreeMap::new();
        for g in initial {
            if !g.is_connected() {
                return Err(Error::NotConnected);
            }
            let canon = canonicalize(&g);
            molecules
                .entry(canon.code.clone())
                .or_insert_with(|| Molecule {
                    graph: Arc::new(g),
                    iteration: 0,
                    canon,
                });
        }
        let frontier = molecules.keys().cloned().collect();
        Ok(ReactionNetwork {
            molecules,
            reactions: BTreeMap::new(),
            stats: Vec::new(),
            status: Status::Complete,
            frontier,
            rejected: HashSet::new(),
        })
    }

    pub fn molecules(&self) -> impl Iterator<Item = &Molecule> {
        self.molecules.values()
    }

    pub fn molecule(&self, code: &CanonicalCode) -> Option<&Molecule> {
        self.molecules.get(code)
    }

    pub fn reactions(&self) -> impl Iterator<Item = &Reaction> {
        self.reactions.values()
    }

    pub fn molecule_count(&self) -> usize {
        self.molecules.len()
    }

    pub fn reaction_count(&self) -> usize {
        self.reactions.len()
    }

    pub fn stats(&self) -> &[IterationStats] {
        &self.stats
    }

    pub fn status(&self) -> Status {
        self.status
    }

    /// Total yields over all iterations.
    pub fn total_yields(&self) -> u64 {
        self.stats.iter().map(|s| s.yields).sum()
    }

    /// Whether both networks hold the same molecules and reactions.
    pub fn same_content(&self, other: &ReactionNetwork) -> bool {
        self.molecules.keys().eq(other.molecules.keys())
            && self.reactions.len() == other.reactions.len()
            && self
                .reactions
                .iter()
                .zip(other.reactions.iter())
                .all(|((c1, r1), (c2, r2))| {
                    c1 == c2 && r1.educts == r2.educts && r1.products == r2.products
                })
    }

    /// Treats every molecule as new, so the next iteration reconsiders all
    /// combinations.
    pub fn mark_all_new(&mut self) {
        self.frontier = self.molecules.keys().cloned().collect();
    }

    /// Runs iterations until nothing new appears or a limit is hit.
    pub fn run(&mut self, rules: &[Rule], policy: &ExpansionPolicy) -> Result<Status> {
        let deadline = policy.time_limit.map(|t| Instant::now() + t);
        let infos: Vec<RuleAutInfo> = rules.iter().map(RuleAutInfo::compute).collect();
        let mut done = 0;
        self.status = Status::Complete;
        while !self.frontier.is_empty() && policy.max_iterations.is_none_or(|n| done < n) {
            let status = self.iterate(rules, &infos, policy, deadline)?;
            done += 1;
            if status != Status::Complete {
                self.status = status;
                break;
            }
        }
        Ok(self.status)
    }

    fn iterate(
        &mut self,
        rules: &[Rule],
        infos: &[RuleAutInfo],
        policy: &ExpansionPolicy,
        deadline: Option<Instant>,
    ) -> Result<Status> {
        let start = Instant::now();
        let iteration = self.stats.len() + 1;
        let items: Vec<(Arc<LabeledGraph>, Canon)> = self
            .molecules
            .values()
            .map(|m| (m.graph.clone(), m.canon.clone()))
            .collect();
        let set = GraphSet::from_canonized(items)?;
        let new_mask: Vec<bool> = (0..set.len())
            .map(|r| self.frontier.contains(set.code(r)))
            .collect();

        let slots: Vec<Mutex<Option<Result<RuleRun>>>> =
            rules.iter().map(|_| Mutex::new(None)).collect();
        let next = AtomicUsize::new(0);
        let work = || loop {
            let i = next.fetch_add(1, Ordering::Relaxed);
            if i >= rules.len() {
                break;
            }
            let run = self.run_rule(&rules[i], &infos[i], &set, &new_mask, policy, deadline);
            *slots[i].lock().unwrap() = Some(run);
        };
        let jobs = policy.jobs.clamp(1, rules.len().max(1));
        if jobs == 1 {
            work();
        } else {
            std::thread::scope(|s| {
                for _ in 0..jobs {
                    s.spawn(work);
                }
            });
        }

        let mut stats = IterationStats {
            iteration,
            complete: true,
            ..IterationStats::default()
        };
        let mut fresh = BTreeSet::new();
        for (rule, slot) in rules.iter().zip(slots) {
            let run = slot.into_inner().unwrap().expect("every rule ran")?;
            stats.yields += run.yields;
            stats.rule_yields.push(run.yields);
            stats.complete &= !run.timed_out;
            for c in run.candidates {
                if self.reactions.contains_key(&c.code) || self.rejected.contains(&c.code) {
                    continue;
                }
                let Some(products) = c.products else {
                    self.rejected.insert(c.code);
                    continue;
                };
                let mut product_codes = Vec::with_capacity(products.len());
                for (canon, g) in products.into_iter().zip(c.graphs) {
                    product_codes.push(canon.code.clone());
                    if !self.molecules.contains_key(&canon.code) {
                        fresh.insert(canon.code.clone());
                        self.molecules.insert(
                            canon.code.clone(),
                            Molecule {
                                graph: Arc::new(g),
                                iteration,
                                canon,
                            },
                        );
                    }
                }
                product_codes.sort();
                let mut educts: Vec<CanonicalCode> =
                    c.educts.iter().map(|&r| set.code(r).clone()).collect();
                educts.sort();
                self.reactions.insert(
                    c.code.clone(),
                    Reaction {
                        code: c.code,
                        rule: rule.name().to_owned(),
                        educts,
                        products: product_codes,
                        iteration,
                    },
                );
                stats.new_reactions += 1;
            }
        }
        stats.new_molecules = fresh.len();
        stats.molecules = self.molecules.len();
        stats.reactions = self.reactions.len();
        stats.millis = start.elapsed().as_millis() as u64;
        let complete = stats.complete;
        self.stats.push(stats);
        self.frontier = fresh;
        if !complete {
            return Ok(Status::Timeout);
        }
        if policy
            .max_molecules
            .is_some_and(|n| self.molecules.len() > n)
        {
            return Ok(Status::LimitExceeded);
        }
        Ok(Status::Complete)
    }

    fn run_rule(
        &self,
        rule: &Rule,
        info: &RuleAutInfo,
        set: &GraphSet,
        new_mask: &[bool],
        policy: &ExpansionPolicy,
        deadline: Option<Instant>,
    ) -> Result<RuleRun> {
        let mut seen: HashSet<CanonicalCode> = HashSet::new();
        let mut candidates = Vec::new();
        let mut timed_out = false;
        let mut consider = |ranks: &[usize], host: LabeledGraph, m: &[usize]| {
            let code = encode_derivation(rule, &host, m).expect("total match");
            if self.reactions.contains_key(&code)
                || self.rejected.contains(&code)
                || !seen.insert(code.clone())
            {
                return;
            }
            let result = connected_components(&rewrite(rule, &host, m));
            let graphs: Vec<LabeledGraph> = result
                .components()
                .iter()
                .map(|g| g.as_ref().clone())
                .collect();
            let products = graphs
                .iter()
                .all(|g| policy.accepts(g))
                .then(|| graphs.iter().map(canonicalize).collect());
            let mut educts = ranks.to_vec();
            educts.sort_unstable();
            candidates.push(Candidate {
                code,
                educts,
                products,
                graphs,
            });
        };
        let yields = match &policy.engine {
            Engine::Ede(mode) => {
                let options = EnumOptions {
                    require_new: Some(new_mask),
                };
                let stats = enumerate_derivations(rule, info, set, *mode, &options, |y| {
                    if deadline.is_some_and(|d| Instant::now() >= d) {
                        timed_out = true;
                        return ControlFlow::Break(());
                    }
                    consider(y.host_ranks(), y.host().to_graph(), &y.global_match());
                    ControlFlow::Continue(())
                });
                stats.yields
            }
            Engine::Oracle(budget) => {
                let graphs = set.graphs();
                let mut n = 0;
                for d in proper_derivations(graphs, rule, budget)? {
                    if !d.hosts.iter().any(|&r| new_mask[r]) {
                        continue;
                    }
                    if deadline.is_some_and(|t| Instant::now() >= t) {
                        timed_out = true;
                        break;
                    }
                    n += 1;
                    consider(&d.hosts, d.host(graphs).to_graph(), &d.global_match(graphs));
                }
                n
            }
        };
        Ok(RuleRun {
            yields,
            candidates,
            timed_out,
        })
    }
}
