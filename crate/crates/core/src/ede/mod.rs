//! Enumeration of proper derivations over combinations of input graphs.
//!
//! The left side of a rule is matched one connected component at a time.
//! Each component is mapped either into a host component already in use or
//! into a fresh copy of an input graph appended to the host, so hosts are
//! built in discovery order and every yielded match is proper. In the
//! symmetry-pruning modes an extension must also be order-preserving with
//! respect to interchangeable rule components and minimal under local rule
//! automorphisms combined with host automorphisms fixing the partial match.

mod minimal;
mod order;

pub use order::{mono_less, SlotMono};

use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use crate::canon::{canonicalize, Canon, CanonicalCode};
use crate::error::{Error, Result};
use crate::graph::{LabeledGraph, UnionGraph};
use crate::matching::for_each_monomorphism;
use crate::perm::{Perm, PermGroup};
use crate::rule::{Rule, RuleAutInfo};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// No symmetry pruning.
    Ede,
    /// Pruning with full host automorphism groups.
    EdeS,
    /// Pruning with host automorphism generators only.
    EdeSs,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Ede, Mode::EdeS, Mode::EdeSs];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Ede => "ede",
            Mode::EdeS => "ede-s",
            Mode::EdeSs => "ede-ss",
        }
    }

    fn prunes(self) -> bool {
        self != Mode::Ede
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ede" => Ok(Mode::Ede),
            "ede-s" | "ede_s" => Ok(Mode::EdeS),
            "ede-ss" | "ede_ss" => Ok(Mode::EdeSs),
            other => Err(format!(
                "unknown mode '{other}' (expected ede, ede-s or ede-ss)"
            )),
        }
    }
}

/// Pairwise non-isomorphic connected graphs, ordered by canonical code.
/// A graph's rank in this order is the total order used to compare
/// monomorphisms into different graphs.
#[derive(Debug)]
pub struct GraphSet {
    graphs: Vec<Arc<LabeledGraph>>,
    codes: Vec<CanonicalCode>,
    generators: Vec<Vec<Perm>>,
    groups: Vec<OnceLock<PermGroup>>,
}

impl GraphSet {
    pub fn new(graphs: impl IntoIterator<Item = LabeledGraph>) -> Result<GraphSet> {
        let items: Vec<(Arc<LabeledGraph>, Canon)> = graphs
            .into_iter()
            .map(|g| {
                let c = canonicalize(&g);
                (Arc::new(g), c)
            })
            .collect();
        Self::from_canonized(items)
    }

    /// Builds the set from graphs with precomputed canonical forms. Input
    /// positions are reported in duplicate errors.
    pub fn from_canonized(items: Vec<(Arc<LabeledGraph>, Canon)>) -> Result<GraphSet> {
        let mut idx: Vec<usize> = (0..items.len()).collect();
        idx.sort_by(|&a, &b| items[a].1.code.cmp(&items[b].1.code));
        for w in idx.windows(2) {
            if items[w[0]].1.code == items[w[1]].1.code {
                let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(Error::DuplicateIsomorphicInput(a, b));
            }
        }
        if items.iter().any(|(g, _)| !g.is_connected()) {
            return Err(Error::NotConnected);
        }
        let mut slots: Vec<Option<(Arc<LabeledGraph>, Canon)>> =
            items.into_iter().map(Some).collect();
        let mut graphs = Vec::with_capacity(slots.len());
        let mut codes = Vec::with_capacity(slots.len());
        let mut generators = Vec::with_capacity(slots.len());
        for i in idx {
            let (g, c) = slots[i].take().unwrap();
            graphs.push(g);
            codes.push(c.code);
            generators.push(c.generators);
        }
        let groups = (0..graphs.len()).map(|_| OnceLock::new()).collect();
        Ok(GraphSet {
            graphs,
            codes,
            generators,
            groups,
        })
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn graph(&self, rank: usize) -> &Arc<LabeledGraph> {
        &self.graphs[rank]
    }

    pub fn graphs(&self) -> &[Arc<LabeledGraph>] {
        &self.graphs
    }

    pub fn code(&self, rank: usize) -> &CanonicalCode {
        &self.codes[rank]
    }

    pub fn rank_of(&self, code: &CanonicalCode) -> Option<usize> {
        self.codes.binary_search(code).ok()
    }

    pub fn generators(&self, rank: usize) -> &[Perm] {
        &self.generators[rank]
    }

    pub fn group(&self, rank: usize) -> &PermGroup {
        self.groups[rank].get_or_init(|| {
            PermGroup::new(self.graphs[rank].vertex_count(), &self.generators[rank])
                .expect("automorphisms are permutations")
        })
    }
}

/// A monomorphism of one rule component into an input graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DbEntry {
    /// Rank of the host graph.
    pub graph: usize,
    /// Host vertex of each local vertex of the component.
    pub image: Vec<usize>,
    /// Images along the class representative, see [`RuleAutInfo::key`].
    pub key: Vec<usize>,
}

/// Per rule component, the monomorphisms into the input graphs that are
/// valid partial matches on their own, sorted by graph rank and key.
#[derive(Clone, Debug)]
pub struct MonoDatabase {
    entries: Vec<Vec<DbEntry>>,
    raw_counts: Vec<usize>,
}

impl MonoDatabase {
    /// In the pruning modes only monomorphisms minimal under the local rule
    /// automorphisms are kept; [`Mode::EdeSs`] only tries their generators.
    pub fn build(rule: &Rule, info: &RuleAutInfo, graphs: &GraphSet, mode: Mode) -> Self {
        let k = rule.component_count();
        let mut entries = Vec::with_capacity(k);
        let mut raw_counts = Vec::with_capacity(k);
        for i in 0..k {
            let comp = rule.component(i);
            let verts = rule.component_vertices(i);
            let deleted: Vec<usize> = (0..verts.len())
                .filter(|&a| rule.is_deleted(verts[a]))
                .collect();
            let inner_pairs: Vec<(usize, usize)> = rule
                .created_pairs()
                .iter()
                .filter(|&&(a, b)| rule.component_of(a).0 == i && rule.component_of(b).0 == i)
                .map(|&(a, b)| (rule.component_of(a).1, rule.component_of(b).1))
                .collect();
            let mut list = Vec::new();
            let mut raw = 0;
            for (rank, g) in graphs.graphs().iter().enumerate() {
                for_each_monomorphism(comp, g, |img| {
                    raw += 1;
                    let ok = deleted.iter().all(|&a| g.degree(img[a]) == comp.degree(a))
                        && inner_pairs
                            .iter()
                            .all(|&(a, b)| !g.has_edge(img[a], img[b]));
                    if ok {
                        let key = info.key(i, img);
                        let local = match mode {
                            Mode::Ede => &[][..],
                            Mode::EdeS => info.local(i),
                            Mode::EdeSs => info.local_generators(i),
                        };
                        let minimal = local
                            .iter()
                            .all(|alpha| info.key_composed(i, img, alpha) >= key);
                        if minimal {
                            list.push(DbEntry {
                                graph: rank,
                                image: img.to_vec(),
                                key,
                            });
                        }
                    }
                    true
                });
            }
            list.sort_by(|a, b| (a.graph, &a.key).cmp(&(b.graph, &b.key)));
            entries.push(list);
            raw_counts.push(raw);
        }
        MonoDatabase {
            entries,
            raw_counts,
        }
    }

    pub fn component(&self, i: usize) -> &[DbEntry] {
        &self.entries[i]
    }

    /// Number of monomorphisms of component `i` before any filtering.
    pub fn raw_count(&self, i: usize) -> usize {
        self.raw_counts[i]
    }

    pub fn has_empty_component(&self) -> bool {
        self.entries.iter().any(|e| e.is_empty())
    }
}

/// A total match found by the enumerator, borrowed from its search state.
pub struct Yield<'a> {
    rule: &'a Rule,
    graphs: &'a GraphSet,
    db: &'a MonoDatabase,
    slots: &'a [usize],
    assign: &'a [(usize, usize)],
}

impl<'a> Yield<'a> {
    /// Graph rank of each host component, in host order.
    pub fn host_ranks(&self) -> &[usize] {
        self.slots
    }

    pub fn host(&self) -> UnionGraph {
        UnionGraph::from_components(self.slots.iter().map(|&r| self.graphs.graph(r).clone()))
            .expect("input graphs are connected")
    }

    /// Host component and local images of rule component `i`.
    pub fn component_match(&self, i: usize) -> (usize, &[usize]) {
        let (slot, e) = self.assign[i];
        (slot, &self.db.component(i)[e].image)
    }

    /// Global host vertex of every left vertex.
    pub fn global_match(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.slots.len());
        let mut acc = 0;
        for &r in self.slots {
            offsets.push(acc);
            acc += self.graphs.graph(r).vertex_count();
        }
        let n = self.rule.left().vertex_count();
        let mut m = vec![0; n];
        for (v, x) in m.iter_mut().enumerate() {
            let (c, a) = self.rule.component_of(v);
            let (slot, img) = self.component_match(c);
            *x = offsets[slot] + img[a];
        }
        m
    }

    /// `(host component, graph rank, local image)` per rule component.
    pub fn parts(&self) -> Vec<(usize, usize, Vec<usize>)> {
        (0..self.assign.len())
            .map(|i| {
                let (slot, img) = self.component_match(i);
                (slot, self.slots[slot], img.to_vec())
            })
            .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EnumStats {
    pub yields: u64,
    /// Total matches reached before the new-graph filter.
    pub total_matches: u64,
    pub stopped: bool,
}

/// Options beyond the mode.
#[derive(Clone, Debug, Default)]
pub struct EnumOptions<'a> {
    /// When set, only hosts using at least one graph flagged here are yielded.
    pub require_new: Option<&'a [bool]>,
}

/// Runs the enumeration for `rule` over `graphs`, calling `sink` for every
/// yielded match until it breaks.
pub fn enumerate_derivations(
    rule: &Rule,
    info: &RuleAutInfo,
    graphs: &GraphSet,
    mode: Mode,
    options: &EnumOptions<'_>,
    sink: impl FnMut(&Yield<'_>) -> ControlFlow<()>,
) -> EnumStats {
    let db = MonoDatabase::build(rule, info, graphs, mode);
    enumerate_with_database(rule, info, graphs, &db, mode, options, sink)
}

pub fn enumerate_with_database(
    rule: &Rule,
    info: &RuleAutInfo,
    graphs: &GraphSet,
    db: &MonoDatabase,
    mode: Mode,
    options: &EnumOptions<'_>,
    mut sink: impl FnMut(&Yield<'_>) -> ControlFlow<()>,
) -> EnumStats {
    let mut stats = EnumStats::default();
    let k = rule.component_count();
    if k == 0 || db.has_empty_component() {
        return stats;
    }
    let mut cross = vec![Vec::new(); k];
    for &(a, b) in rule.created_pairs() {
        let (ca, la) = rule.component_of(a);
        let (cb, lb) = rule.component_of(b);
        if ca < cb {
            cross[cb].push((lb, ca, la));
        } else if cb < ca {
            cross[ca].push((la, cb, lb));
        }
    }
    let earlier = (0..k)
        .map(|i| {
            info.class_members(i)
                .into_iter()
                .filter(|&j| j < i)
                .collect()
        })
        .collect();
    let mut search = Search {
        rule,
        info,
        graphs,
        db,
        mode,
        require_new: options.require_new,
        cross,
        earlier,
        slots: Vec::new(),
        used: Vec::new(),
        assign: vec![(usize::MAX, usize::MAX); k],
        stats: &mut stats,
    };
    let _ = search.extend(0, &mut sink);
    stats
}

struct Search<'a, 's> {
    rule: &'a Rule,
    info: &'a RuleAutInfo,
    graphs: &'a GraphSet,
    db: &'a MonoDatabase,
    mode: Mode,
    require_new: Option<&'a [bool]>,
    /// Per component: created pairs reaching an earlier component, as
    /// `(local vertex, earlier component, its local vertex)`.
    cross: Vec<Vec<(usize, usize, usize)>>,
    /// Per component: earlier components of the same class.
    earlier: Vec<Vec<usize>>,
    slots: Vec<usize>,
    used: Vec<Vec<bool>>,
    assign: Vec<(usize, usize)>,
    stats: &'s mut EnumStats,
}

impl<'a, 's> Search<'a, 's> {
    fn extend(
        &mut self,
        i: usize,
        sink: &mut impl FnMut(&Yield<'_>) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if i == self.assign.len() {
            return self.emit(sink);
        }
        let db = self.db;
        for e in 0..db.component(i).len() {
            let entry = &db.component(i)[e];
            for x in 0..self.slots.len() {
                if self.slots[x] == entry.graph && self.admissible(i, entry, x) {
                    self.place(i, e, x);
                    let flow = self.extend(i + 1, sink);
                    self.unplace(i, e, x);
                    flow?;
                }
            }
            let x = self.slots.len();
            self.slots.push(entry.graph);
            self.used
                .push(vec![false; self.graphs.graph(entry.graph).vertex_count()]);
            if self.admissible(i, entry, x) {
                self.place(i, e, x);
                let flow = self.extend(i + 1, sink);
                self.unplace(i, e, x);
                if flow.is_break() {
                    self.slots.pop();
                    self.used.pop();
                    return flow;
                }
            }
            self.slots.pop();
            self.used.pop();
        }
        ControlFlow::Continue(())
    }

    fn emit(&mut self, sink: &mut impl FnMut(&Yield<'_>) -> ControlFlow<()>) -> ControlFlow<()> {
        self.stats.total_matches += 1;
        if let Some(mask) = self.require_new {
            if !self.slots.iter().any(|&r| mask[r]) {
                return ControlFlow::Continue(());
            }
        }
        self.stats.yields += 1;
        let y = Yield {
            rule: self.rule,
            graphs: self.graphs,
            db: self.db,
            slots: &self.slots,
            assign: &self.assign,
        };
        let flow = sink(&y);
        if flow.is_break() {
            self.stats.stopped = true;
        }
        flow
    }

    fn place(&mut self, i: usize, e: usize, x: usize) {
        for &h in &self.db.component(i)[e].image {
            self.used[x][h] = true;
        }
        self.assign[i] = (x, e);
    }

    fn unplace(&mut self, i: usize, e: usize, x: usize) {
        for &h in &self.db.component(i)[e].image {
            self.used[x][h] = false;
        }
        self.assign[i] = (usize::MAX, usize::MAX);
    }

    /// Whether mapping component `i` by `entry` into host component `x` is a
    /// valid extension that survives pruning.
    fn admissible(&self, i: usize, entry: &DbEntry, x: usize) -> bool {
        let used = &self.used[x];
        if entry.image.iter().any(|&h| used[h]) {
            return false;
        }
        let g = self.graphs.graph(entry.graph);
        for &(a, j, b) in &self.cross[i] {
            let (xj, ej) = self.assign[j];
            if xj == x && g.has_edge(entry.image[a], self.db.component(j)[ej].image[b]) {
                return false;
            }
        }
        if !self.mode.prunes() {
            return true;
        }
        let here = SlotMono {
            graph: entry.graph,
            slot: x,
            key: &entry.key,
        };
        for &j in &self.earlier[i] {
            let (xj, ej) = self.assign[j];
            let other = &self.db.component(j)[ej];
            let there = SlotMono {
                graph: other.graph,
                slot: xj,
                key: &other.key,
            };
            if there >= here {
                return false;
            }
        }
        minimal::is_minimal(self.info, self.graphs, self.mode, i, entry, used)
    }
}
