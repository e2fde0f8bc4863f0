//! Brute-force reference enumeration for small instances.
//!
//! Nothing here uses canonical forms: matches are found by exhaustive
//! search over injective vertex maps and derivations are grouped into
//! isomorphism classes by searching rule automorphisms and host
//! isomorphisms directly.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::canon::{encode_derivation, CanonicalCode};
use crate::error::{Error, Result};
use crate::graph::{LabeledGraph, UnionGraph};
use crate::perm::Perm;
use crate::rule::Rule;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_components: usize,
    pub max_multiset_size: usize,
    pub max_host_vertices: usize,
    /// Cap on complete injective maps examined over all hosts.
    pub max_maps: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_components: 3,
            max_multiset_size: 3,
            max_host_vertices: 32,
            max_maps: 20_000_000,
        }
    }
}

/// A proper derivation over a list of input graphs. Host components are
/// listed in discovery order: component `x` is first hit by a smaller left
/// component than component `x + 1`. This is the normal form of a
/// derivation up to reordering of host components.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RawDerivation {
    /// Input graph index of each host component.
    pub hosts: Vec<usize>,
    /// `(host component, local vertex)` of each left vertex.
    pub m: Vec<(usize, usize)>,
}

impl RawDerivation {
    /// Brings a match into a host with components `hosts` into normal form.
    pub fn normalized(p: &Rule, hosts: &[usize], m: &[(usize, usize)]) -> RawDerivation {
        let mut order = vec![usize::MAX; hosts.len()];
        let mut next = 0;
        for c in 0..p.component_count() {
            let x = m[p.component_vertices(c)[0]].0;
            if order[x] == usize::MAX {
                order[x] = next;
                next += 1;
            }
        }
        let mut new_hosts = vec![0; next];
        for (x, &o) in order.iter().enumerate() {
            if o != usize::MAX {
                new_hosts[o] = hosts[x];
            }
        }
        RawDerivation {
            hosts: new_hosts,
            m: m.iter().map(|&(x, a)| (order[x], a)).collect(),
        }
    }

    pub fn host(&self, graphs: &[Arc<LabeledGraph>]) -> UnionGraph {
        UnionGraph::from_components(self.hosts.iter().map(|&i| graphs[i].clone()))
            .expect("input graphs are connected")
    }

    pub fn global_match(&self, graphs: &[Arc<LabeledGraph>]) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.hosts.len());
        let mut acc = 0;
        for &i in &self.hosts {
            offsets.push(acc);
            acc += graphs[i].vertex_count();
        }
        self.m.iter().map(|&(x, a)| offsets[x] + a).collect()
    }
}

#[derive(Clone, Debug)]
pub struct OracleOutput {
    /// Every proper derivation up to host reordering, sorted.
    pub derivations: Vec<RawDerivation>,
    /// Isomorphism classes as sorted indices into `derivations`.
    pub classes: Vec<Vec<usize>>,
}

impl OracleOutput {
    /// Derivation codes of all derivations, one per class if the coding is
    /// correct.
    pub fn codes(&self, p: &Rule, graphs: &[Arc<LabeledGraph>]) -> BTreeSet<CanonicalCode> {
        self.derivations
            .iter()
            .map(|d| derivation_code(p, graphs, d))
            .collect()
    }
}

pub fn derivation_code(p: &Rule, graphs: &[Arc<LabeledGraph>], d: &RawDerivation) -> CanonicalCode {
    encode_derivation(p, &d.host(graphs).to_graph(), &d.global_match(graphs))
        .expect("oracle matches are total")
}

/// Solves both enumeration problems by exhaustive search. The input graphs
/// must be connected and pairwise non-isomorphic.
pub fn brute_force_derivations(
    graphs: &[Arc<LabeledGraph>],
    p: &Rule,
    budget: &OracleBudget,
) -> Result<OracleOutput> {
    let derivations = proper_derivations(graphs, p, budget)?;
    let classes = derivation_classes(p, graphs, &derivations);
    Ok(OracleOutput {
        derivations,
        classes,
    })
}

/// Every proper derivation up to host reordering, sorted.
pub fn proper_derivations(
    graphs: &[Arc<LabeledGraph>],
    p: &Rule,
    budget: &OracleBudget,
) -> Result<Vec<RawDerivation>> {
    let k = p.component_count();
    if k > budget.max_components {
        return Err(Error::BudgetExceeded(format!(
            "{k} left components, limit {}",
            budget.max_components
        )));
    }
    let mut found = BTreeSet::new();
    let mut maps = 0u64;
    for size in 1..=k.min(budget.max_multiset_size) {
        let mut multiset = vec![0; size];
        if graphs.is_empty() {
            break;
        }
        loop {
            let host = UnionGraph::from_components(multiset.iter().map(|&i| graphs[i].clone()))?;
            if host.vertex_count() > budget.max_host_vertices {
                return Err(Error::BudgetExceeded(format!(
                    "host with {} vertices, limit {}",
                    host.vertex_count(),
                    budget.max_host_vertices
                )));
            }
            let g = host.to_graph();
            let mut over = false;
            for_each_injective_map(p.left(), &g, |m| {
                maps += 1;
                if maps > budget.max_maps {
                    over = true;
                    return false;
                }
                let partial: Vec<Option<usize>> = m.iter().map(|&h| Some(h)).collect();
                let mut hit = vec![false; size];
                for &h in m {
                    hit[host.gamma(h).0] = true;
                }
                if !hit.contains(&false) && p.check_valid(&g, &partial) {
                    let local: Vec<(usize, usize)> = m.iter().map(|&h| host.gamma(h)).collect();
                    found.insert(RawDerivation::normalized(p, &multiset, &local));
                }
                true
            });
            if over {
                return Err(Error::BudgetExceeded(format!(
                    "more than {} maps",
                    budget.max_maps
                )));
            }
            if !next_multiset(&mut multiset, graphs.len()) {
                break;
            }
        }
    }
    Ok(found.into_iter().collect())
}

/// Advances a nondecreasing index sequence; false after the last one.
fn next_multiset(ms: &mut [usize], n: usize) -> bool {
    for i in (0..ms.len()).rev() {
        if ms[i] + 1 < n {
            let v = ms[i] + 1;
            for x in &mut ms[i..] {
                *x = v;
            }
            return true;
        }
    }
    false
}

/// Calls `visit` with every injective label and edge preserving map from
/// `pattern` into `host`, assigning pattern vertices in index order.
pub fn for_each_injective_map(
    pattern: &LabeledGraph,
    host: &LabeledGraph,
    mut visit: impl FnMut(&[usize]) -> bool,
) {
    let mut m = Vec::with_capacity(pattern.vertex_count());
    let mut used = vec![false; host.vertex_count()];
    injective_rec(pattern, host, &mut m, &mut used, &mut visit);
}

fn injective_rec(
    pattern: &LabeledGraph,
    host: &LabeledGraph,
    m: &mut Vec<usize>,
    used: &mut [bool],
    visit: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    let v = m.len();
    if v == pattern.vertex_count() {
        return visit(m);
    }
    for h in 0..host.vertex_count() {
        if used[h] || host.label(h) != pattern.label(v) {
            continue;
        }
        let edges_ok = pattern.neighbors(v).iter().all(|&(w, e)| {
            w > v
                || host
                    .edge_between(h, m[w])
                    .is_some_and(|he| he.label == pattern.edges()[e].label)
        });
        if !edges_ok {
            continue;
        }
        used[h] = true;
        m.push(h);
        let go_on = injective_rec(pattern, host, m, used, visit);
        m.pop();
        used[h] = false;
        if !go_on {
            return false;
        }
    }
    true
}

/// Calls `visit` with every isomorphism `a -> b` extending the pairs in
/// `forced`, until it returns false.
pub fn for_each_isomorphism(
    a: &LabeledGraph,
    b: &LabeledGraph,
    forced: &[(usize, usize)],
    mut visit: impl FnMut(&[usize]) -> bool,
) {
    let n = a.vertex_count();
    if n != b.vertex_count() || a.edge_count() != b.edge_count() {
        return;
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for &(x, y) in forced {
        if map[x] == y {
            continue;
        }
        if map[x] != usize::MAX || used[y] {
            return;
        }
        map[x] = y;
        used[y] = true;
    }
    let mut order: Vec<usize> = (0..n).filter(|&x| map[x] != usize::MAX).collect();
    let free: Vec<usize> = (0..n).filter(|&x| map[x] == usize::MAX).collect();
    // a forced prefix must be consistent on its own
    for (i, &x) in order.iter().enumerate() {
        if !consistent(a, b, &map, &order[..i], x, map[x]) {
            return;
        }
    }
    let start = order.len();
    order.extend(free);
    iso_rec(a, b, &order, start, &mut map, &mut used, &mut visit);
}

fn consistent(
    a: &LabeledGraph,
    b: &LabeledGraph,
    map: &[usize],
    assigned: &[usize],
    x: usize,
    y: usize,
) -> bool {
    if a.label(x) != b.label(y) || a.degree(x) != b.degree(y) {
        return false;
    }
    assigned.iter().all(
        |&w| match (a.edge_between(x, w), b.edge_between(y, map[w])) {
            (None, None) => true,
            (Some(e), Some(f)) => e.label == f.label,
            _ => false,
        },
    )
}

fn iso_rec(
    a: &LabeledGraph,
    b: &LabeledGraph,
    order: &[usize],
    depth: usize,
    map: &mut [usize],
    used: &mut [bool],
    visit: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    if depth == order.len() {
        return visit(map);
    }
    let x = order[depth];
    for y in 0..b.vertex_count() {
        if used[y] || !consistent(a, b, map, &order[..depth], x, y) {
            continue;
        }
        map[x] = y;
        used[y] = true;
        let go_on = iso_rec(a, b, order, depth + 1, map, used, visit);
        used[y] = false;
        map[x] = usize::MAX;
        if !go_on {
            return false;
        }
    }
    true
}

/// All automorphisms of a graph with at most nine vertices.
pub fn brute_force_aut(g: &LabeledGraph) -> Result<Vec<Perm>> {
    if g.vertex_count() > 9 {
        return Err(Error::BudgetExceeded(format!(
            "{} vertices, limit 9",
            g.vertex_count()
        )));
    }
    let mut out = Vec::new();
    for_each_isomorphism(g, g, &[], |m| {
        out.push(Perm::from_images(m.to_vec()).expect("bijection"));
        true
    });
    out.sort_by(|x, y| x.images().cmp(y.images()));
    Ok(out)
}

/// Left parts `alpha_L` of all rule automorphisms `(alpha_L, alpha_K, alpha_R)`.
pub fn brute_force_rule_aut(p: &Rule) -> Vec<Perm> {
    let (l, k, r) = (p.left(), p.context(), p.right());
    let mut out = Vec::new();
    for_each_isomorphism(l, l, &[], |al| {
        let mut ak = Vec::with_capacity(k.vertex_count());
        for x in 0..k.vertex_count() {
            match p.l_to_k(al[p.k_to_l()[x]]) {
                Some(y) => ak.push(y),
                None => return true,
            }
        }
        let k_ok = (0..k.vertex_count()).all(|x| k.label(x) == k.label(ak[x]))
            && k.edges().iter().all(|e| {
                k.edge_between(ak[e.u], ak[e.v])
                    .is_some_and(|f| f.label == e.label)
            });
        if !k_ok {
            return true;
        }
        let forced: Vec<(usize, usize)> = (0..k.vertex_count())
            .map(|x| (p.k_to_r()[x], p.k_to_r()[ak[x]]))
            .collect();
        let mut extends = false;
        for_each_isomorphism(r, r, &forced, |_| {
            extends = true;
            false
        });
        if extends {
            out.push(Perm::from_images(al.to_vec()).expect("bijection"));
        }
        true
    });
    out
}

/// Whether some rule automorphism `alpha` and host isomorphism `phi` give
/// `phi ∘ m1 = m2 ∘ alpha_L`.
pub fn derivations_isomorphic(
    rule_aut: &[Perm],
    h1: &LabeledGraph,
    m1: &[usize],
    h2: &LabeledGraph,
    m2: &[usize],
) -> bool {
    rule_aut.iter().any(|alpha| {
        let forced: Vec<(usize, usize)> =
            (0..m1.len()).map(|v| (m1[v], m2[alpha.apply(v)])).collect();
        let mut found = false;
        for_each_isomorphism(h1, h2, &forced, |_| {
            found = true;
            false
        });
        found
    })
}

/// Groups derivations into isomorphism classes. Inputs must be pairwise
/// non-isomorphic, so only derivations over equal multisets are compared.
pub fn derivation_classes(
    p: &Rule,
    graphs: &[Arc<LabeledGraph>],
    derivations: &[RawDerivation],
) -> Vec<Vec<usize>> {
    let rule_aut = brute_force_rule_aut(p);
    let prepared: Vec<(Vec<usize>, LabeledGraph, Vec<usize>)> = derivations
        .iter()
        .map(|d| {
            let mut ms = d.hosts.clone();
            ms.sort_unstable();
            (ms, d.host(graphs).to_graph(), d.global_match(graphs))
        })
        .collect();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut by_multiset: HashMap<&[usize], Vec<usize>> = HashMap::new();
    for (i, (ms, h, m)) in prepared.iter().enumerate() {
        let candidates = by_multiset.entry(ms.as_slice()).or_default();
        let joined = candidates.iter().copied().find(|&c| {
            let rep = classes[c][0];
            derivations_isomorphic(&rule_aut, h, m, &prepared[rep].1, &prepared[rep].2)
        });
        match joined {
            Some(c) => classes[c].push(i),
            None => {
                candidates.push(classes.len());
                classes.push(vec![i]);
            }
        }
    }
    classes
}
