use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::{connected_components, LabeledGraph, UnionGraph};
use crate::matching::is_monomorphism;

use super::Rule;

/// Applies `p` to `host` at the total match `m`, where `m[v]` is the global
/// host vertex of left vertex `v`.
///
/// Surviving host vertices keep their relative order and created vertices
/// follow in right-side order. The result is split into its connected
/// components.
pub fn apply(p: &Rule, host: &UnionGraph, m: &[usize]) -> Result<UnionGraph> {
    let g = host.to_graph();
    if m.len() != p.left().vertex_count() || !is_monomorphism(p.left(), &g, m) {
        return Err(Error::InvalidMatch("not a monomorphism of L".into()));
    }
    let partial: Vec<Option<usize>> = m.iter().map(|&h| Some(h)).collect();
    if !p.check_valid(&g, &partial) {
        return Err(Error::InvalidMatch(
            "dangling or parallel edge condition violated".into(),
        ));
    }
    let mut hit = vec![false; host.len()];
    for &h in m {
        hit[host.gamma(h).0] = true;
    }
    if hit.contains(&false) {
        return Err(Error::InvalidMatch("match is not proper".into()));
    }
    Ok(connected_components(&rewrite(p, &g, m)))
}

/// The rewritten graph without validity checks.
pub(crate) fn rewrite(p: &Rule, g: &LabeledGraph, m: &[usize]) -> LabeledGraph {
    let n = g.vertex_count();
    let mut removed = vec![false; n];
    let mut relabel: Vec<Option<&str>> = vec![None; n];
    for (v, &h) in m.iter().enumerate() {
        match p.l_to_k(v) {
            None => removed[h] = true,
            Some(k) => relabel[h] = Some(p.right().label(p.k_to_r()[k]).as_str()),
        }
    }
    let mut dropped_edges = HashSet::new();
    let mut edge_relabel = std::collections::HashMap::new();
    for (i, e) in p.left().edges().iter().enumerate() {
        let key = (m[e.u].min(m[e.v]), m[e.u].max(m[e.v]));
        match p.left_edge_in_context(i) {
            None => {
                dropped_edges.insert(key);
            }
            Some(ke) => {
                let r = &p.right().edges()[p.context_edge_in_right(ke)];
                edge_relabel.insert(key, r.label.clone());
            }
        }
    }
    let mut h = LabeledGraph::new();
    let mut new_index = vec![usize::MAX; n];
    for v in 0..n {
        if !removed[v] {
            let label = relabel[v].unwrap_or(g.label(v).as_str());
            new_index[v] = h.add_vertex(label);
        }
    }
    let mut r_index = vec![usize::MAX; p.right().vertex_count()];
    for (rv, slot) in r_index.iter_mut().enumerate() {
        *slot = match p.r_to_k(rv) {
            Some(k) => new_index[m[p.k_to_l()[k]]],
            None => h.add_vertex(p.right().label(rv).clone()),
        };
    }
    for e in g.edges() {
        if dropped_edges.contains(&(e.u, e.v)) || removed[e.u] || removed[e.v] {
            continue;
        }
        let label = edge_relabel
            .get(&(e.u, e.v))
            .cloned()
            .unwrap_or_else(|| e.label.clone());
        h.add_edge(new_index[e.u], new_index[e.v], label)
            .expect("host edges stay simple");
    }
    let mut kept = vec![false; p.right().edge_count()];
    for ke in 0..p.context().edge_count() {
        kept[p.context_edge_in_right(ke)] = true;
    }
    for (i, e) in p.right().edges().iter().enumerate() {
        if !kept[i] {
            h.add_edge(r_index[e.u], r_index[e.v], e.label.clone())
                .expect("valid matches create no parallel edges");
        }
    }
    h
}
