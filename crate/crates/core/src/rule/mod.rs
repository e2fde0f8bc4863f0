//! Double-pushout rules `L <- K -> R`, match validity and rule application.
//!
//! Both morphisms are injective. `l` and `r` preserve structure but may
//! change labels: a context vertex or edge whose left and right labels
//! differ is relabeled by the rule. Labels of `K` itself equal the left
//! labels and carry no meaning beyond that.

mod apply;
mod automorphism;
mod derivation;
mod parse;

pub use apply::apply;
pub(crate) use apply::rewrite;
pub use automorphism::RuleAutInfo;
pub use derivation::Derivation;
pub use parse::{parse_rule, parse_rules, render_rule};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{split_components, LabeledGraph, UnionGraph};

#[derive(Clone, Debug)]
pub struct Rule {
    name: String,
    left: LabeledGraph,
    context: LabeledGraph,
    right: LabeledGraph,
    k_to_l: Vec<usize>,
    k_to_r: Vec<usize>,
    l_to_k: Vec<Option<usize>>,
    r_to_k: Vec<Option<usize>>,
    /// Left edge index to context edge index.
    le_to_k: Vec<Option<usize>>,
    /// Context edge index to right edge index.
    ke_to_r: Vec<usize>,
    components: UnionGraph,
    comp_of: Vec<(usize, usize)>,
    comp_vertices: Vec<Vec<usize>>,
    created_pairs: Vec<(usize, usize)>,
}

impl PartialEq for Rule {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.left == other.left
            && self.context == other.context
            && self.right == other.right
            && self.k_to_l == other.k_to_l
            && self.k_to_r == other.k_to_r
    }
}

impl Eq for Rule {}

impl Rule {
    /// Builds a rule from its three graphs and the vertex maps `K -> L` and
    /// `K -> R`.
    pub fn new(
        name: impl Into<String>,
        left: LabeledGraph,
        context: LabeledGraph,
        right: LabeledGraph,
        k_to_l: Vec<usize>,
        k_to_r: Vec<usize>,
    ) -> Result<Rule> {
        let name = name.into();
        let nk = context.vertex_count();
        if k_to_l.len() != nk || k_to_r.len() != nk {
            return Err(Error::IllFormedRule(format!(
                "{name}: context maps must cover all {nk} context vertices"
            )));
        }
        let l_to_k = invert_map(&k_to_l, left.vertex_count())
            .ok_or_else(|| Error::IllFormedRule(format!("{name}: K -> L is not injective")))?;
        let r_to_k = invert_map(&k_to_r, right.vertex_count())
            .ok_or_else(|| Error::IllFormedRule(format!("{name}: K -> R is not injective")))?;
        let mut le_to_k = vec![None; left.edge_count()];
        let mut ke_to_r = Vec::with_capacity(context.edge_count());
        for (ke, e) in context.edges().iter().enumerate() {
            let le = left.edge_between(k_to_l[e.u], k_to_l[e.v]);
            let re = right.edge_between(k_to_r[e.u], k_to_r[e.v]);
            let (Some(le), Some(re)) = (le, re) else {
                return Err(Error::IllFormedRule(format!(
                    "{name}: context edge {}-{} is missing on one side",
                    e.u, e.v
                )));
            };
            let li = left.edges().iter().position(|x| x == le).unwrap();
            let ri = right.edges().iter().position(|x| x == re).unwrap();
            le_to_k[li] = Some(ke);
            ke_to_r.push(ri);
        }
        let (components, comp_of) = split_components(&left);
        let mut comp_vertices = vec![Vec::new(); components.len()];
        for (v, &(c, _)) in comp_of.iter().enumerate() {
            comp_vertices[c].push(v);
        }
        let mut created_pairs = Vec::new();
        for (ri, e) in right.edges().iter().enumerate() {
            if ke_to_r.contains(&ri) {
                continue;
            }
            if let (Some(a), Some(b)) = (r_to_k[e.u], r_to_k[e.v]) {
                let (x, y) = (k_to_l[a], k_to_l[b]);
                created_pairs.push((x.min(y), x.max(y)));
            }
        }
        created_pairs.sort_unstable();
        Ok(Rule {
            name,
            left,
            context,
            right,
            k_to_l,
            k_to_r,
            l_to_k,
            r_to_k,
            le_to_k,
            ke_to_r,
            components,
            comp_of,
            comp_vertices,
            created_pairs,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn left(&self) -> &LabeledGraph {
        &self.left
    }

    pub fn context(&self) -> &LabeledGraph {
        &self.context
    }

    pub fn right(&self) -> &LabeledGraph {
        &self.right
    }

    pub fn k_to_l(&self) -> &[usize] {
        &self.k_to_l
    }

    pub fn k_to_r(&self) -> &[usize] {
        &self.k_to_r
    }

    pub fn l_to_k(&self, v: usize) -> Option<usize> {
        self.l_to_k[v]
    }

    pub fn r_to_k(&self, v: usize) -> Option<usize> {
        self.r_to_k[v]
    }

    /// Whether left vertex `v` is removed by the rule.
    pub fn is_deleted(&self, v: usize) -> bool {
        self.l_to_k[v].is_none()
    }

    pub(crate) fn left_edge_in_context(&self, e: usize) -> Option<usize> {
        self.le_to_k[e]
    }

    pub(crate) fn context_edge_in_right(&self, e: usize) -> usize {
        self.ke_to_r[e]
    }

    /// Connected components of `L`, ordered by their smallest vertex.
    pub fn components(&self) -> &UnionGraph {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Arc<LabeledGraph> {
        self.components.component(i)
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// `(component, local index)` of left vertex `v`.
    pub fn component_of(&self, v: usize) -> (usize, usize) {
        self.comp_of[v]
    }

    /// Left vertices of component `c` in local order.
    pub fn component_vertices(&self, c: usize) -> &[usize] {
        &self.comp_vertices[c]
    }

    /// Pairs of left vertices (both preserved) that the rule joins with a
    /// new edge.
    pub fn created_pairs(&self) -> &[(usize, usize)] {
        &self.created_pairs
    }

    /// Swaps the two sides of the rule.
    pub fn invert(&self) -> Rule {
        let name = match self.name.strip_suffix(INVERSE_SUFFIX) {
            Some(base) => base.to_owned(),
            None => format!("{}{INVERSE_SUFFIX}", self.name),
        };
        let mut context = LabeledGraph::new();
        for &rv in &self.k_to_r {
            context.add_vertex(self.right.label(rv).clone());
        }
        for (ke, e) in self.context.edges().iter().enumerate() {
            let label = self.right.edges()[self.ke_to_r[ke]].label.clone();
            context
                .add_edge(e.u, e.v, label)
                .expect("copy of a simple graph");
        }
        Rule::new(
            name,
            self.right.clone(),
            context,
            self.left.clone(),
            self.k_to_r.clone(),
            self.k_to_l.clone(),
        )
        .expect("the inverse of a well-formed rule is well-formed")
    }

    /// Checks the dangling and parallel edge conditions for a possibly
    /// partial match, restricted to the vertices defined in `m`.
    ///
    /// `m[v]` is the host image of left vertex `v`. The map must be an
    /// injective, label and edge preserving map on its domain.
    pub fn check_valid(&self, host: &LabeledGraph, m: &[Option<usize>]) -> bool {
        debug_assert_eq!(m.len(), self.left.vertex_count());
        for (u, &h) in m.iter().enumerate() {
            let Some(h) = h else { continue };
            if self.is_deleted(u) {
                let matched = self
                    .left
                    .neighbors(u)
                    .iter()
                    .filter(|&&(w, _)| m[w].is_some())
                    .count();
                if host.degree(h) != matched {
                    return false;
                }
            }
        }
        self.created_pairs.iter().all(|&(a, b)| match (m[a], m[b]) {
            (Some(x), Some(y)) => !host.has_edge(x, y),
            _ => true,
        })
    }
}

const INVERSE_SUFFIX: &str = " (inverse)";

fn invert_map(map: &[usize], n: usize) -> Option<Vec<Option<usize>>> {
    let mut inv = vec![None; n];
    for (k, &v) in map.iter().enumerate() {
        if v >= n || inv[v].is_some() {
            return None;
        }
        inv[v] = Some(k);
    }
    Some(inv)
}
