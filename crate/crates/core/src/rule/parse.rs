//! Reading and writing rules in the bracketed text format.
//!
//! ```text
//! rule [
//!   ruleID "name"
//!   left    [ node [...] edge [...] ]
//!   context [ node [...] edge [...] ]
//!   right   [ node [...] edge [...] ]
//! ]
//! ```
//!
//! An element in `context` is preserved. One in `left` only is deleted and
//! one in `right` only is created. An element listed in both `left` and
//! `right` is preserved and relabeled from its left to its right label.
//! Vertices of `L`, `K` and `R` are numbered by ascending id.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::gml::{self, quote, Value};
use crate::graph::{read_items, LabeledGraph, RawEdge, RawNode};

use super::Rule;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Side {
    Left,
    Context,
    Right,
}

#[derive(Default)]
struct Entry {
    left: Option<String>,
    context: Option<String>,
    right: Option<String>,
}

impl Entry {
    fn slot(&mut self, side: Side) -> &mut Option<String> {
        match side {
            Side::Left => &mut self.left,
            Side::Context => &mut self.context,
            Side::Right => &mut self.right,
        }
    }

    /// Labels on the left and right side, if present there.
    fn sides(&self) -> (Option<&str>, Option<&str>) {
        match &self.context {
            Some(c) => (Some(c), Some(c)),
            None => (self.left.as_deref(), self.right.as_deref()),
        }
    }
}

pub fn parse_rule(text: &str) -> Result<Rule> {
    let mut rules = parse_rules(text)?;
    match rules.len() {
        1 => Ok(rules.pop().unwrap()),
        n => Err(Error::Parse {
            line: 1,
            reason: format!("expected exactly one rule, found {n}"),
        }),
    }
}

/// Parses every `rule [ ... ]` block of a document.
pub fn parse_rules(text: &str) -> Result<Vec<Rule>> {
    let doc = gml::read(text)?;
    let mut out = Vec::new();
    for entry in &doc {
        match (&entry.key[..], &entry.value) {
            ("rule", Value::List(items)) => out.push(read_rule(items, entry.line)?),
            _ => {
                return Err(Error::Parse {
                    line: entry.line,
                    reason: format!("expected 'rule [', found '{}'", entry.key),
                })
            }
        }
    }
    Ok(out)
}

fn read_rule(items: &[gml::Entry], line: usize) -> Result<Rule> {
    let mut name = None;
    let mut nodes: BTreeMap<u64, Entry> = BTreeMap::new();
    let mut edges: BTreeMap<(u64, u64), Entry> = BTreeMap::new();
    let mut raw_edges: Vec<(Side, RawEdge)> = Vec::new();
    for item in items {
        let side = match (&item.key[..], &item.value) {
            ("ruleID", Value::Str(s)) => {
                if name.replace(s.clone()).is_some() {
                    return Err(Error::Parse {
                        line: item.line,
                        reason: "duplicate 'ruleID'".into(),
                    });
                }
                continue;
            }
            ("left", Value::List(_)) => Side::Left,
            ("context", Value::List(_)) => Side::Context,
            ("right", Value::List(_)) => Side::Right,
            (key, _) => {
                return Err(Error::Parse {
                    line: item.line,
                    reason: format!("unexpected '{key}' in rule"),
                })
            }
        };
        let Value::List(list) = &item.value else {
            unreachable!()
        };
        let (ns, es) = read_items(list)?;
        for RawNode { id, label, line } in ns {
            let slot = nodes.entry(id).or_default().slot(side);
            if slot.replace(label).is_some() {
                return Err(Error::Parse {
                    line,
                    reason: format!("node {id} listed twice in {side:?}"),
                });
            }
        }
        for e in es {
            raw_edges.push((side, e));
        }
    }
    let name = name.ok_or(Error::Parse {
        line,
        reason: "missing 'ruleID'".into(),
    })?;
    let ill = |reason: String| Error::IllFormedRule(format!("{name}: {reason}"));
    for (id, n) in &nodes {
        if n.context.is_some() && (n.left.is_some() || n.right.is_some()) {
            return Err(ill(format!("node {id} is in context and on a side")));
        }
    }
    for (side, e) in raw_edges {
        if e.source == e.target {
            return Err(ill(format!("self-loop at node {}", e.source)));
        }
        let (lo, hi) = (e.source.min(e.target), e.source.max(e.target));
        for id in [lo, hi] {
            let present = nodes.get(&id).is_some_and(|n| {
                let (l, r) = n.sides();
                match side {
                    Side::Left => l.is_some(),
                    Side::Right => r.is_some(),
                    Side::Context => l.is_some() && r.is_some(),
                }
            });
            if !present {
                return Err(ill(format!(
                    "edge {}-{} (line {}) uses node {id} missing from {side:?}",
                    e.source, e.target, e.line
                )));
            }
        }
        let slot = edges.entry((lo, hi)).or_default().slot(side);
        if slot.replace(e.label).is_some() {
            return Err(Error::Parse {
                line: e.line,
                reason: format!("edge {lo}-{hi} listed twice in {side:?}"),
            });
        }
    }
    for ((a, b), e) in &edges {
        if e.context.is_some() && (e.left.is_some() || e.right.is_some()) {
            return Err(ill(format!("edge {a}-{b} is in context and on a side")));
        }
    }

    let mut left = LabeledGraph::new();
    let mut context = LabeledGraph::new();
    let mut right = LabeledGraph::new();
    let (mut li, mut ki, mut ri) = (BTreeMap::new(), BTreeMap::new(), BTreeMap::new());
    let (mut k_to_l, mut k_to_r) = (Vec::new(), Vec::new());
    for (&id, n) in &nodes {
        let (l, r) = n.sides();
        if let Some(l) = l {
            li.insert(id, left.add_vertex(l));
        }
        if let Some(r) = r {
            ri.insert(id, right.add_vertex(r));
        }
        if let (Some(l), Some(_)) = (l, r) {
            ki.insert(id, context.add_vertex(l));
            k_to_l.push(li[&id]);
            k_to_r.push(ri[&id]);
        }
    }
    let to_rule_err = |e: Error| match e {
        Error::InvalidGraph(r) => ill(r),
        other => other,
    };
    for (&(a, b), e) in &edges {
        let (l, r) = e.sides();
        if let Some(l) = l {
            left.add_edge(li[&a], li[&b], l).map_err(to_rule_err)?;
        }
        if let Some(r) = r {
            right.add_edge(ri[&a], ri[&b], r).map_err(to_rule_err)?;
        }
        if let (Some(l), Some(_)) = (l, r) {
            context.add_edge(ki[&a], ki[&b], l).map_err(to_rule_err)?;
        }
    }
    Rule::new(name, left, context, right, k_to_l, k_to_r)
}

/// Writes `p` in the rule format. Left vertex `v` gets id `v`; created
/// right vertices get ids after all left vertices.
pub fn render_rule(p: &Rule) -> String {
    let nl = p.left().vertex_count();
    let mut r_id = vec![0usize; p.right().vertex_count()];
    let mut next = nl;
    for (v, id) in r_id.iter_mut().enumerate() {
        *id = match p.r_to_k(v) {
            Some(k) => p.k_to_l()[k],
            None => {
                next += 1;
                next - 1
            }
        };
    }
    let (mut left, mut context, mut right) = (String::new(), String::new(), String::new());
    let node = |id: usize, label: &str| format!("    node [ id {id} label {} ]\n", quote(label));
    let edge = |a: usize, b: usize, label: &str| {
        format!(
            "    edge [ source {a} target {b} label {} ]\n",
            quote(label)
        )
    };
    for v in 0..nl {
        let l = p.left().label(v).as_str();
        match p.l_to_k(v) {
            None => left.push_str(&node(v, l)),
            Some(k) => {
                let r = p.right().label(p.k_to_r()[k]).as_str();
                if l == r {
                    context.push_str(&node(v, l));
                } else {
                    left.push_str(&node(v, l));
                    right.push_str(&node(v, r));
                }
            }
        }
    }
    for (v, &id) in r_id.iter().enumerate() {
        if p.r_to_k(v).is_none() {
            right.push_str(&node(id, p.right().label(v).as_str()));
        }
    }
    let mut kept_right = vec![false; p.right().edge_count()];
    for (i, e) in p.left().edges().iter().enumerate() {
        match p.left_edge_in_context(i) {
            None => left.push_str(&edge(e.u, e.v, e.label.as_str())),
            Some(ke) => {
                let ri = p.context_edge_in_right(ke);
                kept_right[ri] = true;
                let r = p.right().edges()[ri].label.as_str();
                if r == e.label.as_str() {
                    context.push_str(&edge(e.u, e.v, r));
                } else {
                    left.push_str(&edge(e.u, e.v, e.label.as_str()));
                    right.push_str(&edge(e.u, e.v, r));
                }
            }
        }
    }
    for (i, e) in p.right().edges().iter().enumerate() {
        if !kept_right[i] {
            right.push_str(&edge(r_id[e.u], r_id[e.v], e.label.as_str()));
        }
    }
    let mut s = format!("rule [\n  ruleID {}\n", quote(p.name()));
    for (key, body) in [("left", left), ("context", context), ("right", right)] {
        s.push_str(&format!("  {key} [\n{body}  ]\n"));
    }
    s.push_str("]\n");
    s
}
