//! Labeled simple graphs, connected components and union graphs.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gml::{self, Fields, Value};

/// Vertex or edge label. Two labels match iff their strings are equal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(pub String);

impl Label {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_owned())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label(s)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An undirected edge `u < v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub label: Label,
}

/// A finite labeled simple graph with vertices `0..n`.
///
/// Vertex indices are assigned at construction and never change. Edges keep
/// their insertion order; each is stored with its endpoints sorted.
#[derive(Clone, Default)]
pub struct LabeledGraph {
    name: Option<String>,
    labels: Vec<Label>,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl PartialEq for LabeledGraph {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.edges == other.edges
    }
}

impl Eq for LabeledGraph {}

impl fmt::Debug for LabeledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LabeledGraph[")?;
        for (i, l) in self.labels.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{i}:{l}")?;
        }
        write!(f, ";")?;
        for e in &self.edges {
            write!(f, " {}-{}:{}", e.u, e.v, e.label)?;
        }
        write!(f, "]")
    }
}

impl LabeledGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from vertex labels and `(u, v, label)` edges.
    pub fn from_parts<L, E>(labels: impl IntoIterator<Item = L>, edges: E) -> Result<Self>
    where
        L: Into<Label>,
        E: IntoIterator<Item = (usize, usize, L)>,
    {
        let mut g = Self::new();
        for l in labels {
            g.add_vertex(l);
        }
        for (u, v, l) in edges {
            g.add_edge(u, v, l)?;
        }
        Ok(g)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn add_vertex(&mut self, label: impl Into<Label>) -> usize {
        self.labels.push(label.into());
        self.adj.push(Vec::new());
        self.labels.len() - 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize, label: impl Into<Label>) -> Result<usize> {
        let n = self.labels.len();
        if u >= n || v >= n {
            return Err(Error::InvalidGraph(format!(
                "edge {u}-{v} references a missing vertex"
            )));
        }
        if u == v {
            return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
        }
        if self.has_edge(u, v) {
            return Err(Error::InvalidGraph(format!("parallel edge {u}-{v}")));
        }
        let idx = self.edges.len();
        self.edges.push(Edge {
            u: u.min(v),
            v: u.max(v),
            label: label.into(),
        });
        self.adj[u].push((v, idx));
        self.adj[v].push((u, idx));
        Ok(idx)
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn label(&self, v: usize) -> &Label {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `v` as `(neighbor, edge index)` pairs.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<&Edge> {
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a]
            .iter()
            .find(|&&(w, _)| w == b)
            .map(|&(_, e)| &self.edges[e])
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_between(u, v).is_some()
    }

    pub fn count_label(&self, label: &str) -> usize {
        self.labels.iter().filter(|l| l.0 == label).count()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(w, _) in &self.adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    /// Renumbers vertices so that old vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> LabeledGraph {
        let n = self.vertex_count();
        assert_eq!(perm.len(), n, "permutation length mismatch");
        let mut labels = vec![Label::default(); n];
        for v in 0..n {
            labels[perm[v]] = self.labels[v].clone();
        }
        let mut g = LabeledGraph::new();
        for l in labels {
            g.add_vertex(l);
        }
        for e in &self.edges {
            g.add_edge(perm[e.u], perm[e.v], e.label.clone())
                .expect("permutation preserves simplicity");
        }
        g.name = self.name.clone();
        g
    }

    /// Induced subgraph on `vertices`, numbered in the given order.
    pub fn induced(&self, vertices: &[usize]) -> LabeledGraph {
        let mut local = HashMap::with_capacity(vertices.len());
        let mut g = LabeledGraph::new();
        for &v in vertices {
            local.insert(v, g.add_vertex(self.labels[v].clone()));
        }
        for e in &self.edges {
            if let (Some(&a), Some(&b)) = (local.get(&e.u), local.get(&e.v)) {
                g.add_edge(a, b, e.label.clone())
                    .expect("subgraph of a simple graph");
            }
        }
        g
    }
}

/// Splits `g` into its connected components.
///
/// Components are ordered by their smallest vertex and each keeps its
/// vertices in ascending original order. The returned map sends every
/// original vertex to `(component, local index)`.
pub fn split_components(g: &LabeledGraph) -> (UnionGraph, Vec<(usize, usize)>) {
    let n = g.vertex_count();
    let mut comp = vec![usize::MAX; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let c = members.len();
        let mut verts = vec![s];
        comp[s] = c;
        let mut i = 0;
        while i < verts.len() {
            let u = verts[i];
            i += 1;
            for &(w, _) in g.neighbors(u) {
                if comp[w] == usize::MAX {
                    comp[w] = c;
                    verts.push(w);
                }
            }
        }
        verts.sort_unstable();
        members.push(verts);
    }
    let mut map = vec![(0, 0); n];
    let mut union = UnionGraph::new();
    for (c, verts) in members.iter().enumerate() {
        for (i, &v) in verts.iter().enumerate() {
            map[v] = (c, i);
        }
        union
            .extend(Arc::new(g.induced(verts)))
            .expect("components are connected");
    }
    (union, map)
}

pub fn connected_components(g: &LabeledGraph) -> UnionGraph {
    split_components(g).0
}

/// An ordered vector of connected graphs read as their disjoint union.
///
/// Global vertex indices enumerate the components in order, each in its own
/// local order.
#[derive(Clone, Debug, Default)]
pub struct UnionGraph {
    components: Vec<Arc<LabeledGraph>>,
    offsets: Vec<usize>,
}

impl PartialEq for UnionGraph {
    fn eq(&self, other: &Self) -> bool {
        self.components.len() == other.components.len()
            && self
                .components
                .iter()
                .zip(&other.components)
                .all(|(a, b)| Arc::ptr_eq(a, b) || a == b)
    }
}

impl Eq for UnionGraph {}

impl UnionGraph {
    pub fn new() -> Self {
        UnionGraph {
            components: Vec::new(),
            offsets: vec![0],
        }
    }

    pub fn from_components(
        components: impl IntoIterator<Item = Arc<LabeledGraph>>,
    ) -> Result<Self> {
        let mut u = Self::new();
        for g in components {
            u.extend(g)?;
        }
        Ok(u)
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[Arc<LabeledGraph>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Arc<LabeledGraph> {
        &self.components[i]
    }

    pub fn vertex_count(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    /// Maps a global vertex to `(component, local vertex)`.
    pub fn gamma(&self, v: usize) -> (usize, usize) {
        assert!(v < self.vertex_count(), "vertex {v} out of range");
        let c = self.offsets.partition_point(|&o| o <= v) - 1;
        (c, v - self.offsets[c])
    }

    pub fn global(&self, component: usize, local: usize) -> usize {
        debug_assert!(local < self.components[component].vertex_count());
        self.offsets[component] + local
    }

    pub fn offset(&self, component: usize) -> usize {
        self.offsets[component]
    }

    /// Appends `g` as the last component.
    pub fn extend(&mut self, g: Arc<LabeledGraph>) -> Result<()> {
        if !g.is_connected() {
            return Err(Error::NotConnected);
        }
        self.push_unchecked(g);
        Ok(())
    }

    pub(crate) fn push_unchecked(&mut self, g: Arc<LabeledGraph>) {
        if self.offsets.is_empty() {
            self.offsets.push(0);
        }
        let end = self.vertex_count() + g.vertex_count();
        self.components.push(g);
        self.offsets.push(end);
    }

    /// Removes the last component; the inverse of [`UnionGraph::extend`].
    pub fn pop(&mut self) -> Result<Arc<LabeledGraph>> {
        let g = self.components.pop().ok_or(Error::EmptyUnion)?;
        self.offsets.pop();
        Ok(g)
    }

    /// The disjoint union as a single graph in global vertex order.
    pub fn to_graph(&self) -> LabeledGraph {
        let mut g = LabeledGraph::new();
        for c in &self.components {
            let base = g.vertex_count();
            for l in c.labels() {
                g.add_vertex(l.clone());
            }
            for e in c.edges() {
                g.add_edge(base + e.u, base + e.v, e.label.clone())
                    .expect("components are simple");
            }
        }
        g
    }
}

/// Parses a single `graph [ ... ]` document.
pub fn parse_graph(text: &str) -> Result<LabeledGraph> {
    let mut graphs = parse_graphs(text)?;
    match graphs.len() {
        1 => Ok(graphs.pop().unwrap()),
        n => Err(Error::Parse {
            line: 1,
            reason: format!("expected exactly one graph, found {n}"),
        }),
    }
}

/// Parses a document holding any number of `graph [ ... ]` blocks.
pub fn parse_graphs(text: &str) -> Result<Vec<LabeledGraph>> {
    let doc = gml::read(text)?;
    let mut out = Vec::new();
    for entry in &doc {
        match (&entry.key[..], &entry.value) {
            ("graph", Value::List(items)) => {
                out.push(build_graph(items)?);
            }
            _ => {
                return Err(Error::Parse {
                    line: entry.line,
                    reason: format!("expected 'graph [', found '{}'", entry.key),
                })
            }
        }
    }
    Ok(out)
}

pub(crate) struct RawNode {
    pub id: u64,
    pub label: String,
    pub line: usize,
}

pub(crate) struct RawEdge {
    pub source: u64,
    pub target: u64,
    pub label: String,
    pub line: usize,
}

/// Reads the `node` and `edge` items of one list without resolving ids.
pub(crate) fn read_items(items: &[gml::Entry]) -> Result<(Vec<RawNode>, Vec<RawEdge>)> {
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for item in items {
        let Value::List(fields) = &item.value else {
            return Err(Error::Parse {
                line: item.line,
                reason: format!("'{}' must be a list", item.key),
            });
        };
        match &item.key[..] {
            "node" => {
                let f = Fields::new(fields, item.line, &["id", "label"])?;
                nodes.push(RawNode {
                    id: f.int("id")?,
                    label: f.string("label")?.to_owned(),
                    line: item.line,
                });
            }
            "edge" => {
                let f = Fields::new(fields, item.line, &["source", "target", "label"])?;
                edges.push(RawEdge {
                    source: f.int("source")?,
                    target: f.int("target")?,
                    label: f.string("label")?.to_owned(),
                    line: item.line,
                });
            }
            other => {
                return Err(Error::Parse {
                    line: item.line,
                    reason: format!("unexpected item '{other}'"),
                })
            }
        }
    }
    Ok((nodes, edges))
}

fn build_graph(items: &[gml::Entry]) -> Result<LabeledGraph> {
    let mut name = None;
    let mut rest = Vec::with_capacity(items.len());
    for item in items {
        match (&item.key[..], &item.value) {
            ("name", Value::Str(s)) if name.is_none() => name = Some(s.clone()),
            ("name", _) => {
                return Err(Error::Parse {
                    line: item.line,
                    reason: "'name' must be a single string".into(),
                })
            }
            _ => rest.push(item.clone()),
        }
    }
    let (nodes, edges) = read_items(&rest)?;
    let mut g = LabeledGraph::new();
    if let Some(name) = name {
        g = g.with_name(name);
    }
    let mut ids = HashMap::new();
    for n in nodes {
        if ids.insert(n.id, g.add_vertex(n.label)).is_some() {
            return Err(Error::Parse {
                line: n.line,
                reason: format!("duplicate node id {}", n.id),
            });
        }
    }
    for e in edges {
        let lookup = |id: u64| {
            ids.get(&id)
                .copied()
                .ok_or_else(|| Error::InvalidGraph(format!("edge references unknown id {id}")))
        };
        let (u, v) = (lookup(e.source)?, lookup(e.target)?);
        g.add_edge(u, v, e.label)?;
    }
    Ok(g)
}

/// Renders `g` in the text format; vertex `i` gets id `i`.
pub fn render_graph(g: &LabeledGraph) -> String {
    let mut s = String::from("graph [\n");
    if let Some(name) = g.name() {
        s.push_str(&format!("  name {}\n", gml::quote(name)));
    }
    for (i, l) in g.labels().iter().enumerate() {
        s.push_str(&format!(
            "  node [ id {i} label {} ]\n",
            gml::quote(l.as_str())
        ));
    }
    for e in g.edges() {
        s.push_str(&format!(
            "  edge [ source {} target {} label {} ]\n",
            e.u,
            e.v,
            gml::quote(e.label.as_str())
        ));
    }
    s.push_str("]\n");
    s
}
