//! Canonical forms and automorphism groups by individualization-refinement.
//!
//! The search refines an ordered partition of the vertices to an equitable
//! one, individualizes each vertex of the first smallest non-singleton cell
//! and recurses. Every discrete partition is a leaf whose relabeled graph is
//! a certificate; the smallest certificate is the canonical form. Two leaves
//! with equal certificates differ by an automorphism, and the automorphisms
//! found this way generate the full automorphism group because each child of
//! a node on the first path is either explored or lies in the orbit of an
//! explored child under automorphisms already found.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::gml::quote;
use crate::graph::LabeledGraph;
use crate::perm::{Perm, PermGroup};
use crate::rule::Rule;

/// Byte string identifying an isomorphism class.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode(Vec<u8>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, hex::FromHexError> {
        hex::decode(s).map(CanonicalCode)
    }
}

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalCode({})", String::from_utf8_lossy(&self.0))
    }
}

/// A graph with string vertex and edge colors. Colors are compared as
/// strings, so graphs built over different color sets stay comparable.
#[derive(Clone, Debug, Default)]
pub struct ColoredGraph {
    colors: Vec<String>,
    edges: Vec<(usize, usize, String)>,
}

impl ColoredGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, color: impl Into<String>) -> usize {
        self.colors.push(color.into());
        self.colors.len() - 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize, color: impl Into<String>) {
        assert!(u != v && u < self.colors.len() && v < self.colors.len());
        self.edges.push((u, v, color.into()));
    }

    pub fn vertex_count(&self) -> usize {
        self.colors.len()
    }
}

impl From<&LabeledGraph> for ColoredGraph {
    fn from(g: &LabeledGraph) -> Self {
        ColoredGraph {
            colors: g.labels().iter().map(|l| l.0.clone()).collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| (e.u, e.v, e.label.0.clone()))
                .collect(),
        }
    }
}

/// Result of canonicalizing a graph.
#[derive(Clone, Debug)]
pub struct Canon {
    pub code: CanonicalCode,
    /// `labeling[v]` is the canonical position of vertex `v`.
    pub labeling: Vec<usize>,
    /// Generators of the automorphism group.
    pub generators: Vec<Perm>,
}

impl Canon {
    pub fn group(&self) -> PermGroup {
        PermGroup::new(self.labeling.len(), &self.generators)
            .expect("automorphisms are permutations of the vertex set")
    }
}

pub fn canonicalize(g: &LabeledGraph) -> Canon {
    canonicalize_colored(&ColoredGraph::from(g))
}

pub fn canonical_code(g: &LabeledGraph) -> CanonicalCode {
    canonicalize(g).code
}

pub fn is_isomorphic(a: &LabeledGraph, b: &LabeledGraph) -> bool {
    a.vertex_count() == b.vertex_count()
        && a.edge_count() == b.edge_count()
        && canonical_code(a) == canonical_code(b)
}

/// Canonical form and automorphism group generators of `g`.
///
/// Pendant vertices hanging off a vertex of degree at least two are folded
/// into the color of that vertex before the search, and twins among them
/// contribute transpositions to the generators. Molecules are full of such
/// twins, hydrogens in particular.
pub fn canonicalize_colored(g: &ColoredGraph) -> Canon {
    let mut vtable: Vec<&str> = g.colors.iter().map(String::as_str).collect();
    vtable.sort_unstable();
    vtable.dedup();
    let mut etable: Vec<&str> = g.edges.iter().map(|e| e.2.as_str()).collect();
    etable.sort_unstable();
    etable.dedup();
    let n = g.colors.len();
    let vcolor: Vec<u32> = g
        .colors
        .iter()
        .map(|c| vtable.binary_search(&c.as_str()).unwrap() as u32)
        .collect();
    let edges: Vec<(usize, usize, u32)> = g
        .edges
        .iter()
        .map(|(u, v, c)| (*u, *v, etable.binary_search(&c.as_str()).unwrap() as u32))
        .collect();
    let mut degree = vec![0usize; n];
    for &(u, v, _) in &edges {
        degree[u] += 1;
        degree[v] += 1;
    }

    // attached[u]: (color, edge color, vertex) of the pendants folded into u
    let mut attached: Vec<Vec<(u32, u32, usize)>> = vec![Vec::new(); n];
    let mut folded = vec![false; n];
    for &(u, v, c) in &edges {
        if degree[v] == 1 && degree[u] >= 2 {
            attached[u].push((vcolor[v], c, v));
            folded[v] = true;
        } else if degree[u] == 1 && degree[v] >= 2 {
            attached[v].push((vcolor[u], c, u));
            folded[u] = true;
        }
    }
    let keep: Vec<usize> = (0..n).filter(|&v| !folded[v]).collect();
    let mut reduced = vec![usize::MAX; n];
    for (i, &v) in keep.iter().enumerate() {
        reduced[v] = i;
        attached[v].sort_unstable();
    }
    let keys: Vec<(u32, Vec<(u32, u32)>)> = keep
        .iter()
        .map(|&v| {
            (
                vcolor[v],
                attached[v].iter().map(|&(a, b, _)| (a, b)).collect(),
            )
        })
        .collect();
    let mut distinct: Vec<&(u32, Vec<(u32, u32)>)> = keys.iter().collect();
    distinct.sort_unstable();
    distinct.dedup();
    let rcolor: Vec<u32> = keys
        .iter()
        .map(|k| distinct.binary_search(&k).unwrap() as u32)
        .collect();

    let r = keep.len();
    let inner: Vec<(usize, usize, u32)> = edges
        .iter()
        .filter(|&&(u, v, _)| !folded[u] && !folded[v])
        .map(|&(u, v, c)| (reduced[u], reduced[v], c))
        .collect();
    let mut rdegree = vec![0usize; r];
    for &(u, v, _) in &inner {
        rdegree[u] += 1;
        rdegree[v] += 1;
    }
    let mut xadj = vec![0usize; r + 1];
    for v in 0..r {
        xadj[v + 1] = xadj[v] + rdegree[v];
    }
    let mut fill = xadj.clone();
    let mut nbr = vec![0u32; 2 * inner.len()];
    let mut ecol = vec![0u32; 2 * inner.len()];
    for &(u, v, c) in &inner {
        for (a, b) in [(u, v), (v, u)] {
            nbr[fill[a]] = b as u32;
            ecol[fill[a]] = c;
            fill[a] += 1;
        }
    }
    let mut search = Search {
        n: r,
        vcolor: rcolor,
        xadj,
        nbr,
        ecol,
        first: None,
        best: None,
        generators: Vec::new(),
    };
    let mut colors = search.vcolor.clone();
    normalize(&mut colors);
    search.refine(&mut colors);
    let mut path = Vec::new();
    search.visit(colors, &mut path);
    let best = search.best.take().expect("the search reaches a leaf");

    // kept vertices in canonical order, then pendants by their anchor
    let mut order = vec![0usize; r];
    for (i, &p) in best.pos.iter().enumerate() {
        order[p] = keep[i];
    }
    let mut pendants: Vec<(usize, u32, u32, usize)> = Vec::with_capacity(n - r);
    for &u in &keep {
        for &(c, e, v) in &attached[u] {
            pendants.push((best.pos[reduced[u]], c, e, v));
        }
    }
    pendants.sort_unstable();
    order.extend(pendants.iter().map(|p| p.3));
    let mut labeling = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        labeling[v] = i;
    }

    let mut generators = Vec::new();
    for h in &search.generators {
        let mut images: Vec<usize> = (0..n).collect();
        for &u in &keep {
            let w = keep[h.apply(reduced[u])];
            images[u] = w;
            for (a, b) in attached[u].iter().zip(&attached[w]) {
                images[a.2] = b.2;
            }
        }
        generators.push(Perm::from_images(images).expect("lifted automorphism"));
    }
    for &u in &keep {
        for w in attached[u].windows(2) {
            if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                generators.push(Perm::from_cycles(n, &[&[w[0].2, w[1].2]]).expect("transposition"));
            }
        }
    }

    let mut cert_edges: Vec<(usize, usize, u32)> = edges
        .iter()
        .map(|&(u, v, c)| {
            let (a, b) = (labeling[u], labeling[v]);
            (a.min(b), a.max(b), c)
        })
        .collect();
    cert_edges.sort_unstable();
    let mut s = format!("v{};", n);
    for (i, c) in vtable.iter().enumerate() {
        s.push_str(if i == 0 { "" } else { "," });
        s.push_str(&quote(c));
    }
    s.push_str(";e");
    for (i, c) in etable.iter().enumerate() {
        s.push_str(if i == 0 { "" } else { "," });
        s.push_str(&quote(c));
    }
    s.push(';');
    for (i, &v) in order.iter().enumerate() {
        s.push_str(if i == 0 { "" } else { "," });
        s.push_str(&vcolor[v].to_string());
    }
    s.push(';');
    for (i, (a, b, c)) in cert_edges.iter().enumerate() {
        s.push_str(if i == 0 { "" } else { "," });
        s.push_str(&format!("{a}-{b}:{c}"));
    }
    Canon {
        code: CanonicalCode(s.into_bytes()),
        labeling,
        generators,
    }
}

/// Replaces colors by their ranks among the distinct values.
fn normalize(colors: &mut [u32]) {
    let mut distinct: Vec<u32> = colors.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    for c in colors.iter_mut() {
        *c = distinct.binary_search(c).unwrap() as u32;
    }
}

fn cell_count(colors: &[u32]) -> usize {
    colors.iter().max().map_or(0, |&m| m as usize + 1)
}

struct Leaf {
    cert: Vec<u32>,
    pos: Vec<usize>,
    path: Vec<usize>,
}

struct Search {
    n: usize,
    vcolor: Vec<u32>,
    /// Neighbors of `v` and the edge colors are at `xadj[v]..xadj[v + 1]`.
    xadj: Vec<usize>,
    nbr: Vec<u32>,
    ecol: Vec<u32>,
    first: Option<Leaf>,
    best: Option<Leaf>,
    generators: Vec<Perm>,
}

impl Search {
    /// Refines `colors` (ranks) to the coarsest equitable partition that
    /// refines it, keeping the order of existing cells.
    fn refine(&self, colors: &mut [u32]) {
        let n = self.n;
        let mut cells = cell_count(colors);
        let mut sig = vec![0u64; self.nbr.len()];
        let mut order: Vec<usize> = (0..n).collect();
        let mut next = vec![0u32; n];
        while cells < n {
            for v in 0..n {
                let range = self.xadj[v]..self.xadj[v + 1];
                for i in range.clone() {
                    sig[i] =
                        (u64::from(colors[self.nbr[i] as usize]) << 32) | u64::from(self.ecol[i]);
                }
                sig[range].sort_unstable();
            }
            let key = |v: usize| (colors[v], &sig[self.xadj[v]..self.xadj[v + 1]]);
            order.sort_unstable_by(|&a, &b| key(a).cmp(&key(b)));
            let mut rank = 0u32;
            for i in 0..n {
                if i > 0 && key(order[i]) != key(order[i - 1]) {
                    rank += 1;
                }
                next[order[i]] = rank;
            }
            colors.copy_from_slice(&next);
            let now = rank as usize + 1;
            if now == cells {
                return;
            }
            cells = now;
        }
    }

    fn target_cell(&self, colors: &[u32]) -> Option<Vec<usize>> {
        let k = cell_count(colors);
        let mut size = vec![0usize; k];
        for &c in colors {
            size[c as usize] += 1;
        }
        let cell = (0..k)
            .filter(|&c| size[c] > 1)
            .min_by_key(|&c| (size[c], c))?;
        Some(
            (0..self.n)
                .filter(|&v| colors[v] as usize == cell)
                .collect(),
        )
    }

    fn certificate(&self, pos: &[usize]) -> Vec<u32> {
        let mut inv = vec![0; self.n];
        for (v, &p) in pos.iter().enumerate() {
            inv[p] = v;
        }
        let mut cert: Vec<u32> = inv.iter().map(|&v| self.vcolor[v]).collect();
        let mut edges = Vec::with_capacity(self.nbr.len() / 2);
        for u in 0..self.n {
            for i in self.xadj[u]..self.xadj[u + 1] {
                let (w, c) = (self.nbr[i] as usize, self.ecol[i]);
                if u < w {
                    let (a, b) = (pos[u].min(pos[w]), pos[u].max(pos[w]));
                    edges.push([a as u32, b as u32, c]);
                }
            }
        }
        edges.sort_unstable();
        cert.extend(edges.into_iter().flatten());
        cert
    }

    /// Explores the subtree below `colors`. Returns `Some(d)` to abandon
    /// every node deeper than `d`.
    fn visit(&mut self, colors: Vec<u32>, path: &mut Vec<usize>) -> Option<usize> {
        let Some(cell) = self.target_cell(&colors) else {
            return self.leaf(colors, path);
        };
        let depth = path.len();
        let mut explored: Vec<usize> = Vec::new();
        for &v in &cell {
            if !explored.is_empty() && self.in_explored_orbit(path, &explored, v) {
                continue;
            }
            explored.push(v);
            let mut child: Vec<u32> = colors.iter().map(|&c| 2 * c + 1).collect();
            child[v] -= 1;
            for (w, c) in child.iter_mut().enumerate() {
                if colors[w] != colors[v] {
                    *c -= 1;
                }
            }
            normalize(&mut child);
            self.refine(&mut child);
            path.push(v);
            let jump = self.visit(child, path);
            path.pop();
            if let Some(d) = jump {
                if d < depth {
                    return Some(d);
                }
            }
        }
        None
    }

    fn in_explored_orbit(&self, path: &[usize], explored: &[usize], v: usize) -> bool {
        let gens: Vec<&Perm> = self
            .generators
            .iter()
            .filter(|g| path.iter().all(|&p| g.fixes(p)))
            .collect();
        if gens.is_empty() {
            return false;
        }
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for g in gens {
            for x in 0..self.n {
                let (a, b) = (find(&mut parent, x), find(&mut parent, g.apply(x)));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        let rv = find(&mut parent, v);
        explored.iter().any(|&e| find(&mut parent, e) == rv)
    }

    fn leaf(&mut self, colors: Vec<u32>, path: &[usize]) -> Option<usize> {
        let pos: Vec<usize> = colors.iter().map(|&c| c as usize).collect();
        let cert = self.certificate(&pos);
        let leaf = Leaf {
            cert,
            pos,
            path: path.to_vec(),
        };
        let Some(first) = &self.first else {
            self.best = Some(Leaf {
                cert: leaf.cert.clone(),
                pos: leaf.pos.clone(),
                path: leaf.path.clone(),
            });
            self.first = Some(leaf);
            return None;
        };
        if leaf.cert == first.cert {
            let d = lcp(&leaf.path, &first.path);
            let g = automorphism(&first.pos, &leaf.pos);
            self.record(g);
            return Some(d);
        }
        let best = self.best.as_ref().unwrap();
        match leaf.cert.cmp(&best.cert) {
            Ordering::Equal => {
                let d = lcp(&leaf.path, &best.path);
                let g = automorphism(&best.pos, &leaf.pos);
                self.record(g);
                Some(d)
            }
            Ordering::Less => {
                self.best = Some(leaf);
                None
            }
            Ordering::Greater => None,
        }
    }

    fn record(&mut self, g: Perm) {
        if !g.is_identity() && !self.generators.contains(&g) {
            self.generators.push(g);
        }
    }
}

fn lcp(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// The automorphism sending each vertex of leaf `b` to the vertex at the
/// same position in leaf `a`.
fn automorphism(a: &[usize], b: &[usize]) -> Perm {
    let mut inv_a = vec![0; a.len()];
    for (v, &p) in a.iter().enumerate() {
        inv_a[p] = v;
    }
    Perm::from_images(b.iter().map(|&p| inv_a[p]).collect()).expect("leaves are bijections")
}

/// Encodes a rule as one colored graph: the vertices of `L`, `K` and `R` in
/// this order, with arrows from each context vertex to its images.
/// Automorphisms of the encoding are exactly the rule automorphisms.
pub fn encode_rule(p: &Rule) -> ColoredGraph {
    let mut g = ColoredGraph::new();
    let parts = [("L", p.left()), ("K", p.context()), ("R", p.right())];
    let mut offset = [0; 3];
    for (i, (tag, part)) in parts.iter().enumerate() {
        offset[i] = g.vertex_count();
        for l in part.labels() {
            g.add_vertex(format!("{tag}:{l}"));
        }
        for e in part.edges() {
            g.add_edge(
                offset[i] + e.u,
                offset[i] + e.v,
                format!("{tag}:{}", e.label),
            );
        }
    }
    for k in 0..p.context().vertex_count() {
        g.add_edge(offset[1] + k, offset[0] + p.k_to_l()[k], "l");
        g.add_edge(offset[1] + k, offset[2] + p.k_to_r()[k], "r");
    }
    g
}

/// Canonical code of the derivation of `p` at the total match `m` into
/// `host`, where `m[v]` is the host vertex of left vertex `v`.
///
/// Two derivations get the same code iff some rule automorphism and host
/// isomorphism make their matches commute. The rule name is part of the code.
///
/// The rule is folded into the host: each matched vertex is colored with its
/// fate under the rule, each host pair with the left and right edges over it,
/// and created vertices are added. This graph is isomorphic for two matches
/// exactly when the `L`, `K`, `R`, host encoding with match arrows is.
pub fn encode_derivation(p: &Rule, host: &LabeledGraph, m: &[usize]) -> Result<CanonicalCode> {
    let left = p.left();
    if m.len() != left.vertex_count() {
        return Err(Error::InvalidDerivation(format!(
            "match defines {} of {} left vertices",
            m.len(),
            left.vertex_count()
        )));
    }
    let n = host.vertex_count();
    let mut colors: Vec<String> = host
        .labels()
        .iter()
        .map(|l| format!("G{}", quote(l.as_str())))
        .collect();
    let mut seen = vec![false; n];
    for (v, &h) in m.iter().enumerate() {
        if h >= n || std::mem::replace(&mut seen[h], true) {
            return Err(Error::InvalidDerivation(format!(
                "image {h} out of range or reused"
            )));
        }
        match p.l_to_k(v) {
            None => colors[h].push_str("|del"),
            Some(k) => {
                let r = p.k_to_r()[k];
                colors[h].push_str(&format!("|K{}", quote(p.right().label(r).as_str())));
            }
        }
    }
    let mut pairs: BTreeMap<(usize, usize), String> = BTreeMap::new();
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    for e in host.edges() {
        pairs.insert(key(e.u, e.v), format!("G{}", quote(e.label.as_str())));
    }
    let right = p.right();
    let mut kept_r = std::collections::HashSet::new();
    for e in p.context().edges() {
        let (ru, rv) = (p.k_to_r()[e.u], p.k_to_r()[e.v]);
        kept_r.insert(key(ru, rv));
    }
    for e in left.edges() {
        let tag = match (p.l_to_k(e.u), p.l_to_k(e.v)) {
            (Some(ku), Some(kv)) => {
                let (ru, rv) = (p.k_to_r()[ku], p.k_to_r()[kv]);
                if kept_r.contains(&key(ru, rv)) {
                    let e = right.edge_between(ru, rv).expect("kept edge");
                    format!("|K{}", quote(e.label.as_str()))
                } else {
                    "|del".to_owned()
                }
            }
            _ => "|del".to_owned(),
        };
        pairs.entry(key(m[e.u], m[e.v])).or_default().push_str(&tag);
    }
    let mut place = vec![usize::MAX; right.vertex_count()];
    for k in 0..p.context().vertex_count() {
        place[p.k_to_r()[k]] = m[p.k_to_l()[k]];
    }
    for (r, l) in right.labels().iter().enumerate() {
        if p.r_to_k(r).is_none() {
            place[r] = colors.len();
            colors.push(format!("R{}", quote(l.as_str())));
        }
    }
    for e in right.edges() {
        if !kept_r.contains(&key(e.u, e.v)) {
            let tag = format!("|R{}", quote(e.label.as_str()));
            pairs
                .entry(key(place[e.u], place[e.v]))
                .or_default()
                .push_str(&tag);
        }
    }
    let mut g = ColoredGraph::new();
    for c in colors {
        g.add_vertex(c);
    }
    for ((u, v), c) in pairs {
        g.add_edge(u, v, c);
    }
    let code = canonicalize_colored(&g).code;
    let mut bytes = quote(p.name()).into_bytes();
    bytes.push(b';');
    bytes.extend_from_slice(code.as_bytes());
    Ok(CanonicalCode(bytes))
}
