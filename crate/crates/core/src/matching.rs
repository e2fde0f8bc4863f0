//! Subgraph monomorphism search.
//!
//! Backtracking in the style of VF2: pattern vertices are visited in a
//! breadth-first order so that every vertex after the first of its
//! component has an already mapped neighbor, whose image restricts the
//! candidates to its host neighbors.

use crate::graph::LabeledGraph;

struct Plan {
    order: Vec<usize>,
    /// For each step, an earlier mapped neighbor and the connecting edge label index.
    anchor: Vec<Option<(usize, usize)>>,
    /// For each step, edges back to previously mapped pattern vertices.
    back: Vec<Vec<(usize, usize)>>,
}

fn plan(pattern: &LabeledGraph) -> Plan {
    let n = pattern.vertex_count();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    // start each component at its rarest-looking vertex: highest degree, then lowest index
    while order.len() < n {
        let start = (0..n)
            .filter(|&v| !seen[v])
            .max_by_key(|&v| (pattern.degree(v), std::cmp::Reverse(v)))
            .unwrap();
        seen[start] = true;
        let mut i = order.len();
        order.push(start);
        while i < order.len() {
            let u = order[i];
            i += 1;
            let mut nb: Vec<usize> = pattern.neighbors(u).iter().map(|&(w, _)| w).collect();
            nb.sort_unstable_by_key(|&w| (std::cmp::Reverse(pattern.degree(w)), w));
            for w in nb {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                }
            }
        }
    }
    let mut step_of = vec![usize::MAX; n];
    for (s, &v) in order.iter().enumerate() {
        step_of[v] = s;
    }
    let mut anchor = Vec::with_capacity(n);
    let mut back = Vec::with_capacity(n);
    for (s, &v) in order.iter().enumerate() {
        let earlier: Vec<(usize, usize)> = pattern
            .neighbors(v)
            .iter()
            .filter(|&&(w, _)| step_of[w] < s)
            .map(|&(w, e)| (w, e))
            .collect();
        anchor.push(earlier.first().copied());
        back.push(earlier);
    }
    Plan {
        order,
        anchor,
        back,
    }
}

/// Calls `visit` with every monomorphism `pattern -> host`, given as the
/// image vector in pattern vertex order. Stops early when `visit` returns
/// `false`.
pub fn for_each_monomorphism(
    pattern: &LabeledGraph,
    host: &LabeledGraph,
    mut visit: impl FnMut(&[usize]) -> bool,
) {
    let n = pattern.vertex_count();
    if n > host.vertex_count() || pattern.edge_count() > host.edge_count() {
        return;
    }
    let plan = plan(pattern);
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; host.vertex_count()];
    search(pattern, host, &plan, 0, &mut map, &mut used, &mut visit);
}

fn search(
    pattern: &LabeledGraph,
    host: &LabeledGraph,
    plan: &Plan,
    step: usize,
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
    visit: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    if step == plan.order.len() {
        return visit(map);
    }
    let v = plan.order[step];
    let fits = |h: usize, used: &[bool], map: &[usize]| {
        !used[h]
            && host.label(h) == pattern.label(v)
            && host.degree(h) >= pattern.degree(v)
            && plan.back[step].iter().all(|&(w, e)| {
                host.edge_between(map[w], h)
                    .is_some_and(|f| f.label == pattern.edges()[e].label)
            })
    };
    match plan.anchor[step] {
        Some((w, _)) => {
            let hw = map[w];
            for &(h, _) in host.neighbors(hw) {
                if fits(h, used, map) {
                    map[v] = h;
                    used[h] = true;
                    let go_on = search(pattern, host, plan, step + 1, map, used, visit);
                    used[h] = false;
                    map[v] = usize::MAX;
                    if !go_on {
                        return false;
                    }
                }
            }
        }
        None => {
            for h in 0..host.vertex_count() {
                if fits(h, used, map) {
                    map[v] = h;
                    used[h] = true;
                    let go_on = search(pattern, host, plan, step + 1, map, used, visit);
                    used[h] = false;
                    map[v] = usize::MAX;
                    if !go_on {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// All monomorphisms `pattern -> host`, sorted by image vector.
pub fn enumerate_monomorphisms(pattern: &LabeledGraph, host: &LabeledGraph) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_monomorphism(pattern, host, |m| {
        out.push(m.to_vec());
        true
    });
    out.sort_unstable();
    out
}

/// Whether `image` is a label- and edge-preserving injective map.
pub fn is_monomorphism(pattern: &LabeledGraph, host: &LabeledGraph, image: &[usize]) -> bool {
    if image.len() != pattern.vertex_count() {
        return false;
    }
    let mut used = vec![false; host.vertex_count()];
    for (v, &h) in image.iter().enumerate() {
        if h >= host.vertex_count() || used[h] || host.label(h) != pattern.label(v) {
            return false;
        }
        used[h] = true;
    }
    pattern.edges().iter().all(|e| {
        host.edge_between(image[e.u], image[e.v])
            .is_some_and(|f| f.label == e.label)
    })
}
