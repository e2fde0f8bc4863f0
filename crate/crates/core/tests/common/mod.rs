//! Fixture corpus shared by the integration tests: small rules paired with
//! sets of at most three connected graphs of at most eight vertices.

#![allow(dead_code)]

use std::sync::Arc;

use ede::bench::{add_children_rule, chain_rule, methane, monomer};
use ede::ede::{enumerate_derivations, EnumOptions, GraphSet, Mode};
use ede::oracle::{for_each_injective_map, RawDerivation};
use ede::rule::{apply, parse_rule, Rule, RuleAutInfo};
use ede::{LabeledGraph, UnionGraph};
use std::ops::ControlFlow;

pub struct Instance {
    pub name: &'static str,
    pub rule: Rule,
    pub set: GraphSet,
}

impl Instance {
    /// Input graphs in the order the oracle indexes them.
    pub fn graphs(&self) -> &[Arc<LabeledGraph>] {
        self.set.graphs()
    }
}

pub fn graph(labels: &[&str], edges: &[(usize, usize, &str)]) -> LabeledGraph {
    LabeledGraph::from_parts(labels.iter().copied(), edges.iter().copied()).unwrap()
}

pub fn rule(text: &str) -> Rule {
    parse_rule(text).unwrap()
}

pub fn single_c() -> LabeledGraph {
    graph(&["C"], &[])
}

pub fn ethane_bond() -> LabeledGraph {
    graph(&["C", "C"], &[(0, 1, "-")])
}

pub fn path3() -> LabeledGraph {
    graph(&["C", "C", "C"], &[(0, 1, "-"), (1, 2, "-")])
}

pub fn triangle() -> LabeledGraph {
    graph(&["C", "C", "C"], &[(0, 1, "-"), (1, 2, "-"), (0, 2, "-")])
}

pub fn water() -> LabeledGraph {
    graph(&["O", "H", "H"], &[(0, 1, "-"), (0, 2, "-")])
}

pub fn carbonyl() -> LabeledGraph {
    graph(&["C", "O"], &[(0, 1, "=")])
}

pub fn formaldehyde() -> LabeledGraph {
    graph(
        &["C", "O", "H", "H"],
        &[(0, 1, "="), (0, 2, "-"), (0, 3, "-")],
    )
}

pub fn methanol() -> LabeledGraph {
    graph(
        &["C", "O", "H", "H", "H", "H"],
        &[
            (0, 1, "-"),
            (0, 2, "-"),
            (0, 3, "-"),
            (0, 4, "-"),
            (1, 5, "-"),
        ],
    )
}

pub fn ethane() -> LabeledGraph {
    let mut edges = vec![(0, 1, "-")];
    for h in 2..5 {
        edges.push((0, h, "-"));
    }
    for h in 5..8 {
        edges.push((1, h, "-"));
    }
    graph(&["C", "C", "H", "H", "H", "H", "H", "H"], &edges)
}

/// CH3-CH=O
pub fn acetaldehyde() -> LabeledGraph {
    graph(
        &["C", "C", "O", "H", "H", "H", "H"],
        &[
            (0, 1, "-"),
            (1, 2, "="),
            (1, 3, "-"),
            (0, 4, "-"),
            (0, 5, "-"),
            (0, 6, "-"),
        ],
    )
}

/// CH2=CH-OH
pub fn ethenol() -> LabeledGraph {
    graph(
        &["C", "C", "O", "H", "H", "H", "H"],
        &[
            (0, 1, "="),
            (1, 2, "-"),
            (2, 3, "-"),
            (0, 4, "-"),
            (0, 5, "-"),
            (1, 6, "-"),
        ],
    )
}

pub fn glycolaldehyde() -> LabeledGraph {
    graph(
        &["C", "O", "H", "C", "H", "H", "O", "H"],
        &[
            (0, 1, "="),
            (0, 2, "-"),
            (0, 3, "-"),
            (3, 4, "-"),
            (3, 5, "-"),
            (3, 6, "-"),
            (6, 7, "-"),
        ],
    )
}

/// A 4-cycle of identical vertices.
pub fn hollow_square() -> LabeledGraph {
    graph(
        &["o", "o", "o", "o"],
        &[(0, 1, "-"), (2, 3, "-"), (0, 2, "-"), (1, 3, "-")],
    )
}

/// A 4-cycle with two hollow vertices on top and two filled ones below.
pub fn mixed_square() -> LabeledGraph {
    graph(
        &["o", "o", "x", "x"],
        &[(0, 1, "-"), (2, 3, "-"), (0, 2, "-"), (1, 3, "-")],
    )
}

pub fn bond_rule() -> Rule {
    rule(
        r#"rule [ ruleID "bond"
            context [ node [ id 1 label "C" ] node [ id 2 label "C" ] ]
            right [ edge [ source 1 target 2 label "-" ] ] ]"#,
    )
}

/// Three isolated hollow vertices, each turned filled.
pub fn fill_three_rule() -> Rule {
    rule(
        r#"rule [ ruleID "fill three"
            left [ node [ id 1 label "o" ] node [ id 2 label "o" ] node [ id 3 label "o" ] ]
            right [ node [ id 1 label "x" ] node [ id 2 label "x" ] node [ id 3 label "x" ] ] ]"#,
    )
}

/// A hollow edge and a filled vertex; the filled one is marked.
pub fn edge_and_vertex_rule() -> Rule {
    rule(
        r#"rule [ ruleID "edge and vertex"
            context [ node [ id 1 label "o" ] node [ id 2 label "o" ]
                      edge [ source 1 target 2 label "-" ] ]
            left [ node [ id 3 label "x" ] ]
            right [ node [ id 3 label "y" ] ] ]"#,
    )
}

fn strip_h_rule() -> Rule {
    rule(
        r#"rule [ ruleID "strip H"
            context [ node [ id 1 label "C" ] ]
            left [ node [ id 2 label "H" ] edge [ source 1 target 2 label "-" ] ] ]"#,
    )
}

fn condense_rule() -> Rule {
    rule(
        r#"rule [ ruleID "condense"
            context [ node [ id 1 label "C" ] node [ id 3 label "O" ] ]
            left [ node [ id 2 label "H" ] node [ id 4 label "H" ]
                   edge [ source 1 target 2 label "-" ] edge [ source 3 target 4 label "-" ] ]
            right [ edge [ source 1 target 3 label "-" ] ] ]"#,
    )
}

fn open_double_rule() -> Rule {
    rule(
        r#"rule [ ruleID "open double"
            context [ node [ id 1 label "C" ] node [ id 2 label "O" ] ]
            left [ edge [ source 1 target 2 label "=" ] ]
            right [ edge [ source 1 target 2 label "-" ] ] ]"#,
    )
}

pub fn delete_c_rule() -> Rule {
    rule(r#"rule [ ruleID "delete C" left [ node [ id 1 label "C" ] ] ]"#)
}

pub fn close_triangle_rule() -> Rule {
    rule(
        r#"rule [ ruleID "close triangle"
            context [ node [ id 1 label "C" ] node [ id 2 label "C" ] node [ id 3 label "C" ]
                      edge [ source 1 target 2 label "-" ] edge [ source 2 target 3 label "-" ] ]
            right [ edge [ source 1 target 3 label "-" ] ] ]"#,
    )
}

fn keto_enol_rule() -> Rule {
    rule(include_str!("../../data/formose/keto_enol.gml"))
}

fn aldol_rule() -> Rule {
    rule(include_str!("../../data/formose/aldol.gml"))
}

fn grow_rule() -> Rule {
    rule(
        r#"rule [ ruleID "grow"
            context [ node [ id 1 label "C" ] ]
            right [ node [ id 2 label "N" ] edge [ source 1 target 2 label "-" ] ] ]"#,
    )
}

fn link_bonds_rule() -> Rule {
    rule(
        r#"rule [ ruleID "link bonds"
            context [ node [ id 1 label "C" ] node [ id 2 label "C" ] edge [ source 1 target 2 label "-" ]
                      node [ id 3 label "C" ] node [ id 4 label "C" ] edge [ source 3 target 4 label "-" ] ]
            right [ edge [ source 2 target 3 label "-" ] ] ]"#,
    )
}

fn three_in_a_row_rule() -> Rule {
    rule(
        r#"rule [ ruleID "three in a row"
            context [ node [ id 1 label "C" ] node [ id 2 label "C" ] node [ id 3 label "C" ] ]
            right [ edge [ source 1 target 2 label "-" ] edge [ source 2 target 3 label "-" ] ] ]"#,
    )
}

fn swap_h_rule() -> Rule {
    rule(
        r#"rule [ ruleID "swap H"
            context [ node [ id 1 label "C" ] node [ id 2 label "H" ]
                      node [ id 3 label "O" ] node [ id 4 label "H" ] ]
            left [ edge [ source 1 target 2 label "-" ] edge [ source 3 target 4 label "-" ] ]
            right [ edge [ source 1 target 4 label "-" ] edge [ source 3 target 2 label "-" ] ] ]"#,
    )
}

fn instance(name: &'static str, rule: Rule, graphs: Vec<LabeledGraph>) -> Instance {
    Instance {
        name,
        rule,
        set: GraphSet::new(graphs).unwrap(),
    }
}

/// The two carbons are already bonded.
pub fn bonded_host_instance() -> Instance {
    instance("bond on a bonded pair", bond_rule(), vec![ethane_bond()])
}

/// The square with four identical vertices and a rule of three isolated
/// vertices.
pub fn hollow_square_instance() -> Instance {
    instance(
        "three vertices into a square",
        fill_three_rule(),
        vec![hollow_square()],
    )
}

pub fn mixed_square_instance() -> Instance {
    instance(
        "edge and vertex into a square",
        edge_and_vertex_rule(),
        vec![mixed_square()],
    )
}

pub fn corpus() -> Vec<Instance> {
    let o = || graph(&["o"], &[]);
    let oo = || graph(&["o", "o"], &[(0, 1, "-")]);
    let x = || graph(&["x"], &[]);
    vec![
        bonded_host_instance(),
        instance("bond on a carbon", bond_rule(), vec![single_c()]),
        instance(
            "bond on carbon and pair",
            bond_rule(),
            vec![single_c(), ethane_bond()],
        ),
        instance(
            "bond on pair and path",
            bond_rule(),
            vec![ethane_bond(), path3()],
        ),
        instance(
            "bond with a stranger",
            bond_rule(),
            vec![single_c(), graph(&["N"], &[])],
        ),
        hollow_square_instance(),
        instance(
            "three vertices, small parts",
            fill_three_rule(),
            vec![o(), oo()],
        ),
        instance(
            "three vertices, square and single",
            fill_three_rule(),
            vec![hollow_square(), o()],
        ),
        mixed_square_instance(),
        instance(
            "edge and vertex, parts",
            edge_and_vertex_rule(),
            vec![mixed_square(), x(), oo()],
        ),
        instance("strip H from methane", strip_h_rule(), vec![methane()]),
        instance(
            "strip H, two molecules",
            strip_h_rule(),
            vec![methane(), formaldehyde()],
        ),
        instance("strip H from ethane", strip_h_rule(), vec![ethane()]),
        instance("condense methanol", condense_rule(), vec![methanol()]),
        instance(
            "condense methane and water",
            condense_rule(),
            vec![methane(), water()],
        ),
        instance(
            "condense methanol and water",
            condense_rule(),
            vec![methanol(), water()],
        ),
        instance("open double", open_double_rule(), vec![formaldehyde()]),
        instance(
            "open double, two molecules",
            open_double_rule(),
            vec![carbonyl(), formaldehyde()],
        ),
        instance("delete lone carbon", delete_c_rule(), vec![single_c()]),
        instance(
            "delete carbon, dangling pair",
            delete_c_rule(),
            vec![single_c(), ethane_bond()],
        ),
        instance("delete carbon of methane", delete_c_rule(), vec![methane()]),
        instance("close a path", close_triangle_rule(), vec![path3()]),
        instance("close a triangle", close_triangle_rule(), vec![triangle()]),
        instance(
            "close path or triangle",
            close_triangle_rule(),
            vec![triangle(), path3()],
        ),
        instance(
            "keto-enol on glycolaldehyde",
            keto_enol_rule(),
            vec![glycolaldehyde()],
        ),
        instance(
            "keto-enol on acetaldehyde",
            keto_enol_rule(),
            vec![acetaldehyde()],
        ),
        instance("aldol", aldol_rule(), vec![formaldehyde(), ethenol()]),
        instance(
            "aldol inverse",
            aldol_rule().invert(),
            vec![glycolaldehyde(), ethenol()],
        ),
        instance(
            "chain of two",
            chain_rule(2),
            vec![monomer("A"), monomer("B")],
        ),
        instance(
            "add children",
            add_children_rule(),
            vec![methane(), ethane()],
        ),
        instance(
            "grow on carbons",
            grow_rule(),
            vec![single_c(), ethane_bond()],
        ),
        instance("grow on methane", grow_rule(), vec![methane()]),
        instance(
            "link bonds",
            link_bonds_rule(),
            vec![ethane_bond(), path3()],
        ),
        instance("three in a row", three_in_a_row_rule(), vec![single_c()]),
        instance(
            "three in a row, two graphs",
            three_in_a_row_rule(),
            vec![single_c(), ethane_bond()],
        ),
        instance("swap H in methanol", swap_h_rule(), vec![methanol()]),
        instance(
            "swap H between molecules",
            swap_h_rule(),
            vec![methane(), water()],
        ),
    ]
}

/// Every yield of `mode`, in stream order, as oracle-normalized
/// derivations over the graph set's ranks.
pub fn ede_stream(inst: &Instance, mode: Mode) -> Vec<RawDerivation> {
    let p = &inst.rule;
    let info = RuleAutInfo::compute(p);
    let mut out = Vec::new();
    enumerate_derivations(p, &info, &inst.set, mode, &EnumOptions::default(), |y| {
        let mut m = vec![(0, 0); p.left().vertex_count()];
        for c in 0..p.component_count() {
            let (slot, img) = y.component_match(c);
            for (a, &v) in p.component_vertices(c).iter().enumerate() {
                m[v] = (slot, img[a]);
            }
        }
        out.push(RawDerivation::normalized(p, y.host_ranks(), &m));
        ControlFlow::Continue(())
    });
    out
}

/// Gluing conditions written out directly from the rule spans.
pub fn valid_by_definition(p: &Rule, g: &LabeledGraph, m: &[usize]) -> bool {
    let left = p.left();
    for (u, &h) in m.iter().enumerate() {
        if p.l_to_k(u).is_none() && g.degree(h) != left.degree(u) {
            return false;
        }
    }
    let k = p.context().vertex_count();
    for a in 0..k {
        for b in a + 1..k {
            let (la, lb) = (p.k_to_l()[a], p.k_to_l()[b]);
            let (ra, rb) = (p.k_to_r()[a], p.k_to_r()[b]);
            if !left.has_edge(la, lb) && p.right().has_edge(ra, rb) && g.has_edge(m[la], m[lb]) {
                return false;
            }
        }
    }
    true
}

pub fn is_simple(g: &LabeledGraph) -> bool {
    let mut seen = std::collections::BTreeSet::new();
    g.edges()
        .iter()
        .all(|e| e.u != e.v && seen.insert((e.u.min(e.v), e.u.max(e.v))))
}

/// Checks every injective match into one or two copies of the inputs:
/// validity must agree with the definition, valid proper matches must give
/// simple products and invalid ones must be refused. Returns the number of
/// matches checked and rejected.
pub fn check_validity(inst: &Instance) -> Result<(usize, usize), String> {
    let p = &inst.rule;
    let graphs = inst.graphs();
    let mut hosts: Vec<Vec<usize>> = (0..graphs.len()).map(|a| vec![a]).collect();
    for a in 0..graphs.len() {
        hosts.extend((a..graphs.len()).map(|b| vec![a, b]));
    }
    let (mut checked, mut rejected) = (0, 0);
    let mut failure = None;
    for parts in hosts {
        let host = UnionGraph::from_components(parts.iter().map(|&i| graphs[i].clone())).unwrap();
        let g = host.to_graph();
        for_each_injective_map(p.left(), &g, |m| {
            checked += 1;
            let partial: Vec<Option<usize>> = m.iter().copied().map(Some).collect();
            let expected = valid_by_definition(p, &g, m);
            if p.check_valid(&g, &partial) != expected {
                failure = Some(format!("{}: validity of {m:?}", inst.name));
                return false;
            }
            let proper = (0..parts.len()).all(|x| m.iter().any(|&v| host.gamma(v).0 == x));
            if !expected {
                rejected += 1;
                if apply(p, &host, m).is_ok() {
                    failure = Some(format!("{}: invalid {m:?} was applied", inst.name));
                }
            } else if proper {
                match apply(p, &host, m) {
                    Ok(r) if r.components().iter().all(|c| is_simple(c)) => {}
                    Ok(_) => failure = Some(format!("{}: {m:?} gave a multigraph", inst.name)),
                    Err(e) => failure = Some(format!("{}: {m:?} failed: {e}", inst.name)),
                }
            }
            failure.is_none()
        });
        if let Some(f) = failure {
            return Err(f);
        }
    }
    Ok((checked, rejected))
}
