use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::graph::{parse_graph, LabeledGraph};
use crate::network::{Engine, ExpansionPolicy};
use crate::rule::{parse_rule, Rule, RuleAutInfo};

const FORMALDEHYDE: &str = include_str!("../../data/formose/formaldehyde.gml");
const GLYCOLALDEHYDE: &str = include_str!("../../data/formose/glycolaldehyde.gml");
const KETO_ENOL: &str = include_str!("../../data/formose/keto_enol.gml");
const ALDOL: &str = include_str!("../../data/formose/aldol.gml");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrammarSpec {
    /// Linear strings over monomers A and B grown `k - 1` units at a time.
    BinaryStrings { k: usize, max_units: usize },
    /// Binary trees of carbons rooted at a four-cycle.
    BinaryTrees { max_iterations: usize },
    /// Formose chemistry with at most `max_carbons` carbons per molecule.
    Formose { max_carbons: usize },
}

impl fmt::Display for GrammarSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrammarSpec::BinaryStrings { k, max_units: 7 } => write!(f, "strings:{k}"),
            GrammarSpec::BinaryStrings { k, max_units } => write!(f, "strings:{k}:{max_units}"),
            GrammarSpec::BinaryTrees { max_iterations } => write!(f, "trees:{max_iterations}"),
            GrammarSpec::Formose { max_carbons } => write!(f, "formose:{max_carbons}"),
        }
    }
}

impl FromStr for GrammarSpec {
    type Err = String;

    /// `strings:K[:UNITS]`, `trees[:ITERATIONS]` or `formose:N`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| {
            x.parse::<usize>()
                .map_err(|_| format!("'{x}' is not a number in grammar '{s}'"))
        };
        let spec = match parts.as_slice() {
            ["strings", k] => GrammarSpec::BinaryStrings {
                k: num(k)?,
                max_units: 7,
            },
            ["strings", k, u] => GrammarSpec::BinaryStrings {
                k: num(k)?,
                max_units: num(u)?,
            },
            ["trees"] => GrammarSpec::BinaryTrees { max_iterations: 10 },
            ["trees", n] => GrammarSpec::BinaryTrees {
                max_iterations: num(n)?,
            },
            ["formose", n] => GrammarSpec::Formose {
                max_carbons: num(n)?,
            },
            _ => return Err(format!("unknown grammar '{s}'")),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl GrammarSpec {
    pub fn validate(&self) -> Result<(), String> {
        match *self {
            GrammarSpec::BinaryStrings { k, max_units } => {
                if !(2..=4).contains(&k) {
                    return Err(format!("strings: k must be 2, 3 or 4, got {k}"));
                }
                if max_units == 0 {
                    return Err("strings: max units must be positive".into());
                }
            }
            GrammarSpec::BinaryTrees { max_iterations } => {
                if max_iterations == 0 {
                    return Err("trees: iterations must be positive".into());
                }
            }
            GrammarSpec::Formose { max_carbons } => {
                if !(1..=13).contains(&max_carbons) {
                    return Err(format!("formose: n must be in 1..=13, got {max_carbons}"));
                }
            }
        }
        Ok(())
    }
}

/// Input molecules, rules and caps of an experiment.
#[derive(Clone, Debug)]
pub struct Grammar {
    pub spec: GrammarSpec,
    pub initial: Vec<LabeledGraph>,
    pub rules: Vec<Rule>,
    pub max_iterations: Option<usize>,
    pub max_product_vertices: Option<usize>,
    pub max_label_counts: Vec<(String, usize)>,
}

impl Grammar {
    pub fn policy(&self, engine: Engine) -> ExpansionPolicy {
        let mut p = ExpansionPolicy::new(engine);
        p.max_iterations = self.max_iterations;
        p.max_product_vertices = self.max_product_vertices;
        p.max_label_counts = self.max_label_counts.clone();
        p
    }
}

/// Builds the graphs and rules of `spec`, asserting the symmetry properties
/// each grammar is designed around.
pub fn generate_grammar(spec: GrammarSpec) -> Grammar {
    match spec {
        GrammarSpec::BinaryStrings { k, max_units } => {
            let rule = chain_rule(k);
            assert!(
                !RuleAutInfo::compute(&rule).has_symmetry(),
                "chain rules are asymmetric"
            );
            Grammar {
                spec,
                initial: vec![monomer("A"), monomer("B")],
                rules: vec![rule],
                max_iterations: Some((max_units - 1) / (k - 1)),
                max_product_vertices: Some(3 * max_units + 2),
                max_label_counts: Vec::new(),
            }
        }
        GrammarSpec::BinaryTrees { max_iterations } => {
            let rule = add_children_rule();
            let info = RuleAutInfo::compute(&rule);
            for i in 0..2 {
                assert_eq!(
                    info.local(i).len(),
                    6,
                    "methane components have local order 6"
                );
            }
            assert_eq!(
                info.class_rep(1),
                0,
                "methane components are interchangeable"
            );
            Grammar {
                spec,
                initial: vec![methane(), four_cycle()],
                rules: vec![rule],
                max_iterations: Some(max_iterations),
                max_product_vertices: None,
                max_label_counts: Vec::new(),
            }
        }
        GrammarSpec::Formose { max_carbons } => {
            let keto = parse_rule(KETO_ENOL).expect("bundled rule");
            let aldol = parse_rule(ALDOL).expect("bundled rule");
            let rules = vec![keto.clone(), aldol.clone(), keto.invert(), aldol.invert()];
            Grammar {
                spec,
                initial: vec![
                    parse_graph(FORMALDEHYDE).expect("bundled graph"),
                    parse_graph(GLYCOLALDEHYDE).expect("bundled graph"),
                ],
                rules,
                max_iterations: None,
                max_product_vertices: None,
                max_label_counts: vec![("C".into(), max_carbons)],
            }
        }
    }
}

/// Monomer `H-C(-side)-O-H`: the H on C marks the free start, the H on O
/// the free end.
pub fn monomer(side: &str) -> LabeledGraph {
    LabeledGraph::from_parts(
        ["C", "O", side, "H", "H"],
        [(0, 1, "-"), (0, 2, "-"), (0, 3, "-"), (1, 4, "-")],
    )
    .expect("simple graph")
    .with_name(side)
}

/// Rule joining `k - 1` monomers to the free end of a string. Components:
/// the string end `O-H`, then the monomers in joining order.
pub fn chain_rule(k: usize) -> Rule {
    assert!(k >= 2);
    let mut ctx = String::new();
    let mut left = String::new();
    let mut right = String::new();
    let node = |s: &mut String, id: usize, l: &str| {
        let _ = writeln!(s, "    node [ id {id} label \"{l}\" ]");
    };
    let edge = |s: &mut String, a: usize, b: usize| {
        let _ = writeln!(s, "    edge [ source {a} target {b} label \"-\" ]");
    };
    // string end: O 0, H 1
    node(&mut ctx, 0, "O");
    node(&mut left, 1, "H");
    edge(&mut left, 0, 1);
    let mut prev_o = 0;
    for j in 0..k - 1 {
        let (c, o, hc, ho) = (2 + 4 * j, 3 + 4 * j, 4 + 4 * j, 5 + 4 * j);
        node(&mut ctx, c, "C");
        node(&mut ctx, o, "O");
        edge(&mut ctx, c, o);
        node(&mut left, hc, "H");
        edge(&mut left, c, hc);
        if j + 2 < k {
            node(&mut left, ho, "H");
            edge(&mut left, o, ho);
        } else {
            node(&mut ctx, ho, "H");
            edge(&mut ctx, o, ho);
        }
        edge(&mut right, prev_o, c);
        prev_o = o;
    }
    let text = format!(
        "rule [\n  ruleID \"chain({k})\"\n  left [\n{left}  ]\n  context [\n{ctx}  ]\n  right [\n{right}  ]\n]\n"
    );
    parse_rule(&text).expect("generated rule")
}

pub fn methane() -> LabeledGraph {
    LabeledGraph::from_parts(
        ["C", "H", "H", "H", "H"],
        [(0, 1, "-"), (0, 2, "-"), (0, 3, "-"), (0, 4, "-")],
    )
    .expect("simple graph")
    .with_name("methane")
}

/// Four carbons in a cycle, each with two hydrogens.
pub fn four_cycle() -> LabeledGraph {
    let mut g = LabeledGraph::new().with_name("cyclobutane");
    for _ in 0..4 {
        g.add_vertex("C");
    }
    for i in 0..4 {
        g.add_edge(i, (i + 1) % 4, "-").expect("cycle");
    }
    for i in 0..4 {
        for _ in 0..2 {
            let h = g.add_vertex("H");
            g.add_edge(i, h, "-").expect("fresh vertex");
        }
    }
    g
}

/// Two methanes, each losing one H, bond to a leaf carbon that loses two H.
/// The leaf's parent carbon keeps methanes from joining each other.
pub fn add_children_rule() -> Rule {
    const TEXT: &str = r#"rule [
  ruleID "add children"
  left [
    node [ id 1 label "H" ]
    edge [ source 0 target 1 label "-" ]
    node [ id 6 label "H" ]
    edge [ source 5 target 6 label "-" ]
    node [ id 12 label "H" ]
    node [ id 13 label "H" ]
    edge [ source 11 target 12 label "-" ]
    edge [ source 11 target 13 label "-" ]
  ]
  context [
    node [ id 0 label "C" ]
    node [ id 2 label "H" ]
    node [ id 3 label "H" ]
    node [ id 4 label "H" ]
    edge [ source 0 target 2 label "-" ]
    edge [ source 0 target 3 label "-" ]
    edge [ source 0 target 4 label "-" ]
    node [ id 5 label "C" ]
    node [ id 7 label "H" ]
    node [ id 8 label "H" ]
    node [ id 9 label "H" ]
    edge [ source 5 target 7 label "-" ]
    edge [ source 5 target 8 label "-" ]
    edge [ source 5 target 9 label "-" ]
    node [ id 10 label "C" ]
    node [ id 11 label "C" ]
    edge [ source 10 target 11 label "-" ]
  ]
  right [
    edge [ source 11 target 0 label "-" ]
    edge [ source 11 target 5 label "-" ]
  ]
]
"#;
    parse_rule(TEXT).expect("bundled rule")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_three_has_three_components() {
        let p = chain_rule(3);
        assert_eq!(p.component_count(), 3);
        assert!(!RuleAutInfo::compute(&p).has_symmetry());
    }

    #[test]
    fn grammar_names_round_trip() {
        for s in ["strings:2", "strings:4:5", "trees:6", "formose:3"] {
            assert_eq!(s.parse::<GrammarSpec>().unwrap().to_string(), s);
        }
        assert!("strings:5".parse::<GrammarSpec>().is_err());
        assert!("formose:0".parse::<GrammarSpec>().is_err());
    }

    #[test]
    fn tree_rule_components() {
        let p = add_children_rule();
        assert_eq!(p.component_count(), 3);
        assert_eq!(p.component(2).vertex_count(), 4);
        let g = generate_grammar(GrammarSpec::BinaryTrees { max_iterations: 1 });
        assert_eq!(g.initial[1].vertex_count(), 12);
    }

    #[test]
    fn formose_inputs() {
        let g = generate_grammar(GrammarSpec::Formose { max_carbons: 4 });
        assert_eq!(g.rules.len(), 4);
        assert_eq!(g.rules[2].name(), "keto-enol (inverse)");
        assert_eq!(g.initial[1].count_label("C"), 2);
    }
}
