use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::canon::{canonicalize, CanonicalCode};
use crate::error::{Error, Result};
use crate::graph::{Label, LabeledGraph};

use super::{IterationStats, Molecule, Reaction, ReactionNetwork, Status};

#[derive(Serialize, Deserialize)]
struct Document {
    molecules: Vec<MoleculeDoc>,
    reactions: Vec<ReactionDoc>,
    stats: Vec<IterationStats>,
    status: Status,
}

#[derive(Serialize, Deserialize)]
struct MoleculeDoc {
    code: String,
    graph: GraphDoc,
    iteration: usize,
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    edges: Vec<EdgeDoc>,
    labels: Vec<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct EdgeDoc {
    label: Label,
    source: usize,
    target: usize,
}

#[derive(Serialize, Deserialize)]
struct ReactionDoc {
    code: String,
    educts: Vec<String>,
    iteration: usize,
    products: Vec<String>,
    rule: String,
}

fn code_from_hex(s: &str) -> Result<CanonicalCode> {
    CanonicalCode::from_hex(s).map_err(|e| Error::Network(format!("bad code {s}: {e}")))
}

impl ReactionNetwork {
    /// JSON document with sorted keys; molecules and reactions are listed
    /// in code order.
    pub fn to_json(&self) -> String {
        let doc = Document {
            molecules: self
                .molecules
                .values()
                .map(|m| MoleculeDoc {
                    code: m.code().to_hex(),
                    graph: GraphDoc {
                        edges: m
                            .graph
                            .edges()
                            .iter()
                            .map(|e| EdgeDoc {
                                label: e.label.clone(),
                                source: e.u,
                                target: e.v,
                            })
                            .collect(),
                        labels: m.graph.labels().to_vec(),
                        name: m.graph.name().map(str::to_owned),
                    },
                    iteration: m.iteration,
                })
                .collect(),
            reactions: self
                .reactions
                .values()
                .map(|r| ReactionDoc {
                    code: r.code.to_hex(),
                    educts: r.educts.iter().map(CanonicalCode::to_hex).collect(),
                    iteration: r.iteration,
                    products: r.products.iter().map(CanonicalCode::to_hex).collect(),
                    rule: r.rule.clone(),
                })
                .collect(),
            stats: self.stats.clone(),
            status: self.status,
        };
        // serde_json maps are ordered, so going through a value sorts keys
        let value = serde_json::to_value(&doc).expect("plain data");
        let mut out = serde_json::to_string_pretty(&value).expect("plain data");
        out.push('\n');
        out
    }

    /// Reads a document written by [`ReactionNetwork::to_json`], checking
    /// every molecule code against its graph. The molecules of the last
    /// iteration are the frontier of further expansion.
    pub fn from_json(text: &str) -> Result<ReactionNetwork> {
        let doc: Document =
            serde_json::from_str(text).map_err(|e| Error::Network(e.to_string()))?;
        let mut molecules = BTreeMap::new();
        for m in doc.molecules {
            let mut g = LabeledGraph::new();
            for l in m.graph.labels {
                g.add_vertex(l);
            }
            for e in m.graph.edges {
                g.add_edge(e.source, e.target, e.label)
                    .map_err(|err| Error::Network(err.to_string()))?;
            }
            if let Some(name) = m.graph.name {
                g = g.with_name(name);
            }
            let canon = canonicalize(&g);
            if canon.code != code_from_hex(&m.code)? {
                return Err(Error::Network(format!(
                    "molecule {} does not match its graph",
                    m.code
                )));
            }
            molecules.insert(
                canon.code.clone(),
                Molecule {
                    graph: Arc::new(g),
                    iteration: m.iteration,
                    canon,
                },
            );
        }
        let mut reactions = BTreeMap::new();
        for r in doc.reactions {
            let parse = |list: &[String]| -> Result<Vec<CanonicalCode>> {
                list.iter()
                    .map(|s| {
                        let c = code_from_hex(s)?;
                        if !molecules.contains_key(&c) {
                            return Err(Error::Network(format!("unknown molecule {s}")));
                        }
                        Ok(c)
                    })
                    .collect()
            };
            let code = code_from_hex(&r.code)?;
            let reaction = Reaction {
                code: code.clone(),
                rule: r.rule,
                educts: parse(&r.educts)?,
                products: parse(&r.products)?,
                iteration: r.iteration,
            };
            if reactions.insert(code, reaction).is_some() {
                return Err(Error::Network(format!("duplicate reaction {}", r.code)));
            }
        }
        let last = doc.stats.len();
        let frontier: BTreeSet<CanonicalCode> = molecules
            .values()
            .filter(|m| m.iteration == last)
            .map(|m| m.code().clone())
            .collect();
        Ok(ReactionNetwork {
            molecules,
            reactions,
            stats: doc.stats,
            status: doc.status,
            frontier,
            rejected: HashSet::new(),
        })
    }

    /// Bipartite rendering: molecules as ellipses, reactions as boxes.
    pub fn to_dot(&self) -> String {
        let index: BTreeMap<&CanonicalCode, usize> = self
            .molecules
            .keys()
            .enumerate()
            .map(|(i, c)| (c, i))
            .collect();
        let mut out = String::from("digraph network {\n");
        for (i, m) in self.molecules.values().enumerate() {
            let label = match m.graph.name() {
                Some(n) => n.to_owned(),
                None => formula(&m.graph),
            };
            let _ = writeln!(out, "  m{i} [shape=ellipse, label={}];", dot_quote(&label));
        }
        for (j, r) in self.reactions.values().enumerate() {
            let _ = writeln!(out, "  r{j} [shape=box, label={}];", dot_quote(&r.rule));
            for e in &r.educts {
                let _ = writeln!(out, "  m{} -> r{j};", index[e]);
            }
            for p in &r.products {
                let _ = writeln!(out, "  r{j} -> m{};", index[p]);
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Label counts in label order, such as `C2H4O2`.
fn formula(g: &LabeledGraph) -> String {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for l in g.labels() {
        *counts.entry(l.as_str()).or_default() += 1;
    }
    counts
        .into_iter()
        .map(|(l, n)| {
            if n == 1 {
                l.to_owned()
            } else {
                format!("{l}{n}")
            }
        })
        .collect()
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_network_documents() {
        let net = ReactionNetwork::new(Vec::<LabeledGraph>::new()).unwrap();
        let json = net.to_json();
        let back = ReactionNetwork::from_json(&json).unwrap();
        assert_eq!(back, net);
        assert_eq!(net.to_dot(), "digraph network {\n}\n");
    }

    #[test]
    fn tampered_code_is_rejected() {
        let g = LabeledGraph::from_parts(["C", "O"], [(0, 1, "=")]).unwrap();
        let net = ReactionNetwork::new([g]).unwrap();
        let json = net.to_json().replace("\"=\"", "\"-\"");
        assert!(matches!(
            ReactionNetwork::from_json(&json),
            Err(Error::Network(_))
        ));
    }
}
