//! Enumeration of double-pushout graph transformation derivations.
//!
//! Rules are applied to multisets of connected input graphs by matching the
//! left-hand side one connected component at a time. Symmetries of the rule
//! and of the host graphs are used to skip matches that would only produce
//! isomorphic copies of derivations already found.

pub mod bench;
pub mod canon;
pub mod ede;
pub mod error;
pub mod gml;
pub mod graph;
pub mod matching;
pub mod network;
pub mod oracle;
pub mod perm;
pub mod rule;

pub use error::{Error, Result};
pub use graph::{connected_components, parse_graph, render_graph, Label, LabeledGraph, UnionGraph};
