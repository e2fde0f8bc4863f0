use crate::canon::{encode_derivation, CanonicalCode};
use crate::error::Result;
use crate::graph::UnionGraph;

use super::{apply, Rule};

/// A direct derivation `host => result` of a rule at a total match.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    rule: String,
    host: UnionGraph,
    m: Vec<usize>,
    result: UnionGraph,
    code: CanonicalCode,
}

impl Derivation {
    /// Applies `p` at `m` (global host vertex per left vertex). Fails unless
    /// the match is total, valid and proper.
    pub fn new(p: &Rule, host: UnionGraph, m: Vec<usize>) -> Result<Derivation> {
        let result = apply(p, &host, &m)?;
        let code = encode_derivation(p, &host.to_graph(), &m)?;
        Ok(Derivation {
            rule: p.name().to_owned(),
            host,
            m,
            result,
            code,
        })
    }

    pub fn rule_name(&self) -> &str {
        &self.rule
    }

    pub fn host(&self) -> &UnionGraph {
        &self.host
    }

    pub fn matching(&self) -> &[usize] {
        &self.m
    }

    pub fn result(&self) -> &UnionGraph {
        &self.result
    }

    pub fn code(&self) -> &CanonicalCode {
        &self.code
    }
}
