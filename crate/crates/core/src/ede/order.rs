//! The monomorphism order on interchangeable rule components.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::rule::RuleAutInfo;

/// A monomorphism of a rule component placed in a host component, reduced
/// to what the order compares: the graph rank, the host component index and
/// the key (images along the class representative).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SlotMono<'a> {
    pub graph: usize,
    pub slot: usize,
    pub key: &'a [usize],
}

impl PartialOrd for SlotMono<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SlotMono<'_> {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.graph, self.slot, self.key).cmp(&(other.graph, other.slot, other.key))
    }
}

/// Whether the monomorphism of component `i` is smaller than that of
/// component `j`. Fails when the components are not interchangeable.
pub fn mono_less(
    info: &RuleAutInfo,
    i: usize,
    a: SlotMono<'_>,
    j: usize,
    b: SlotMono<'_>,
) -> Result<bool> {
    if info.class_rep(i) != info.class_rep(j) {
        return Err(Error::IncomparableComponents);
    }
    Ok(a < b)
}
