//! Minimality of a match extension under rule and host symmetries.

use crate::rule::RuleAutInfo;

use super::{DbEntry, GraphSet, Mode};

/// Whether no `alpha_G ∘ phi ∘ alpha_L` has a smaller key than `phi`, where
/// `alpha_L` ranges over the local automorphisms of component `i` and
/// `alpha_G` over host automorphisms fixing every vertex marked in `used`.
///
/// With [`Mode::EdeS`] both sets are full groups, the host one being the
/// pointwise stabilizer. With [`Mode::EdeSs`] each is the identity plus the
/// generators at hand: the local rule generators and the host generators
/// fixing the used vertices.
pub(crate) fn is_minimal(
    info: &RuleAutInfo,
    graphs: &GraphSet,
    mode: Mode,
    i: usize,
    entry: &DbEntry,
    used: &[bool],
) -> bool {
    let gens = graphs.generators(entry.graph);
    if gens.is_empty() {
        // the database already holds only locally minimal monomorphisms
        return true;
    }
    match mode {
        Mode::Ede => true,
        Mode::EdeS => {
            let fixed: Vec<usize> = (0..used.len()).filter(|&v| used[v]).collect();
            let group = graphs.group(entry.graph);
            info.local(i).iter().all(|alpha| {
                let tuple = info.key_composed(i, &entry.image, alpha);
                let (best, _) = group.min_image(&fixed, &tuple);
                best >= entry.key
            })
        }
        Mode::EdeSs => {
            let fixing: Vec<_> = gens
                .iter()
                .filter(|g| (0..used.len()).all(|v| !used[v] || g.fixes(v)))
                .collect();
            if fixing.is_empty() {
                return true;
            }
            let tuples = std::iter::once(entry.key.clone()).chain(
                info.local_generators(i)
                    .iter()
                    .map(|alpha| info.key_composed(i, &entry.image, alpha)),
            );
            tuples.into_iter().all(|tuple| {
                fixing.iter().all(|g| {
                    let moved: Vec<usize> = tuple.iter().map(|&h| g.apply(h)).collect();
                    moved >= entry.key
                })
            })
        }
    }
}
