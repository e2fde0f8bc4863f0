use crate::canon::{canonicalize_colored, encode_rule};
use crate::matching::enumerate_monomorphisms;
use crate::perm::{Perm, PermGroup};

use super::Rule;

/// Cap on the number of local automorphisms listed per component. A
/// truncated list only weakens pruning.
const LOCAL_CAP: usize = 100_000;

/// Symmetry data of a rule used to prune isomorphic matches.
///
/// Components `L_i` and `L_j` are interchangeable when some rule
/// automorphism swaps them and fixes every other left vertex. Each
/// interchangeable component `L_j` carries an isomorphism `rho_j` from its
/// class representative such that the swap of `L_j` with the representative
/// maps `rho_j` to the identity; monomorphisms of the class are compared
/// through these isomorphisms. The local automorphisms of `L_i` are the rule
/// automorphisms that fix all other left vertices, restricted to `L_i`.
#[derive(Clone, Debug)]
pub struct RuleAutInfo {
    left_group: PermGroup,
    class_rep: Vec<usize>,
    rho: Vec<Vec<usize>>,
    local: Vec<Vec<Perm>>,
    local_gens: Vec<Vec<Perm>>,
    local_truncated: Vec<bool>,
}

impl RuleAutInfo {
    pub fn compute(p: &Rule) -> RuleAutInfo {
        let nl = p.left().vertex_count();
        let canon = canonicalize_colored(&encode_rule(p));
        let mut gens: Vec<Perm> = Vec::new();
        for g in &canon.generators {
            let restricted = Perm::from_images(g.images()[..nl].to_vec())
                .expect("rule automorphisms map L onto L");
            if !restricted.is_identity() && !gens.contains(&restricted) {
                gens.push(restricted);
            }
        }
        let left_group = PermGroup::new(nl, &gens).expect("restrictions are permutations");
        let k = p.component_count();
        let mut class_rep: Vec<usize> = (0..k).collect();
        let mut rho: Vec<Vec<usize>> = (0..k)
            .map(|i| (0..p.component(i).vertex_count()).collect())
            .collect();
        let all: Vec<usize> = (0..nl).collect();
        for i in 0..k {
            if left_group.is_trivial() {
                break;
            }
            let reps: Vec<usize> = (0..i).filter(|&r| class_rep[r] == r).collect();
            'reps: for r in reps {
                let (lr, li) = (p.component(r), p.component(i));
                if lr.vertex_count() != li.vertex_count() || lr.edge_count() != li.edge_count() {
                    continue;
                }
                for cand in enumerate_monomorphisms(lr, li) {
                    let mut images = all.clone();
                    for (a, &b) in cand.iter().enumerate() {
                        let (x, y) = (p.component_vertices(r)[a], p.component_vertices(i)[b]);
                        images[x] = y;
                        images[y] = x;
                    }
                    if left_group.element_mapping(&all, &images).is_some() {
                        class_rep[i] = r;
                        rho[i] = cand;
                        break 'reps;
                    }
                }
            }
        }
        let mut local = Vec::with_capacity(k);
        let mut local_gens = Vec::with_capacity(k);
        let mut local_truncated = Vec::with_capacity(k);
        for i in 0..k {
            let verts = p.component_vertices(i);
            let others: Vec<usize> = (0..nl).filter(|v| !verts.contains(v)).collect();
            let restrict = |g: &Perm| {
                Perm::from_images(
                    verts
                        .iter()
                        .map(|&v| p.component_of(g.apply(v)).1)
                        .collect(),
                )
                .expect("local automorphisms permute the component")
            };
            local_gens.push(
                gens.iter()
                    .filter(|g| others.iter().all(|&v| g.fixes(v)))
                    .map(restrict)
                    .collect(),
            );
            let stab = left_group.pointwise_stabilizer(&others);
            let (els, truncated) = stab.elements(LOCAL_CAP);
            local.push(els.iter().map(restrict).collect());
            local_truncated.push(truncated);
        }
        RuleAutInfo {
            left_group,
            class_rep,
            rho,
            local,
            local_gens,
            local_truncated,
        }
    }

    /// Rule automorphisms restricted to the left graph.
    pub fn left_group(&self) -> &PermGroup {
        &self.left_group
    }

    /// Representative component of the class of component `i`.
    pub fn class_rep(&self, i: usize) -> usize {
        self.class_rep[i]
    }

    /// Components sharing a class with `i`, `i` included.
    pub fn class_members(&self, i: usize) -> Vec<usize> {
        let r = self.class_rep[i];
        (0..self.class_rep.len())
            .filter(|&j| self.class_rep[j] == r)
            .collect()
    }

    pub fn rho(&self, i: usize) -> &[usize] {
        &self.rho[i]
    }

    /// Local automorphisms of component `i` as permutations of its local
    /// vertex indices. The identity is always included.
    pub fn local(&self, i: usize) -> &[Perm] {
        &self.local[i]
    }

    /// Generators of the rule group found by canonicalization that are
    /// local to component `i`, restricted to it. They need not generate
    /// [`RuleAutInfo::local`].
    pub fn local_generators(&self, i: usize) -> &[Perm] {
        &self.local_gens[i]
    }

    pub fn local_truncated(&self, i: usize) -> bool {
        self.local_truncated[i]
    }

    /// Comparison key of a monomorphism of component `i`, given as its
    /// image vector: the images along the class representative's vertices.
    pub fn key(&self, i: usize, image: &[usize]) -> Vec<usize> {
        self.rho[i].iter().map(|&b| image[b]).collect()
    }

    /// Key of `image ∘ alpha` for a local automorphism `alpha` of `i`.
    pub fn key_composed(&self, i: usize, image: &[usize], alpha: &Perm) -> Vec<usize> {
        self.rho[i].iter().map(|&b| image[alpha.apply(b)]).collect()
    }

    pub fn has_symmetry(&self) -> bool {
        !self.left_group.is_trivial()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule::parse_rule;

    #[test]
    fn bond_rule_swaps_its_ends() {
        let p = parse_rule(
            r#"rule [ ruleID "bond"
                context [ node [ id 0 label "C" ] node [ id 1 label "C" ] ]
                right [ edge [ source 0 target 1 label "-" ] ] ]"#,
        )
        .unwrap();
        let info = RuleAutInfo::compute(&p);
        assert_eq!(info.left_group().order(), 2);
        assert_eq!(info.class_rep(1), 0);
        assert_eq!(info.local(0).len(), 1);
    }

    #[test]
    fn three_vertex_rule_with_one_swap() {
        // a hollow, b filled, c hollow: only the hollow ones are interchangeable
        let p = parse_rule(
            r#"rule [ ruleID "fig2"
                context [ node [ id 0 label "o" ] node [ id 1 label "x" ] node [ id 2 label "o" ] ]
                right [ edge [ source 0 target 1 label "-" ] edge [ source 1 target 2 label "-" ] ] ]"#,
        )
        .unwrap();
        let info = RuleAutInfo::compute(&p);
        assert_eq!(info.left_group().order(), 2);
        assert_eq!(
            (info.class_rep(0), info.class_rep(1), info.class_rep(2)),
            (0, 1, 0)
        );
    }

    #[test]
    fn asymmetric_rule_is_trivial() {
        let p = parse_rule(
            r#"rule [ ruleID "bond"
                context [ node [ id 0 label "C" ] node [ id 1 label "O" ] ]
                right [ edge [ source 0 target 1 label "-" ] ] ]"#,
        )
        .unwrap();
        let info = RuleAutInfo::compute(&p);
        assert!(!info.has_symmetry());
        assert_eq!(info.class_members(1), vec![1]);
    }
}
