//! Permutations and permutation groups stored as a base and strong
//! generating set built with the deterministic Schreier-Sims algorithm.

use std::fmt;

use crate::error::{Error, Result};

/// A permutation of `0..n`, stored as its image vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<usize>);

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.0)
    }
}

/// Cycle notation without fixed points, `()` for the identity.
impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.0.len()];
        let mut any = false;
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] == start {
                continue;
            }
            any = true;
            write!(f, "(")?;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                if x != start {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
                x = self.0[x];
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::InvalidPermutation(format!(
                    "{images:?} is not a permutation of 0..{n}"
                )));
            }
            seen[x] = true;
        }
        Ok(Perm(images))
    }

    /// Builds a permutation from disjoint cycles on `0..n`.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut img: Vec<usize> = (0..n).collect();
        for c in cycles {
            for (i, &x) in c.iter().enumerate() {
                if x >= n {
                    return Err(Error::InvalidPermutation(format!("point {x} >= {n}")));
                }
                img[x] = c[(i + 1) % c.len()];
            }
        }
        Self::from_images(img)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&x| self.0[x]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn fixes(&self, x: usize) -> bool {
        self.0[x] == x
    }

    fn first_moved(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(i, &x)| *i != x)
            .map(|(i, _)| i)
    }
}

#[derive(Clone, Debug)]
struct Level {
    point: usize,
    /// Indices into the strong generating set.
    gens: Vec<usize>,
    orbit: Vec<usize>,
    /// `transversal[b]` maps `point` to `b` for every `b` in the orbit.
    transversal: Vec<Option<Perm>>,
}

/// A permutation group on `0..degree` with a base and strong generating set.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    strong: Vec<Perm>,
    levels: Vec<Level>,
}

impl PermGroup {
    pub fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            strong: Vec::new(),
            levels: Vec::new(),
        }
    }

    /// The group generated by `generators`.
    pub fn new(degree: usize, generators: &[Perm]) -> Result<Self> {
        Self::with_base(degree, generators, &[], None)
    }

    /// Builds the group with `base_prefix` as the first base points. When the
    /// group order is already known, construction stops as soon as it is
    /// reached.
    pub fn with_base(
        degree: usize,
        generators: &[Perm],
        base_prefix: &[usize],
        known_order: Option<u128>,
    ) -> Result<Self> {
        for g in generators {
            if g.degree() != degree {
                return Err(Error::InvalidPermutation(format!(
                    "generator of degree {} in a group of degree {degree}",
                    g.degree()
                )));
            }
        }
        if let Some(&p) = base_prefix.iter().find(|&&p| p >= degree) {
            return Err(Error::InvalidPermutation(format!(
                "base point {p} out of range"
            )));
        }
        let mut grp = PermGroup::trivial(degree);
        for &p in base_prefix {
            if !grp.levels.iter().any(|l| l.point == p) {
                grp.push_level(p);
            }
        }
        for g in generators {
            if g.is_identity() || grp.strong.contains(g) {
                continue;
            }
            if grp.levels.iter().all(|l| g.fixes(l.point)) {
                grp.push_level(g.first_moved().unwrap());
            }
            let idx = grp.strong.len();
            grp.strong.push(g.clone());
            grp.levels[0].gens.push(idx);
        }
        for i in 0..grp.levels.len() {
            let gens: Vec<usize> = (0..grp.strong.len())
                .filter(|&s| grp.levels[..i].iter().all(|l| grp.strong[s].fixes(l.point)))
                .collect();
            grp.levels[i].gens = gens;
            grp.rebuild_orbit(i);
        }
        grp.schreier_sims(known_order);
        Ok(grp)
    }

    fn push_level(&mut self, point: usize) {
        let mut transversal = vec![None; self.degree];
        transversal[point] = Some(Perm::identity(self.degree));
        self.levels.push(Level {
            point,
            gens: Vec::new(),
            orbit: vec![point],
            transversal,
        });
    }

    fn rebuild_orbit(&mut self, i: usize) {
        let level = &mut self.levels[i];
        let mut transversal = vec![None; self.degree];
        transversal[level.point] = Some(Perm::identity(self.degree));
        let mut orbit = vec![level.point];
        let mut k = 0;
        while k < orbit.len() {
            let b = orbit[k];
            k += 1;
            for &s in &level.gens {
                let g = &self.strong[s];
                let c = g.apply(b);
                if transversal[c].is_none() {
                    transversal[c] = Some(g.compose(transversal[b].as_ref().unwrap()));
                    orbit.push(c);
                }
            }
        }
        level.orbit = orbit;
        level.transversal = transversal;
    }

    /// Sifts `g` through the levels starting at `from`. Returns the residue
    /// and the level where sifting stopped (`levels.len()` if it passed all).
    fn sift(&self, mut g: Perm, from: usize) -> (Perm, usize) {
        for (i, level) in self.levels.iter().enumerate().skip(from) {
            let b = g.apply(level.point);
            match &level.transversal[b] {
                None => return (g, i),
                Some(u) => g = u.inverse().compose(&g),
            }
        }
        (g, self.levels.len())
    }

    fn schreier_sims(&mut self, known_order: Option<u128>) {
        if self.levels.is_empty() {
            return;
        }
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            if known_order.is_some_and(|o| self.order() == o) {
                return;
            }
            let lv = i as usize;
            let mut restart = None;
            'search: for oi in 0..self.levels[lv].orbit.len() {
                let b = self.levels[lv].orbit[oi];
                for si in 0..self.levels[lv].gens.len() {
                    let s = &self.strong[self.levels[lv].gens[si]];
                    let ub = self.levels[lv].transversal[b].as_ref().unwrap();
                    let sb = s.compose(ub);
                    let c = sb.apply(self.levels[lv].point);
                    let uc = self.levels[lv].transversal[c].as_ref().unwrap();
                    let h = uc.inverse().compose(&sb);
                    if h.is_identity() {
                        continue;
                    }
                    let (r, j) = self.sift(h, lv + 1);
                    if j < self.levels.len() || !r.is_identity() {
                        if j == self.levels.len() {
                            self.push_level(r.first_moved().unwrap());
                        }
                        let idx = self.strong.len();
                        self.strong.push(r);
                        for l in lv + 1..=j {
                            self.levels[l].gens.push(idx);
                            self.rebuild_orbit(l);
                        }
                        restart = Some(j);
                        break 'search;
                    }
                }
            }
            match restart {
                Some(j) => i = j as isize,
                None => i -= 1,
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn strong_generators(&self) -> &[Perm] {
        &self.strong
    }

    /// Group order as the product of basic orbit lengths.
    pub fn order(&self) -> u128 {
        self.levels
            .iter()
            .map(|l| l.orbit.len() as u128)
            .fold(1u128, |a, b| a.saturating_mul(b))
    }

    pub fn is_trivial(&self) -> bool {
        self.strong.is_empty()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (r, j) = self.sift(g.clone(), 0);
        j == self.levels.len() && r.is_identity()
    }

    /// The subgroup fixing every point in `points`.
    pub fn pointwise_stabilizer(&self, points: &[usize]) -> PermGroup {
        if self.is_trivial() {
            return PermGroup::trivial(self.degree);
        }
        let full = PermGroup::with_base(self.degree, &self.strong, points, Some(self.order()))
            .expect("strong generators are valid");
        let mut m = 0;
        while m < full.levels.len() && points.contains(&full.levels[m].point) {
            m += 1;
        }
        full.tail(m)
    }

    /// The stabilizer of the first `m` base points, reusing this structure.
    fn tail(&self, m: usize) -> PermGroup {
        let keep: Vec<usize> = match self.levels.get(m) {
            Some(l) => l.gens.clone(),
            None => Vec::new(),
        };
        let mut remap = vec![usize::MAX; self.strong.len()];
        let mut strong = Vec::with_capacity(keep.len());
        for &s in &keep {
            remap[s] = strong.len();
            strong.push(self.strong[s].clone());
        }
        let levels = self.levels[m..]
            .iter()
            .map(|l| Level {
                point: l.point,
                gens: l.gens.iter().map(|&s| remap[s]).collect(),
                orbit: l.orbit.clone(),
                transversal: l.transversal.clone(),
            })
            .collect();
        PermGroup {
            degree: self.degree,
            strong,
            levels,
        }
    }

    /// Enumerates group elements, stopping after `cap`. The flag reports
    /// whether the enumeration was truncated.
    pub fn elements(&self, cap: usize) -> (Vec<Perm>, bool) {
        let mut out = Vec::new();
        let truncated = !self.collect(0, Perm::identity(self.degree), cap, &mut out);
        (out, truncated)
    }

    fn collect(&self, level: usize, prefix: Perm, cap: usize, out: &mut Vec<Perm>) -> bool {
        if level == self.levels.len() {
            if out.len() >= cap {
                return false;
            }
            out.push(prefix);
            return true;
        }
        let l = &self.levels[level];
        for &b in &l.orbit {
            let g = prefix.compose(l.transversal[b].as_ref().unwrap());
            if !self.collect(level + 1, g, cap, out) {
                return false;
            }
        }
        true
    }

    /// Some element sending `points[t]` to `images[t]` for every `t`.
    pub fn element_mapping(&self, points: &[usize], images: &[usize]) -> Option<Perm> {
        assert_eq!(points.len(), images.len());
        let grp = PermGroup::with_base(self.degree, &self.strong, points, Some(self.order()))
            .expect("strong generators are valid");
        let mut g = Perm::identity(self.degree);
        let mut level = 0;
        for (&p, &q) in points.iter().zip(images) {
            if level < grp.levels.len() && grp.levels[level].point == p {
                // g(u(p)) = q with u from this level
                let target = g.inverse().apply(q);
                let u = grp.levels[level].transversal[target].as_ref()?;
                g = g.compose(u);
                level += 1;
            } else if g.apply(p) != q {
                return None;
            }
        }
        Some(g)
    }

    /// The lexicographically smallest image of `tuple` under the pointwise
    /// stabilizer of `fixed`, with an element attaining it.
    pub fn min_image(&self, fixed: &[usize], tuple: &[usize]) -> (Vec<usize>, Perm) {
        let mut prefix: Vec<usize> = Vec::with_capacity(fixed.len() + tuple.len());
        for &p in fixed.iter().chain(tuple) {
            if !prefix.contains(&p) {
                prefix.push(p);
            }
        }
        let grp = PermGroup::with_base(self.degree, &self.strong, &prefix, Some(self.order()))
            .expect("strong generators are valid");
        let mut level = 0;
        while level < grp.levels.len() && fixed.contains(&grp.levels[level].point) {
            level += 1;
        }
        let mut g = Perm::identity(self.degree);
        let mut image = Vec::with_capacity(tuple.len());
        for &t in tuple {
            if level < grp.levels.len() && grp.levels[level].point == t {
                let l = &grp.levels[level];
                let best = l.orbit.iter().copied().min_by_key(|&d| g.apply(d)).unwrap();
                g = g.compose(l.transversal[best].as_ref().unwrap());
                level += 1;
            }
            image.push(g.apply(t));
        }
        (image, g)
    }
}
