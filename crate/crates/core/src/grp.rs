//! Finite permutation groups given by generators.
//!
//! Membership and order come from a deterministic Schreier-Sims stabilizer
//! chain. Orbits are computed by applying generators until closure, so their
//! cost depends on the orbit size and the number of generators, not on the
//! group order.

use std::collections::{HashSet, VecDeque};
use std::hash::Hash;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::perm::Permutation;

#[derive(Clone, Debug)]
struct Level {
    base: u32,
    gens: Vec<Permutation>,
    orbit: Vec<u32>,
    // indexed by point; transversal[p] maps `base` to `p`
    transversal: Vec<Option<Permutation>>,
    transversal_inv: Vec<Option<Permutation>>,
}

impl Level {
    fn new(degree: usize, base: u32) -> Self {
        let mut transversal = vec![None; degree];
        let mut transversal_inv = vec![None; degree];
        transversal[base as usize] = Some(Permutation::identity(degree));
        transversal_inv[base as usize] = Some(Permutation::identity(degree));
        Level {
            base,
            gens: Vec::new(),
            orbit: vec![base],
            transversal,
            transversal_inv,
        }
    }

    fn extend_orbit(&mut self) {
        let mut queue: VecDeque<u32> = self.orbit.iter().copied().collect();
        while let Some(p) = queue.pop_front() {
            for s in &self.gens {
                let q = s.apply(p);
                if self.transversal[q as usize].is_none() {
                    let t = self.transversal[p as usize].as_ref().unwrap().then(s);
                    self.transversal_inv[q as usize] = Some(t.inverse());
                    self.transversal[q as usize] = Some(t);
                    self.orbit.push(q);
                    queue.push_back(q);
                }
            }
        }
    }
}

/// A permutation group `⟨S⟩` with a stabilizer chain.
#[derive(Clone, Debug)]
pub struct PermutationGroup {
    degree: usize,
    generators: Vec<Permutation>,
    levels: Vec<Level>,
}

impl PermutationGroup {
    pub fn trivial(degree: usize) -> Self {
        PermutationGroup {
            degree,
            generators: Vec::new(),
            levels: Vec::new(),
        }
    }

    /// The group generated by `generators`; an empty list gives the trivial group.
    pub fn from_generators(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        Self::with_base_prefix(degree, generators, &[])
    }

    /// Like [`from_generators`](Self::from_generators) with the chain's base
    /// starting with `prefix` (levels with trivial orbits are kept).
    pub fn with_base_prefix(
        degree: usize,
        generators: Vec<Permutation>,
        prefix: &[u32],
    ) -> Result<Self> {
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::SizeMismatch {
                    left: degree,
                    right: g.degree(),
                });
            }
        }
        let mut group = PermutationGroup::trivial(degree);
        for &b in prefix {
            if b as usize >= degree {
                return Err(Error::PointOutOfRange {
                    point: b as usize,
                    size: degree,
                });
            }
            if group.levels.iter().any(|l| l.base == b) {
                continue;
            }
            group.levels.push(Level::new(degree, b));
        }
        for g in generators {
            group.add_generator(g);
        }
        Ok(group)
    }

    /// Chain of `self` with base starting at `prefix`, built by sifting
    /// pseudo-random group elements until the basic orbits multiply up to
    /// the known order. The random stream is fixed, so the result is
    /// deterministic, and the order check makes it exact.
    fn rebased(&self, prefix: &[u32]) -> Self {
        let target = self.order();
        let mut group = Self::with_base_prefix(self.degree, Vec::new(), prefix).expect("prefix points in range");
        group.generators = self.generators.clone();
        let sift_in = |group: &mut Self, g: &Permutation| {
            let (residue, depth) = group.sift(g, 0);
            if residue.is_identity() {
                return;
            }
            if depth == group.levels.len() {
                let base = residue.first_moved().expect("non-identity residue");
                group.levels.push(Level::new(group.degree, base));
            }
            for level in &mut group.levels[..=depth] {
                level.gens.push(residue.clone());
                level.extend_orbit();
            }
        };
        for g in &self.generators {
            sift_in(&mut group, g);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut pool: Vec<Permutation> = self.generators.iter().cycle().take(self.generators.len().max(10)).cloned().collect();
        let mut acc = Permutation::identity(self.degree);
        let mut step = |rng: &mut ChaCha8Rng, acc: &mut Permutation| {
            let i = rng.gen_range(0..pool.len());
            let mut j = rng.gen_range(0..pool.len() - 1);
            if j >= i {
                j += 1;
            }
            let other = if rng.gen_bool(0.5) { pool[j].clone() } else { pool[j].inverse() };
            pool[i] = pool[i].then(&other);
            *acc = acc.then(&pool[i]);
        };
        for _ in 0..50 {
            step(&mut rng, &mut acc);
        }
        while group.order() != target {
            step(&mut rng, &mut acc);
            sift_in(&mut group, &acc.clone());
        }
        group
    }

    /// Adds a generator, extending the chain if it is not already a member.
    pub fn add_generator(&mut self, g: Permutation) {
        assert_eq!(g.degree(), self.degree);
        let (residue, depth) = self.sift(&g, 0);
        self.generators.push(g);
        if !residue.is_identity() {
            self.add_strong_generator(0, depth, residue);
        }
    }

    fn add_strong_generator(&mut self, from: usize, to: usize, h: Permutation) {
        if to == self.levels.len() {
            let base = h.first_moved().expect("non-identity residue");
            self.levels.push(Level::new(self.degree, base));
        }
        for level in &mut self.levels[from..=to] {
            level.gens.push(h.clone());
            level.extend_orbit();
        }
        for l in (from..=to).rev() {
            self.close_level(l);
        }
    }

    // Sifts every Schreier generator of level `k` through the deeper levels.
    fn close_level(&mut self, k: usize) {
        let orbit = self.levels[k].orbit.clone();
        let gens = self.levels[k].gens.clone();
        for &p in &orbit {
            for s in &gens {
                let level = &self.levels[k];
                let q = s.apply(p);
                let schreier = level.transversal[p as usize]
                    .as_ref()
                    .unwrap()
                    .then(s)
                    .then(level.transversal_inv[q as usize].as_ref().unwrap());
                if schreier.is_identity() {
                    continue;
                }
                let (residue, depth) = self.sift(&schreier, k + 1);
                if !residue.is_identity() {
                    self.add_strong_generator(k + 1, depth, residue);
                }
            }
        }
    }

    // Returns the residue and the level at which sifting stopped.
    fn sift(&self, g: &Permutation, from: usize) -> (Permutation, usize) {
        let mut g = g.clone();
        for (k, level) in self.levels.iter().enumerate().skip(from) {
            let p = g.apply(level.base);
            match &level.transversal_inv[p as usize] {
                None => return (g, k),
                Some(inv) => g = g.then(inv),
            }
        }
        (g, self.levels.len())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }

    /// Orbit lengths along the stabilizer chain.
    pub fn transversal_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::from(1u32), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    /// The order if it fits in a `u64`.
    pub fn order_u64(&self) -> Option<u64> {
        self.levels
            .iter()
            .try_fold(1u64, |acc, l| acc.checked_mul(l.orbit.len() as u64))
    }

    pub fn is_trivial(&self) -> bool {
        self.levels.iter().all(|l| l.orbit.len() == 1)
    }

    pub fn contains(&self, p: &Permutation) -> Result<bool> {
        if p.degree() != self.degree {
            return Err(Error::SizeMismatch {
                left: self.degree,
                right: p.degree(),
            });
        }
        let (residue, _) = self.sift(p, 0);
        Ok(residue.is_identity())
    }

    pub fn is_abelian(&self) -> bool {
        self.generators.iter().all(|a| {
            self.generators
                .iter()
                .all(|b| a.then(b) == b.then(a))
        })
    }

    /// Calls `f` on every element. Visits `order()` elements.
    pub fn for_each_element(&self, mut f: impl FnMut(&Permutation)) {
        // element = u_last·…·u_1·u_0 (deepest transversal applied first)
        fn walk(levels: &[Level], acc: &Permutation, f: &mut impl FnMut(&Permutation)) {
            match levels.split_last() {
                None => f(acc),
                Some((last, rest)) => {
                    for &p in &last.orbit {
                        let t = last.transversal[p as usize].as_ref().unwrap();
                        walk(rest, &acc.then(t), f);
                    }
                }
            }
        }
        walk(&self.levels, &Permutation::identity(self.degree), &mut f);
    }

    pub fn elements(&self) -> Vec<Permutation> {
        let mut out = Vec::new();
        self.for_each_element(|g| out.push(g.clone()));
        out
    }

    /// Orbit of `x` under the given action, sorted ascending.
    pub fn orbit<A: GroupAction>(&self, x: &A::Object, action: &A) -> Vec<A::Object> {
        orbit_under(self.generators(), x, action)
    }

    /// The minimal element of the orbit of `x`.
    pub fn canonical_rep<A: GroupAction>(&self, x: &A::Object, action: &A) -> A::Object {
        let orbit = self.orbit(x, action);
        orbit.into_iter().next().expect("orbit contains x")
    }

    /// Lexicographically minimal entry-wise image of `values` over all group
    /// elements, i.e. the canonical representative under [`MappingAction`],
    /// computed along a stabilizer chain whose base starts with the
    /// distinct entries of `values`.
    pub fn min_image(&self, values: &[u32]) -> Vec<u32> {
        if self.generators.is_empty() {
            return values.to_vec();
        }
        let mut prefix = Vec::new();
        let mut seen = vec![false; self.degree];
        for &v in values {
            if !seen[v as usize] {
                seen[v as usize] = true;
                prefix.push(v);
            }
        }
        let chain;
        let chain_ref = if self.base().starts_with(&prefix) {
            self
        } else {
            chain = self.rebased(&prefix);
            &chain
        };
        let mut current = Permutation::identity(self.degree);
        let mut level = 0;
        let mut out = Vec::with_capacity(values.len());
        seen.iter_mut().for_each(|s| *s = false);
        for &v in values {
            if seen[v as usize] {
                out.push(current.apply(v));
                continue;
            }
            seen[v as usize] = true;
            let l = &chain_ref.levels[level];
            let best = l
                .orbit
                .iter()
                .copied()
                .min_by_key(|&q| current.apply(q))
                .unwrap();
            current = l.transversal[best as usize].as_ref().unwrap().then(&current);
            out.push(current.apply(v));
            level += 1;
        }
        out
    }
}

/// Orbit of `x` under the group generated by `gens`, sorted ascending.
pub fn orbit_under<A: GroupAction>(
    gens: &[Permutation],
    x: &A::Object,
    action: &A,
) -> Vec<A::Object> {
    let mut seen: HashSet<A::Object> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(x.clone());
    queue.push_back(x.clone());
    while let Some(y) = queue.pop_front() {
        for g in gens {
            let z = action.act(g, &y);
            if seen.insert(z.clone()) {
                queue.push_back(z);
            }
        }
    }
    let mut out: Vec<_> = seen.into_iter().collect();
    out.sort();
    out
}

/// How a permutation acts on some kind of object.
pub trait GroupAction {
    type Object: Clone + Eq + Hash + Ord;

    fn act(&self, g: &Permutation, x: &Self::Object) -> Self::Object;
}

/// Action on single points.
#[derive(Clone, Copy, Debug, Default)]
pub struct PointAction;

impl GroupAction for PointAction {
    type Object = u32;

    fn act(&self, g: &Permutation, x: &u32) -> u32 {
        g.apply(*x)
    }
}

/// Action on subsets, represented as sorted point lists.
#[derive(Clone, Copy, Debug, Default)]
pub struct SetAction;

impl GroupAction for SetAction {
    type Object = Vec<u32>;

    fn act(&self, g: &Permutation, x: &Vec<u32>) -> Vec<u32> {
        let mut out: Vec<u32> = x.iter().map(|&p| g.apply(p)).collect();
        out.sort_unstable();
        out
    }
}

/// Entry-wise action on tuples of points (architecture symmetries on mappings).
#[derive(Clone, Copy, Debug, Default)]
pub struct MappingAction;

impl GroupAction for MappingAction {
    type Object = Vec<u32>;

    fn act(&self, g: &Permutation, x: &Vec<u32>) -> Vec<u32> {
        x.iter().map(|&p| g.apply(p)).collect()
    }
}

/// `G × H`: `G` permutes PE indices, `H` permutes task indices.
#[derive(Clone, Debug)]
pub struct ProductGroup {
    pub arch: PermutationGroup,
    pub tasks: PermutationGroup,
}

pub fn direct_product(arch: PermutationGroup, tasks: PermutationGroup) -> ProductGroup {
    ProductGroup { arch, tasks }
}

impl ProductGroup {
    pub fn order(&self) -> BigUint {
        self.arch.order() * self.tasks.order()
    }
}
