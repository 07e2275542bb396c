//! Inverse semigroups of partial permutations, enumerated by closure.
//!
//! Elements live in a flat arena of `u16` image arrays; a hash table of
//! arena indices gives membership. Closure is a deterministic worklist:
//! every element is right-multiplied by each generator and each generator
//! inverse until nothing new appears. Generators can be added one at a time,
//! which only multiplies the existing elements by the new generators.

use std::collections::{BTreeSet, VecDeque};
use std::hash::BuildHasher;

use hashbrown::{DefaultHashBuilder, HashTable};

use crate::error::{Error, Result};
use crate::perm::PartialPermutation;

pub const DEFAULT_CAP: usize = 5_000_000;

const UNDEF: u16 = u16::MAX;

#[derive(Clone)]
pub struct InverseSemigroup {
    degree: usize,
    cap: usize,
    generators: Vec<PartialPermutation>,
    // generators and their inverses, deduplicated, in insertion order
    multipliers: Vec<Vec<u16>>,
    arena: Vec<u16>,
    len: usize,
    table: HashTable<u32>,
    hasher: DefaultHashBuilder,
    capped: bool,
}

impl std::fmt::Debug for InverseSemigroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InverseSemigroup")
            .field("degree", &self.degree)
            .field("generators", &self.generators.len())
            .field("elements", &self.len)
            .finish()
    }
}

fn encode(t: &PartialPermutation) -> Vec<u16> {
    t.raw()
        .iter()
        .map(|&y| if y == u32::MAX { UNDEF } else { y as u16 })
        .collect()
}

fn decode(raw: &[u16]) -> PartialPermutation {
    PartialPermutation::from_raw_unchecked(
        raw.iter()
            .map(|&y| if y == UNDEF { u32::MAX } else { y as u32 })
            .collect(),
    )
}

impl InverseSemigroup {
    /// The empty semigroup on `degree` points (no generators, no elements).
    pub fn empty(degree: usize, cap: usize) -> Result<Self> {
        if degree >= UNDEF as usize {
            return Err(Error::TooLarge {
                nodes: degree,
                max: UNDEF as usize - 1,
            });
        }
        Ok(InverseSemigroup {
            degree,
            cap,
            generators: Vec::new(),
            multipliers: Vec::new(),
            arena: Vec::new(),
            len: 0,
            table: HashTable::new(),
            hasher: DefaultHashBuilder::default(),
            capped: false,
        })
    }

    /// Enumerates `⟨generators⟩`; fails with [`Error::CapExceeded`] past `cap` elements.
    pub fn from_generators(
        degree: usize,
        generators: &[PartialPermutation],
        cap: usize,
    ) -> Result<Self> {
        let mut s = Self::empty(degree, cap)?;
        for g in generators {
            s.add_generator(g.clone())?;
        }
        Ok(s)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[PartialPermutation] {
        &self.generators
    }

    /// Number of enumerated elements.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn element(&self, i: usize) -> PartialPermutation {
        decode(self.raw_element(i))
    }

    fn raw_element(&self, i: usize) -> &[u16] {
        &self.arena[i * self.degree..(i + 1) * self.degree]
    }

    /// Elements in enumeration order.
    pub fn elements(&self) -> impl Iterator<Item = PartialPermutation> + '_ {
        (0..self.len).map(|i| self.element(i))
    }

    fn find(&self, raw: &[u16]) -> Option<u32> {
        let hash = self.hasher.hash_one(raw);
        let d = self.degree;
        let arena = &self.arena;
        self.table
            .find(hash, |&i| {
                let i = i as usize;
                &arena[i * d..(i + 1) * d] == raw
            })
            .copied()
    }

    fn insert(&mut self, raw: &[u16]) -> Result<bool> {
        if self.find(raw).is_some() {
            return Ok(false);
        }
        if self.len >= self.cap {
            self.capped = true;
            return Err(Error::CapExceeded { cap: self.cap });
        }
        let idx = self.len as u32;
        self.arena.extend_from_slice(raw);
        self.len += 1;
        let hasher = self.hasher;
        let d = self.degree;
        let arena = &self.arena;
        let hash = hasher.hash_one(raw);
        self.table.insert_unique(hash, idx, |&i| {
            let i = i as usize;
            hasher.hash_one(&arena[i * d..(i + 1) * d])
        });
        Ok(true)
    }

    fn check_degree(&self, t: &PartialPermutation) -> Result<()> {
        if t.degree() != self.degree {
            return Err(Error::SizeMismatch {
                left: self.degree,
                right: t.degree(),
            });
        }
        Ok(())
    }

    /// Membership in the enumerated closure. A closure that hit its cap
    /// cannot answer and reports the cap instead.
    pub fn contains(&self, t: &PartialPermutation) -> Result<bool> {
        self.check_degree(t)?;
        if self.capped {
            return Err(Error::CapExceeded { cap: self.cap });
        }
        Ok(self.find(&encode(t)).is_some())
    }

    /// Adds a generator and extends the closure.
    pub fn add_generator(&mut self, g: PartialPermutation) -> Result<()> {
        self.check_degree(&g)?;
        if self.capped {
            return Err(Error::CapExceeded { cap: self.cap });
        }
        let already = self.find(&encode(&g)).is_some();
        let inv = g.inverse();
        self.generators.push(g.clone());
        if already {
            // closed under inversion, so g⁻¹ is present as well
            return Ok(());
        }
        let mut fresh = vec![encode(&g)];
        let inv_raw = encode(&inv);
        if inv_raw != fresh[0] {
            fresh.push(inv_raw);
        }
        let old_len = self.len;
        let d = self.degree;
        let mut buf = vec![0u16; d];

        for s in &fresh {
            self.insert(s)?;
        }
        for i in 0..old_len {
            for s in &fresh {
                multiply_into(&self.arena[i * d..(i + 1) * d], s, &mut buf);
                self.insert(&buf)?;
            }
        }
        self.multipliers.extend(fresh);
        let mut i = old_len;
        while i < self.len {
            for m in 0..self.multipliers.len() {
                multiply_into(
                    &self.arena[i * d..(i + 1) * d],
                    &self.multipliers[m],
                    &mut buf,
                );
                self.insert(&buf)?;
            }
            i += 1;
        }
        Ok(())
    }

    fn multiplier_perms(&self) -> Vec<PartialPermutation> {
        self.multipliers.iter().map(|m| decode(m)).collect()
    }

    /// Points reachable from `x` by elements whose domain contains `x`, sorted.
    pub fn orbit_point(&self, x: u32) -> Vec<u32> {
        let mults = self.multiplier_perms();
        let mut seen = BTreeSet::from([x]);
        let mut queue = VecDeque::from([x]);
        while let Some(y) = queue.pop_front() {
            for m in &mults {
                if let Some(z) = m.get(y) {
                    if seen.insert(z) {
                        queue.push_back(z);
                    }
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Subsets `t(W)` for elements `t` with `W ⊆ dom(t)`, sorted. `W` is
    /// always included (it is reached by the identity on `W` whenever some
    /// element is defined on all of `W`, and it names the class otherwise).
    pub fn orbit_set(&self, set: &[u32]) -> Vec<Vec<u32>> {
        let mults = self.multiplier_perms();
        let mut start = set.to_vec();
        start.sort_unstable();
        let mut seen = BTreeSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        while let Some(w) = queue.pop_front() {
            for m in &mults {
                if let Some(img) = m.apply_set(&w) {
                    if seen.insert(img.clone()) {
                        queue.push_back(img);
                    }
                }
            }
        }
        seen.into_iter().collect()
    }
}

#[inline]
fn multiply_into(left: &[u16], right: &[u16], out: &mut [u16]) {
    for (o, &y) in out.iter_mut().zip(left) {
        *o = if y == UNDEF { UNDEF } else { right[y as usize] };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grp::PermutationGroup;
    use crate::perm::Permutation;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn random_partial(rng: &mut ChaCha8Rng, n: usize, density: f64) -> PartialPermutation {
        let mut img: Vec<u32> = (0..n as u32).collect();
        rand::seq::SliceRandom::shuffle(img.as_mut_slice(), rng);
        let pairs: Vec<(u32, u32)> = (0..n as u32)
            .filter(|_| rng.gen_bool(density))
            .map(|x| (x, img[x as usize]))
            .collect();
        PartialPermutation::from_pairs(n, &pairs).unwrap()
    }

    // Brute-force closure under composition and inversion with plain hash sets.
    fn naive_closure(gens: &[PartialPermutation]) -> HashSet<PartialPermutation> {
        let mut all: Vec<PartialPermutation> = Vec::new();
        let mut set = HashSet::new();
        for g in gens {
            for h in [g.clone(), g.inverse()] {
                if set.insert(h.clone()) {
                    all.push(h);
                }
            }
        }
        let mut i = 0;
        while i < all.len() {
            let a = all[i].clone();
            for j in 0..=i {
                let b = all[j].clone();
                for c in [a.then(&b), b.then(&a)] {
                    if set.insert(c.clone()) {
                        all.push(c);
                    }
                }
            }
            i += 1;
        }
        set
    }

    #[test]
    fn single_partial_identity() {
        let id = PartialPermutation::partial_identity(3, &[0]).unwrap();
        let s = InverseSemigroup::from_generators(3, std::slice::from_ref(&id), 10).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.contains(&id).unwrap());
        assert_eq!(s.orbit_set(&[1, 2]), vec![vec![1, 2]]);
        let all = PartialPermutation::partial_identity(3, &[0, 1, 2]).unwrap();
        let t = InverseSemigroup::from_generators(3, &[all], 10).unwrap();
        assert_eq!(t.orbit_set(&[0, 2]), vec![vec![0, 2]]);
    }

    #[test]
    fn matches_naive_closure() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for trial in 0..40 {
            let n = 3 + trial % 3;
            let k = 1 + trial % 3;
            let gens: Vec<_> = (0..k).map(|_| random_partial(&mut rng, n, 0.7)).collect();
            let naive = naive_closure(&gens);
            let s = InverseSemigroup::from_generators(n, &gens, 100_000).unwrap();
            let ours: HashSet<_> = s.elements().collect();
            assert_eq!(ours, naive);
            assert_eq!(s.len(), naive.len());
            // closure soundness
            for a in &ours {
                assert!(s.contains(&a.inverse()).unwrap());
                for b in &ours {
                    assert!(s.contains(&a.then(b)).unwrap());
                }
            }
        }
    }

    #[test]
    fn enumeration_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let gens: Vec<_> = (0..3).map(|_| random_partial(&mut rng, 6, 0.8)).collect();
        let a = InverseSemigroup::from_generators(6, &gens, 1_000_000).unwrap();
        let b = InverseSemigroup::from_generators(6, &gens, 1_000_000).unwrap();
        assert!(a.elements().eq(b.elements()));
    }

    #[test]
    fn cap_is_an_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let gens: Vec<_> = (0..3).map(|_| random_partial(&mut rng, 6, 0.9)).collect();
        let full = InverseSemigroup::from_generators(6, &gens, 1_000_000).unwrap();
        assert!(full.len() > 5);
        let err = InverseSemigroup::from_generators(6, &gens, 5).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { cap: 5 }));

        let mut s = InverseSemigroup::empty(6, 5).unwrap();
        for g in &gens {
            if s.add_generator(g.clone()).is_err() {
                break;
            }
        }
        assert!(matches!(
            s.contains(&gens[0]),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn embedded_group_agrees_with_group_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let perms: Vec<Permutation> = (0..2)
                .map(|_| {
                    let mut v: Vec<u32> = (0..5).collect();
                    rand::seq::SliceRandom::shuffle(v.as_mut_slice(), &mut rng);
                    Permutation::from_images(v).unwrap()
                })
                .collect();
            let g = PermutationGroup::from_generators(5, perms.clone()).unwrap();
            let lifted: Vec<_> = perms.iter().map(PartialPermutation::from).collect();
            let s = InverseSemigroup::from_generators(5, &lifted, 1000).unwrap();
            assert_eq!(s.len() as u64, g.order_u64().unwrap());
            for p in g.elements() {
                assert!(s.contains(&PartialPermutation::from(&p)).unwrap());
            }
            for t in s.elements() {
                let p = t.to_permutation().unwrap();
                assert!(g.contains(&p).unwrap());
            }
        }
    }

    #[test]
    fn orbits_are_closed_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let gens: Vec<_> = (0..3).map(|_| random_partial(&mut rng, 6, 0.6)).collect();
        let s = InverseSemigroup::from_generators(6, &gens, 1_000_000).unwrap();
        for x in 0..6 {
            let orbit = s.orbit_point(x);
            assert!(orbit.contains(&x));
            for &y in &orbit {
                assert_eq!(s.orbit_point(y), orbit);
            }
        }
        let orbit = s.orbit_set(&[0, 1]);
        for w in &orbit {
            assert_eq!(&s.orbit_set(w), &orbit);
        }
        // every orbit member is hit by some element defined on the start set
        for w in &orbit {
            if w == &vec![0, 1] {
                continue;
            }
            assert!(s
                .elements()
                .any(|t| t.apply_set(&[0, 1]).as_ref() == Some(w)));
        }
    }
}
