//! Permutations and partial permutations of a finite point set.
//!
//! Points are the indices `0..n`. Composition is applied left to right
//! everywhere: `p.then(&q)` (also written `p ∘ q`) sends `x` to `q(p(x))`.
//! External documents and display names use 1-based labels (`PE_1` is
//! point 0); the conversion happens at the edges, never in the algebra.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// A finite set of points `0..size`, optionally carrying display names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    size: usize,
    names: Option<Vec<String>>,
}

impl PointSet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyPointSet);
        }
        Ok(PointSet { size, names: None })
    }

    pub fn with_names(names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        Ok(PointSet {
            size: names.len(),
            names: Some(names),
        })
    }

    /// Points named `PE_1 .. PE_n`.
    pub fn processing_elements(size: usize) -> Result<Self> {
        Self::with_names((1..=size).map(|i| format!("PE_{i}")).collect())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn name(&self, point: usize) -> String {
        match &self.names {
            Some(names) => names[point].clone(),
            None => (point + 1).to_string(),
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        match &self.names {
            Some(names) => names.iter().position(|n| n == name),
            None => name
                .parse::<usize>()
                .ok()
                .filter(|&i| i >= 1 && i <= self.size)
                .map(|i| i - 1),
        }
    }
}

fn check_point(point: usize, size: usize) -> Result<()> {
    if point >= size {
        Err(Error::PointOutOfRange { point, size })
    } else {
        Ok(())
    }
}

/// A bijection of `0..n`, stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &y in &images {
            let y = y as usize;
            if y >= n || seen[y] {
                return Err(Error::NotABijection);
            }
            seen[y] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from 1-based images (`[2, 1, 3]` swaps the first two points).
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        let zero: Option<Vec<u32>> = images
            .iter()
            .map(|&i| i.checked_sub(1).map(|v| v as u32))
            .collect();
        Self::from_images(zero.ok_or(Error::NotABijection)?)
    }

    /// Builds a permutation of `n` points from disjoint cycles of 0-based points.
    pub fn from_cycles(n: usize, cycles: &[&[u32]]) -> Result<Self> {
        let mut images: Vec<u32> = (0..n as u32).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                check_point(x as usize, n)?;
                if touched[x as usize] {
                    return Err(Error::NotABijection);
                }
                touched[x as usize] = true;
                images[x as usize] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.images[x as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &y)| i as u32 == y)
    }

    /// Left-to-right composition: `x ↦ other(self(x))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::SizeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(self.then(other))
    }

    /// Same as [`compose`](Self::compose) for operands known to share a degree.
    #[inline]
    pub fn then(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: self.images.iter().map(|&y| other.images[y as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u32; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y as usize] = x as u32;
        }
        Permutation { images }
    }

    pub fn pow(&self, mut e: u64) -> Permutation {
        let mut base = self.clone();
        let mut acc = Permutation::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then(&base);
            }
            base = base.then(&base);
            e >>= 1;
        }
        acc
    }

    /// The smallest point moved, if any.
    pub fn first_moved(&self) -> Option<u32> {
        self.images
            .iter()
            .enumerate()
            .find(|(i, &y)| *i as u32 != y)
            .map(|(i, _)| i as u32)
    }

    /// `self` conjugated into new point names: if `relabel` sends old point
    /// `x` to new point `relabel(x)`, the result acts on new names the way
    /// `self` acts on old ones.
    pub fn relabel(&self, relabel: &Permutation) -> Permutation {
        let inv = relabel.inverse();
        inv.then(self).then(relabel)
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.images.iter().map(|&y| y as usize + 1).collect()
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.images)
    }
}

const NONE: u32 = u32::MAX;

/// An injective map from a subset of `0..n` into `0..n`.
///
/// The empty partial permutation is an ordinary value.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialPermutation {
    images: Vec<u32>,
}

impl PartialPermutation {
    pub fn empty(n: usize) -> Self {
        PartialPermutation {
            images: vec![NONE; n],
        }
    }

    /// Builds a partial permutation of `n` points from 0-based `(from, to)` pairs.
    pub fn from_pairs(n: usize, pairs: &[(u32, u32)]) -> Result<Self> {
        let mut images = vec![NONE; n];
        let mut hit = vec![false; n];
        for &(x, y) in pairs {
            check_point(x as usize, n)?;
            check_point(y as usize, n)?;
            if images[x as usize] != NONE {
                return Err(Error::DuplicateDomainPoint(x as usize));
            }
            if hit[y as usize] {
                return Err(Error::NotInjective(y as usize));
            }
            hit[y as usize] = true;
            images[x as usize] = y;
        }
        Ok(PartialPermutation { images })
    }

    /// Like [`from_pairs`](Self::from_pairs) with 1-based point labels.
    pub fn from_one_based(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut zero = Vec::with_capacity(pairs.len());
        for &(x, y) in pairs {
            if x == 0 || y == 0 {
                return Err(Error::PointOutOfRange { point: 0, size: n });
            }
            zero.push(((x - 1) as u32, (y - 1) as u32));
        }
        Self::from_pairs(n, &zero)
    }

    /// Builds from a raw image array where `u32::MAX` marks "undefined".
    pub(crate) fn from_raw_unchecked(images: Vec<u32>) -> Self {
        PartialPermutation { images }
    }

    pub(crate) fn raw(&self) -> &[u32] {
        &self.images
    }

    pub fn from_permutation(p: &Permutation) -> Self {
        PartialPermutation {
            images: p.images.clone(),
        }
    }

    /// The identity restricted to `domain`.
    pub fn partial_identity(n: usize, domain: &[u32]) -> Result<Self> {
        let pairs: Vec<(u32, u32)> = domain.iter().map(|&x| (x, x)).collect();
        Self::from_pairs(n, &pairs)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn get(&self, x: u32) -> Option<u32> {
        match self.images[x as usize] {
            NONE => None,
            y => Some(y),
        }
    }

    /// Number of points in the domain.
    pub fn rank(&self) -> usize {
        self.images.iter().filter(|&&y| y != NONE).count()
    }

    pub fn is_empty(&self) -> bool {
        self.images.iter().all(|&y| y == NONE)
    }

    pub fn is_total(&self) -> bool {
        self.images.iter().all(|&y| y != NONE)
    }

    pub fn domain(&self) -> Vec<u32> {
        self.pairs().map(|(x, _)| x).collect()
    }

    /// Image points, sorted ascending.
    pub fn image(&self) -> Vec<u32> {
        let mut img: Vec<u32> = self.pairs().map(|(_, y)| y).collect();
        img.sort_unstable();
        img
    }

    /// `(x, image of x)` in increasing `x`.
    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.images
            .iter()
            .enumerate()
            .filter(|(_, &y)| y != NONE)
            .map(|(x, &y)| (x as u32, y))
    }

    pub fn to_permutation(&self) -> Option<Permutation> {
        self.is_total().then(|| Permutation {
            images: self.images.clone(),
        })
    }

    /// Left-to-right composition: defined on `{x ∈ dom(self) | self(x) ∈ dom(other)}`,
    /// sending `x ↦ other(self(x))`.
    pub fn compose(&self, other: &PartialPermutation) -> Result<PartialPermutation> {
        if self.degree() != other.degree() {
            return Err(Error::SizeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(self.then(other))
    }

    #[inline]
    pub fn then(&self, other: &PartialPermutation) -> PartialPermutation {
        debug_assert_eq!(self.degree(), other.degree());
        PartialPermutation {
            images: self
                .images
                .iter()
                .map(|&y| if y == NONE { NONE } else { other.images[y as usize] })
                .collect(),
        }
    }

    pub fn inverse(&self) -> PartialPermutation {
        let mut images = vec![NONE; self.images.len()];
        for (x, y) in self.pairs() {
            images[y as usize] = x;
        }
        PartialPermutation { images }
    }

    /// True iff `t·t = t`, which for partial permutations means `t` is a partial identity.
    pub fn is_idempotent(&self) -> bool {
        self.pairs().all(|(x, y)| x == y)
    }

    /// Restriction to the points of `domain` that lie in the current domain.
    pub fn restrict(&self, domain: &[u32]) -> PartialPermutation {
        let mut images = vec![NONE; self.images.len()];
        for &x in domain {
            images[x as usize] = self.images[x as usize];
        }
        PartialPermutation { images }
    }

    /// Image of a point set, or `None` when some point lies outside the domain.
    pub fn apply_set(&self, set: &[u32]) -> Option<Vec<u32>> {
        let mut out = Vec::with_capacity(set.len());
        for &x in set {
            out.push(self.get(x)?);
        }
        out.sort_unstable();
        Some(out)
    }

    pub fn to_one_based_pairs(&self) -> Vec<(usize, usize)> {
        self.pairs()
            .map(|(x, y)| (x as usize + 1, y as usize + 1))
            .collect()
    }
}

impl From<&Permutation> for PartialPermutation {
    fn from(p: &Permutation) -> Self {
        PartialPermutation::from_permutation(p)
    }
}

impl fmt::Debug for PartialPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, y)) in self.pairs().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}→{y}")?;
        }
        f.write_str("}")
    }
}
