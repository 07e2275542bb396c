//! Automorphism groups and inverse semigroups of partial automorphisms of
//! architecture graphs.
//!
//! A partial permutation is a partial automorphism when it preserves node
//! types on its domain and edge labels on every pair inside its domain.
//! Every restriction of a partial automorphism is again one, so a search
//! tree that grows partial permutations one point at a time can drop a
//! whole subtree as soon as its root fails the test.

use crate::archgraph::ArchitectureGraph;
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::grp::PermutationGroup;
use crate::isg::{InverseSemigroup, DEFAULT_CAP};
use crate::perm::{PartialPermutation, Permutation};

/// True iff `phi` preserves node labels on its domain and edge labels on all
/// pairs within its domain.
pub fn is_partial_automorphism(phi: &PartialPermutation, g: &ArchitectureGraph) -> bool {
    if phi.degree() != g.node_count() {
        return false;
    }
    let pairs: Vec<(u32, u32)> = phi.pairs().collect();
    for (i, &(x, y)) in pairs.iter().enumerate() {
        if g.node_label_id(x as usize) != g.node_label_id(y as usize) {
            return false;
        }
        for &(u, v) in &pairs[..i] {
            if g.edge_id(x as usize, u as usize) != g.edge_id(y as usize, v as usize) {
                return false;
            }
        }
    }
    true
}

// Can (x ↦ y) be added to the partial map given by `dom`/`img` pairs?
#[inline]
fn extends(g: &ArchitectureGraph, dom: &[u32], img: &[u32], x: u32, y: u32) -> bool {
    g.node_label_id(x as usize) == g.node_label_id(y as usize)
        && dom
            .iter()
            .zip(img)
            .all(|(&u, &v)| g.edge_id(x as usize, u as usize) == g.edge_id(y as usize, v as usize))
}

/// The group of all label-preserving permutations of `g`.
///
/// Points are fixed one at a time in index order. For each level, one
/// automorphism is searched per candidate image that the generators found
/// so far cannot already reach, which yields a generating set level by level.
pub fn automorphism_group(g: &ArchitectureGraph) -> PermutationGroup {
    let n = g.node_count();
    let colors = crate::archgraph::refine_colors_for(g);
    let mut group = PermutationGroup::trivial(n);
    for level in (0..n).rev() {
        let b = level as u32;
        for c in 0..n as u32 {
            if c == b || colors[c as usize] != colors[b as usize] {
                continue;
            }
            let orbit = crate::grp::orbit_under(group.generators(), &b, &crate::grp::PointAction);
            if orbit.binary_search(&c).is_ok() {
                continue;
            }
            if let Some(p) = find_automorphism(g, &colors, level, c) {
                group.add_generator(p);
            }
        }
    }
    group
}

// An automorphism fixing 0..level pointwise and sending `level` to `target`.
fn find_automorphism(
    g: &ArchitectureGraph,
    colors: &[u32],
    level: usize,
    target: u32,
) -> Option<Permutation> {
    let n = g.node_count();
    let mut dom: Vec<u32> = (0..level as u32).collect();
    let mut img: Vec<u32> = dom.clone();
    let mut used = vec![false; n];
    for &v in &img {
        used[v as usize] = true;
    }
    if !extends(g, &dom, &img, level as u32, target) {
        return None;
    }
    dom.push(level as u32);
    img.push(target);
    used[target as usize] = true;

    fn go(
        g: &ArchitectureGraph,
        colors: &[u32],
        dom: &mut Vec<u32>,
        img: &mut Vec<u32>,
        used: &mut Vec<bool>,
    ) -> bool {
        let n = g.node_count();
        let x = dom.len() as u32;
        if x as usize == n {
            return true;
        }
        for y in 0..n as u32 {
            if used[y as usize] || colors[y as usize] != colors[x as usize] {
                continue;
            }
            if extends(g, dom, img, x, y) {
                dom.push(x);
                img.push(y);
                used[y as usize] = true;
                if go(g, colors, dom, img, used) {
                    return true;
                }
                used[y as usize] = false;
                img.pop();
                dom.pop();
            }
        }
        false
    }

    if go(g, colors, &mut dom, &mut img, &mut used) {
        Some(Permutation::from_images(img).expect("search yields a bijection"))
    } else {
        None
    }
}

/// Number of partial automorphisms, the empty one included, counted by
/// walking the pruned search tree (each partial permutation is reached once,
/// domains grow in increasing point order).
pub fn count_partial_automorphisms(g: &ArchitectureGraph, exec: Exec) -> u64 {
    let n = g.node_count();
    let counts = exec::map_range(exec, n * n, |i| {
        let (x, y) = ((i / n) as u32, (i % n) as u32);
        if g.node_label_id(x as usize) != g.node_label_id(y as usize) {
            return 0;
        }
        let mut used = vec![false; n];
        used[y as usize] = true;
        count_below(g, &mut vec![x], &mut vec![y], &mut used)
    });
    1 + counts.into_iter().sum::<u64>()
}

fn count_below(g: &ArchitectureGraph, dom: &mut Vec<u32>, img: &mut Vec<u32>, used: &mut [bool]) -> u64 {
    let n = g.node_count() as u32;
    let mut total = 1;
    let start = dom.last().map_or(0, |&x| x + 1);
    for x in start..n {
        for y in 0..n {
            if used[y as usize] || !extends(g, dom, img, x, y) {
                continue;
            }
            dom.push(x);
            img.push(y);
            used[y as usize] = true;
            total += count_below(g, dom, img, used);
            used[y as usize] = false;
            img.pop();
            dom.pop();
        }
    }
    total
}

/// Calls `f` on every partial automorphism, in search-tree pre-order.
pub fn for_each_partial_automorphism(g: &ArchitectureGraph, f: impl FnMut(&[u32], &[u32])) {
    walk(g, false, f);
}

/// Like [`for_each_partial_automorphism`] but in post-order, so every
/// extension inside a node's subtree is reported before the node itself.
pub fn for_each_partial_automorphism_post(g: &ArchitectureGraph, f: impl FnMut(&[u32], &[u32])) {
    walk(g, true, f);
}

fn walk(g: &ArchitectureGraph, post: bool, mut f: impl FnMut(&[u32], &[u32])) {
    fn go(
        g: &ArchitectureGraph,
        post: bool,
        dom: &mut Vec<u32>,
        img: &mut Vec<u32>,
        used: &mut [bool],
        f: &mut impl FnMut(&[u32], &[u32]),
    ) {
        if !post {
            f(dom, img);
        }
        let n = g.node_count() as u32;
        let start = dom.last().map_or(0, |&x| x + 1);
        for x in start..n {
            for y in 0..n {
                if used[y as usize] || !extends(g, dom, img, x, y) {
                    continue;
                }
                dom.push(x);
                img.push(y);
                used[y as usize] = true;
                go(g, post, dom, img, used, f);
                used[y as usize] = false;
                img.pop();
                dom.pop();
            }
        }
        if post {
            f(dom, img);
        }
    }
    let mut used = vec![false; g.node_count()];
    go(g, post, &mut Vec::new(), &mut Vec::new(), &mut used, &mut f);
}

fn to_partial(n: usize, dom: &[u32], img: &[u32]) -> PartialPermutation {
    let pairs: Vec<(u32, u32)> = dom.iter().copied().zip(img.iter().copied()).collect();
    PartialPermutation::from_pairs(n, &pairs).expect("search keeps maps injective")
}

#[derive(Clone, Copy, Debug)]
pub struct SemigroupOptions {
    /// Start from the automorphism group's generators.
    pub seed_with_group: bool,
    /// Element cap for the closure used by membership tests.
    pub cap: usize,
}

impl Default for SemigroupOptions {
    fn default() -> Self {
        SemigroupOptions {
            seed_with_group: true,
            cap: DEFAULT_CAP,
        }
    }
}

/// Output of the backtracking search.
#[derive(Debug)]
pub struct PartialSymmetries {
    pub generators: Vec<PartialPermutation>,
    /// The enumerated semigroup generated by `generators`.
    pub semigroup: InverseSemigroup,
    /// Search-tree nodes that passed the partial-automorphism test.
    pub visited: u64,
}

/// Backtracking generator search over the tree of partial permutations.
///
/// The root is the empty partial permutation; children extend the domain
/// by one point larger than every current domain point. Subtrees below a
/// non-automorphism are skipped. Every visited partial automorphism not yet
/// in the generated semigroup becomes a generator.
pub fn partial_automorphism_semigroup(
    g: &ArchitectureGraph,
    options: SemigroupOptions,
) -> Result<PartialSymmetries> {
    let n = g.node_count();
    let mut semigroup = InverseSemigroup::empty(n, options.cap)?;
    let mut generators = Vec::new();
    if options.seed_with_group {
        for p in automorphism_group(g).generators() {
            let t = PartialPermutation::from(p);
            if !semigroup.contains(&t)? {
                semigroup.add_generator(t.clone())?;
                generators.push(t);
            }
        }
    }
    let mut visited = 0u64;
    let mut failure: Option<Error> = None;
    // the walk cannot short-circuit, so failures are latched and the rest skipped
    for_each_partial_automorphism_post(g, |dom, img| {
        if failure.is_some() {
            return;
        }
        visited += 1;
        let t = to_partial(n, dom, img);
        match semigroup.contains(&t) {
            Ok(true) => {}
            Ok(false) => match semigroup.add_generator(t.clone()) {
                Ok(()) => generators.push(t),
                Err(e) => failure = Some(e),
            },
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(PartialSymmetries {
        generators,
        semigroup,
        visited,
    })
}

/// Generators of the inverse semigroup of partial automorphisms.
pub fn partial_automorphism_generators(
    g: &ArchitectureGraph,
    seed_with_group: bool,
) -> Result<Vec<PartialPermutation>> {
    let options = SemigroupOptions {
        seed_with_group,
        ..SemigroupOptions::default()
    };
    Ok(partial_automorphism_semigroup(g, options)?.generators)
}

pub const NAIVE_MAX_NODES: usize = 6;

/// All partial permutations of `0..n`, ordered by domain (as a sorted
/// sequence) and then by image sequence, both lexicographically.
pub fn all_partial_permutations(n: usize) -> Vec<PartialPermutation> {
    fn domains(n: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        out.push(cur.clone());
        let start = cur.last().map_or(0, |&x| x + 1);
        for x in start..n {
            cur.push(x);
            domains(n, cur, out);
            cur.pop();
        }
    }
    fn images(n: u32, k: usize, cur: &mut Vec<u32>, used: &mut [bool], out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for y in 0..n {
            if !used[y as usize] {
                used[y as usize] = true;
                cur.push(y);
                images(n, k, cur, used, out);
                cur.pop();
                used[y as usize] = false;
            }
        }
    }
    let mut doms = Vec::new();
    domains(n as u32, &mut Vec::new(), &mut doms);
    let mut out = Vec::new();
    for dom in doms {
        let mut imgs = Vec::new();
        images(n as u32, dom.len(), &mut Vec::new(), &mut vec![false; n], &mut imgs);
        for img in imgs {
            out.push(to_partial(n, &dom, &img));
        }
    }
    out
}

/// Exhaustive generator search over every partial permutation. Small graphs only.
pub fn partial_automorphism_generators_naive(
    g: &ArchitectureGraph,
    cap: usize,
) -> Result<Vec<PartialPermutation>> {
    let n = g.node_count();
    if n > NAIVE_MAX_NODES {
        return Err(Error::TooLarge {
            nodes: n,
            max: NAIVE_MAX_NODES,
        });
    }
    let mut semigroup = InverseSemigroup::empty(n, cap)?;
    let mut generators = Vec::new();
    for phi in all_partial_permutations(n) {
        if is_partial_automorphism(&phi, g) && !semigroup.contains(&phi)? {
            semigroup.add_generator(phi.clone())?;
            generators.push(phi);
        }
    }
    Ok(generators)
}
