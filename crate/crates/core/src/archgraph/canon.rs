//! Canonical forms of complete labeled graphs.
//!
//! Vertices are first split into colour classes by iterated refinement
//! (node label, then multisets of `(neighbour colour, edge label)`); colour
//! ids are ranks of sorted signatures, so they are isomorphism invariant.
//! The canonical order lists colour classes in ascending colour and, inside
//! them, picks the vertex order that makes the sequence of edge rows
//! lexicographically smallest. The search is branch and bound: at each
//! position only candidates with the smallest row survive, and among twins
//! (vertices whose swap is an automorphism) only one is tried.

use std::cmp::Ordering;

use super::{ArchitectureGraph, EdgeLabel};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    /// Label-level encoding of the canonically ordered graph.
    pub certificate: Vec<u8>,
    /// `labeling[position] = vertex`.
    pub labeling: Vec<u32>,
}

impl CanonicalForm {
    /// `position_of[vertex]`.
    pub fn positions(&self) -> Vec<u32> {
        let mut pos = vec![0u32; self.labeling.len()];
        for (p, &v) in self.labeling.iter().enumerate() {
            pos[v as usize] = p as u32;
        }
        pos
    }
}

pub(super) fn refine_colors(g: &ArchitectureGraph) -> Vec<u32> {
    let n = g.node_count();
    let mut colors: Vec<u32> = (0..n).map(|v| g.node_label_id(v)).collect();
    let mut classes = count_distinct(&colors);
    loop {
        let signatures: Vec<(u32, Vec<(u32, u32)>)> = (0..n)
            .map(|v| {
                let mut sig: Vec<(u32, u32)> = (0..n)
                    .filter(|&w| w != v)
                    .map(|w| (colors[w], g.edge_id(v, w)))
                    .collect();
                sig.sort_unstable();
                (colors[v], sig)
            })
            .collect();
        let mut sorted: Vec<&(u32, Vec<(u32, u32)>)> = signatures.iter().collect();
        sorted.sort();
        sorted.dedup();
        let next: Vec<u32> = signatures
            .iter()
            .map(|s| sorted.binary_search(&s).unwrap() as u32)
            .collect();
        let next_classes = sorted.len();
        colors = next;
        if next_classes == classes {
            return colors;
        }
        classes = next_classes;
    }
}

fn count_distinct(v: &[u32]) -> usize {
    let mut s = v.to_vec();
    s.sort_unstable();
    s.dedup();
    s.len()
}

// twin[v] = smallest vertex u with the same label and identical edges to all others
fn twin_classes(g: &ArchitectureGraph) -> Vec<u32> {
    let n = g.node_count();
    let mut twin: Vec<u32> = (0..n as u32).collect();
    for v in 0..n {
        for u in 0..v {
            if twin[u] as usize != u || g.node_label_id(u) != g.node_label_id(v) {
                continue;
            }
            let same = (0..n)
                .filter(|&w| w != u && w != v)
                .all(|w| g.edge_id(u, w) == g.edge_id(v, w));
            if same {
                twin[v] = u as u32;
                break;
            }
        }
    }
    twin
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Relation {
    // current prefix equals the best prefix
    Equal,
    // current prefix is smaller; the next leaf becomes the new best
    Less,
}

struct Search<'a> {
    g: &'a ArchitectureGraph,
    slot_color: Vec<u32>,
    colors: Vec<u32>,
    twin: Vec<u32>,
    order: Vec<u32>,
    used: Vec<bool>,
    // rows of the current path, flattened (row k has k entries)
    rows: Vec<u32>,
    best_rows: Vec<u32>,
    best_order: Vec<u32>,
    have_best: bool,
    version: u64,
}

impl Search<'_> {
    fn row_of(&self, v: u32) -> Vec<u32> {
        self.order
            .iter()
            .map(|&u| self.g.edge_id(u as usize, v as usize))
            .collect()
    }

    fn dfs(&mut self, k: usize, mut rel: Relation) {
        let n = self.slot_color.len();
        if k == n {
            if !self.have_best || rel == Relation::Less {
                self.best_rows.clone_from(&self.rows);
                self.best_order.clone_from(&self.order);
                self.have_best = true;
                self.version += 1;
            }
            return;
        }
        let color = self.slot_color[k];
        let mut best_row: Option<Vec<u32>> = None;
        let mut candidates: Vec<u32> = Vec::new();
        for v in 0..n as u32 {
            if self.used[v as usize] || self.colors[v as usize] != color {
                continue;
            }
            let row = self.row_of(v);
            match best_row.as_ref().map(|b| row.cmp(b)) {
                None | Some(Ordering::Less) => {
                    best_row = Some(row);
                    candidates.clear();
                    candidates.push(v);
                }
                Some(Ordering::Equal) => candidates.push(v),
                Some(Ordering::Greater) => {}
            }
        }
        let row = best_row.expect("colour class has a free vertex");
        let mut tried_twins: Vec<u32> = Vec::new();
        let start = k * (k.saturating_sub(1)) / 2;
        let mut version = self.version;
        for v in candidates {
            let t = self.twin[v as usize];
            if tried_twins.contains(&t) {
                continue;
            }
            tried_twins.push(t);
            if self.version != version {
                // a leaf below the previous sibling became the best; it shares our prefix
                rel = Relation::Equal;
                version = self.version;
            }
            let child_rel = if self.have_best && rel == Relation::Equal {
                match row.as_slice().cmp(&self.best_rows[start..start + k]) {
                    Ordering::Greater => continue,
                    Ordering::Less => Relation::Less,
                    Ordering::Equal => Relation::Equal,
                }
            } else {
                Relation::Less
            };
            self.used[v as usize] = true;
            self.order.push(v);
            self.rows.extend_from_slice(&row);
            self.dfs(k + 1, child_rel);
            self.rows.truncate(start);
            self.order.pop();
            self.used[v as usize] = false;
        }
    }
}

pub(super) fn canonical_form(g: &ArchitectureGraph) -> CanonicalForm {
    let n = g.node_count();
    let colors = refine_colors(g);
    let mut slot_color = colors.clone();
    slot_color.sort_unstable();
    let mut search = Search {
        g,
        slot_color,
        colors,
        twin: twin_classes(g),
        order: Vec::with_capacity(n),
        used: vec![false; n],
        rows: Vec::with_capacity(n * n / 2),
        best_rows: Vec::new(),
        best_order: Vec::new(),
        have_best: false,
        version: 0,
    };
    search.dfs(0, Relation::Less);
    let labeling = search.best_order;
    CanonicalForm {
        certificate: encode(g, &labeling),
        labeling,
    }
}

fn push_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u32).to_le_bytes());
    out.extend_from_slice(s.as_bytes());
}

fn encode(g: &ArchitectureGraph, labeling: &[u32]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&(labeling.len() as u32).to_le_bytes());
    for &v in labeling {
        push_str(&mut out, g.node_type(v as usize));
    }
    for (i, &u) in labeling.iter().enumerate() {
        for &v in &labeling[..i] {
            match g.edge(u as usize, v as usize) {
                EdgeLabel::Hops(h) => {
                    out.push(0);
                    out.extend_from_slice(&h.to_le_bytes());
                }
                EdgeLabel::Bus(r) => {
                    out.push(1);
                    push_str(&mut out, r);
                }
                EdgeLabel::Unreachable => out.push(2),
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::archgraph::{derive_architecture_graph, mesh};
    use crate::perm::Permutation;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, node_kinds: u32, edge_kinds: u32) -> ArchitectureGraph {
        let types: Vec<String> = (0..n)
            .map(|_| format!("T{}", rng.gen_range(0..node_kinds)))
            .collect();
        let mut labels = vec![0u32; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let l = rng.gen_range(1..=edge_kinds);
                labels[i * n + j] = l;
                labels[j * n + i] = l;
            }
        }
        ArchitectureGraph::new(types, |i, j| EdgeLabel::Hops(labels[i * n + j])).unwrap()
    }

    fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Permutation {
        let mut v: Vec<u32> = (0..n as u32).collect();
        v.shuffle(rng);
        Permutation::from_images(v).unwrap()
    }

    fn isomorphic_brute(a: &ArchitectureGraph, b: &ArchitectureGraph) -> bool {
        let n = a.node_count();
        if n != b.node_count() {
            return false;
        }
        fn go(a: &ArchitectureGraph, b: &ArchitectureGraph, map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
            let k = map.len();
            let n = a.node_count();
            if k == n {
                return true;
            }
            for y in 0..n {
                if used[y] || a.node_type(k) != b.node_type(y) {
                    continue;
                }
                if (0..k).all(|i| a.edge(i, k) == b.edge(map[i], y)) {
                    used[y] = true;
                    map.push(y);
                    if go(a, b, map, used) {
                        return true;
                    }
                    map.pop();
                    used[y] = false;
                }
            }
            false
        }
        go(a, b, &mut Vec::new(), &mut vec![false; n])
    }

    #[test]
    fn invariant_under_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let g = random_graph(&mut rng, 8, 2, 3);
            let h = g.relabel(&random_perm(&mut rng, 8));
            assert_eq!(g.certificate(), h.certificate());
        }
    }

    #[test]
    fn complete_on_small_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for trial in 0..300 {
            let n = 3 + trial % 4;
            let a = random_graph(&mut rng, n, 2, 2);
            let b = if trial % 3 == 0 {
                a.relabel(&random_perm(&mut rng, n))
            } else {
                random_graph(&mut rng, n, 2, 2)
            };
            assert_eq!(a.certificate() == b.certificate(), isomorphic_brute(&a, &b));
        }
    }

    #[test]
    fn labeling_is_an_isomorphism_to_the_canonical_graph() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let g = random_graph(&mut rng, 7, 2, 3);
            let form = g.canonical_form();
            let canon = g.induced_subgraph(&form.labeling).unwrap();
            let h = g.relabel(&random_perm(&mut rng, 7));
            let hform = h.canonical_form();
            assert_eq!(canon, h.induced_subgraph(&hform.labeling).unwrap());
        }
    }

    #[test]
    fn single_nodes_with_different_types() {
        let a = ArchitectureGraph::new(vec!["ARM".into()], |_, _| EdgeLabel::Unreachable).unwrap();
        let b = ArchitectureGraph::new(vec!["DSP".into()], |_, _| EdgeLabel::Unreachable).unwrap();
        assert_ne!(a.certificate(), b.certificate());
    }

    #[test]
    fn two_by_three_blocks_agree() {
        let g = derive_architecture_graph(&mesh(4, 4, "RISC").unwrap()).unwrap();
        // PEs {1,2,3,5,6,7} and rows 2-3 x cols 1-3 = {5,6,7,9,10,11}, 1-based
        let w1 = g.induced_subgraph(&[0, 1, 2, 4, 5, 6]).unwrap();
        let w2 = g.induced_subgraph(&[4, 5, 6, 8, 9, 10]).unwrap();
        assert_eq!(w1.certificate(), w2.certificate());
        let line = g.induced_subgraph(&[0, 1, 2, 3, 4, 5]).unwrap();
        assert_ne!(w1.certificate(), line.certificate());
    }

    #[test]
    fn bus_graphs_are_fast() {
        let g = derive_architecture_graph(&crate::archgraph::keystone()).unwrap();
        let h = g.relabel(&Permutation::from_cycles(12, &[&[0, 5], &[2, 11, 7]]).unwrap());
        assert_eq!(g.certificate(), h.certificate());
        let big = derive_architecture_graph(&crate::archgraph::bus(&[("A", 40)]).unwrap()).unwrap();
        assert_eq!(big.canonical_form().labeling.len(), 40);
    }
}
