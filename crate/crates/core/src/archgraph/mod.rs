//! Architecture models.
//!
//! A [`TopologyGraph`] is the physical picture: PEs, point-to-point links and
//! shared buses. [`derive_architecture_graph`] turns it into the complete,
//! labeled [`ArchitectureGraph`] that symmetry computations run on: every PE
//! pair gets a communication-cost class (the shared bus, or the shortest-path
//! hop count over links).

mod canon;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;

pub use canon::CanonicalForm;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Link {
    pub a: usize,
    pub b: usize,
    pub resource: String,
    pub hops: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bus {
    pub resource: String,
    pub members: Vec<usize>,
}

/// Physical topology: typed PEs, links, and shared buses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopologyGraph {
    pub node_types: Vec<String>,
    pub links: Vec<Link>,
    pub buses: Vec<Bus>,
    /// Permit unreachable PE pairs; they get [`EdgeLabel::Unreachable`].
    pub allow_disconnected: bool,
}

impl TopologyGraph {
    pub fn new(node_types: Vec<String>, links: Vec<Link>, buses: Vec<Bus>) -> Result<Self> {
        let t = TopologyGraph {
            node_types,
            links,
            buses,
            allow_disconnected: false,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.node_types.len();
        if n == 0 {
            return Err(Error::InvalidTopology("no processing elements".into()));
        }
        if let Some(i) = self.node_types.iter().position(|t| t.is_empty()) {
            return Err(Error::InvalidTopology(format!("PE {} has an empty type", i + 1)));
        }
        for l in &self.links {
            if l.a >= n || l.b >= n {
                return Err(Error::InvalidTopology(format!(
                    "link {}-{} refers to a missing PE",
                    l.a + 1,
                    l.b + 1
                )));
            }
            if l.a == l.b {
                return Err(Error::InvalidTopology(format!("self-loop on PE {}", l.a + 1)));
            }
            if l.resource.is_empty() || l.hops == 0 {
                return Err(Error::InvalidTopology(format!(
                    "link {}-{} needs a resource name and a positive hop weight",
                    l.a + 1,
                    l.b + 1
                )));
            }
        }
        for b in &self.buses {
            if b.resource.is_empty() {
                return Err(Error::InvalidTopology("bus without resource name".into()));
            }
            if let Some(&m) = b.members.iter().find(|&&m| m >= n) {
                return Err(Error::InvalidTopology(format!(
                    "bus {} refers to missing PE {}",
                    b.resource,
                    m + 1
                )));
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.node_types.len()
    }
}

/// A `rows × cols` mesh NoC with row-major PE numbering.
pub fn mesh(rows: usize, cols: usize, pe_type: &str) -> Result<TopologyGraph> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidTopology("mesh dimensions must be positive".into()));
    }
    let mut links = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                links.push(Link {
                    a: v,
                    b: v + 1,
                    resource: "noc".into(),
                    hops: 1,
                });
            }
            if r + 1 < rows {
                links.push(Link {
                    a: v,
                    b: v + cols,
                    resource: "noc".into(),
                    hops: 1,
                });
            }
        }
    }
    TopologyGraph::new(vec![pe_type.to_string(); rows * cols], links, Vec::new())
}

/// A ring of `n` PEs numbered around the cycle. A 4-ring is the 2×2 mesh
/// numbered clockwise (PE1 PE2 / PE4 PE3).
pub fn ring(n: usize, pe_type: &str) -> Result<TopologyGraph> {
    if n < 2 {
        return Err(Error::InvalidTopology("ring needs at least two PEs".into()));
    }
    let mut links = Vec::new();
    for v in 0..n {
        let w = (v + 1) % n;
        if n == 2 && v == 1 {
            break;
        }
        links.push(Link {
            a: v,
            b: w,
            resource: "noc".into(),
            hops: 1,
        });
    }
    TopologyGraph::new(vec![pe_type.to_string(); n], links, Vec::new())
}

/// All PEs on one shared bus, grouped by type in the given order.
pub fn bus(type_counts: &[(&str, usize)]) -> Result<TopologyGraph> {
    if type_counts.is_empty() {
        return Err(Error::InvalidTopology("bus needs at least one PE type".into()));
    }
    let mut node_types = Vec::new();
    for &(ty, count) in type_counts {
        if count == 0 {
            return Err(Error::InvalidTopology(format!("zero PEs of type {ty}")));
        }
        node_types.extend(std::iter::repeat_n(ty.to_string(), count));
    }
    let members = (0..node_types.len()).collect();
    TopologyGraph::new(
        node_types,
        Vec::new(),
        vec![Bus {
            resource: "bus".into(),
            members,
        }],
    )
}

/// TI Keystone II: 4 ARM Cortex-A15 cores and 8 DSPs on a shared interconnect.
pub fn keystone() -> TopologyGraph {
    bus(&[("ARM", 4), ("DSP", 8)]).expect("static preset")
}

/// Two accelerators and four general-purpose cores on one bus.
pub fn hetero_bus() -> TopologyGraph {
    bus(&[("ACC", 2), ("CPU", 4)]).expect("static preset")
}

/// Adapteva Parallella: 4×4 Epiphany mesh.
pub fn parallella() -> TopologyGraph {
    mesh(4, 4, "Epiphany").expect("static preset")
}

pub fn preset(name: &str) -> Option<TopologyGraph> {
    match name {
        "keystone" => Some(keystone()),
        "parallella" => Some(parallella()),
        "mesh2x2" => mesh(2, 2, "RISC").ok(),
        "mesh3x3" => mesh(3, 3, "RISC").ok(),
        "mesh4x4" => mesh(4, 4, "RISC").ok(),
        "ring4" => ring(4, "RISC").ok(),
        "hetero_bus" => Some(hetero_bus()),
        _ => None,
    }
}

pub const PRESETS: &[&str] = &["keystone", "parallella", "mesh2x2", "mesh3x3", "mesh4x4", "ring4", "hetero_bus"];

/// Communication-cost class of a PE pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeLabel {
    Hops(u32),
    Bus(String),
    Unreachable,
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLabel::Hops(h) => write!(f, "{h} hops"),
            EdgeLabel::Bus(r) => write!(f, "bus {r}"),
            EdgeLabel::Unreachable => f.write_str("unreachable"),
        }
    }
}

const NO_EDGE: u32 = u32::MAX;

/// Complete graph with node-type labels and an edge label on every PE pair.
///
/// Labels are interned into sorted tables, so comparing label ids compares
/// the labels themselves; induced subgraphs share their parent's tables.
#[derive(Clone)]
pub struct ArchitectureGraph {
    node_table: Arc<Vec<String>>,
    edge_table: Arc<Vec<EdgeLabel>>,
    nodes: Vec<u32>,
    // n*n, NO_EDGE on the diagonal
    edges: Vec<u32>,
}

impl fmt::Debug for ArchitectureGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ArchitectureGraph")
            .field("nodes", &self.node_types())
            .finish()
    }
}

impl PartialEq for ArchitectureGraph {
    fn eq(&self, other: &Self) -> bool {
        let n = self.node_count();
        n == other.node_count()
            && (0..n).all(|i| self.node_type(i) == other.node_type(i))
            && (0..n).all(|i| (0..n).all(|j| i == j || self.edge(i, j) == other.edge(i, j)))
    }
}

impl Eq for ArchitectureGraph {}

impl ArchitectureGraph {
    /// Builds a graph from node types and a symmetric edge-label function.
    pub fn new(
        node_types: Vec<String>,
        mut edge: impl FnMut(usize, usize) -> EdgeLabel,
    ) -> Result<Self> {
        let n = node_types.len();
        if n == 0 {
            return Err(Error::InvalidTopology("no processing elements".into()));
        }
        let mut labels = vec![EdgeLabel::Unreachable; n * n];
        let mut edge_set = BTreeSet::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let l = edge(i, j);
                if edge(j, i) != l {
                    return Err(Error::InvalidTopology(format!(
                        "edge labels of {}-{} are not symmetric",
                        i + 1,
                        j + 1
                    )));
                }
                edge_set.insert(l.clone());
                labels[i * n + j] = l.clone();
                labels[j * n + i] = l;
            }
        }
        let node_table: Vec<String> = node_types
            .iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let edge_table: Vec<EdgeLabel> = edge_set.into_iter().collect();
        let nodes = node_types
            .iter()
            .map(|t| node_table.binary_search(t).unwrap() as u32)
            .collect();
        let mut edges = vec![NO_EDGE; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    edges[i * n + j] = edge_table.binary_search(&labels[i * n + j]).unwrap() as u32;
                }
            }
        }
        Ok(ArchitectureGraph {
            node_table: Arc::new(node_table),
            edge_table: Arc::new(edge_table),
            nodes,
            edges,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_type(&self, v: usize) -> &str {
        &self.node_table[self.nodes[v] as usize]
    }

    pub fn node_types(&self) -> Vec<String> {
        (0..self.node_count()).map(|v| self.node_type(v).to_string()).collect()
    }

    /// Order-preserving id of the node label.
    #[inline]
    pub fn node_label_id(&self, v: usize) -> u32 {
        self.nodes[v]
    }

    /// Label of the pair `{u, v}`; `u != v`.
    pub fn edge(&self, u: usize, v: usize) -> &EdgeLabel {
        assert_ne!(u, v, "no edge label on the diagonal");
        &self.edge_table[self.edge_id(u, v) as usize]
    }

    /// Order-preserving id of the edge label; `u32::MAX` when `u == v`.
    #[inline]
    pub fn edge_id(&self, u: usize, v: usize) -> u32 {
        self.edges[u * self.nodes.len() + v]
    }

    /// Number of link traversals between two PEs (0 on the same PE, 1 across a bus).
    pub fn comm_distance(&self, u: usize, v: usize) -> Option<u32> {
        if u == v {
            return Some(0);
        }
        match self.edge(u, v) {
            EdgeLabel::Hops(h) => Some(*h),
            EdgeLabel::Bus(_) => Some(1),
            EdgeLabel::Unreachable => None,
        }
    }

    /// Largest hop label, if any pair is hop-labeled.
    pub fn max_hops(&self) -> Option<u32> {
        self.edge_table
            .iter()
            .filter_map(|l| match l {
                EdgeLabel::Hops(h) => Some(*h),
                _ => None,
            })
            .max()
    }

    /// Subgraph induced by `subset` (node `i` of the result is `subset[i]`).
    pub fn induced_subgraph(&self, subset: &[u32]) -> Result<ArchitectureGraph> {
        if subset.is_empty() {
            return Err(Error::InvalidTopology("empty sub-architecture".into()));
        }
        let n = self.node_count();
        let mut seen = vec![false; n];
        for &v in subset {
            if v as usize >= n {
                return Err(Error::PointOutOfRange {
                    point: v as usize,
                    size: n,
                });
            }
            if std::mem::replace(&mut seen[v as usize], true) {
                return Err(Error::InvalidTopology(format!("PE {} listed twice", v + 1)));
            }
        }
        Ok(self.induced_unchecked(subset))
    }

    pub(crate) fn induced_unchecked(&self, subset: &[u32]) -> ArchitectureGraph {
        let k = subset.len();
        let nodes = subset.iter().map(|&v| self.nodes[v as usize]).collect();
        let mut edges = vec![NO_EDGE; k * k];
        for (i, &u) in subset.iter().enumerate() {
            for (j, &v) in subset.iter().enumerate() {
                if i != j {
                    edges[i * k + j] = self.edge_id(u as usize, v as usize);
                }
            }
        }
        ArchitectureGraph {
            node_table: Arc::clone(&self.node_table),
            edge_table: Arc::clone(&self.edge_table),
            nodes,
            edges,
        }
    }

    /// The same graph with node `v` renamed to `sigma(v)`.
    pub fn relabel(&self, sigma: &Permutation) -> ArchitectureGraph {
        let n = self.node_count();
        assert_eq!(sigma.degree(), n);
        let inv = sigma.inverse();
        let order: Vec<u32> = (0..n as u32).map(|p| inv.apply(p)).collect();
        self.induced_unchecked(&order)
    }

    /// Complete isomorphism invariant plus a canonical vertex order.
    pub fn canonical_form(&self) -> CanonicalForm {
        canon::canonical_form(self)
    }

    /// Certificate bytes: equal exactly for isomorphic labeled graphs.
    pub fn certificate(&self) -> Vec<u8> {
        self.canonical_form().certificate
    }
}

/// Isomorphism-invariant vertex colours from iterated label refinement.
pub(crate) fn refine_colors_for(g: &ArchitectureGraph) -> Vec<u32> {
    canon::refine_colors(g)
}

/// The complete labeled graph of a topology.
pub fn derive_architecture_graph(t: &TopologyGraph) -> Result<ArchitectureGraph> {
    t.validate()?;
    let n = t.node_count();
    const INF: u64 = u64::MAX / 4;
    let mut dist = vec![INF; n * n];
    for i in 0..n {
        dist[i * n + i] = 0;
    }
    for l in &t.links {
        let w = l.hops as u64;
        for (a, b) in [(l.a, l.b), (l.b, l.a)] {
            if w < dist[a * n + b] {
                dist[a * n + b] = w;
            }
        }
    }
    let mut shared_bus: Vec<Option<usize>> = vec![None; n * n];
    for (bi, b) in t.buses.iter().enumerate() {
        for &u in &b.members {
            for &v in &b.members {
                if u != v {
                    if shared_bus[u * n + v].is_none() {
                        shared_bus[u * n + v] = Some(bi);
                    }
                    dist[u * n + v] = dist[u * n + v].min(1);
                }
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = dist[i * n + k];
            if dik == INF {
                continue;
            }
            for j in 0..n {
                let cand = dik + dist[k * n + j];
                if cand < dist[i * n + j] {
                    dist[i * n + j] = cand;
                }
            }
        }
    }
    if !t.allow_disconnected {
        for i in 0..n {
            for j in (i + 1)..n {
                if dist[i * n + j] == INF {
                    return Err(Error::Disconnected { a: i + 1, b: j + 1 });
                }
            }
        }
    }
    ArchitectureGraph::new(t.node_types.clone(), |i, j| {
        if let Some(bi) = shared_bus[i * n + j] {
            EdgeLabel::Bus(t.buses[bi].resource.clone())
        } else if dist[i * n + j] == INF {
            EdgeLabel::Unreachable
        } else {
            EdgeLabel::Hops(dist[i * n + j] as u32)
        }
    })
}
