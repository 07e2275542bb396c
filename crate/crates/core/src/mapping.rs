//! Task graphs, mappings, and the action of `G × H` on mappings.
//!
//! A mapping is a tuple whose entry `i` is the PE assigned to task `i`.
//! Architecture symmetries act on the entries, task symmetries permute the
//! positions. The two actions commute, so an orbit is reached by applying
//! both kinds of generators in any order.

use std::collections::{BTreeMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::grp::{PermutationGroup, ProductGroup};
use crate::perm::Permutation;

/// Entry `i` is the PE index assigned to task `i`.
pub type Mapping = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Task {
    pub name: String,
    /// Computation cost per PE type. A missing type means the task cannot
    /// run there.
    pub costs: BTreeMap<String, u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Channel {
    pub from: usize,
    pub to: usize,
    pub volume: u64,
}

#[derive(Clone, Debug)]
pub struct TaskGraph {
    tasks: Vec<Task>,
    channels: Vec<Channel>,
}

impl TaskGraph {
    pub fn new(tasks: Vec<Task>, channels: Vec<Channel>) -> Result<Self> {
        if tasks.is_empty() {
            return Err(Error::InvalidTaskGraph("no tasks".into()));
        }
        let mut names = HashSet::new();
        for t in &tasks {
            if !names.insert(t.name.as_str()) {
                return Err(Error::DuplicateName(t.name.clone()));
            }
        }
        for c in &channels {
            if c.from >= tasks.len() || c.to >= tasks.len() {
                return Err(Error::InvalidTaskGraph(format!(
                    "channel {} -> {} has an endpoint outside 1..={}",
                    c.from + 1,
                    c.to + 1,
                    tasks.len()
                )));
            }
        }
        Ok(TaskGraph { tasks, channels })
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    /// True iff `h` maps the channel multiset onto itself with volumes kept
    /// and every task onto one with the same cost table.
    pub fn is_symmetry(&self, h: &Permutation) -> bool {
        if h.degree() != self.tasks.len() {
            return false;
        }
        let same_costs = (0..self.tasks.len()).all(|i| self.tasks[i].costs == self.tasks[h.apply(i as u32) as usize].costs);
        if !same_costs {
            return false;
        }
        let mut before = self.channels.clone();
        let mut after: Vec<Channel> = self
            .channels
            .iter()
            .map(|c| Channel {
                from: h.apply(c.from as u32) as usize,
                to: h.apply(c.to as u32) as usize,
                volume: c.volume,
            })
            .collect();
        before.sort_unstable();
        after.sort_unstable();
        before == after
    }
}

/// The group `H` of task symmetries, given by user-supplied generators.
#[derive(Clone, Debug)]
pub struct TaskSymmetry {
    group: PermutationGroup,
}

impl TaskSymmetry {
    pub fn trivial(tg: &TaskGraph) -> Self {
        TaskSymmetry {
            group: PermutationGroup::trivial(tg.task_count()),
        }
    }

    /// Validates every generator against `tg`.
    pub fn new(tg: &TaskGraph, generators: Vec<Permutation>) -> Result<Self> {
        for (k, h) in generators.iter().enumerate() {
            if h.degree() != tg.task_count() {
                return Err(Error::SizeMismatch {
                    left: h.degree(),
                    right: tg.task_count(),
                });
            }
            if !tg.is_symmetry(h) {
                return Err(Error::InvalidTaskSymmetry(format!(
                    "generator {} does not preserve channels, volumes and costs",
                    k + 1
                )));
            }
        }
        Ok(TaskSymmetry {
            group: PermutationGroup::from_generators(tg.task_count(), generators)?,
        })
    }

    pub fn group(&self) -> &PermutationGroup {
        &self.group
    }

    pub fn into_group(self) -> PermutationGroup {
        self.group
    }
}

pub fn validate_mapping(m: &[u32], tasks: usize, pes: usize) -> Result<()> {
    if m.len() != tasks {
        return Err(Error::InvalidMapping(format!("{} entries for {} tasks", m.len(), tasks)));
    }
    if let Some(&p) = m.iter().find(|&&p| p as usize >= pes) {
        return Err(Error::InvalidMapping(format!("PE {} out of range 1..={}", p + 1, pes)));
    }
    Ok(())
}

/// `(g(m_1), …, g(m_s))`.
pub fn act_arch(g: &Permutation, m: &[u32]) -> Result<Mapping> {
    if let Some(&p) = m.iter().find(|&&p| p as usize >= g.degree()) {
        return Err(Error::PointOutOfRange {
            point: p as usize,
            size: g.degree(),
        });
    }
    Ok(m.iter().map(|&p| g.apply(p)).collect())
}

/// Moves the entry at position `i` to position `h(i)`.
pub fn act_task(h: &Permutation, m: &[u32]) -> Result<Mapping> {
    if h.degree() != m.len() {
        return Err(Error::SizeMismatch {
            left: h.degree(),
            right: m.len(),
        });
    }
    Ok(act_task_unchecked(h, m))
}

fn act_task_unchecked(h: &Permutation, m: &[u32]) -> Mapping {
    let mut out = vec![0; m.len()];
    for (i, &p) in m.iter().enumerate() {
        out[h.apply(i as u32) as usize] = p;
    }
    out
}

fn check_dims(gh: &ProductGroup, m: &[u32]) -> Result<()> {
    if gh.tasks.degree() != m.len() {
        return Err(Error::SizeMismatch {
            left: gh.tasks.degree(),
            right: m.len(),
        });
    }
    validate_mapping(m, m.len(), gh.arch.degree())
}

/// The orbit of `m` under `G × H`, sorted lexicographically.
pub fn mapping_orbit(gh: &ProductGroup, m: &[u32]) -> Result<Vec<Mapping>> {
    check_dims(gh, m)?;
    let mut seen: HashSet<Mapping> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(m.to_vec());
    queue.push_back(m.to_vec());
    while let Some(x) = queue.pop_front() {
        let arch = gh.arch.generators().iter().map(|g| x.iter().map(|&p| g.apply(p)).collect());
        let tasks = gh.tasks.generators().iter().map(|h| act_task_unchecked(h, &x));
        for y in arch.chain(tasks).collect::<Vec<Mapping>>() {
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    let mut out: Vec<Mapping> = seen.into_iter().collect();
    out.sort_unstable();
    Ok(out)
}

/// Lexicographically least mapping in the `G × H` orbit of `m`.
///
/// Runs over the elements `h` of `H` and takes the least `G`-image of each
/// `h·m`, which avoids enumerating the orbit.
pub fn canonical_mapping(gh: &ProductGroup, m: &[u32]) -> Result<Mapping> {
    check_dims(gh, m)?;
    let mut best: Option<Mapping> = None;
    gh.tasks.for_each_element(|h| {
        let cand = gh.arch.min_image(&act_task_unchecked(h, m));
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
    });
    Ok(best.expect("a group has at least one element"))
}

/// Byte encoding of the canonical mapping: two bytes per task, big endian.
/// Two mappings get the same key iff they lie in the same orbit.
pub fn cache_key(gh: &ProductGroup, m: &[u32]) -> Result<Vec<u8>> {
    Ok(encode(&canonical_mapping(gh, m)?))
}

/// Key for a raw mapping, as used by a cache that ignores symmetry.
pub fn encode(m: &[u32]) -> Vec<u8> {
    m.iter().flat_map(|&p| (p as u16).to_be_bytes()).collect()
}
