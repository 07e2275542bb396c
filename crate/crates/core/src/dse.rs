//! Design-space exploration: a μ+λ genetic algorithm whose evaluation cache
//! is keyed by canonical mappings, and a search for the smallest
//! sub-architecture that meets a deadline.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::archgraph::ArchitectureGraph;
use crate::autos::automorphism_group;
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::grp::{PermutationGroup, ProductGroup};
use crate::mapping::{self, Mapping, TaskGraph};

/// Makespan-style cost: the largest per-PE computation load plus the total
/// communication volume weighted by distance.
///
/// Costs depend only on PE types and communication distances, so the cost
/// of a mapping is invariant under architecture symmetries, and under task
/// symmetries whenever those preserve volumes and cost tables.
#[derive(Clone, Debug)]
pub struct CostModel {
    /// `costs[task][pe_type]`.
    pub costs: Vec<BTreeMap<String, u64>>,
    /// Cost of moving one unit of data across one hop.
    pub hop_factor: u64,
}

impl CostModel {
    pub fn from_task_graph(tg: &TaskGraph, hop_factor: u64) -> Self {
        CostModel {
            costs: tg.tasks().iter().map(|t| t.costs.clone()).collect(),
            hop_factor,
        }
    }

    pub fn cost(&self, task: usize, pe_type: &str) -> Option<u64> {
        self.costs[task].get(pe_type).copied()
    }
}

pub fn evaluate_cost(model: &CostModel, tg: &TaskGraph, arch: &ArchitectureGraph, m: &[u32]) -> Result<u64> {
    mapping::validate_mapping(m, tg.task_count(), arch.node_count())?;
    if model.costs.len() != tg.task_count() {
        return Err(Error::SizeMismatch {
            left: model.costs.len(),
            right: tg.task_count(),
        });
    }
    let mut load = vec![0u64; arch.node_count()];
    for (task, &pe) in m.iter().enumerate() {
        let ty = arch.node_type(pe as usize);
        load[pe as usize] += model.cost(task, ty).ok_or_else(|| Error::MissingCost {
            task: tg.tasks()[task].name.clone(),
            pe_type: ty.to_string(),
        })?;
    }
    let mut comm = 0u64;
    for c in tg.channels() {
        let (a, b) = (m[c.from] as usize, m[c.to] as usize);
        let d = arch.comm_distance(a, b).ok_or(Error::Disconnected { a, b })?;
        comm += c.volume * u64::from(d) * model.hop_factor;
    }
    Ok(load.into_iter().max().unwrap_or(0) + comm)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HitKind {
    Miss,
    /// This exact mapping was evaluated before.
    Exact,
    /// Only a symmetric mapping was evaluated before.
    Symmetry,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trial {
    /// GA generation (0 is the initial population) or sub-architecture size.
    pub step: usize,
    /// Sub-architecture PEs, ascending; empty for GA trials.
    pub pes: Vec<u32>,
    /// `None` when no task-compatible mapping onto `pes` exists.
    pub mapping: Option<Mapping>,
    pub cost: Option<u64>,
    pub hit: HitKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeRecord {
    pub size: usize,
    pub trials: usize,
    pub best_cost: Option<u64>,
    /// 1-based trial within this size that first reached `best_cost`.
    pub trial_of_best: Option<usize>,
    pub best_pes: Vec<u32>,
    pub best_mapping: Option<Mapping>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExplorationResult {
    pub trials: Vec<Trial>,
    /// GA only: best cost in the population after each generation.
    pub best_per_generation: Vec<u64>,
    /// Sub-architecture search only.
    pub per_size: Vec<SizeRecord>,
    /// Smallest size whose best cost met the deadline.
    pub deadline_met_at: Option<usize>,
    /// Calls to the cost model.
    pub invocations: u64,
    pub exact_hits: u64,
    pub symmetry_hits: u64,
}

impl ExplorationResult {
    pub fn best(&self) -> Option<&Trial> {
        self.trials
            .iter()
            .filter(|t| t.cost.is_some())
            .min_by_key(|t| t.cost)
    }
}

// Compatible PEs per task, in index order.
fn compatibility(model: &CostModel, tg: &TaskGraph, arch: &ArchitectureGraph) -> Result<Vec<Vec<u32>>> {
    (0..tg.task_count())
        .map(|t| {
            let pes: Vec<u32> = (0..arch.node_count() as u32)
                .filter(|&p| model.cost(t, arch.node_type(p as usize)).is_some())
                .collect();
            if pes.is_empty() {
                Err(Error::InvalidConfig(format!(
                    "task {} has no cost entry for any PE type",
                    tg.tasks()[t].name
                )))
            } else {
                Ok(pes)
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaConfig {
    pub mu: usize,
    pub lambda: usize,
    pub generations: usize,
    /// Per-position probability of moving a task to a random compatible PE.
    pub mutation_rate: f64,
    pub seed: u64,
    /// Key the cache by canonical mapping instead of the raw tuple.
    pub symmetry_cache: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            mu: 20,
            lambda: 20,
            generations: 50,
            mutation_rate: 0.1,
            seed: 0,
            symmetry_cache: true,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mu == 0 || self.lambda == 0 {
            return Err(Error::InvalidConfig("mu and lambda must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::InvalidConfig("mutation_rate must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

// One independent stream per (generation, individual), so children can be
// bred in any order or in parallel.
fn stream(seed: u64, generation: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((generation as u64) << 32) | index as u64);
    rng
}

enum Slot {
    Known(u64),
    Pending(usize),
}

struct EvalCache<'a> {
    gh: &'a ProductGroup,
    symmetric: bool,
    by_key: HashMap<Vec<u8>, Slot>,
    seen: HashSet<Mapping>,
}

impl EvalCache<'_> {
    fn key(&self, m: &[u32]) -> Vec<u8> {
        if self.symmetric {
            mapping::cache_key(self.gh, m).expect("mapping validated by construction")
        } else {
            mapping::encode(m)
        }
    }

    // Resolves a batch against the cache; misses are evaluated with `eval`.
    fn resolve(
        &mut self,
        exec: Exec,
        batch: &[Mapping],
        eval: impl Fn(&[u32]) -> Result<u64> + Sync,
    ) -> Result<Vec<(u64, HitKind)>> {
        let keys = exec::map(exec, batch, |m| self.key(m));
        let mut kinds = Vec::with_capacity(batch.len());
        let mut misses: Vec<&Mapping> = Vec::new();
        let mut slots = Vec::with_capacity(batch.len());
        for (m, key) in batch.iter().zip(keys) {
            let exact = self.seen.contains(m);
            let slot = match self.by_key.get(&key) {
                Some(Slot::Known(c)) => Slot::Known(*c),
                Some(Slot::Pending(i)) => Slot::Pending(*i),
                None => {
                    misses.push(m);
                    let s = Slot::Pending(misses.len() - 1);
                    self.by_key.insert(key, Slot::Pending(misses.len() - 1));
                    kinds.push(HitKind::Miss);
                    self.seen.insert(m.clone());
                    slots.push(s);
                    continue;
                }
            };
            kinds.push(if exact { HitKind::Exact } else { HitKind::Symmetry });
            self.seen.insert(m.clone());
            slots.push(slot);
        }
        let costs = exec::map(exec, &misses, |m| eval(m)).into_iter().collect::<Result<Vec<u64>>>()?;
        for slot in self.by_key.values_mut() {
            if let Slot::Pending(i) = *slot {
                *slot = Slot::Known(costs[i]);
            }
        }
        Ok(slots
            .into_iter()
            .zip(kinds)
            .map(|(s, k)| match s {
                Slot::Known(c) => (c, k),
                Slot::Pending(i) => (costs[i], k),
            })
            .collect())
    }
}

/// μ+λ evolution strategy. Parents are drawn uniformly, children come from
/// uniform crossover plus point mutation, and the best μ of parents and
/// children survive (ties keep the older individual).
///
/// The cache only changes how often the cost model runs, never the search:
/// equal seeds give equal trajectories with the symmetry cache on or off.
pub fn ga_explore(
    cfg: &GaConfig,
    tg: &TaskGraph,
    arch: &ArchitectureGraph,
    gh: &ProductGroup,
    model: &CostModel,
    exec: Exec,
) -> Result<ExplorationResult> {
    cfg.validate()?;
    if gh.arch.degree() != arch.node_count() || gh.tasks.degree() != tg.task_count() {
        return Err(Error::InvalidConfig("symmetry groups do not match the inputs".into()));
    }
    let compatible = compatibility(model, tg, arch)?;
    let s = tg.task_count();
    let mut cache = EvalCache {
        gh,
        symmetric: cfg.symmetry_cache,
        by_key: HashMap::new(),
        seen: HashSet::new(),
    };
    let eval = |m: &[u32]| evaluate_cost(model, tg, arch, m);
    let mut result = ExplorationResult::default();

    let initial: Vec<Mapping> = exec::map_range(exec, cfg.mu, |i| {
        let mut rng = stream(cfg.seed, 0, i);
        (0..s).map(|t| *compatible[t].choose(&mut rng).unwrap()).collect()
    });
    let resolved = cache.resolve(exec, &initial, eval)?;
    let mut population: Vec<(Mapping, u64)> = Vec::with_capacity(cfg.mu + cfg.lambda);
    for (m, (cost, hit)) in initial.into_iter().zip(resolved) {
        record(&mut result, 0, &m, cost, hit);
        population.push((m, cost));
    }
    population.sort_by_key(|(_, c)| *c);
    result.best_per_generation.push(population[0].1);

    for generation in 1..=cfg.generations {
        let children: Vec<Mapping> = exec::map_range(exec, cfg.lambda, |j| {
            let mut rng = stream(cfg.seed, generation, j);
            let a = &population[rng.gen_range(0..population.len())].0;
            let b = &population[rng.gen_range(0..population.len())].0;
            (0..s)
                .map(|t| {
                    let gene = if rng.gen_bool(0.5) { a[t] } else { b[t] };
                    if rng.gen_bool(cfg.mutation_rate) {
                        *compatible[t].choose(&mut rng).unwrap()
                    } else {
                        gene
                    }
                })
                .collect()
        });
        let resolved = cache.resolve(exec, &children, eval)?;
        for (m, (cost, hit)) in children.into_iter().zip(resolved) {
            record(&mut result, generation, &m, cost, hit);
            population.push((m, cost));
        }
        // stable: parents precede children on equal cost
        population.sort_by_key(|(_, c)| *c);
        population.truncate(cfg.mu);
        result.best_per_generation.push(population[0].1);
    }
    Ok(result)
}

fn record(result: &mut ExplorationResult, step: usize, m: &[u32], cost: u64, hit: HitKind) {
    match hit {
        HitKind::Miss => result.invocations += 1,
        HitKind::Exact => result.exact_hits += 1,
        HitKind::Symmetry => result.symmetry_hits += 1,
    }
    result.trials.push(Trial {
        step,
        pes: Vec::new(),
        mapping: Some(m.to_vec()),
        cost: Some(cost),
        hit,
    });
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Grow one random PE at a time, a single candidate per size.
    Simple,
    /// One candidate per orbit of PE subsets under the automorphism group.
    Groups,
    /// One candidate per isomorphism class of induced sub-architectures.
    InvSemi,
    /// Every non-empty subset.
    BruteForce,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Simple, Strategy::Groups, Strategy::InvSemi, Strategy::BruteForce];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Simple => "simple",
            Strategy::Groups => "groups",
            Strategy::InvSemi => "inv-semi",
            Strategy::BruteForce => "brute-force",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown strategy {s:?}")))
    }
}

/// How sub-architectures are grouped into classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassMethod {
    Groups,
    InvSemi,
}

impl FromStr for ClassMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "groups" => Ok(ClassMethod::Groups),
            "inv-semi" => Ok(ClassMethod::InvSemi),
            _ => Err(Error::InvalidConfig(format!("unknown class method {s:?}"))),
        }
    }
}

pub const SUBSET_MAX_NODES: usize = 64;

fn mask_of(subset: &[u32]) -> u64 {
    subset.iter().fold(0, |m, &v| m | 1 << v)
}

fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = Vec<u32>> {
    (0..n as u32).combinations(k)
}

// Orbit representatives of the k-subsets: walking subsets in lex order, the
// first unseen subset of each orbit is its least element.
fn group_classes_of_size(n: usize, k: usize, group: &PermutationGroup) -> Vec<Vec<u32>> {
    let gens: Vec<Vec<u32>> = group.generators().iter().map(|g| g.images().to_vec()).collect();
    let mut seen: HashSet<u64> = HashSet::new();
    let mut reps = Vec::new();
    for subset in subsets_of_size(n, k) {
        let start = mask_of(&subset);
        if !seen.insert(start) {
            continue;
        }
        reps.push(subset);
        let mut stack = vec![start];
        while let Some(m) = stack.pop() {
            for g in &gens {
                let mut image = 0u64;
                let mut bits = m;
                while bits != 0 {
                    let v = bits.trailing_zeros() as usize;
                    image |= 1 << g[v];
                    bits &= bits - 1;
                }
                if seen.insert(image) {
                    stack.push(image);
                }
            }
        }
    }
    reps
}

// Isomorphism-class representatives of induced k-node sub-architectures.
// Symmetric subsets induce isomorphic graphs, so only orbit representatives
// need a certificate, and the least subset of every class is among them.
fn iso_classes_of_size(arch: &ArchitectureGraph, k: usize, group: &PermutationGroup, exec: Exec) -> Vec<Vec<u32>> {
    let reps = group_classes_of_size(arch.node_count(), k, group);
    let certs = exec::map(exec, &reps, |s| arch.induced_unchecked(s).certificate());
    let mut seen = HashSet::new();
    reps.into_iter()
        .zip(certs)
        .filter_map(|(s, c)| seen.insert(c).then_some(s))
        .collect()
}

fn check_subset_size(arch: &ArchitectureGraph) -> Result<()> {
    if arch.node_count() > SUBSET_MAX_NODES {
        return Err(Error::TooLarge {
            nodes: arch.node_count(),
            max: SUBSET_MAX_NODES,
        });
    }
    Ok(())
}

/// One representative per class of non-empty sub-architectures with at most
/// `max_size` PEs, ordered by size and then lexicographically. Each
/// representative is the least subset of its class.
pub fn enumerate_subarch_classes(
    arch: &ArchitectureGraph,
    method: ClassMethod,
    max_size: Option<usize>,
    exec: Exec,
) -> Result<Vec<Vec<u32>>> {
    check_subset_size(arch)?;
    let n = arch.node_count();
    let group = automorphism_group(arch);
    let top = max_size.unwrap_or(n).min(n);
    let mut out = Vec::new();
    for k in 1..=top {
        match method {
            ClassMethod::Groups => out.extend(group_classes_of_size(n, k, &group)),
            ClassMethod::InvSemi => out.extend(iso_classes_of_size(arch, k, &group, exec)),
        }
    }
    Ok(out)
}

/// Greedy list scheduling onto the PEs of `subset`: tasks in descending
/// order of their cheapest cost on the subset, each onto the PE where its
/// load after assignment is smallest. PEs are visited in the canonical order
/// of the induced sub-architecture, and ties go to the earliest, so
/// isomorphic sub-architectures get isomorphic mappings.
pub fn greedy_mapping(model: &CostModel, arch: &ArchitectureGraph, subset: &[u32]) -> Option<Mapping> {
    let canon = arch.induced_unchecked(subset).canonical_form();
    let order: Vec<u32> = canon.labeling.iter().map(|&v| subset[v as usize]).collect();
    let tasks = model.costs.len();
    let cheapest = |t: usize| {
        order
            .iter()
            .filter_map(|&p| model.cost(t, arch.node_type(p as usize)))
            .min()
    };
    let mut by_cost = Vec::with_capacity(tasks);
    for t in 0..tasks {
        by_cost.push((cheapest(t)?, t));
    }
    by_cost.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut load = vec![0u64; order.len()];
    let mut m = vec![0u32; tasks];
    for (_, t) in by_cost {
        let (k, finish) = order
            .iter()
            .enumerate()
            .filter_map(|(k, &p)| model.cost(t, arch.node_type(p as usize)).map(|c| (k, load[k] + c)))
            .min_by_key(|&(k, f)| (f, k))?;
        load[k] = finish;
        m[t] = order[k];
    }
    Some(m)
}

/// Sub-architecture search: for growing sizes, map onto every candidate
/// subset of that size and stop after the first size whose best cost meets
/// `deadline`. Without a deadline, or when it is never met, all sizes are
/// explored.
pub fn subarch_explore(
    strategy: Strategy,
    tg: &TaskGraph,
    arch: &ArchitectureGraph,
    model: &CostModel,
    deadline: Option<u64>,
    seed: u64,
    exec: Exec,
) -> Result<ExplorationResult> {
    check_subset_size(arch)?;
    if model.costs.len() != tg.task_count() {
        return Err(Error::SizeMismatch {
            left: model.costs.len(),
            right: tg.task_count(),
        });
    }
    let n = arch.node_count();
    let group = match strategy {
        Strategy::Groups | Strategy::InvSemi => Some(automorphism_group(arch)),
        _ => None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grown: Vec<u32> = Vec::new();
    let mut unused: Vec<u32> = (0..n as u32).collect();
    let mut result = ExplorationResult::default();
    for k in 1..=n {
        let candidates: Vec<Vec<u32>> = match strategy {
            Strategy::Simple => {
                let pick = unused.remove(rng.gen_range(0..unused.len()));
                grown.push(pick);
                let mut s = grown.clone();
                s.sort_unstable();
                vec![s]
            }
            Strategy::BruteForce => subsets_of_size(n, k).collect(),
            Strategy::Groups => group_classes_of_size(n, k, group.as_ref().unwrap()),
            Strategy::InvSemi => iso_classes_of_size(arch, k, group.as_ref().unwrap(), exec),
        };
        let evaluated = exec::map(exec, &candidates, |s| match greedy_mapping(model, arch, s) {
            Some(m) => evaluate_cost(model, tg, arch, &m).map(|c| (Some(m), Some(c))),
            None => Ok((None, None)),
        });
        let mut rec = SizeRecord {
            size: k,
            trials: candidates.len(),
            best_cost: None,
            trial_of_best: None,
            best_pes: Vec::new(),
            best_mapping: None,
        };
        for (i, (pes, ev)) in candidates.into_iter().zip(evaluated).enumerate() {
            let (m, cost) = ev?;
            if let Some(c) = cost {
                result.invocations += 1;
                if rec.best_cost.is_none_or(|b| c < b) {
                    rec.best_cost = Some(c);
                    rec.trial_of_best = Some(i + 1);
                    rec.best_pes = pes.clone();
                    rec.best_mapping = m.clone();
                }
            }
            result.trials.push(Trial {
                step: k,
                pes,
                mapping: m,
                cost,
                hit: HitKind::Miss,
            });
        }
        let met = matches!((deadline, rec.best_cost), (Some(d), Some(c)) if c <= d);
        result.per_size.push(rec);
        if met {
            result.deadline_met_at = Some(k);
            break;
        }
    }
    Ok(result)
}
