//! File formats owned by the command-line tool and input resolution.
//!
//! Architecture arguments are a topology JSON path or `preset:NAME`; task
//! graph arguments are a task-graph JSON path or `fixture:NAME`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use symmap::archgraph::{derive_architecture_graph, preset, ArchitectureGraph};
use symmap::dse::{ExplorationResult, SizeRecord, Strategy, Trial};
use symmap::io::{parse_task_graph, parse_topology, read_file};
use symmap::{fixtures, Error, Result, TaskGraph, TaskSymmetry};

pub fn load_architecture(spec: &str, base: &Path) -> Result<ArchitectureGraph> {
    let topology = match spec.strip_prefix("preset:") {
        Some(name) => preset(name).ok_or_else(|| Error::InvalidTopology(format!("unknown preset {name:?}")))?,
        None => parse_topology(&read_file(&base.join(spec))?)?,
    };
    derive_architecture_graph(&topology)
}

pub fn load_task_graph(spec: &str, base: &Path) -> Result<(TaskGraph, TaskSymmetry)> {
    match spec.strip_prefix("fixture:") {
        Some(name) => fixtures::task_graph(name),
        None => parse_task_graph(&read_file(&base.join(spec))?),
    }
}

/// Generators of a symmetry group or inverse semigroup.
#[derive(Debug, Serialize, Deserialize)]
pub struct GeneratorFile {
    pub points: usize,
    /// `group` or `semigroup`.
    pub kind: String,
    pub seeded_with_group: bool,
    /// Hex canonical certificate of the architecture graph.
    pub certificate: String,
    /// Group order or semigroup element count, in decimal.
    pub size: String,
    /// Groups: image arrays. Semigroups: lists of `[from, to]` pairs.
    pub generators: serde_json::Value,
}

/// Output of `classes`.
#[derive(Debug, Serialize)]
pub struct ClassesFile {
    pub method: String,
    pub total: usize,
    pub counts: Vec<SizeCount>,
    pub representatives: Vec<Vec<u32>>,
}

#[derive(Debug, Serialize)]
pub struct SizeCount {
    pub size: usize,
    pub count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Ga,
    Subarch,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaSection {
    pub mu: usize,
    pub lambda: usize,
    pub generations: usize,
    pub mutation_rate: f64,
    pub symmetry_cache: bool,
}

impl Default for GaSection {
    fn default() -> Self {
        let d = symmap::dse::GaConfig::default();
        GaSection {
            mu: d.mu,
            lambda: d.lambda,
            generations: d.generations,
            mutation_rate: d.mutation_rate,
            symmetry_cache: d.symmetry_cache,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubarchSection {
    pub strategy: Strategy,
    #[serde(default)]
    pub deadline: Option<u64>,
}

/// Run configuration for `dse`. Relative paths resolve against the
/// configuration file's directory.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub architecture: String,
    pub task_graph: String,
    pub mode: Mode,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub hop_factor: u64,
    #[serde(default)]
    pub ga: Option<GaSection>,
    #[serde(default)]
    pub subarch: Option<SubarchSection>,
}

fn one() -> u64 {
    1
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<(RunConfig, PathBuf)> {
        let cfg: RunConfig = serde_json::from_str(&read_file(path)?)?;
        let mismatch = match cfg.mode {
            Mode::Subarch if cfg.subarch.is_none() => Some("subarch mode needs a \"subarch\" section"),
            Mode::Subarch if cfg.ga.is_some() => Some("a \"ga\" section is not used in subarch mode"),
            Mode::Ga if cfg.subarch.is_some() => Some("a \"subarch\" section is not used in ga mode"),
            _ => None,
        };
        if let Some(msg) = mismatch {
            return Err(Error::InvalidConfig(msg.into()));
        }
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((cfg, base))
    }
}

fn one_based(v: &[u32]) -> Vec<u32> {
    v.iter().map(|p| p + 1).collect()
}

/// One line of `trials.jsonl`.
#[derive(Debug, Serialize, Deserialize)]
pub struct TrialRecord {
    pub step: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pes: Vec<u32>,
    pub mapping: Option<Vec<u32>>,
    pub cost: Option<u64>,
    pub hit: symmap::dse::HitKind,
}

impl From<&Trial> for TrialRecord {
    fn from(t: &Trial) -> Self {
        TrialRecord {
            step: t.step,
            pes: one_based(&t.pes),
            mapping: t.mapping.as_deref().map(one_based),
            cost: t.cost,
            hit: t.hit,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SizeSummary {
    pub size: usize,
    pub trials: usize,
    pub best_cost: Option<u64>,
    pub trial_of_best: Option<usize>,
    pub best_pes: Vec<u32>,
    pub best_mapping: Option<Vec<u32>>,
}

impl From<&SizeRecord> for SizeSummary {
    fn from(r: &SizeRecord) -> Self {
        SizeSummary {
            size: r.size,
            trials: r.trials,
            best_cost: r.best_cost,
            trial_of_best: r.trial_of_best,
            best_pes: one_based(&r.best_pes),
            best_mapping: r.best_mapping.as_deref().map(one_based),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Summary {
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<Strategy>,
    pub architecture: String,
    pub task_graph: String,
    pub seed: u64,
    pub trials: usize,
    pub invocations: u64,
    pub exact_hits: u64,
    pub symmetry_hits: u64,
    /// Symmetry hits as a percentage of all trials.
    pub symmetry_hit_percent: f64,
    pub best_cost: Option<u64>,
    pub best_mapping: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub best_pes: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub best_per_generation: Vec<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_size: Vec<SizeSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deadline_met_at: Option<usize>,
}

impl Summary {
    pub fn new(cfg: &RunConfig, r: &ExplorationResult) -> Self {
        let best = r.best();
        let trials = r.trials.len();
        Summary {
            mode: cfg.mode,
            strategy: cfg.subarch.as_ref().map(|s| s.strategy),
            architecture: cfg.architecture.clone(),
            task_graph: cfg.task_graph.clone(),
            seed: cfg.seed,
            trials,
            invocations: r.invocations,
            exact_hits: r.exact_hits,
            symmetry_hits: r.symmetry_hits,
            symmetry_hit_percent: if trials == 0 {
                0.0
            } else {
                (r.symmetry_hits as f64 * 10000.0 / trials as f64).round() / 100.0
            },
            best_cost: best.and_then(|t| t.cost),
            best_mapping: best.and_then(|t| t.mapping.as_deref().map(one_based)),
            best_pes: best.map(|t| one_based(&t.pes)).unwrap_or_default(),
            best_per_generation: r.best_per_generation.clone(),
            per_size: r.per_size.iter().map(SizeSummary::from).collect(),
            deadline_met_at: r.deadline_met_at,
        }
    }

    /// CSV of the plot data: per size for sub-architecture runs, per
    /// generation for GA runs.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if self.mode == Mode::Ga {
            out.push_str("generation,best_cost\n");
            for (g, c) in self.best_per_generation.iter().enumerate() {
                out.push_str(&format!("{g},{c}\n"));
            }
            return out;
        }
        out.push_str("size,trials,cumulative_trials,best_cost,trial_of_best\n");
        let mut total = 0;
        for r in &self.per_size {
            total += r.trials;
            let show = |v: Option<String>| v.unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.size,
                r.trials,
                total,
                show(r.best_cost.map(|c| c.to_string())),
                show(r.trial_of_best.map(|t| t.to_string()))
            ));
        }
        out
    }
}
