//! `symmap`: symmetry computations and mapping exploration from the shell.
//!
//! Exit codes: 0 on success, 2 for invalid input, 3 when a resource cap is
//! exceeded.

mod cache;
mod files;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use log::info;
use serde_json::json;
use symmap::autos::{automorphism_group, partial_automorphism_semigroup, SemigroupOptions};
use symmap::dse::{self, ClassMethod, CostModel, GaConfig};
use symmap::grp::direct_product;
use symmap::io::{mapping_to_json, parse_mapping, read_file};
use symmap::isg::DEFAULT_CAP;
use symmap::mapping::{cache_key, canonical_mapping, validate_mapping};
use symmap::{Error, Exec, PartialPermutation, Permutation};

use crate::cache::Cache;
use crate::files::{
    load_architecture, load_task_graph, ClassesFile, GeneratorFile, Mode, RunConfig, SizeCount, Summary, TrialRecord,
};

const CACHE_ENV: &str = "SYMMAP_CACHE_DIR";

#[derive(Parser)]
#[command(name = "symmap", version, about = "Symmetries of multicore architectures for mapping exploration")]
struct Cli {
    /// Run everything on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AutosMode {
    Group,
    Semigroup,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Groups,
    InvSemi,
}

#[derive(Subcommand)]
enum Command {
    /// Generators of the automorphism group or of the inverse semigroup of
    /// partial automorphisms.
    Autos {
        /// Topology JSON file or `preset:NAME`.
        arch: String,
        #[arg(long, value_enum, default_value = "group")]
        mode: AutosMode,
        /// Start the semigroup search from the group generators.
        #[arg(long)]
        seed_group: bool,
        /// Generator cache directory (default: $SYMMAP_CACHE_DIR, if set).
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        /// Element cap for the semigroup closure.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Write the generator file here.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Canonical representative and cache key of a mapping.
    Canon {
        arch: String,
        /// Task-graph JSON file or `fixture:NAME`.
        task_graph: String,
        /// JSON array of 1-based PE indices.
        mapping: PathBuf,
    },
    /// Representatives of the classes of sub-architectures.
    Classes {
        arch: String,
        #[arg(long, value_enum, default_value = "groups")]
        method: Method,
        #[arg(long)]
        max_size: Option<usize>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run an exploration described by a configuration file.
    Dse {
        config: PathBuf,
        /// Directory for `trials.jsonl` and `summary.json`.
        #[arg(long, short)]
        out_dir: PathBuf,
    },
    /// CSV plot data from a `summary.json` (or the directory holding it).
    Report {
        results: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    match run(cli.command, exec) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let capped = e
                .chain()
                .any(|c| matches!(c.downcast_ref::<Error>(), Some(Error::CapExceeded { .. })));
            ExitCode::from(if capped { 3 } else { 2 })
        }
    }
}

fn run(command: Command, exec: Exec) -> Result<()> {
    let here = Path::new(".");
    match command {
        Command::Autos {
            arch,
            mode,
            seed_group,
            cache_dir,
            cap,
            out,
        } => {
            let g = load_architecture(&arch, here)?;
            let cache_dir = cache_dir.or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from));
            let file = autos(&g, mode, seed_group, cap, cache_dir.as_deref())?;
            let label = match mode {
                AutosMode::Group => "order",
                AutosMode::Semigroup => "elements",
            };
            println!("points: {}", file.points);
            println!("{label}: {}", file.size);
            println!("generators: {}", file.generators.as_array().map_or(0, Vec::len));
            if let Some(path) = out {
                write(&path, &(serde_json::to_string_pretty(&file)? + "\n"))?;
            }
        }
        Command::Canon {
            arch,
            task_graph,
            mapping,
        } => {
            let g = load_architecture(&arch, here)?;
            let (tg, h) = load_task_graph(&task_graph, here)?;
            let m = parse_mapping(&read_file(&mapping)?)?;
            validate_mapping(&m, tg.task_count(), g.node_count())?;
            let gh = direct_product(automorphism_group(&g), h.into_group());
            println!("canonical: {}", mapping_to_json(&canonical_mapping(&gh, &m)?));
            println!("key: {}", hex::encode(cache_key(&gh, &m)?));
        }
        Command::Classes {
            arch,
            method,
            max_size,
            out,
        } => {
            let g = load_architecture(&arch, here)?;
            let (method, name) = match method {
                Method::Groups => (ClassMethod::Groups, "groups"),
                Method::InvSemi => (ClassMethod::InvSemi, "inv-semi"),
            };
            let start = Instant::now();
            let reps = dse::enumerate_subarch_classes(&g, method, max_size, exec)?;
            info!("classes computed in {:.2?}", start.elapsed());
            let mut counts: Vec<SizeCount> = Vec::new();
            for r in &reps {
                match counts.last_mut() {
                    Some(c) if c.size == r.len() => c.count += 1,
                    _ => counts.push(SizeCount { size: r.len(), count: 1 }),
                }
            }
            println!("size count");
            for c in &counts {
                println!("{} {}", c.size, c.count);
            }
            println!("total: {}", reps.len());
            if let Some(path) = out {
                let file = ClassesFile {
                    method: name.into(),
                    total: reps.len(),
                    counts,
                    representatives: reps.iter().map(|r| r.iter().map(|p| p + 1).collect()).collect(),
                };
                write(&path, &(serde_json::to_string(&file)? + "\n"))?;
            }
        }
        Command::Dse { config, out_dir } => dse_command(&config, &out_dir, exec)?,
        Command::Report { results, out } => {
            let path = if results.is_dir() { results.join("summary.json") } else { results };
            let summary: Summary = serde_json::from_str(&read_file(&path)?).map_err(Error::from)?;
            let csv = summary.to_csv();
            match out {
                Some(p) => write(&p, &csv)?,
                None => print!("{csv}"),
            }
        }
    }
    Ok(())
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

// Renames the points of each generator through `rename`.
fn rename_group(gens: &[Permutation], rename: &[u32]) -> Vec<Permutation> {
    gens.iter()
        .map(|g| {
            let mut images = vec![0; rename.len()];
            for x in 0..rename.len() {
                images[rename[x] as usize] = rename[g.apply(x as u32) as usize];
            }
            Permutation::from_images(images).expect("renaming keeps bijections")
        })
        .collect()
}

fn rename_partial(gens: &[PartialPermutation], rename: &[u32]) -> Vec<PartialPermutation> {
    gens.iter()
        .map(|t| {
            let pairs: Vec<(u32, u32)> = t.pairs().map(|(x, y)| (rename[x as usize], rename[y as usize])).collect();
            PartialPermutation::from_pairs(rename.len(), &pairs).expect("renaming keeps injectivity")
        })
        .collect()
}

fn group_json(gens: &[Permutation]) -> serde_json::Value {
    json!(gens.iter().map(Permutation::to_one_based).collect::<Vec<_>>())
}

fn partial_json(gens: &[PartialPermutation]) -> serde_json::Value {
    json!(gens.iter().map(PartialPermutation::to_one_based_pairs).collect::<Vec<_>>())
}

fn parse_group(v: &serde_json::Value) -> symmap::Result<Vec<Permutation>> {
    let raw: Vec<Vec<usize>> = serde_json::from_value(v.clone())?;
    raw.iter().map(|g| Permutation::from_one_based(g)).collect()
}

fn parse_partial(v: &serde_json::Value, n: usize) -> symmap::Result<Vec<PartialPermutation>> {
    let raw: Vec<Vec<(usize, usize)>> = serde_json::from_value(v.clone())?;
    raw.iter().map(|t| PartialPermutation::from_one_based(n, t)).collect()
}

fn autos(
    g: &symmap::ArchitectureGraph,
    mode: AutosMode,
    seed_group: bool,
    cap: usize,
    cache_dir: Option<&Path>,
) -> Result<GeneratorFile> {
    let n = g.node_count();
    let kind = match mode {
        AutosMode::Group => "group",
        AutosMode::Semigroup => "semigroup",
    };
    let seeded = matches!(mode, AutosMode::Semigroup) && seed_group;
    let form = g.canonical_form();
    let certificate = hex::encode(&form.certificate);
    let cache = cache_dir.map(Cache::new);
    let to_canon = cache::to_canonical(&form);
    let from_canon = cache::from_canonical(&form);

    if let Some(hit) = cache.as_ref().and_then(|c| c.load(kind, seeded, &form.certificate)) {
        // Stored generators live in canonical coordinates; re-check them
        // against this graph before trusting the entry.
        let generators = match mode {
            AutosMode::Group => {
                let gens = rename_group(&parse_group(&hit.generators)?, &from_canon);
                let ok = gens.iter().all(|p| symmap::autos::is_partial_automorphism(&p.into(), g));
                ok.then(|| group_json(&gens))
            }
            AutosMode::Semigroup => {
                let gens = rename_partial(&parse_partial(&hit.generators, n)?, &from_canon);
                let ok = gens.iter().all(|t| symmap::autos::is_partial_automorphism(t, g));
                ok.then(|| partial_json(&gens))
            }
        };
        if let Some(generators) = generators {
            return Ok(GeneratorFile {
                points: n,
                generators,
                ..hit
            });
        }
        log::warn!("cached generators do not fit this architecture; recomputing");
    }

    let start = Instant::now();
    let (size, generators, canonical) = match mode {
        AutosMode::Group => {
            let group = automorphism_group(g);
            let gens = group.generators().to_vec();
            (group.order().to_string(), group_json(&gens), group_json(&rename_group(&gens, &to_canon)))
        }
        AutosMode::Semigroup => {
            let options = SemigroupOptions {
                seed_with_group: seed_group,
                cap,
            };
            let found = partial_automorphism_semigroup(g, options)?;
            let gens = found.generators;
            (
                found.semigroup.len().to_string(),
                partial_json(&gens),
                partial_json(&rename_partial(&gens, &to_canon)),
            )
        }
    };
    info!("{kind} computed in {:.2?}", start.elapsed());
    let file = GeneratorFile {
        points: n,
        kind: kind.into(),
        seeded_with_group: seeded,
        certificate,
        size,
        generators,
    };
    if let Some(c) = &cache {
        let stored = GeneratorFile {
            points: n,
            kind: file.kind.clone(),
            seeded_with_group: seeded,
            certificate: file.certificate.clone(),
            size: file.size.clone(),
            generators: canonical,
        };
        if let Err(e) = c.store(&stored, seeded, &form.certificate) {
            log::warn!("could not write cache entry: {e}");
        }
    }
    Ok(file)
}

fn dse_command(config: &Path, out_dir: &Path, exec: Exec) -> Result<()> {
    let (cfg, base) = RunConfig::load(config)?;
    let arch = load_architecture(&cfg.architecture, &base)?;
    let (tg, h) = load_task_graph(&cfg.task_graph, &base)?;
    let model = CostModel::from_task_graph(&tg, cfg.hop_factor);
    let start = Instant::now();
    let result = match cfg.mode {
        Mode::Ga => {
            let section = cfg.ga.as_ref().map_or_else(Default::default, |s| GaConfig {
                mu: s.mu,
                lambda: s.lambda,
                generations: s.generations,
                mutation_rate: s.mutation_rate,
                seed: 0,
                symmetry_cache: s.symmetry_cache,
            });
            let ga = GaConfig {
                seed: cfg.seed,
                ..section
            };
            let gh = direct_product(automorphism_group(&arch), h.into_group());
            dse::ga_explore(&ga, &tg, &arch, &gh, &model, exec)?
        }
        Mode::Subarch => {
            let s = cfg.subarch.as_ref().expect("checked on load");
            dse::subarch_explore(s.strategy, &tg, &arch, &model, s.deadline, cfg.seed, exec)?
        }
    };
    info!("exploration finished in {:.2?}", start.elapsed());
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut trials = Vec::new();
    for t in &result.trials {
        serde_json::to_writer(&mut trials, &TrialRecord::from(t))?;
        trials.write_all(b"\n")?;
    }
    fs::write(out_dir.join("trials.jsonl"), trials).context("writing trials.jsonl")?;
    let summary = Summary::new(&cfg, &result);
    write(&out_dir.join("summary.json"), &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    println!("trials: {}", summary.trials);
    println!("invocations: {}", summary.invocations);
    println!("exact hits: {}", summary.exact_hits);
    println!("symmetry hits: {} ({}%)", summary.symmetry_hits, summary.symmetry_hit_percent);
    match summary.best_cost {
        Some(c) => println!("best cost: {c}"),
        None => println!("best cost: none"),
    }
    if cfg.mode == Mode::Subarch {
        match summary.deadline_met_at {
            Some(k) => println!("deadline met with {k} PEs"),
            None => println!("deadline not met"),
        }
    }
    Ok(())
}
