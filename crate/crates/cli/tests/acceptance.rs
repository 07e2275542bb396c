//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symmap::archgraph::{bus, derive_architecture_graph, hetero_bus, keystone, mesh, ring, Link, TopologyGraph};
use symmap::autos::{
    automorphism_group, count_partial_automorphisms, partial_automorphism_generators_naive,
    partial_automorphism_semigroup, SemigroupOptions,
};
use symmap::dse::{self, ClassMethod, CostModel, GaConfig, Strategy};
use symmap::grp::{direct_product, orbit_under, MappingAction, PermutationGroup, PointAction, SetAction};
use symmap::isg::{InverseSemigroup, DEFAULT_CAP};
use symmap::mapping::{act_arch, act_task, canonical_mapping, mapping_orbit, Mapping};
use symmap::{fixtures, ArchitectureGraph, Exec, PartialPermutation, Permutation};

type Check = std::result::Result<(), String>;
/// Stdout and the (path, bytes) of every file under `out/`.
type CliOutput = (String, Vec<(String, Vec<u8>)>);
type Criterion = (&'static str, fn() -> Check, Duration);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn derived(t: TopologyGraph) -> ArchitectureGraph {
    derive_architecture_graph(&t).unwrap()
}

fn mesh_graph(r: usize, c: usize) -> ArchitectureGraph {
    derived(mesh(r, c, "RISC").unwrap())
}

fn one_based(m: &[u32]) -> Mapping {
    m.iter().map(|p| p - 1).collect()
}

fn criterion_1() -> Check {
    for (name, g) in [
        ("2x2", mesh_graph(2, 2)),
        ("2x2 clockwise", derived(ring(4, "RISC").unwrap())),
        ("3x3", mesh_graph(3, 3)),
        ("4x4", mesh_graph(4, 4)),
    ] {
        let group = automorphism_group(&g);
        ensure!(group.order_u64() == Some(8), "{name}: order {}", group.order());
        ensure!(!group.is_abelian(), "{name}: abelian");
        // dihedral: a rotation of order 4 and a reflection outside it
        let elements = group.elements();
        let orders: Vec<u64> = elements
            .iter()
            .map(|p| (1..=8).find(|&k| p.pow(k).is_identity()).unwrap())
            .collect();
        ensure!(orders.iter().filter(|&&o| o == 4).count() == 2, "{name}: not dihedral");
        ensure!(orders.iter().filter(|&&o| o == 2).count() == 5, "{name}: not dihedral");
    }
    Ok(())
}

fn criterion_2() -> Check {
    let g = derived(keystone());
    let group = automorphism_group(&g);
    ensure!(group.order_u64() == Some(967_680), "order {}", group.order());
    ensure!(group.order_u64() == Some((1..=4).product::<u64>() * (1..=8).product::<u64>()), "not 4!·8!");
    for p in group.generators() {
        for v in 0..12 {
            ensure!(g.node_type(v) == g.node_type(p.apply(v as u32) as usize), "type partition moved");
        }
    }
    Ok(())
}

// Burnside: the number of orbits of subsets is the mean number of subsets
// fixed by a group element, 2^(number of cycles).
fn burnside_subset_orbits(group: &PermutationGroup) -> u64 {
    let n = group.degree();
    let mut total = 0u64;
    for p in group.elements() {
        let mut seen = vec![false; n];
        let mut cycles = 0;
        for s in 0..n {
            if !seen[s] {
                cycles += 1;
                let mut x = s;
                while !seen[x] {
                    seen[x] = true;
                    x = p.apply(x as u32) as usize;
                }
            }
        }
        total += 1 << cycles;
    }
    total / group.order_u64().unwrap()
}

fn criterion_3() -> Check {
    let g = mesh_graph(4, 4);
    let burnside = burnside_subset_orbits(&automorphism_group(&g)) - 1;
    ensure!(burnside == (65536 + 16 + 16 + 256 + 256 + 256 + 1024 + 1024) / 8 - 1, "burnside {burnside}");
    let groups = dse::enumerate_subarch_classes(&g, ClassMethod::Groups, None, Exec::Parallel).unwrap();
    ensure!(groups.len() as u64 == burnside && groups.len() == 8547, "groups: {}", groups.len());
    let iso = dse::enumerate_subarch_classes(&g, ClassMethod::InvSemi, None, Exec::Parallel).unwrap();
    ensure!(iso.len() == 6803, "inv-semi: {}", iso.len());
    Ok(())
}

const PARTIAL_AUTOMORPHISMS_4X4: u64 = 1_226_737;

fn criterion_4() -> Check {
    let count = count_partial_automorphisms(&mesh_graph(4, 4), Exec::Parallel);
    ensure!((1_000_000..=1_400_000).contains(&count), "count {count} outside [1.0e6, 1.4e6]");
    ensure!(count == PARTIAL_AUTOMORPHISMS_4X4, "count {count} differs from regression value");
    Ok(())
}

fn star(leaves: &[&str], center: &str) -> TopologyGraph {
    let mut types = vec![center.to_string()];
    types.extend(leaves.iter().map(|s| s.to_string()));
    let links = (1..types.len())
        .map(|b| Link {
            a: 0,
            b,
            resource: "noc".into(),
            hops: 1,
        })
        .collect();
    TopologyGraph::new(types, links, Vec::new()).unwrap()
}

fn path(types: &[&str]) -> TopologyGraph {
    let links = (1..types.len())
        .map(|b| Link {
            a: b - 1,
            b,
            resource: "noc".into(),
            hops: 1,
        })
        .collect();
    TopologyGraph::new(types.iter().map(|s| s.to_string()).collect(), links, Vec::new()).unwrap()
}

fn criterion_5() -> Check {
    let mut graphs: Vec<(String, TopologyGraph)> = (2..=5).map(|k| (format!("mesh 1x{k}"), mesh(1, k, "R").unwrap())).collect();
    graphs.push(("mesh 2x2".into(), mesh(2, 2, "R").unwrap()));
    graphs.push(("star 4".into(), star(&["R", "R", "R", "R"], "R")));
    graphs.push(("star 3 hetero".into(), star(&["A", "B", "A"], "C")));
    graphs.push(("path ABAB".into(), path(&["A", "B", "A", "B"])));
    graphs.push(("path AABAA".into(), path(&["A", "A", "B", "A", "A"])));
    graphs.push(("bus 2+3".into(), bus(&[("A", 2), ("B", 3)]).unwrap()));
    graphs.push(("ring 5".into(), ring(5, "R").unwrap()));
    for (name, t) in graphs {
        let g = derived(t);
        let n = g.node_count();
        let closure = |gens: &[PartialPermutation]| -> HashSet<PartialPermutation> {
            InverseSemigroup::from_generators(n, gens, DEFAULT_CAP).unwrap().elements().collect()
        };
        let naive = closure(&partial_automorphism_generators_naive(&g, DEFAULT_CAP).unwrap());
        for seed in [false, true] {
            let options = SemigroupOptions {
                seed_with_group: seed,
                cap: DEFAULT_CAP,
            };
            let fast = closure(&partial_automorphism_semigroup(&g, options).unwrap().generators);
            ensure!(fast == naive, "{name} (seeded {seed}): closures differ");
        }
        let mut empty_included = naive.len() as u64;
        if !naive.contains(&PartialPermutation::empty(n)) {
            empty_included += 1;
        }
        ensure!(
            empty_included == count_partial_automorphisms(&g, Exec::Sequential),
            "{name}: closure is not the set of all partial automorphisms"
        );
    }
    Ok(())
}

fn criterion_6() -> Check {
    let f = PartialPermutation::from_one_based(16, &[(1, 13), (5, 9), (6, 10), (7, 11), (8, 12), (12, 8)]).unwrap();
    let g = PartialPermutation::from_one_based(16, &[(1, 2), (5, 6), (9, 10), (13, 14)]).unwrap();
    ensure!(f.then(&g) == PartialPermutation::from_one_based(16, &[(1, 14), (5, 10)]).unwrap(), "gf");
    let gg = g.then(&g.inverse());
    ensure!(gg == PartialPermutation::partial_identity(16, &[0, 4, 8, 12]).unwrap(), "g g^-1");
    ensure!(gg.is_idempotent() && !g.is_idempotent(), "idempotents");

    let m1 = one_based(&[2, 3, 3, 3, 4, 4, 4, 1]);
    let tau = Permutation::from_one_based(&[3, 4, 1, 2]).unwrap();
    let pi = Permutation::from_one_based(&[1, 5, 6, 7, 2, 3, 4, 8]).unwrap();
    ensure!(act_arch(&tau, &m1).unwrap() == one_based(&[4, 1, 1, 1, 2, 2, 2, 3]), "tau m1");
    ensure!(act_task(&pi, &m1).unwrap() == one_based(&[2, 4, 4, 4, 3, 3, 3, 1]), "pi m1");

    let g4 = automorphism_group(&mesh_graph(4, 4));
    let corners: Vec<u32> = orbit_under(g4.generators(), &0, &PointAction);
    ensure!(corners == vec![0, 3, 12, 15], "corner orbit {corners:?}");
    ensure!(g4.canonical_rep(&12, &PointAction) == 0, "canonical corner");

    let inv_rot = Permutation::from_one_based(&[3, 1, 4, 2]).unwrap();
    ensure!(inv_rot.inverse() == inv_rot.pow(3), "rot90 inverse");
    Ok(())
}

fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Permutation {
    let mut v: Vec<u32> = (0..n as u32).collect();
    v.shuffle(rng);
    Permutation::from_images(v).unwrap()
}

fn random_partial(rng: &mut ChaCha8Rng, n: usize) -> PartialPermutation {
    let mut img: Vec<u32> = (0..n as u32).collect();
    img.shuffle(rng);
    let pairs: Vec<(u32, u32)> = (0..n as u32).filter(|_| rng.gen_bool(0.6)).map(|x| (x, img[x as usize])).collect();
    PartialPermutation::from_pairs(n, &pairs).unwrap()
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    const CASES: usize = 200;
    // group axioms on random small groups, against brute-force closure
    for _ in 0..CASES / 4 {
        let n = 5;
        let gens: Vec<Permutation> = (0..rng.gen_range(1..3)).map(|_| random_perm(&mut rng, n)).collect();
        let g = PermutationGroup::from_generators(n, gens.clone()).unwrap();
        let mut closure: HashSet<Permutation> = HashSet::from([Permutation::identity(n)]);
        let mut frontier = vec![Permutation::identity(n)];
        while let Some(x) = frontier.pop() {
            for s in &gens {
                let y = x.then(s);
                if closure.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        ensure!(g.order_u64() == Some(closure.len() as u64), "order vs closure");
        for a in closure.iter().take(6) {
            ensure!(closure.contains(&a.inverse()), "inverse missing");
            for b in closure.iter().take(6) {
                ensure!(closure.contains(&a.then(b)), "not closed");
                let c = random_perm(&mut rng, n);
                ensure!(a.then(b).then(&c) == a.then(&b.then(&c)), "associativity");
            }
            ensure!(a.then(&Permutation::identity(n)) == *a, "identity");
        }
        let p = random_perm(&mut rng, n);
        ensure!(g.contains(&p).unwrap() == closure.contains(&p), "membership");
    }
    // inverse-semigroup laws
    for _ in 0..CASES {
        let n = 7;
        let t = random_partial(&mut rng, n);
        let ti = t.inverse();
        ensure!(t.then(&ti).then(&t) == t && ti.then(&t).then(&ti) == ti, "t t^-1 t != t");
        ensure!(t.then(&ti).is_idempotent(), "t t^-1 idempotent");
        let i: Vec<u32> = (0..n as u32).filter(|_| rng.gen_bool(0.5)).collect();
        let f: Vec<u32> = (0..n as u32).filter(|_| rng.gen_bool(0.5)).collect();
        let both: Vec<u32> = i.iter().copied().filter(|x| f.contains(x)).collect();
        let (pi, pf) = (
            PartialPermutation::partial_identity(n, &i).unwrap(),
            PartialPermutation::partial_identity(n, &f).unwrap(),
        );
        let meet = PartialPermutation::partial_identity(n, &both).unwrap();
        ensure!(pi.then(&pf) == meet && pf.then(&pi) == meet, "partial identities do not commute");
    }
    // actions, orbits and canonical mappings on the audio filter
    let arch = derived(ring(4, "RISC").unwrap());
    let (tg, h) = fixtures::task_graph("audio_filter").unwrap();
    let gh = direct_product(automorphism_group(&arch), h.into_group());
    let model = CostModel::from_task_graph(&tg, 1);
    let g_elems = gh.arch.elements();
    let h_elems = gh.tasks.elements();
    for _ in 0..CASES {
        let m: Mapping = (0..8).map(|_| rng.gen_range(0..4)).collect();
        let g = g_elems.choose(&mut rng).unwrap();
        let hh = h_elems.choose(&mut rng).unwrap();
        let gm = act_arch(g, &m).unwrap();
        ensure!(act_task(hh, &gm).unwrap() == act_arch(g, &act_task(hh, &m).unwrap()).unwrap(), "commutativity");
        let moved = act_task(hh, &gm).unwrap();
        let orbit = mapping_orbit(&gh, &m).unwrap();
        ensure!(orbit.contains(&moved), "orbit misses an image");
        ensure!(orbit == mapping_orbit(&gh, &moved).unwrap(), "orbits not a partition");
        ensure!(16 % orbit.len() == 0, "orbit size does not divide |G x H|");
        let canon = canonical_mapping(&gh, &m).unwrap();
        ensure!(canon == orbit[0] && canon == canonical_mapping(&gh, &moved).unwrap(), "canonical mapping");
        ensure!(gh.arch.canonical_rep(&m, &MappingAction) == gh.arch.min_image(&m), "min image");
        let cost = dse::evaluate_cost(&model, &tg, &arch, &m).unwrap();
        ensure!(cost == dse::evaluate_cost(&model, &tg, &arch, &moved).unwrap(), "cost not invariant");
        let set: Vec<u32> = (0..4).filter(|_| rng.gen_bool(0.5)).collect();
        let orbit = orbit_under(gh.arch.generators(), &set, &SetAction);
        ensure!(orbit.contains(&set) && 8 % orbit.len() == 0, "set orbit");
    }
    // every bundled fixture's cost is invariant under its G x H on Keystone
    let keystone_graph = derived(keystone());
    let ka = automorphism_group(&keystone_graph);
    for (name, _) in fixtures::TASK_GRAPHS {
        let (tg, h) = fixtures::task_graph(name).unwrap();
        let model = CostModel::from_task_graph(&tg, 2);
        for _ in 0..100 {
            let m: Mapping = (0..tg.task_count()).map(|_| rng.gen_range(0..12)).collect();
            let base = dse::evaluate_cost(&model, &tg, &keystone_graph, &m).unwrap();
            for g in ka.generators() {
                let moved = act_arch(g, &m).unwrap();
                ensure!(base == dse::evaluate_cost(&model, &tg, &keystone_graph, &moved).unwrap(), "{name}: G");
            }
            for hh in h.group().generators() {
                let moved = act_task(hh, &m).unwrap();
                ensure!(base == dse::evaluate_cost(&model, &tg, &keystone_graph, &moved).unwrap(), "{name}: H");
            }
        }
    }
    Ok(())
}

fn criterion_8() -> Check {
    // With a trivial task group the architecture group still relates
    // mappings, so on Keystone trivial-H fixtures do get symmetry hits.
    // Zero hits are required where the whole G x H is trivial: an
    // asymmetric heterogeneous path.
    let asymmetric = derived(path(&["ARM", "ARM", "DSP", "ARM", "DSP"]));
    ensure!(automorphism_group(&asymmetric).is_trivial(), "asymmetric fixture has symmetries");
    let mut strict = false;
    for (arch_name, arch) in [("keystone", derived(keystone())), ("asymmetric", asymmetric)] {
        let ga = automorphism_group(&arch);
        for (name, _) in fixtures::TASK_GRAPHS {
            let (tg, h) = fixtures::task_graph(name).unwrap();
            let trivial = h.group().is_trivial();
            let gh = direct_product(ga.clone(), h.into_group());
            let model = CostModel::from_task_graph(&tg, 1);
            let mut line = Vec::new();
            for seed in 1..=5 {
                let mut cfg = GaConfig {
                    generations: 50,
                    seed,
                    ..GaConfig::default()
                };
                let on = dse::ga_explore(&cfg, &tg, &arch, &gh, &model, Exec::Parallel).unwrap();
                cfg.symmetry_cache = false;
                let off = dse::ga_explore(&cfg, &tg, &arch, &gh, &model, Exec::Parallel).unwrap();
                ensure!(
                    on.best_per_generation == off.best_per_generation,
                    "{arch_name}/{name}/{seed}: trajectories differ"
                );
                ensure!(on.invocations <= off.invocations, "{arch_name}/{name}/{seed}: more invocations with symmetry");
                ensure!(off.symmetry_hits == 0, "{arch_name}/{name}/{seed}: plain cache reported symmetry hits");
                if ["sobel", "mjpeg", "audio_filter"].contains(name) && on.invocations < off.invocations {
                    strict = true;
                }
                if trivial && ga.is_trivial() {
                    ensure!(on.symmetry_hits == 0, "{arch_name}/{name}/{seed}: {} symmetry hits", on.symmetry_hits);
                }
                line.push(format!("{}/{} ({} sym)", on.invocations, off.invocations, on.symmetry_hits));
            }
            println!("    {arch_name:<10} {name:<12} invocations {}", line.join("  "));
        }
    }
    ensure!(strict, "symmetry cache never saved an invocation");
    Ok(())
}

fn criterion_9() -> Check {
    let cases = [
        ("mesh3x3", derived(mesh(3, 3, "RISC").unwrap()), "audio_filter"),
        ("mesh3x3", derived(mesh(3, 3, "RISC").unwrap()), "mjpeg"),
        ("hetero_bus", derived(hetero_bus()), "mjpeg"),
        ("hetero_bus", derived(hetero_bus()), "sobel"),
    ];
    let mut strict = false;
    let mut simple_missed = false;
    for (arch_name, arch, tg_name) in &cases {
        let (tg, _) = fixtures::task_graph(tg_name).unwrap();
        let model = CostModel::from_task_graph(&tg, 1);
        let run = |s| dse::subarch_explore(s, &tg, arch, &model, None, 1, Exec::Parallel).unwrap();
        let (bf, gr, is, simple) = (
            run(Strategy::BruteForce),
            run(Strategy::Groups),
            run(Strategy::InvSemi),
            run(Strategy::Simple),
        );
        for k in 0..arch.node_count() {
            let (a, b, c) = (&bf.per_size[k], &gr.per_size[k], &is.per_size[k]);
            ensure!(
                a.best_cost == b.best_cost && a.best_cost == c.best_cost,
                "{arch_name}/{tg_name} size {}: best costs differ",
                k + 1
            );
            ensure!(c.trials <= b.trials && b.trials <= a.trials, "{arch_name}/{tg_name}: trial order");
            strict |= c.trials < b.trials || b.trials < a.trials;
            if *arch_name == "hetero_bus" && simple.per_size[k].best_cost > a.best_cost {
                simple_missed = true;
            }
        }
        println!(
            "    {arch_name}/{tg_name}: trials brute-force {} groups {} inv-semi {} simple {}",
            bf.trials.len(),
            gr.trials.len(),
            is.trials.len(),
            simple.trials.len()
        );
    }
    ensure!(strict, "no strict reduction in trials");
    ensure!(simple_missed, "simple strategy matched every per-size optimum");
    Ok(())
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<CliOutput, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_symmap"))
        .args(args)
        .current_dir(dir)
        .env_remove("SYMMAP_CACHE_DIR")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    let mut files = Vec::new();
    for entry in walk(&dir.join("out")) {
        let bytes = std::fs::read(&entry).unwrap();
        files.push((entry.strip_prefix(dir).unwrap().display().to_string(), bytes));
    }
    files.sort();
    Ok((String::from_utf8_lossy(&out.stdout).into_owned(), files))
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    if let Ok(entries) = std::fs::read_dir(dir) {
        for e in entries.flatten() {
            let p = e.path();
            if p.is_dir() {
                out.extend(walk(&p));
            } else {
                out.push(p);
            }
        }
    }
    out
}

fn criterion_10() -> Check {
    let commands: Vec<Vec<&str>> = vec![
        vec!["autos", "preset:parallella", "--out", "out/g.json"],
        vec!["autos", "preset:mesh3x3", "--mode", "semigroup", "--seed-group", "--cache-dir", "cache", "--out", "out/s.json"],
        vec!["canon", "preset:ring4", "fixture:audio_filter", "m1.json"],
        vec!["classes", "preset:parallella", "--method", "inv-semi", "--out", "out/c.json"],
        vec!["dse", "ga.json", "--out-dir", "out/ga"],
        vec!["dse", "sa.json", "--out-dir", "out/sa"],
        vec!["report", "out/sa"],
    ];
    let mut runs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        std::fs::create_dir(dir.path().join("out")).unwrap();
        std::fs::write(dir.path().join("m1.json"), "[2,3,3,3,4,4,4,1]").unwrap();
        std::fs::write(
            dir.path().join("ga.json"),
            r#"{"architecture": "preset:keystone", "task_graph": "fixture:sobel", "mode": "ga", "seed": 9, "ga": {"generations": 20}}"#,
        )
        .unwrap();
        std::fs::write(
            dir.path().join("sa.json"),
            r#"{"architecture": "preset:mesh3x3", "task_graph": "fixture:audio_filter", "mode": "subarch", "seed": 9, "subarch": {"strategy": "groups"}}"#,
        )
        .unwrap();
        let mut outputs = Vec::new();
        for args in &commands {
            outputs.push(run_cli(dir.path(), args)?);
        }
        // a second autos call in the same workspace is served from the cache
        outputs.push(run_cli(dir.path(), &commands[1])?);
        runs.push(outputs);
    }
    for (i, (a, b)) in runs[0].iter().zip(&runs[1]).enumerate() {
        let label = commands.get(i).map_or("cached autos".to_string(), |c| c.join(" "));
        ensure!(a.0 == b.0, "stdout differs for `{label}`");
        ensure!(a.1 == b.1, "output files differ for `{label}`");
    }
    let semigroup_file = |o: &CliOutput| o.1.iter().find(|f| f.0.ends_with("s.json")).cloned();
    let (computed, cached) = (&runs[0][1], &runs[0][commands.len()]);
    ensure!(
        computed.0 == cached.0 && semigroup_file(computed) == semigroup_file(cached),
        "cached autos differs from the computed one"
    );
    Ok(())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("mesh automorphism groups are dihedral of order 8", criterion_1, Duration::from_secs(1)),
        ("Keystone group has order 967680 and keeps PE types", criterion_2, Duration::from_secs(5)),
        ("4x4 sub-architecture classes: 8547 groups, 6803 inv-semi", criterion_3, Duration::from_secs(300)),
        ("4x4 partial automorphism count", criterion_4, Duration::from_secs(120)),
        ("generator search agrees with exhaustive search", criterion_5, Duration::from_secs(60)),
        ("worked examples", criterion_6, Duration::from_secs(1)),
        ("algebraic property suites", criterion_7, Duration::from_secs(60)),
        ("GA symmetry cache", criterion_8, Duration::from_secs(300)),
        ("sub-architecture strategies", criterion_9, Duration::from_secs(300)),
        ("CLI determinism", criterion_10, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (title, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = match catch_unwind(AssertUnwindSafe(check)) {
            Ok(r) => r,
            Err(p) => Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into())),
        };
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|()| {
            if elapsed > *budget {
                Err(format!("took {elapsed:.2?}, budget {budget:?}"))
            } else {
                Ok(())
            }
        });
        match outcome {
            Ok(()) => println!("criterion {:>2}: PASS  {title} ({elapsed:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {title} ({elapsed:.2?}): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
