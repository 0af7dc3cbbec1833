//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p quekno --test acceptance`. Criterion 5 is a soft
//! statistical band: it prints FAIL (soft) when outside the band but does not
//! fail the run.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use common::*;
use quekno::generator::{generate, GraphSize, Objective, QueknoMetadata, QueknoSpec};
use quekno::graph::{embeddable, EmbedOutcome};
use quekno::perm::PermType;
use quekno::route::{self, RouterConfig};
use quekno::suite::{self, SuiteConfig};
use quekno::verify::{self, brute_force_optimal, execute_transcript};
use quekno::{ArchitectureGraph, Circuit, Gate, Permutation, Subgraph, SwapCircuit};

struct Outcome {
    pass: bool,
    soft: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome {
        pass,
        soft: false,
        detail,
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    o.detail = format!("{} [{:.1}s]", o.detail, took.as_secs_f64());
    if let Some(limit) = limit {
        if took > limit {
            o.pass = false;
            o.detail = format!("{} exceeds {}s", o.detail, limit.as_secs());
        }
    }
    o
}

fn main() {
    let mut hard_failures = 0;
    let corpus = criterion3_corpus();
    let results: Vec<(usize, Outcome)> = vec![
        (1, timed(Some(Duration::from_secs(1)), criterion1)),
        (2, timed(Some(Duration::from_secs(300)), criterion2)),
        (3, timed(Some(Duration::from_secs(600)), || criterion3(&corpus))),
        (4, timed(None, criterion4)),
        (5, timed(None, criterion5)),
        (6, timed(None, criterion6)),
        (7, timed(None, criterion7)),
        (8, timed(Some(Duration::from_secs(300)), criterion8)),
        (9, timed(None, || criterion9(&corpus))),
    ];
    for (n, o) in results {
        let tag = match (o.pass, o.soft) {
            (true, _) => "PASS",
            (false, true) => "FAIL (soft)",
            (false, false) => {
                hard_failures += 1;
                "FAIL"
            }
        };
        println!("criterion {n}: {tag}: {}", o.detail);
    }
    if hard_failures > 0 {
        println!("{hard_failures} hard criteria failed");
        std::process::exit(1);
    }
}

// 1. Worked example through the pipeline.
fn criterion1() -> Outcome {
    let ag = grid();
    let b = example_benchmark();
    let circuit_ok = b.circuit == compact(6, EXAMPLE);
    let replay = verify::replay(&b.circuit, &b.metadata, &ag).unwrap();
    let physical = execute_transcript(&b.circuit, &ag, &replay.transcript).unwrap().physical;
    let swaps: Vec<&Gate> = physical
        .gates()
        .iter()
        .filter(|g| matches!(g, Gate::Swap { .. }))
        .collect();
    let swap_ok = swaps == vec![&Gate::swap(0, 1)];
    let rho_ok = replay.report.rho_gate == Some(Ratio::new(12, 9));
    let opt = brute_force_optimal(&b.circuit, &ag, 3).unwrap();
    outcome(
        circuit_ok && swap_ok && rho_ok && opt == Some(1),
        format!(
            "circuit matches: {circuit_ok}, inserted swaps {swaps:?}, rho_gate {:?}, oracle {opt:?}",
            replay.report.rho_gate
        ),
    )
}

fn grid_spec(cost: usize, perm_type: PermType, seed: u64) -> QueknoSpec {
    QueknoSpec {
        ag_name: "grid2x3".into(),
        objective: Objective::Gate,
        target_cost: cost,
        perm_type,
        graph_size: GraphSize::Edges(4),
        qbg_ratio: if seed.is_multiple_of(2) { 1.5 } else { 2.55 },
        seed,
    }
}

struct GridCase {
    circuit: Circuit,
    meta: QueknoMetadata,
    optimum: Option<usize>,
}

fn grid_cases() -> Vec<GridCase> {
    let ag = grid();
    (0..200u64)
        .into_par_iter()
        .map(|i| {
            let cost = 1 + (i % 3) as usize;
            let pt = if (i / 3) % 2 == 0 { PermType::Opt1 } else { PermType::Opt2 };
            let b = generate(&grid_spec(cost, pt, 1000 + i)).unwrap();
            let optimum = brute_force_optimal(&b.circuit, &ag, b.metadata.known_cost).unwrap();
            GridCase {
                circuit: b.circuit,
                meta: b.metadata,
                optimum,
            }
        })
        .collect()
}

// 2. The optimum is at most known_cost, and equals it for strong cost-1 chains.
fn criterion2() -> Outcome {
    let cases = grid_cases();
    let bounded = cases.iter().filter(|c| c.optimum.is_some()).count();
    let strong_one: Vec<&GridCase> = cases
        .iter()
        .filter(|c| c.meta.known_cost == 1 && c.meta.all_strong())
        .collect();
    let equal = strong_one.iter().filter(|c| c.optimum == Some(1)).count();
    let strong_lower = cases
        .iter()
        .filter(|c| c.meta.boundaries.iter().any(|b| b.strong))
        .all(|c| c.optimum.is_some_and(|o| o >= 1));
    outcome(
        bounded == cases.len() && equal == strong_one.len() && !strong_one.is_empty() && strong_lower,
        format!(
            "optimum <= known_cost on {bounded}/{}; strong cost-1 equality {equal}/{}; strong chains need >= 1 swap: {strong_lower}",
            cases.len(),
            strong_one.len()
        ),
    )
}

struct CorpusItem {
    ag: &'static str,
    circuit: Circuit,
    meta: QueknoMetadata,
}

fn criterion3_corpus() -> Vec<CorpusItem> {
    const AGS: [&str; 3] = ["tokyo", "rochester", "sycamore54"];
    (0..1000u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE ^ i);
            let ag = AGS[(i % 3) as usize];
            let objective = if (i / 3) % 2 == 0 { Objective::Gate } else { Objective::Depth };
            let (perm_type, cost) = match objective {
                Objective::Gate => (
                    *[PermType::Opt1, PermType::Opt2].choose(&mut rng).unwrap(),
                    *suite::default_costs(objective).choose(&mut rng).unwrap(),
                ),
                Objective::Depth => (
                    PermType::Parallel,
                    *suite::default_costs(objective).choose(&mut rng).unwrap(),
                ),
            };
            let spec = QueknoSpec {
                ag_name: ag.into(),
                objective,
                target_cost: cost,
                perm_type,
                graph_size: *GraphSize::default_for(ag).choose(&mut rng).unwrap(),
                qbg_ratio: *[1.5, 2.55].choose(&mut rng).unwrap(),
                seed: rng.gen(),
            };
            let b = generate(&spec).unwrap();
            CorpusItem {
                ag,
                circuit: b.circuit,
                meta: b.metadata,
            }
        })
        .collect()
}

// 3. Every generated circuit replays with exactly the planted cost.
fn criterion3(corpus: &[CorpusItem]) -> Outcome {
    let bad: Vec<String> = corpus
        .par_iter()
        .filter_map(|item| {
            let ag = ArchitectureGraph::builtin(item.ag).unwrap();
            let r = verify::replay(&item.circuit, &item.meta, &ag).ok()?;
            let cost = r.cost(item.meta.spec.objective);
            (!r.report.valid || cost != item.meta.known_cost).then(|| {
                format!("seed {} cost {cost} vs {}", item.meta.seed, item.meta.known_cost)
            })
        })
        .collect();
    let weak = corpus.iter().filter(|c| !c.meta.all_strong()).count();
    outcome(
        bad.is_empty(),
        format!(
            "{}/{} replays valid with cost = known_cost ({} chains contain a weak link){}",
            corpus.len() - bad.len(),
            corpus.len(),
            weak,
            bad.first().map(|b| format!("; first failure {b}")).unwrap_or_default()
        ),
    )
}

fn suite_dir_count(ag: &str, objective: Objective, seed: u64) -> (usize, usize, Vec<QueknoMetadata>) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SuiteConfig::standard(ag, objective, seed);
    let summaries = suite::generate_suite(&cfg, dir.path()).unwrap();
    let qasm = std::fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "qasm"))
        .count();
    let metas = suite::load_suite(dir.path())
        .unwrap()
        .into_iter()
        .map(|e| e.unwrap().metadata)
        .collect();
    (summaries.len(), qasm, metas)
}

// 4. Suite shapes.
fn criterion4() -> Outcome {
    let expect = [
        ("rochester", Objective::Gate, 400),
        ("rochester", Objective::Depth, 240),
        ("tokyo", Objective::Gate, 200),
        ("tokyo", Objective::Depth, 120),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (ag, obj, n) in expect {
        let (manifest, files, _) = suite_dir_count(ag, obj, 42);
        ok &= manifest == n && files == n;
        parts.push(format!("{ag}/{obj} {files} (expected {n})"));
    }
    outcome(ok, parts.join(", "))
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

// 5. Suite statistics (soft band).
fn criterion5() -> Outcome {
    let (_, _, gate) = suite_dir_count("rochester", Objective::Gate, 42);
    let (_, _, depth) = suite_dir_count("rochester", Objective::Depth, 42);
    let g: Vec<f64> = gate.iter().map(|m| m.known_rho).collect();
    let d: Vec<f64> = depth.iter().map(|m| m.known_rho).collect();
    let g_mean = mean(&g);
    let g_max = g.iter().cloned().fold(0.0, f64::max);
    let d_mean = mean(&d);
    let d_above = d.iter().filter(|&&r| r > 1.5).count();
    let gate_ok = (g_mean - 1.19).abs() <= 0.10 && g_max <= 1.6;
    let depth_ok = (d_mean - 1.40).abs() <= 0.20 && d_above as f64 <= 0.25 * d.len() as f64;
    Outcome {
        pass: gate_ok && depth_ok,
        soft: true,
        detail: format!(
            "gate mean {g_mean:.4} max {g_max:.4} ({}); depth mean {d_mean:.4}, {d_above}/{} above 1.5 ({})",
            if gate_ok { "in band" } else { "outside band" },
            d.len(),
            if depth_ok { "in band" } else { "outside band, flagged for distribution review" }
        ),
    }
}

// 6. Depth ratio scaling and orderings on the Rochester depth grid.
fn criterion6() -> Outcome {
    let mut cfg = SuiteConfig::standard("rochester", Objective::Depth, 6);
    cfg.costs = vec![1, 2, 3, 4, 5];
    cfg.count = 40;
    let metas: Vec<QueknoMetadata> = suite::generate_all(&cfg)
        .unwrap()
        .into_iter()
        .map(|(_, b)| b.metadata)
        .collect();
    let cells = suite::cell_stats(&metas);
    let mut series: BTreeMap<(String, u64), BTreeMap<usize, f64>> = BTreeMap::new();
    for c in &cells {
        series
            .entry((c.graph_size.to_string(), c.qbg_ratio.to_bits()))
            .or_default()
            .insert(c.target_cost, c.mean_known_rho);
    }
    let mut linear = true;
    let mut notes = Vec::new();
    for ((size, bits), s) in &series {
        let r1 = s[&1] - 1.0;
        let worst = s.iter().map(|(&c, &r)| (r - 1.0) / c as f64).fold(0.0, f64::max);
        let grows = s[&5] > s[&1];
        linear &= worst <= 1.25 * r1 + 0.05 && grows;
        notes.push(format!(
            "{size}/{}: {:.3}..{:.3}",
            f64::from_bits(*bits),
            s[&1],
            s[&5]
        ));
    }
    let avg = |size: &str, ratio: f64| mean(&series[&(size.to_string(), ratio.to_bits())].values().cloned().collect::<Vec<_>>());
    let tfl_qse = ["small", "large"].iter().all(|s| avg(s, 1.5) > avg(s, 2.55));
    let small_large = [1.5, 2.55].iter().all(|&r| avg("small", r) > avg("large", r));
    outcome(
        linear && tfl_qse && small_large,
        format!(
            "at most linear: {linear}; TFL > QSE: {tfl_qse}; small > large: {small_large}; {}",
            notes.join(", ")
        ),
    )
}

// Independent permutation helpers for criterion 7.
fn comp(outer: &[usize], inner: &[usize]) -> Vec<usize> {
    inner.iter().map(|&i| outer[i]).collect()
}

fn inv(p: &[usize]) -> Vec<usize> {
    let mut out = vec![0; p.len()];
    for (i, &v) in p.iter().enumerate() {
        out[v] = i;
    }
    out
}

/// Permutation implemented by swapping the contents of positions left to
/// right: token at `v` ends at `result[v]`.
fn by_tokens(n: usize, swaps: &[(usize, usize)]) -> Vec<usize> {
    let mut at: Vec<usize> = (0..n).collect();
    for &(a, b) in swaps {
        for x in at.iter_mut() {
            if *x == a {
                *x = b;
            } else if *x == b {
                *x = a;
            }
        }
    }
    at
}

// 7. Permutation algebra.
fn criterion7() -> Outcome {
    let a = Permutation::transposition(6, 0, 1);
    let b = Permutation::transposition(6, 1, 3);
    let ex1 = Permutation::compose(&b, &a).unwrap().as_slice() == [3, 0, 2, 1, 4, 5];
    let ex2 = Permutation::compose(&a, &b).unwrap().as_slice() == [1, 3, 2, 0, 4, 5];
    let ags: Vec<ArchitectureGraph> = ["grid2x3", "tokyo", "rochester", "sycamore54"]
        .iter()
        .map(|n| ArchitectureGraph::builtin(n).unwrap())
        .collect();
    let failures: usize = (0..100_000u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(i);
            let dev = &ags[(i % 4) as usize];
            let n = dev.vertex_count();
            let p = Permutation::random(n, &mut rng);
            let q = Permutation::random(n, &mut rng);
            let r = Permutation::random(n, &mut rng);
            let pq = Permutation::compose(&p, &q).unwrap();
            let mut ok = pq.as_slice() == comp(p.as_slice(), q.as_slice()).as_slice();
            ok &= Permutation::compose(&pq, &r).unwrap()
                == Permutation::compose(&p, &Permutation::compose(&q, &r).unwrap()).unwrap();
            ok &= Permutation::compose(&p, &p.inverse()).unwrap().is_identity();
            ok &= p.inverse().as_slice() == inv(p.as_slice()).as_slice();
            ok &= pq.inverse() == Permutation::compose(&q.inverse(), &p.inverse()).unwrap();
            let mut draw = |len: usize| -> Vec<(usize, usize)> {
                (0..len)
                    .map(|_| {
                        let e = dev.edges()[rng.gen_range(0..dev.edge_count())];
                        (e.0, e.1)
                    })
                    .collect()
            };
            let s1 = draw(1 + (i % 5) as usize);
            let s2 = draw(1 + (i % 7) as usize);
            let p1 = SwapCircuit::new(s1.clone()).to_permutation(dev).unwrap();
            let p2 = SwapCircuit::new(s2.clone()).to_permutation(dev).unwrap();
            let both = SwapCircuit::new(s1.clone()).concat(&SwapCircuit::new(s2.clone()));
            let p12 = both.to_permutation(dev).unwrap();
            ok &= p12 == Permutation::compose(&p2, &p1).unwrap();
            let all: Vec<(usize, usize)> = s1.iter().chain(&s2).copied().collect();
            ok &= p12.as_slice() == by_tokens(n, &all).as_slice();
            usize::from(!ok)
        })
        .sum();
    outcome(
        ex1 && ex2 && failures == 0,
        format!("worked compositions: {ex1}, {ex2}; 100000 random cases, {failures} failures"),
    )
}

fn all_injective_maps_embed(src: &Subgraph, tgt: &ArchitectureGraph) -> bool {
    let verts: Vec<usize> = src.vertices.iter().copied().collect();
    let index: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let edges: Vec<(usize, usize)> = src.edges.iter().map(|e| (index[&e.0], index[&e.1])).collect();
    let n = tgt.vertex_count();
    let mut image = vec![usize::MAX; verts.len()];
    let mut used = vec![false; n];
    fn rec(
        k: usize,
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        edges: &[(usize, usize)],
        tgt: &ArchitectureGraph,
    ) -> bool {
        if k == image.len() {
            return edges.iter().all(|&(a, b)| tgt.has_edge(image[a], image[b]));
        }
        for v in 0..tgt.vertex_count() {
            if !used[v] {
                used[v] = true;
                image[k] = v;
                if rec(k + 1, image, used, edges, tgt) {
                    used[v] = false;
                    return true;
                }
                used[v] = false;
            }
        }
        false
    }
    verts.len() <= n && rec(0, &mut image, &mut used, &edges, tgt)
}

fn connected(k: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; k];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == v && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen.iter().all(|&s| s)
}

fn permutations_of(k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for i in 0..k {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=i).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, i);
                    q
                })
            })
            .collect();
    }
    out
}

/// One representative per isomorphism class of connected graphs on `k`
/// vertices (as edge lists over 0..k).
fn connected_graphs(k: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect();
    let perms = permutations_of(k);
    let mut classes: BTreeSet<u32> = BTreeSet::new();
    let mut reps = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> = (0..pairs.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| pairs[i])
            .collect();
        if !connected(k, &edges) {
            continue;
        }
        let canon = perms
            .iter()
            .map(|p| {
                edges.iter().fold(0u32, |acc, &(a, b)| {
                    let (x, y) = (p[a].min(p[b]), p[a].max(p[b]));
                    acc | 1 << pairs.iter().position(|&e| e == (x, y)).unwrap()
                })
            })
            .min()
            .unwrap();
        if classes.insert(canon) {
            reps.push(edges);
        }
    }
    reps
}

fn random_connected(n: usize, extra: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (a, b) = (order[i], order[j]);
        edges.insert((a.min(b), a.max(b)));
    }
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    edges.into_iter().collect()
}

fn subgraph_of(k: usize, edges: &[(usize, usize)]) -> Subgraph {
    let mut s = Subgraph::from_edges(edges.iter().copied());
    s.vertices.extend(0..k);
    s
}

// 8. Backtracking embeddability agrees with exhaustive enumeration.
fn criterion8() -> Outcome {
    let mut sources: Vec<Subgraph> = Vec::new();
    for k in 1..=6 {
        sources.extend(connected_graphs(k).iter().map(|e| subgraph_of(k, e)));
    }
    let classes = sources.len();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut targets = vec![grid()];
    for i in 0..50 {
        let extra = rng.gen_range(0..12);
        let e = random_connected(8, extra, &mut rng);
        targets.push(ArchitectureGraph::new(format!("rand8_{i}"), 8, e).unwrap());
    }
    let mut cases: Vec<(Subgraph, usize)> = Vec::new();
    for s in &sources {
        for t in 0..targets.len() {
            cases.push((s.clone(), t));
        }
    }
    while cases.len() < 10_000 {
        let k = rng.gen_range(2..=7);
        let extra = rng.gen_range(0..6);
        let e = random_connected(k, extra, &mut rng);
        cases.push((subgraph_of(k, &e), rng.gen_range(0..targets.len())));
    }
    let disagreements: Vec<String> = cases
        .par_iter()
        .filter_map(|(s, t)| {
            let tgt = &targets[*t];
            let expected = all_injective_maps_embed(s, tgt);
            let got = embeddable(s, tgt);
            let agree = match &got {
                EmbedOutcome::Found(emb) => expected && emb.is_valid(s, tgt),
                EmbedOutcome::NotEmbeddable => !expected,
                EmbedOutcome::Inconclusive => false,
            };
            (!agree).then(|| format!("{:?} into {}", s.edges, tgt.name()))
        })
        .collect();
    outcome(
        classes == 143 && disagreements.is_empty(),
        format!(
            "{classes} connected source classes, {} targets, {} cases, {} disagreements{}",
            targets.len(),
            cases.len(),
            disagreements.len(),
            disagreements.first().map(|d| format!("; first {d}")).unwrap_or_default()
        ),
    )
}

// 9. Router validity and quality against the oracle.
fn criterion9(corpus: &[CorpusItem]) -> Outcome {
    let invalid = corpus
        .par_iter()
        .filter(|item| {
            let ag = ArchitectureGraph::builtin(item.ag).unwrap();
            let cfg = RouterConfig {
                objective: item.meta.spec.objective,
                seed: item.meta.seed,
                restarts: 4,
                ..RouterConfig::default()
            };
            let t = route::greedy_route(&item.circuit, &ag, &cfg).unwrap();
            !verify::validate_transcript(&item.circuit, &ag, &t).valid
        })
        .count();
    let ag = grid();
    let cases = grid_cases();
    let results: Vec<(usize, usize, usize, bool)> = cases
        .par_iter()
        .map(|c| {
            let cfg = RouterConfig {
                seed: c.meta.seed,
                ..RouterConfig::default()
            };
            let r = route::route(&c.circuit, &ag, &cfg).unwrap();
            let optimum = brute_force_optimal(&c.circuit, &ag, r.report.swap_count)
                .unwrap()
                .expect("the router's own cost bounds the optimum");
            (c.meta.known_cost, r.report.swap_count, optimum, r.report.valid)
        })
        .collect();
    let grid_valid = results.iter().all(|r| r.3);
    let above = results.iter().all(|&(_, got, opt, _)| got >= opt);
    let cost1: Vec<_> = results.iter().filter(|r| r.0 == 1).collect();
    let equal = cost1.iter().filter(|r| r.1 == r.2).count();
    let share = equal as f64 / cost1.len() as f64;
    outcome(
        invalid == 0 && grid_valid && above && share >= 0.5,
        format!(
            "{}/{} corpus transcripts valid; grid router >= optimum on all {}: {above}; equality on {equal}/{} cost-1 instances ({:.0}%)",
            corpus.len() - invalid,
            corpus.len(),
            results.len(),
            cost1.len(),
            100.0 * share
        ),
    )
}
