//! Acceptance suite. Runs every criterion in sequence, prints one
//! `PASS`/`FAIL` line per criterion and exits nonzero if any fails.

mod common;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use genfitch::generalized::{is_least_resolved_general, recognize, recognize_no_otimes};
use genfitch::io::{read_map, read_tree, write_map, write_tree};
use genfitch::model::{Alphabet, FitchMap, Label, LabelCode};
use genfitch::oracle::{
    brute_force_tree_like, enumerate_consistent_labelings, leaf_names, mutate_map, naive_codes,
    random_labeling, random_map, random_no_otimes_instance, random_topology,
    random_tree_like_instance, ExplainerIndex,
};
use genfitch::simple_fitch::{
    derive_forbidden_table, is_simple_fitch, least_resolved_simple, Digraph,
};
use genfitch::treeops::{contract_edge, displays};
use genfitch::triples::{aho_build, derive_informative_patterns, identifies, informative_triples};
use genfitch::{bench::bench_recognize, evaluate::explains};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn map_codes(map: &FitchMap, symbols: &Alphabet) -> Vec<LabelCode> {
    let n = map.len();
    let mut codes = vec![0; n * n];
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            codes[i * n + j] = match map.label_at(i, j).symbol() {
                None => 0,
                Some(s) => symbols.position(s).unwrap() as LabelCode + 1,
            };
        }
    }
    codes
}

/// Exhaustive 4-leaf, 2-symbol comparison with the brute-force explainer set.
fn characterization() -> Outcome {
    let names = leaf_names(4);
    let alphabet = Alphabet::numbered(2);
    let index = ExplainerIndex::new(&names, alphabet.clone()).unwrap();
    let labels = [
        Label::NoEvent,
        Label::event("1").unwrap(),
        Label::event("2").unwrap(),
    ];
    let cells: Vec<usize> = (0..16).filter(|p| p / 4 != p % 4).collect();
    let (mut maps, mut tree_like, mut verdict_bad, mut tree_bad) = (0u64, 0u64, 0u64, 0u64);
    for code in 0..3u32.pow(12) {
        let mut matrix = vec![Label::NoEvent; 16];
        let mut c = code;
        for &p in &cells {
            matrix[p] = labels[(c % 3) as usize].clone();
            c /= 3;
        }
        let map = FitchMap::from_matrix(names.clone(), &matrix).unwrap();
        let explainers = index.lookup(&map).unwrap();
        let report = recognize(&map);
        maps += 1;
        tree_like += !explainers.is_empty() as u64;
        if report.is_tree_like() == explainers.is_empty() {
            verdict_bad += 1;
            continue;
        }
        if let Some(t) = report.tree() {
            if !explains(t, &map).unwrap() || !explainers.iter().all(|e| displays(e, t).unwrap()) {
                tree_bad += 1;
            }
        }
    }
    // the index must agree with a direct search
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut index_bad = 0;
    for _ in 0..300 {
        let map = if rng.gen_bool(0.5) {
            random_tree_like_instance(rng.gen(), 4, 2).1
        } else {
            random_map(&mut rng, &names, 2)
        };
        let direct = brute_force_tree_like(&map).unwrap().is_some();
        index_bad += (direct == index.lookup(&map).unwrap().is_empty()) as u32;
    }
    outcome(
        maps == 531_441 && verdict_bad == 0 && tree_bad == 0 && index_bad == 0,
        format!(
            "{maps} maps, {tree_like} tree-like, {verdict_bad} verdict and {tree_bad} tree disagreements, {index_bad} index/search disagreements"
        ),
    )
}

fn round_trip() -> Outcome {
    let mut failures = Vec::new();
    for i in 0..1000u64 {
        let n = 2 + (i * 37 % 63) as usize;
        let k = 1 + (i % 6) as usize;
        let (source, map) = random_tree_like_instance(i, n, k);
        let ok = match recognize(&map).tree() {
            None => false,
            Some(t) => {
                explains(t, &map).unwrap()
                    && is_least_resolved_general(t).unwrap()
                    && displays(&source, t).unwrap()
            }
        };
        if !ok {
            failures.push(format!("seed {i} n {n} k {k}"));
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "1000 instances, {} failures {:?}",
            failures.len(),
            failures.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn uniqueness() -> Outcome {
    let mut bad = 0;
    for i in 0..200u64 {
        let n = 2 + (i % 6) as usize;
        let k = 1 + (i % 3) as usize;
        let (_, map) = random_tree_like_instance(10_000 + i, n, k);
        let t = recognize(&map).tree().cloned().unwrap();
        let it = informative_triples(&map);
        let built = aho_build(&it, map.leaves()).unwrap();
        if !built.same_topology(&t) || !identifies(&it, &t).unwrap() {
            bad += 1;
        }
    }
    outcome(
        bad == 0,
        format!("200 instances with n <= 7, {bad} failures"),
    )
}

fn minimality() -> Outcome {
    let (mut maps, mut contractions, mut bad) = (0, 0u64, 0);
    for i in 0..600u64 {
        let n = 2 + (i % 4) as usize;
        let k = 1 + (i % 2) as usize;
        let (_, map) = random_tree_like_instance(20_000 + i, n, k);
        let t = recognize(&map).tree().cloned().unwrap();
        maps += 1;
        let target = map_codes(&map, map.alphabet());
        for (u, v) in t.inner_edges().collect::<Vec<_>>() {
            contractions += 1;
            let c = contract_edge(&t, (u, v)).unwrap().topology();
            let explained = enumerate_consistent_labelings(&c, map.alphabet())
                .iter()
                .any(|l| {
                    naive_codes(l, map.leaves(), map.alphabet().symbols()).as_ref() == Some(&target)
                });
            bad += explained as u32;
        }
    }
    outcome(
        maps >= 500 && bad == 0,
        format!("{maps} maps, {contractions} contractions, {bad} still explain"),
    )
}

fn all_digraphs(n: usize) -> impl Iterator<Item = Digraph> {
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    (0..1u64 << pairs.len()).map(move |mask| {
        let arcs: Vec<(&str, &str)> = pairs
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &(i, j))| (names[i].as_str(), names[j].as_str()))
            .collect();
        Digraph::new(names.clone(), arcs).unwrap()
    })
}

fn simple_fitch_consistency() -> Outcome {
    let forbidden = derive_forbidden_table().classes().len();
    let patterns = derive_informative_patterns().classes().len();
    let mut exhaustive = 0;
    let mut disagree = 0;
    for n in 1..=4 {
        for g in all_digraphs(n) {
            exhaustive += 1;
            disagree += (is_simple_fitch(&g) != least_resolved_simple(&g).is_ok()) as u32;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut fitch = 0;
    for i in 0..10_000 {
        let n = rng.gen_range(1..=9);
        let names: Vec<String> = (0..n).map(|v| format!("v{v}")).collect();
        let mut adj: Vec<bool> = if n >= 2 && i % 3 != 0 {
            let topology = random_topology(&mut rng, &names);
            let t = random_labeling(&mut rng, &topology, 1, false);
            let m = genfitch::evaluate(&t).unwrap();
            let mut adj = vec![false; n * n];
            for a in 0..n {
                for b in (0..n).filter(|&b| b != a) {
                    let (x, y) = (&names[a], &names[b]);
                    adj[a * n + b] = m.get(x, y).unwrap().is_event();
                }
            }
            adj
        } else {
            (0..n * n).map(|_| rng.gen_bool(0.5)).collect()
        };
        if i % 3 == 2 && n >= 2 {
            let a = rng.gen_range(0..n);
            let b = (a + rng.gen_range(1..n)) % n;
            adj[a * n + b] = !adj[a * n + b];
        }
        let arcs: Vec<(&str, &str)> = (0..n * n)
            .filter(|&p| p / n != p % n && adj[p])
            .map(|p| (names[p / n].as_str(), names[p % n].as_str()))
            .collect();
        let g = Digraph::new(names.clone(), arcs).unwrap();
        let scan = is_simple_fitch(&g);
        fitch += scan as u32;
        disagree += (scan != least_resolved_simple(&g).is_ok()) as u32;
    }
    outcome(
        forbidden == 8 && patterns == 6 && exhaustive == 1 + 4 + 64 + 4096 && disagree == 0,
        format!(
            "{forbidden} forbidden classes, {patterns} pattern classes, {exhaustive} exhaustive + 10000 random digraphs ({fitch} Fitch), {disagree} disagreements"
        ),
    )
}

fn scaling() -> Outcome {
    let small = bench_recognize(512, 8, 42, 20);
    let large = bench_recognize(1024, 8, 42, 20);
    let ratio = large.median() / small.median();
    outcome(
        ratio <= 5.0 && large.median() < 5.0 && small.tree_like == 20 && large.tree_like == 20,
        format!(
            "median {:.4}s at n=512, {:.4}s at n=1024, ratio {:.2}",
            small.median(),
            large.median(),
            ratio
        ),
    )
}

fn no_otimes_maps() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut tree_like, mut bad) = (0, 0);
    for i in 0..500u64 {
        let n = rng.gen_range(2..=24);
        let k = rng.gen_range(1..=4);
        let (_, base) = random_no_otimes_instance(30_000 + i, n, k);
        let map = if i % 2 == 0 {
            base
        } else {
            let changes = rng.gen_range(1..=3);
            mutate_map(&mut rng, &base, changes, k + 1, false)
        };
        let full = recognize(&map);
        let fast = recognize_no_otimes(&map).unwrap();
        tree_like += full.is_tree_like() as u32;
        let same = match (full.tree(), fast.tree()) {
            (Some(a), Some(b)) => a.same_topology(b),
            (None, None) => true,
            _ => false,
        };
        bad += !same as u32;
    }
    outcome(
        bad == 0,
        format!("500 maps, {tree_like} tree-like, {bad} disagreements"),
    )
}

fn io_fidelity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut bad = 0;
    for i in 0..1000u64 {
        let n = rng.gen_range(2..=64);
        let k = rng.gen_range(1..=6);
        let map = random_map(&mut rng, &leaf_names(n), k);
        let text = write_map(&map);
        let back = read_map(&text).unwrap();
        bad += (back != map || write_map(&back) != text) as u32;

        let (tree, _) = random_tree_like_instance(40_000 + i, n, k);
        let text = write_tree(&tree);
        let back = read_tree(&text).unwrap();
        bad += (back != tree || write_tree(&back) != text) as u32;
    }
    let corpus = common::corpus_cases().len();
    let failures = common::corpus_failures();
    outcome(
        bad == 0 && corpus >= 20 && failures.is_empty(),
        format!(
            "1000 maps and 1000 trees, {bad} round-trip failures; {corpus} malformed files, {} unexpected results {:?}",
            failures.len(),
            failures
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("characterization equivalence", characterization),
        ("round-trip soundness", round_trip),
        ("uniqueness", uniqueness),
        ("least-resolved minimality", minimality),
        ("simple Fitch consistency", simple_fitch_consistency),
        ("quadratic scaling", scaling),
        ("no-event-free maps", no_otimes_maps),
        ("io fidelity", io_fidelity),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "{verdict} criterion {}: {name} ({:.1}s): {}",
            k + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        );
        failed += !o.pass as u32;
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
