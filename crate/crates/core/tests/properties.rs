use std::collections::{BTreeSet, HashSet};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use genfitch::evaluate::{evaluate, explains, is_label_consistent};
use genfitch::generalized::{compute_classes, is_least_resolved_general, recognize};
use genfitch::io::{read_map, read_tree, write_map, write_tree};
use genfitch::model::{Alphabet, FitchMap, Label, RootedTriple, Symbol, TripleSet};
use genfitch::oracle::{
    brute_force_tree_like, leaf_names, random_labeling, random_topology, random_tree_like_instance,
    ExplainerIndex,
};
use genfitch::simple_fitch::{
    is_least_resolved_simple, is_simple_fitch, least_resolved_simple, Digraph, SimpleTree,
};
use genfitch::tree::LabeledTree;
use genfitch::treeops::{contract_edge, displays, lca, path_lca_to, restrict, triples_of};
use genfitch::triples::{aho_build, closure_small, distinguishes, identifies, informative_triples};

fn instance() -> impl Strategy<Value = (LabeledTree, FitchMap)> {
    (any::<u64>(), 2usize..40, 1usize..7)
        .prop_map(|(seed, n, k)| random_tree_like_instance(seed, n, k))
}

fn small_instance(max_n: usize) -> impl Strategy<Value = (LabeledTree, FitchMap)> {
    (any::<u64>(), 2usize..=max_n, 1usize..4)
        .prop_map(|(seed, n, k)| random_tree_like_instance(seed, n, k))
}

/// A random subset of at least two leaves.
fn subset(tree: &LabeledTree, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = tree.sorted_leaf_names();
    loop {
        let pick: Vec<String> = names
            .iter()
            .filter(|_| rng.gen_bool(0.5))
            .cloned()
            .collect();
        if pick.len() >= 2 {
            return pick;
        }
    }
}

fn digraph_of(map: &FitchMap) -> Digraph {
    let n = map.len();
    let arcs: Vec<(String, String)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .filter(|&(i, j)| map.code(i, j) != 0)
        .map(|(i, j)| (map.leaves()[i].clone(), map.leaves()[j].clone()))
        .collect();
    Digraph::new(map.leaves().to_vec(), arcs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn path_ends_at_lca_and_target((tree, _) in instance(), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let names = tree.sorted_leaf_names();
        let (x, y) = (a.get(&names), b.get(&names));
        prop_assume!(x != y);
        let p = path_lca_to(&tree, x, y).unwrap();
        prop_assert_eq!(p.first(), lca(&tree, &[x, y]).unwrap());
        prop_assert_eq!(p.last(), tree.vertex_of(y).unwrap());
    }

    #[test]
    fn restriction_properties((tree, map) in instance(), seed in any::<u64>()) {
        let y = subset(&tree, seed);
        let r = restrict(&tree, &y).unwrap();
        let got: BTreeSet<String> = r.leaf_names().map(String::from).collect();
        let want: BTreeSet<String> = y.iter().cloned().collect();
        prop_assert_eq!(got, want.clone());
        for v in 0..r.num_vertices() {
            prop_assert!(r.is_leaf(v) || r.children(v).len() >= 2);
        }
        let filtered: TripleSet = triples_of(&tree)
            .iter()
            .filter(|t| t.leaves().iter().all(|l| want.contains(*l)))
            .cloned()
            .collect();
        prop_assert_eq!(triples_of(&r), filtered);
        // the restricted tree explains the restricted map
        let sub = map.reordered(&y).unwrap();
        prop_assert!(explains(&r, &sub).unwrap());
        prop_assert!(recognize(&sub).is_tree_like());
    }

    #[test]
    fn contractions_are_displayed((tree, _) in instance(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = restrict(&tree, &subset(&tree, seed)).unwrap();
        loop {
            let inner: Vec<_> = t.inner_edges().collect();
            if inner.is_empty() || rng.gen_bool(0.3) {
                break;
            }
            let e = inner[rng.gen_range(0..inner.len())];
            let c = contract_edge(&t, e).unwrap();
            prop_assert_eq!(c.num_vertices() + 1, t.num_vertices());
            prop_assert_eq!(c.sorted_leaf_names(), t.sorted_leaf_names());
            t = c;
        }
        prop_assert!(displays(&tree, &t).unwrap());
    }

    #[test]
    fn consistency_check_agrees_with_evaluation(seed in any::<u64>(), n in 2usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let topology = random_topology(&mut rng, &leaf_names(n));
        let symbols: Vec<Label> = ["-", "1", "2", "3"].iter().map(|s| Label::parse(s).unwrap()).collect();
        let t = topology.relabeled(|_, _| symbols[rng.gen_range(0..4)].clone());
        prop_assert_eq!(is_label_consistent(&t), evaluate(&t).is_ok());
    }

    #[test]
    fn evaluated_maps_have_class_structure((_, map) in instance()) {
        prop_assert!(map.alphabet().len() <= 2 * map.len() - 2);
        let q = compute_classes(&map).unwrap();
        prop_assert!(q.is_quasi_partition_of(map.leaves()));
        for (m, members) in q.classes() {
            prop_assert!(!members.is_empty());
            let event = Label::Event(m.clone());
            for x in members {
                for y in map.leaves().iter().filter(|y| !members.contains(y)) {
                    prop_assert_eq!(map.get(y, x).unwrap(), event.clone());
                }
            }
        }
    }

    #[test]
    fn io_round_trip((tree, map) in instance()) {
        let text = write_tree(&tree);
        let back = read_tree(&text).unwrap();
        prop_assert_eq!(&back, &tree);
        prop_assert_eq!(evaluate(&back).unwrap(), evaluate(&tree).unwrap());
        let text = write_map(&map);
        prop_assert_eq!(write_map(&read_map(&text).unwrap()), text);
    }

    #[test]
    fn recognition_is_sound_and_least_resolved((source, map) in instance()) {
        let t = recognize(&map).tree().cloned().unwrap();
        prop_assert!(explains(&t, &map).unwrap());
        prop_assert!(is_least_resolved_general(&t).unwrap());
        prop_assert!(displays(&source, &t).unwrap());
        let it = informative_triples(&map);
        prop_assert!(it.is_subset(&triples_of(&t)));
        prop_assert!(aho_build(&it, map.leaves()).unwrap().same_topology(&t));
        for (u, v) in t.inner_edges() {
            prop_assert!(it.iter().any(|r| distinguishes(r, &t, (u, v)).unwrap()));
        }
    }

    #[test]
    fn recognition_ignores_leaf_order_and_symbol_names((_, map) in instance(), seed in any::<u64>()) {
        let mut order = map.leaves().to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let t = recognize(&map).tree().cloned().unwrap();
        let reordered = recognize(&map.reordered(&order).unwrap());
        prop_assert_eq!(reordered.tree().unwrap(), &t);
        let renamed = FitchMap::from_fn(map.leaves().to_vec(), |x, y| {
            Ok(match map.get(x, y).unwrap() {
                Label::NoEvent => Label::NoEvent,
                Label::Event(s) => Label::Event(Symbol::new(format!("s{}", s.as_str()))?),
            })
        }).unwrap();
        prop_assert!(recognize(&renamed).tree().unwrap().same_topology(&t));
    }

    #[test]
    fn simple_round_trip(seed in any::<u64>(), n in 2usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let topology = random_topology(&mut rng, &leaf_names(n));
        let t = random_labeling(&mut rng, &topology, 1, false);
        let m = evaluate(&t).unwrap();
        let g = digraph_of(&m);
        prop_assert!(is_simple_fitch(&g));
        let r = match least_resolved_simple(&g).unwrap() {
            SimpleTree::Tree(r) => r,
            SimpleTree::SingleLeaf(_) => unreachable!(),
        };
        prop_assert!(is_least_resolved_simple(&r).unwrap());
        prop_assert!(explains(&r, &m).unwrap());
        prop_assert!(displays(&t, &r).unwrap());
        // hereditary
        let keep: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
        prop_assert!(is_simple_fitch(&g.induced(&keep)));
    }

    #[test]
    fn closure_laws((tree, _) in small_instance(7), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let all = triples_of(&tree);
        let r: TripleSet = all.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        let r2: TripleSet = r.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        let leaves = tree.sorted_leaf_names();
        let cl = genfitch::triples::closure_on(&r, &leaves).unwrap();
        prop_assert!(r.is_subset(&cl));
        prop_assert!(genfitch::triples::closure_on(&r2, &leaves).unwrap().is_subset(&cl));
        prop_assert_eq!(genfitch::triples::closure_on(&cl, &leaves).unwrap(), cl.clone());
        prop_assert!(cl.is_subset(&all));
        prop_assert!(identifies(&all, &tree).unwrap());
        if !r.is_empty() {
            prop_assert!(closure_small(&r).unwrap().is_subset(&cl));
        }
    }

    #[test]
    fn recognizer_output_has_fewest_vertices((_, map) in small_instance(5)) {
        prop_assume!(map.alphabet().len() <= 2);
        let t = recognize(&map).tree().cloned().unwrap();
        let first = brute_force_tree_like(&map).unwrap().unwrap();
        prop_assert_eq!(first.num_vertices(), t.num_vertices());
    }
}

#[test]
fn simple_fitch_matches_small_tree_oracle() {
    for n in 2..=4 {
        let names = leaf_names(n);
        let index = ExplainerIndex::new(&names, Alphabet::numbered(1)).unwrap();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect();
        let mut fitch = 0;
        for mask in 0..1u32 << pairs.len() {
            let mut codes = vec![0; n * n];
            let mut arcs = Vec::new();
            for (b, &(i, j)) in pairs.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    codes[i * n + j] = 1;
                    arcs.push((names[i].clone(), names[j].clone()));
                }
            }
            let g = Digraph::new(names.clone(), arcs).unwrap();
            let explainers = index.lookup_codes(&codes);
            assert_eq!(is_simple_fitch(&g), !explainers.is_empty());
            if let Ok(r) = least_resolved_simple(&g) {
                fitch += 1;
                let r = r.tree().unwrap().clone();
                assert!(explainers.iter().all(|e| displays(e, &r).unwrap()));
            }
        }
        // 3 vertices: 64 arc sets minus the 38 forbidden ones
        if n == 3 {
            assert_eq!(fitch, 26);
        }
    }
}

#[test]
fn triples_of_matches_cluster_definition() {
    for seed in 0..30 {
        let (t, _) = random_tree_like_instance(seed, 9, 2);
        let mut want = HashSet::new();
        let names = t.sorted_leaf_names();
        for a in &names {
            for b in &names {
                for c in &names {
                    if a < b && c != a && c != b {
                        let ab = lca(&t, &[a, b]).unwrap();
                        let abc = lca(&t, &[a, b, c]).unwrap();
                        if ab != abc {
                            want.insert(
                                RootedTriple::new(a.as_str(), b.as_str(), c.as_str()).unwrap(),
                            );
                        }
                    }
                }
            }
        }
        let got: HashSet<RootedTriple> = triples_of(&t).iter().cloned().collect();
        assert_eq!(got, want);
    }
}
