//! Recognition of tree-like maps over an arbitrary alphabet.
//!
//! A map `ε` is tree-like iff
//!
//! * **T1** the classes `X_m` and `X_⊗` form a quasi-partition of the leaves,
//! * **T2** each `G_m = (X_m, {xy : ε(x, y) ≠ ⊗})` is a simple Fitch graph,
//! * **T3** `ε(y, x) = m` whenever `x ∈ X_m` and `y ∉ X_m`,
//! * **T4** `ε(y, x) = ⊗` whenever `x ∈ X_⊗`.
//!
//! [`recognize`] checks these in `O(n²)` and on success returns the unique
//! least-resolved explaining tree built by [`assemble`].

use thiserror::Error;

use crate::evaluate::{evaluate_dense, is_label_consistent, EvalError};
use crate::model::{FitchMap, Label, LabelCode, QuasiPartition, Symbol};
use crate::simple_fitch::{find_forbidden_triad, least_resolved_simple_with, Digraph, SimpleTree};
use crate::tree::{LabeledTree, TreeBuilder, VertexId};

/// The first condition found to fail.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("{symbols} symbols on {leaves} leaves exceed the 2n-2 edges of any tree")]
    AlphabetTooLarge { symbols: usize, leaves: usize },
    #[error("leaf {leaf} receives several event symbols: {}", join(.symbols))]
    T1 { leaf: String, symbols: Vec<Symbol> },
    #[error("class of symbol {symbol} is not a simple Fitch graph{}", triad_suffix(.triad))]
    T2 {
        symbol: Symbol,
        triad: Option<[String; 3]>,
    },
    #[error("expected ε({y}, {x}) = {expected}, found {found}")]
    T3 {
        x: String,
        y: String,
        expected: Symbol,
        found: Label,
    },
    #[error("expected ε({y}, {x}) = -, found {found}")]
    T4 { x: String, y: String, found: Label },
}

fn join(symbols: &[Symbol]) -> String {
    symbols
        .iter()
        .map(Symbol::as_str)
        .collect::<Vec<_>>()
        .join(", ")
}

fn triad_suffix(triad: &Option<[String; 3]>) -> String {
    match triad {
        Some([a, b, c]) => format!(" (forbidden triad {a}, {b}, {c})"),
        None => String::new(),
    }
}

impl Violation {
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::AlphabetTooLarge { .. } => "AlphabetTooLarge",
            Violation::T1 { .. } => "T1Violation",
            Violation::T2 { .. } => "T2Violation",
            Violation::T3 { .. } => "T3Violation",
            Violation::T4 { .. } => "T4Violation",
        }
    }

    pub fn witness_leaves(&self) -> Vec<String> {
        match self {
            Violation::AlphabetTooLarge { .. } => Vec::new(),
            Violation::T1 { leaf, .. } => vec![leaf.clone()],
            Violation::T2 { triad, .. } => triad.iter().flatten().cloned().collect(),
            Violation::T3 { x, y, .. } | Violation::T4 { x, y, .. } => vec![x.clone(), y.clone()],
        }
    }

    /// Symbols named by the witness; `⊗` is rendered as `-`.
    pub fn witness_symbols(&self) -> Vec<String> {
        match self {
            Violation::AlphabetTooLarge { .. } => Vec::new(),
            Violation::T1 { symbols, .. } => symbols.iter().map(|s| s.to_string()).collect(),
            Violation::T2 { symbol, .. } => vec![symbol.to_string()],
            Violation::T3 {
                expected, found, ..
            } => vec![expected.to_string(), found.to_string()],
            Violation::T4 { found, .. } => vec![found.to_string()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecognitionReport {
    TreeLike(LabeledTree),
    NotTreeLike(Violation),
}

impl RecognitionReport {
    pub fn tree(&self) -> Option<&LabeledTree> {
        match self {
            RecognitionReport::TreeLike(t) => Some(t),
            RecognitionReport::NotTreeLike(_) => None,
        }
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            RecognitionReport::TreeLike(_) => None,
            RecognitionReport::NotTreeLike(v) => Some(v),
        }
    }

    pub fn is_tree_like(&self) -> bool {
        matches!(self, RecognitionReport::TreeLike(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("map has a no-event entry at ({x}, {y})")]
pub struct NotOtimesFree {
    pub x: String,
    pub y: String,
}

/// Class of every leaf by index: `0` for `X_⊗`, `k` for the `k`-th symbol.
fn leaf_classes(map: &FitchMap) -> Result<Vec<LabelCode>, Violation> {
    let n = map.len();
    let mut class = vec![0; n];
    for (x, slot) in class.iter_mut().enumerate() {
        let mut seen: Option<LabelCode> = None;
        for y in (0..n).filter(|&y| y != x) {
            let c = map.code(y, x);
            match seen {
                _ if c == 0 => {}
                None => seen = Some(c),
                Some(s) if s != c => {
                    let mut codes: Vec<LabelCode> = (0..n)
                        .filter(|&z| z != x)
                        .map(|z| map.code(z, x))
                        .filter(|&c| c != 0)
                        .collect();
                    codes.sort_unstable();
                    codes.dedup();
                    return Err(Violation::T1 {
                        leaf: map.leaves()[x].clone(),
                        symbols: codes
                            .into_iter()
                            .map(|c| map.decode(c).symbol().unwrap().clone())
                            .collect(),
                    });
                }
                Some(_) => {}
            }
        }
        *slot = seen.unwrap_or(0);
    }
    Ok(class)
}

fn partition_from(map: &FitchMap, class: &[LabelCode]) -> QuasiPartition {
    let k = map.alphabet().len();
    let mut members = vec![Vec::new(); k + 1];
    for (x, &c) in class.iter().enumerate() {
        members[c as usize].push(map.leaves()[x].clone());
    }
    let no_event = std::mem::take(&mut members[0]);
    let classes = map
        .alphabet()
        .symbols()
        .iter()
        .cloned()
        .zip(members.into_iter().skip(1))
        .collect();
    QuasiPartition::new(classes, no_event)
}

/// The classes `X_m` and `X_⊗`, or the first leaf (input order) that
/// receives two distinct event symbols.
pub fn compute_classes(map: &FitchMap) -> Result<QuasiPartition, Violation> {
    let class = leaf_classes(map)?;
    Ok(partition_from(map, &class))
}

fn class_codes(map: &FitchMap, classes: &QuasiPartition) -> Vec<LabelCode> {
    let mut class = vec![0; map.len()];
    for (symbol, members) in classes.classes() {
        let code = map
            .code_of(symbol)
            .expect("class symbol is in the alphabet");
        for m in members {
            class[map.leaf_index(m).expect("class member is a leaf")] = code;
        }
    }
    class
}

/// Member indices of every symbol class, in alphabet order.
fn members_by_code(class: &[LabelCode], k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); k];
    for (x, &c) in class.iter().enumerate() {
        if c != 0 {
            out[c as usize - 1].push(x);
        }
    }
    out
}

fn class_digraph(map: &FitchMap, members: &[usize]) -> Digraph {
    let k = members.len();
    let mut adj = vec![false; k * k];
    for (a, &x) in members.iter().enumerate() {
        for (b, &y) in members.iter().enumerate() {
            adj[a * k + b] = a != b && map.code(x, y) != 0;
        }
    }
    Digraph::from_adjacency(
        members.iter().map(|&i| map.leaves()[i].clone()).collect(),
        adj,
    )
}

/// Least-resolved tree of `G_m`, or the T2 violation with a forbidden triad.
fn class_tree(map: &FitchMap, code: LabelCode, members: &[usize]) -> Result<SimpleTree, Violation> {
    let g = class_digraph(map, members);
    let symbol = map.decode(code).symbol().unwrap().clone();
    least_resolved_simple_with(&g, &symbol).map_err(|_| {
        let triad = find_forbidden_triad(&g).map(|t| t.map(|i| g.vertices()[i].clone()));
        Violation::T2 { symbol, triad }
    })
}

fn check_t3_t4(map: &FitchMap, class: &[LabelCode], with_t4: bool) -> Result<(), Violation> {
    let n = map.len();
    for (k, members) in members_by_code(class, map.alphabet().len())
        .iter()
        .enumerate()
    {
        let code = k as LabelCode + 1;
        for &x in members {
            for y in (0..n).filter(|&y| class[y] != code) {
                if map.code(y, x) != code {
                    return Err(Violation::T3 {
                        x: map.leaves()[x].clone(),
                        y: map.leaves()[y].clone(),
                        expected: map.decode(code).symbol().unwrap().clone(),
                        found: map.label_at(y, x),
                    });
                }
            }
        }
    }
    if with_t4 {
        for x in (0..n).filter(|&x| class[x] == 0) {
            for y in (0..n).filter(|&y| y != x) {
                if map.code(y, x) != 0 {
                    return Err(Violation::T4 {
                        x: map.leaves()[x].clone(),
                        y: map.leaves()[y].clone(),
                        found: map.label_at(y, x),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Checks T2, T3 and T4 in that order and returns the per-class trees.
fn check_and_build(map: &FitchMap, class: &[LabelCode]) -> Result<Vec<SimpleTree>, Violation> {
    let trees = members_by_code(class, map.alphabet().len())
        .iter()
        .enumerate()
        .map(|(k, members)| class_tree(map, k as LabelCode + 1, members))
        .collect::<Result<Vec<_>, _>>()?;
    check_t3_t4(map, class, true)?;
    Ok(trees)
}

/// First violation of T2, T3 or T4 for classes produced by [`compute_classes`].
pub fn check_conditions(map: &FitchMap, classes: &QuasiPartition) -> Result<(), Violation> {
    check_and_build(map, &class_codes(map, classes)).map(|_| ())
}

fn alphabet_guard(map: &FitchMap) -> Result<(), Violation> {
    let (k, n) = (map.alphabet().len(), map.len());
    if k > 2 * n - 2 {
        return Err(Violation::AlphabetTooLarge {
            symbols: k,
            leaves: n,
        });
    }
    Ok(())
}

/// Decides whether `map` is tree-like and, if so, returns its least-resolved tree.
pub fn recognize(map: &FitchMap) -> RecognitionReport {
    let result = alphabet_guard(map)
        .and_then(|_| leaf_classes(map))
        .and_then(|class| {
            let trees = check_and_build(map, &class)?;
            Ok(join_trees(map, &class, trees))
        });
    match result {
        Ok(t) => RecognitionReport::TreeLike(t),
        Err(v) => RecognitionReport::NotTreeLike(v),
    }
}

/// Decision for maps without `⊗` entries, where T1 and T3 suffice.
pub fn recognize_no_otimes(map: &FitchMap) -> Result<RecognitionReport, NotOtimesFree> {
    let n = map.len();
    for x in 0..n {
        for y in (0..n).filter(|&y| y != x) {
            if map.code(x, y) == 0 {
                return Err(NotOtimesFree {
                    x: map.leaves()[x].clone(),
                    y: map.leaves()[y].clone(),
                });
            }
        }
    }
    let result = alphabet_guard(map)
        .and_then(|_| leaf_classes(map))
        .and_then(|class| {
            check_t3_t4(map, &class, false)?;
            let trees = members_by_code(&class, map.alphabet().len())
                .iter()
                .enumerate()
                .map(|(k, members)| class_tree(map, k as LabelCode + 1, members))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(join_trees(map, &class, trees))
        });
    Ok(match result {
        Ok(t) => RecognitionReport::TreeLike(t),
        Err(v) => RecognitionReport::NotTreeLike(v),
    })
}

/// Builds the least-resolved tree of a map satisfying T1 to T4.
///
/// Fails with the T2 violation if some `G_m` is not a simple Fitch graph;
/// other preconditions are not rechecked.
pub fn assemble(map: &FitchMap, classes: &QuasiPartition) -> Result<LabeledTree, Violation> {
    let class = class_codes(map, classes);
    let trees = members_by_code(&class, map.alphabet().len())
        .iter()
        .enumerate()
        .map(|(k, members)| class_tree(map, k as LabelCode + 1, members))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(join_trees(map, &class, trees))
}

/// Copies the non-root part of `tree` below `target`.
fn graft(builder: &mut TreeBuilder, target: VertexId, tree: &LabeledTree) {
    let mut image = vec![0; tree.num_vertices()];
    image[tree.root()] = target;
    // vertex ids are in preorder, so parents are mapped before children
    for v in 0..tree.num_vertices() {
        let Some(p) = tree.parent(v) else { continue };
        image[v] = match tree.leaf_name(v) {
            Some(name) => builder.add_leaf(image[p], name, tree.label(v).clone()),
            None => builder.add_inner(image[p], tree.label(v).clone()),
        };
    }
}

fn join_trees(map: &FitchMap, class: &[LabelCode], trees: Vec<SimpleTree>) -> LabeledTree {
    let mut builder = TreeBuilder::new();
    let root = builder.root();
    let mut hung: Vec<VertexId> = Vec::new();
    for (k, t) in trees.iter().enumerate() {
        let event = map.decode(k as LabelCode + 1);
        match t {
            SimpleTree::SingleLeaf(name) => {
                hung.push(builder.add_leaf(root, name, event));
            }
            SimpleTree::Tree(tm) if t.root_has_no_event_edge() => {
                let r = builder.add_inner(root, event);
                hung.push(r);
                graft(&mut builder, r, tm);
            }
            SimpleTree::Tree(tm) => graft(&mut builder, root, tm),
        }
    }
    for x in (0..map.len()).filter(|&x| class[x] == 0) {
        builder.add_leaf(root, &map.leaves()[x], Label::NoEvent);
    }
    let single_child = map.len() >= 2 && trees.len() == 1 && hung.len() == 1 && !class.contains(&0);
    let tree = builder.build().expect("assembled tree is phylogenetic");
    let tree = if single_child {
        contract_root_edge(&tree)
    } else {
        tree
    };
    debug_assert!(
        evaluate_dense(&tree).is_ok_and(|d| {
            let m = FitchMap::from_codes(d.names, &d.symbols, &d.codes).unwrap();
            &m == map
        }),
        "assembled tree does not explain the map"
    );
    tree
}

/// Removes a root with a single inner child by promoting that child.
fn contract_root_edge(tree: &LabeledTree) -> LabeledTree {
    match tree.children(tree.root()) {
        [only] if !tree.is_leaf(*only) => crate::treeops::contract_edge(tree, (tree.root(), *only))
            .unwrap_or_else(|_| tree.clone()),
        _ => tree.clone(),
    }
}

/// No inner `⊗`-edge, and every inner vertex other than the root has an outer
/// `⊗`-edge.
pub fn is_least_resolved_general(tree: &LabeledTree) -> Result<bool, EvalError> {
    if !is_label_consistent(tree) {
        evaluate_dense(tree)?;
    }
    Ok(tree.inner_edges().all(|(_, v)| {
        tree.label(v).is_event()
            && tree
                .children(v)
                .iter()
                .any(|&c| tree.is_leaf(c) && !tree.label(c).is_event())
    }))
}
