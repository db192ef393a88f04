//! Forward semantics: the map a labeled tree explains.
//!
//! `ε(x, y)` is the event symbol on the path from `lca(x, y)` down to `y`, or
//! `⊗` when that path carries no event edge.

use thiserror::Error;

use crate::model::{FitchMap, LabelCode, ModelError, Symbol};
use crate::tree::{LabeledTree, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("path from lca({x}, {y}) to {y} carries two symbols: {first} and {second}")]
    LabelConflict {
        x: String,
        y: String,
        first: Symbol,
        second: Symbol,
    },
    #[error("tree and map have different leaf sets")]
    LeafSetMismatch,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Dense evaluation result: leaves sorted by name, codes relative to `symbols`.
pub(crate) struct DenseMap {
    pub names: Vec<String>,
    pub symbols: Vec<Symbol>,
    pub codes: Vec<LabelCode>,
}

/// Per-column sweep: for every leaf `y`, stamp the status of each path `v → y`
/// for the ancestors `v` of `y`, then read `lca(x, y)` off a preorder pass.
/// `O(|V|)` per column, `O(n |V|)` overall.
pub(crate) fn evaluate_dense(tree: &LabeledTree) -> Result<DenseMap, EvalError> {
    let symbols = tree.symbols();
    let nv = tree.num_vertices();
    let edge_code: Vec<LabelCode> = (0..nv)
        .map(|v| {
            tree.label(v)
                .symbol()
                .map_or(0, |s| symbols.binary_search(s).unwrap() as LabelCode + 1)
        })
        .collect();

    let mut order: Vec<VertexId> = tree.leaves().to_vec();
    order.sort_by(|&a, &b| tree.leaf_name(a).cmp(&tree.leaf_name(b)));
    let n = order.len();
    let mut codes = vec![0; n * n];

    let mut stamp = vec![usize::MAX; nv];
    let mut status = vec![0 as LabelCode; nv];
    let mut near = vec![0 as VertexId; nv];
    for (j, &y) in order.iter().enumerate() {
        stamp[y] = j;
        status[y] = 0;
        let mut w = y;
        let mut current = 0;
        let mut conflict: Option<(VertexId, LabelCode, LabelCode)> = None;
        while let Some(p) = tree.parent(w) {
            let c = edge_code[w];
            if c != 0 {
                if current == 0 {
                    current = c;
                } else if current != c && conflict.is_none() {
                    conflict = Some((p, c, current));
                }
            }
            stamp[p] = j;
            status[p] = current;
            w = p;
        }
        for v in 0..nv {
            near[v] = match tree.parent(v) {
                _ if stamp[v] == j => v,
                Some(p) => near[p],
                None => v,
            };
        }
        if let Some((at, upper, lower)) = conflict {
            let depth = tree.depth(at);
            let x = order
                .iter()
                .copied()
                .find(|&x| x != y && tree.depth(near[x]) <= depth)
                .expect("every inner vertex has a second child");
            return Err(EvalError::LabelConflict {
                x: tree.leaf_name(x).unwrap().to_string(),
                y: tree.leaf_name(y).unwrap().to_string(),
                first: symbols[upper as usize - 1].clone(),
                second: symbols[lower as usize - 1].clone(),
            });
        }
        for (i, &x) in order.iter().enumerate() {
            if i != j {
                codes[i * n + j] = status[near[x]];
            }
        }
    }
    Ok(DenseMap {
        names: order
            .iter()
            .map(|&v| tree.leaf_name(v).unwrap().to_string())
            .collect(),
        symbols,
        codes,
    })
}

/// The map explained by `tree`, with leaves in sorted order.
pub fn evaluate(tree: &LabeledTree) -> Result<FitchMap, EvalError> {
    let dense = evaluate_dense(tree)?;
    Ok(FitchMap::from_codes(
        dense.names,
        &dense.symbols,
        &dense.codes,
    )?)
}

/// True iff `tree` explains `map` entry for entry.
pub fn explains(tree: &LabeledTree, map: &FitchMap) -> Result<bool, EvalError> {
    if tree.num_leaves() != map.len() || map.leaves().iter().any(|l| tree.vertex_of(l).is_none()) {
        return Err(EvalError::LeafSetMismatch);
    }
    match evaluate(tree) {
        Ok(m) => Ok(&m == map),
        Err(EvalError::LabelConflict { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Every root-to-leaf path carries at most one distinct event symbol.
pub fn is_label_consistent(tree: &LabeledTree) -> bool {
    let mut committed: Vec<Option<&Symbol>> = vec![None; tree.num_vertices()];
    for v in 1..tree.num_vertices() {
        let inherited = committed[tree.parent(v).unwrap()];
        committed[v] = match (inherited, tree.label(v).symbol()) {
            (Some(a), Some(b)) if a != b => return false,
            (Some(a), _) => Some(a),
            (None, s) => s,
        };
    }
    true
}
