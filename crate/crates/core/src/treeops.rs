//! Ancestry queries, restriction, display testing, contraction and triple
//! extraction on [`LabeledTree`]s.

use std::collections::HashSet;

use crate::model::{Label, RootedTriple, Symbol, TripleSet};
use crate::tree::{LabeledTree, TreeBuilder, TreeError, VertexId};

/// A downward path of adjacent vertices, e.g. from `lca(x, y)` to `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreePath {
    vertices: Vec<VertexId>,
}

impl TreePath {
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn first(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn last(&self) -> VertexId {
        *self.vertices.last().unwrap()
    }

    /// Edges `(upper, lower)` along the path.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }
}

fn leaf_vertex(tree: &LabeledTree, name: &str) -> Result<VertexId, TreeError> {
    tree.vertex_of(name)
        .ok_or_else(|| TreeError::UnknownLeaf(name.to_string()))
}

/// Lowest common ancestor of two vertices.
pub fn lca_of(tree: &LabeledTree, mut u: VertexId, mut v: VertexId) -> VertexId {
    while tree.depth(u) > tree.depth(v) {
        u = tree.parent(u).unwrap();
    }
    while tree.depth(v) > tree.depth(u) {
        v = tree.parent(v).unwrap();
    }
    while u != v {
        u = tree.parent(u).unwrap();
        v = tree.parent(v).unwrap();
    }
    u
}

/// `lca_T(Y)` for a non-empty set of leaf names.
pub fn lca<S: AsRef<str>>(tree: &LabeledTree, names: &[S]) -> Result<VertexId, TreeError> {
    let mut it = names.iter();
    let first = it
        .next()
        .ok_or(TreeError::TooFewLeaves { needed: 1, got: 0 })?;
    let mut acc = leaf_vertex(tree, first.as_ref())?;
    for n in it {
        acc = lca_of(tree, acc, leaf_vertex(tree, n.as_ref())?);
    }
    Ok(acc)
}

/// The path from `lca(x, y)` down to `y`.
pub fn path_lca_to(tree: &LabeledTree, x: &str, y: &str) -> Result<TreePath, TreeError> {
    if x == y {
        return Err(TreeError::SameLeaf(x.to_string()));
    }
    let (vx, vy) = (leaf_vertex(tree, x)?, leaf_vertex(tree, y)?);
    let top = lca_of(tree, vx, vy);
    let mut vertices = vec![vy];
    let mut v = vy;
    while v != top {
        v = tree.parent(v).unwrap();
        vertices.push(v);
    }
    vertices.reverse();
    Ok(TreePath { vertices })
}

/// Restriction `(T|_Y, λ|_Y)`.
///
/// `T(Y)` is rooted at `lca(Y)`; every other vertex of `T(Y)` with a single
/// child is suppressed. A restricted edge inherits the original label when
/// nothing was suppressed on it, otherwise the unique event symbol on the
/// underlying path, or `⊗` when there is none.
pub fn restrict<S: AsRef<str>>(tree: &LabeledTree, names: &[S]) -> Result<LabeledTree, TreeError> {
    let mut in_y = vec![false; tree.num_vertices()];
    for n in names {
        in_y[leaf_vertex(tree, n.as_ref())?] = true;
    }
    let size = in_y.iter().filter(|&&b| b).count();
    if size < 2 {
        return Err(TreeError::TooFewLeaves {
            needed: 2,
            got: size,
        });
    }
    let top = lca(tree, names)?;

    // number of children whose subtree meets Y, and whether v's subtree meets Y
    let nv = tree.num_vertices();
    let mut meets = in_y.clone();
    let mut active_children = vec![0usize; nv];
    for v in (1..nv).rev() {
        if meets[v] {
            let p = tree.parent(v).unwrap();
            meets[p] = true;
            active_children[p] += 1;
        }
    }

    let mut builder = TreeBuilder::new();
    let mut new_id = vec![usize::MAX; nv];
    new_id[top] = builder.root();
    // preorder ids: ancestors are visited first
    for v in top + 1..nv {
        if !meets[v] || !tree.is_ancestor(top, v) {
            continue;
        }
        let kept = tree.is_leaf(v) || active_children[v] >= 2;
        if !kept {
            continue;
        }
        // walk up to the nearest kept ancestor collecting edge labels
        let mut w = v;
        let mut edges = 0;
        let mut event: Option<&Symbol> = None;
        loop {
            let lab = tree.label(w);
            edges += 1;
            if let Some(s) = lab.symbol() {
                match event {
                    Some(e) if e != s => {
                        let p = tree.parent(w).unwrap();
                        return Err(TreeError::LabelConflict {
                            upper: p,
                            lower: v,
                            first: s.clone(),
                            second: e.clone(),
                        });
                    }
                    _ => event = Some(s),
                }
            }
            w = tree.parent(w).unwrap();
            if w == top || new_id[w] != usize::MAX {
                break;
            }
        }
        let label = if edges == 1 {
            tree.label(v).clone()
        } else {
            event.map_or(Label::NoEvent, |s| Label::Event(s.clone()))
        };
        let parent = new_id[w];
        new_id[v] = match tree.leaf_name(v) {
            Some(name) => builder.add_leaf(parent, name, label),
            None => builder.add_inner(parent, label),
        };
    }
    builder.build()
}

/// Leaf positions (in `order`) below each vertex of `tree`, as bitsets.
fn cluster_bitsets(
    tree: &LabeledTree,
    position: impl Fn(&str) -> Option<usize>,
    width: usize,
) -> Vec<Vec<u64>> {
    let words = width.div_ceil(64);
    let nv = tree.num_vertices();
    let mut sets = vec![vec![0u64; words]; nv];
    for v in (0..nv).rev() {
        if let Some(p) = tree.leaf_name(v).and_then(&position) {
            sets[v][p / 64] |= 1 << (p % 64);
        }
        if let Some(parent) = tree.parent(v) {
            let (lo, hi) = sets.split_at_mut(v);
            for (a, b) in lo[parent].iter_mut().zip(&hi[0]) {
                *a |= *b;
            }
        }
    }
    sets
}

/// Topological display: `small ≤ big`, i.e. `small` arises from `big(L')` by
/// contractions where `L'` is the leaf set of `small`. Labels are ignored.
pub fn displays(big: &LabeledTree, small: &LabeledTree) -> Result<bool, TreeError> {
    let names: Vec<&str> = small.leaf_names().collect();
    for n in &names {
        if big.vertex_of(n).is_none() {
            return Err(TreeError::LeafSetNotContained(n.to_string()));
        }
    }
    let position = |name: &str| -> Option<usize> {
        small
            .vertex_of(name)
            .map(|v| small.leaves().binary_search(&v).unwrap())
    };
    let width = names.len();
    let big_clusters: HashSet<Vec<u64>> = cluster_bitsets(big, position, width)
        .into_iter()
        .filter(|c| c.iter().any(|&w| w != 0))
        .collect();
    Ok(cluster_bitsets(small, position, width)
        .iter()
        .all(|c| big_clusters.contains(c)))
}

/// `r(T)`: every triple `ab|c` with `lca(a,b) ≺ lca(a,b,c)`.
pub fn triples_of(tree: &LabeledTree) -> TripleSet {
    let leaves = tree.leaves();
    let n = leaves.len();
    let mut pair_lca = vec![0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let l = lca_of(tree, leaves[i], leaves[j]);
            pair_lca[i * n + j] = l;
            pair_lca[j * n + i] = l;
        }
    }
    let name = |i: usize| tree.leaf_name(leaves[i]).unwrap();
    let mut out = TripleSet::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (ij, ik, jk) = (
                    pair_lca[i * n + j],
                    pair_lca[i * n + k],
                    pair_lca[j * n + k],
                );
                // the deepest of the three pairwise lcas, if unique, names the cherry
                let triple = if tree.depth(ij) > tree.depth(ik) {
                    Some((i, j, k))
                } else if tree.depth(ik) > tree.depth(ij) {
                    Some((i, k, j))
                } else if tree.depth(jk) > tree.depth(ij) {
                    Some((j, k, i))
                } else {
                    None
                };
                if let Some((a, b, c)) = triple {
                    out.insert(RootedTriple::new(name(a), name(b), name(c)).unwrap());
                }
            }
        }
    }
    out
}

/// Contracts the inner edge `(u, v)`; `v`'s children are re-attached to `u`
/// keeping their edge labels.
pub fn contract_edge(
    tree: &LabeledTree,
    edge: (VertexId, VertexId),
) -> Result<LabeledTree, TreeError> {
    let (u, v) = edge;
    if !tree.is_edge(u, v) {
        return Err(TreeError::UnknownEdge(u, v));
    }
    if tree.is_leaf(v) {
        return Err(TreeError::OuterEdge(u, v));
    }
    let mut builder = TreeBuilder::new();
    let mut new_id = vec![usize::MAX; tree.num_vertices()];
    new_id[0] = builder.root();
    new_id[v] = usize::MAX;
    for w in 1..tree.num_vertices() {
        if w == v {
            continue;
        }
        let mut p = tree.parent(w).unwrap();
        if p == v {
            p = u;
        }
        let label = tree.label(w).clone();
        new_id[w] = match tree.leaf_name(w) {
            Some(name) => builder.add_leaf(new_id[p], name, label),
            None => builder.add_inner(new_id[p], label),
        };
    }
    builder.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::read_tree;

    fn t(s: &str) -> LabeledTree {
        read_tree(s).unwrap()
    }

    #[test]
    fn lca_examples() {
        let tree = t("((a:-,b:-):-,c:-);");
        let ab = lca(&tree, &["a", "b"]).unwrap();
        assert_eq!(tree.children(ab).len(), 2);
        assert_eq!(tree.parent(ab), Some(tree.root()));
        assert_eq!(lca(&tree, &["a", "b", "c"]).unwrap(), tree.root());
        assert_eq!(lca(&tree, &["a"]).unwrap(), tree.vertex_of("a").unwrap());
        assert_eq!(lca(&tree, &["z"]), Err(TreeError::UnknownLeaf("z".into())));
    }

    #[test]
    fn path_examples() {
        let tree = t("((a:-,b:-):-,c:-);");
        let v = |n| tree.vertex_of(n).unwrap();
        let ab = lca(&tree, &["a", "b"]).unwrap();
        assert_eq!(
            path_lca_to(&tree, "c", "a").unwrap().vertices(),
            &[0, ab, v("a")]
        );
        assert_eq!(
            path_lca_to(&tree, "a", "b").unwrap().vertices(),
            &[ab, v("b")]
        );
        let star = t("(a:-,b:-,c:-);");
        assert_eq!(
            path_lca_to(&star, "a", "c").unwrap().vertices(),
            &[0, star.vertex_of("c").unwrap()]
        );
        assert_eq!(
            path_lca_to(&star, "a", "a"),
            Err(TreeError::SameLeaf("a".into()))
        );
    }

    #[test]
    fn restriction_inherits_labels() {
        let tree = t("((a:-,b:2):2,c:-);");
        let r = restrict(&tree, &["a", "b"]).unwrap();
        assert_eq!(r, t("(a:-,b:2);"));
        assert_eq!(restrict(&tree, &["a", "b", "c"]).unwrap(), tree);
        // suppressed vertex folds the 2-edge into the path to b
        let r = restrict(&tree, &["b", "c"]).unwrap();
        assert_eq!(r, t("(b:2,c:-);"));
        let r = restrict(&tree, &["a", "c"]).unwrap();
        assert_eq!(r, t("(a:2,c:-);"));
    }

    #[test]
    fn restriction_conflict() {
        // path root -> u -> v -> a mixes 1 and 2 once u and v are suppressed
        let tree = t("(((a:2,b:-):1,c:-):-,d:-);");
        let err = restrict(&tree, &["a", "d"]).unwrap_err();
        assert!(matches!(err, TreeError::LabelConflict { .. }), "{err:?}");
    }

    #[test]
    fn display_examples() {
        let bin = t("((a:-,b:-):-,c:-);");
        let star = t("(a:-,b:-,c:-);");
        assert!(displays(&bin, &bin).unwrap());
        assert!(displays(&bin, &star).unwrap());
        assert!(!displays(&star, &bin).unwrap());
        let quartet = t("((a:-,b:-):-,(c:-,d:-):-);");
        let other = t("((a:-,c:-):-,b:-);");
        assert!(!displays(&quartet, &other).unwrap());
        assert!(displays(&quartet, &bin).unwrap());
        let missing = t("(a:-,z:-);");
        assert_eq!(
            displays(&bin, &missing),
            Err(TreeError::LeafSetNotContained("z".into()))
        );
    }

    #[test]
    fn triples_examples() {
        assert!(triples_of(&t("(a:-,b:-,c:-);")).is_empty());
        let r = triples_of(&t("((a:-,b:-):-,c:-);"));
        assert_eq!(
            r.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            vec!["a b | c"]
        );
        let r = triples_of(&t("((a:-,b:-):-,(c:-,d:-):-);"));
        let got: Vec<String> = r.iter().map(|x| x.to_string()).collect();
        assert_eq!(got, vec!["a b | c", "a b | d", "c d | a", "c d | b"]);
    }

    #[test]
    fn contraction_examples() {
        let bin = t("((a:-,b:-):-,c:-);");
        let ab = lca(&bin, &["a", "b"]).unwrap();
        assert_eq!(contract_edge(&bin, (0, ab)).unwrap(), t("(a:-,b:-,c:-);"));
        let star = t("(a:-,b:-,c:-);");
        for (u, v) in star.edges() {
            assert_eq!(
                contract_edge(&star, (u, v)),
                Err(TreeError::OuterEdge(u, v))
            );
        }
        let cat = t("(((a:1,b:-):-,c:-):1,d:-);");
        let low = lca(&cat, &["a", "b"]).unwrap();
        let up = cat.parent(low).unwrap();
        assert_eq!(
            contract_edge(&cat, (up, low)).unwrap(),
            t("((a:1,b:-,c:-):1,d:-);")
        );
        assert_eq!(
            contract_edge(&cat, (0, low)),
            Err(TreeError::UnknownEdge(0, low))
        );
    }
}
