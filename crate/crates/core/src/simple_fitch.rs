//! Single-symbol Fitch digraphs.
//!
//! A digraph `G` on leaf set `X` is a simple Fitch graph when some tree with
//! edge labels in `{1, ⊗}` has an arc `x → y` exactly when the path from
//! `lca(x, y)` to `y` contains a `1`-edge.
//!
//! Two independent recognizers live here: [`is_simple_fitch`] scans every
//! 3-subset against a table of forbidden triads that is derived by
//! enumerating all labeled 3-leaf trees, and [`least_resolved_simple`] builds
//! the least-resolved tree directly and verifies it by evaluation.

use std::collections::HashMap;
use std::sync::OnceLock;

use thiserror::Error;

use crate::evaluate::evaluate_dense;
use crate::model::{Label, Symbol};
use crate::tree::{LabeledTree, TreeBuilder, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimpleFitchError {
    #[error("not a simple Fitch graph: {0}")]
    NotFitch(String),
    #[error("tree uses {0} distinct event symbols, expected at most one")]
    AlphabetTooLarge(usize),
    #[error("digraph has no vertices")]
    Empty,
    #[error("duplicate vertex {0:?}")]
    DuplicateVertex(String),
    #[error("arc mentions unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("loop at vertex {0:?}")]
    ReflexiveArc(String),
}

/// An irreflexive digraph on named vertices, stored as a dense adjacency matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    vertices: Vec<String>,
    adj: Vec<bool>,
}

impl Digraph {
    pub fn new<I, S>(vertices: Vec<String>, arcs: I) -> Result<Self, SimpleFitchError>
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        if vertices.is_empty() {
            return Err(SimpleFitchError::Empty);
        }
        let mut index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.as_str(), i).is_some() {
                return Err(SimpleFitchError::DuplicateVertex(v.clone()));
            }
        }
        let n = vertices.len();
        let mut adj = vec![false; n * n];
        for (x, y) in arcs {
            let (x, y) = (x.as_ref(), y.as_ref());
            let look = |s: &str| {
                index
                    .get(s)
                    .copied()
                    .ok_or_else(|| SimpleFitchError::UnknownVertex(s.to_string()))
            };
            let (i, j) = (look(x)?, look(y)?);
            if i == j {
                return Err(SimpleFitchError::ReflexiveArc(x.to_string()));
            }
            adj[i * n + j] = true;
        }
        Ok(Digraph { vertices, adj })
    }

    /// From a row-major adjacency matrix; the diagonal is ignored.
    pub(crate) fn from_adjacency(vertices: Vec<String>, mut adj: Vec<bool>) -> Self {
        let n = vertices.len();
        for i in 0..n {
            adj[i * n + i] = false;
        }
        Digraph { vertices, adj }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    #[inline]
    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.vertices.len() + j]
    }

    pub fn arcs(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        let n = self.len();
        (0..n * n)
            .filter(|&p| self.adj[p])
            .map(move |p| (self.vertices[p / n].as_str(), self.vertices[p % n].as_str()))
    }

    /// The subdigraph induced by the given vertex indices, in that order.
    pub fn induced(&self, idx: &[usize]) -> Digraph {
        let k = idx.len();
        let mut adj = vec![false; k * k];
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                adj[a * k + b] = a != b && self.has_arc(i, j);
            }
        }
        Digraph {
            vertices: idx.iter().map(|&i| self.vertices[i].clone()).collect(),
            adj,
        }
    }

    /// Arc bitmask of the ordered vertex triple `(p0, p1, p2)`.
    pub fn triad_mask(&self, p: [usize; 3]) -> u8 {
        TRIAD_PAIRS.iter().enumerate().fold(0, |m, (bit, &(a, b))| {
            m | ((self.has_arc(p[a], p[b]) as u8) << bit)
        })
    }
}

/// Bit `k` of a triad mask is the arc `TRIAD_PAIRS[k].0 → TRIAD_PAIRS[k].1`.
pub const TRIAD_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Relabels the vertices of a triad mask: vertex `i` becomes `perm[i]`.
pub fn permute_mask(mask: u8, perm: [usize; 3]) -> u8 {
    let mut out = 0;
    for (bit, &(a, b)) in TRIAD_PAIRS.iter().enumerate() {
        if mask >> bit & 1 == 1 {
            let target = TRIAD_PAIRS
                .iter()
                .position(|&p| p == (perm[a], perm[b]))
                .unwrap();
            out |= 1 << target;
        }
    }
    out
}

/// Smallest mask among all vertex relabelings.
pub fn canonical_mask(mask: u8) -> u8 {
    PERMUTATIONS
        .iter()
        .map(|&p| permute_mask(mask, p))
        .min()
        .unwrap()
}

/// The 3-vertex digraphs no `{1, ⊗}`-labeled tree explains.
#[derive(Debug, Clone)]
pub struct ForbiddenTriadTable {
    forbidden: [bool; 64],
    classes: Vec<u8>,
}

impl ForbiddenTriadTable {
    pub fn contains(&self, mask: u8) -> bool {
        self.forbidden[mask as usize]
    }

    /// One canonical mask per isomorphism class, sorted.
    pub fn classes(&self) -> &[u8] {
        &self.classes
    }

    /// Number of labeled (not isomorphism-reduced) forbidden triads.
    pub fn labeled_count(&self) -> usize {
        self.forbidden.iter().filter(|&&b| b).count()
    }
}

/// All phylogenetic trees on leaves `"0", "1", "2"` with every `{⊗, 1}` edge labeling.
fn three_leaf_trees() -> Vec<LabeledTree> {
    let one = Label::event("1").unwrap();
    let mut shapes: Vec<Vec<Option<usize>>> = vec![vec![Some(0), Some(1), Some(2)]];
    for out in 0..3 {
        // None marks the inner vertex joining the two remaining leaves
        shapes.push(vec![None, Some(out)]);
    }
    let mut trees = Vec::new();
    for (s, shape) in shapes.iter().enumerate() {
        let edges = if s == 0 { 3 } else { 4 };
        for bits in 0..1u32 << edges {
            let lab = |k: usize| {
                if bits >> k & 1 == 1 {
                    one.clone()
                } else {
                    Label::NoEvent
                }
            };
            let mut b = TreeBuilder::new();
            if s == 0 {
                for k in 0..3 {
                    b.add_leaf(0, k.to_string(), lab(k));
                }
            } else {
                let out = shape[1].unwrap();
                let inner = b.add_inner(0, lab(0));
                for (k, leaf) in (1..).zip((0..3).filter(|&l| l != out)) {
                    b.add_leaf(inner, leaf.to_string(), lab(k));
                }
                b.add_leaf(0, out.to_string(), lab(3));
            }
            trees.push(b.build().unwrap());
        }
    }
    trees
}

/// Derives the forbidden table by evaluating every labeled 3-leaf tree and
/// taking the complement of the realized digraphs.
pub fn derive_forbidden_table() -> ForbiddenTriadTable {
    let mut realizable = [false; 64];
    for t in three_leaf_trees() {
        let dense = evaluate_dense(&t).expect("single-symbol trees are consistent");
        // leaves of a 3-leaf tree named "0", "1", "2" sort to positions 0, 1, 2
        let mask = TRIAD_PAIRS
            .iter()
            .enumerate()
            .fold(0u8, |m, (bit, &(a, b))| {
                m | (((dense.codes[a * 3 + b] != 0) as u8) << bit)
            });
        realizable[mask as usize] = true;
    }
    let mut forbidden = [false; 64];
    for m in 0..64 {
        forbidden[m] = !realizable[m];
    }
    let mut classes: Vec<u8> = (0..64u8)
        .filter(|&m| forbidden[m as usize])
        .map(canonical_mask)
        .collect();
    classes.sort_unstable();
    classes.dedup();
    ForbiddenTriadTable { forbidden, classes }
}

pub fn forbidden_table() -> &'static ForbiddenTriadTable {
    static TABLE: OnceLock<ForbiddenTriadTable> = OnceLock::new();
    TABLE.get_or_init(derive_forbidden_table)
}

/// First 3-subset (lexicographic in vertex order) inducing a forbidden triad.
pub fn find_forbidden_triad(g: &Digraph) -> Option<[usize; 3]> {
    let table = forbidden_table();
    let n = g.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if table.contains(g.triad_mask([i, j, k])) {
                    return Some([i, j, k]);
                }
            }
        }
    }
    None
}

/// Triad-scan recognizer, `O(n³)`.
pub fn is_simple_fitch(g: &Digraph) -> bool {
    find_forbidden_triad(g).is_none()
}

/// Output of [`least_resolved_simple`]. A single vertex has no phylogenetic
/// tree, so it is reported separately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimpleTree {
    SingleLeaf(String),
    Tree(LabeledTree),
}

impl SimpleTree {
    pub fn tree(&self) -> Option<&LabeledTree> {
        match self {
            SimpleTree::Tree(t) => Some(t),
            SimpleTree::SingleLeaf(_) => None,
        }
    }

    /// True when some edge at the root carries `⊗`.
    pub fn root_has_no_event_edge(&self) -> bool {
        match self {
            SimpleTree::SingleLeaf(_) => false,
            SimpleTree::Tree(t) => t.children(t.root()).iter().any(|&c| !t.label(c).is_event()),
        }
    }
}

/// Least-resolved `{1, ⊗}` tree explaining `g`.
pub fn least_resolved_simple(g: &Digraph) -> Result<SimpleTree, SimpleFitchError> {
    least_resolved_simple_with(g, &Symbol::new("1").unwrap())
}

/// As [`least_resolved_simple`] with `symbol` in place of `1`.
///
/// At every level the vertices without incoming arcs hang from the current
/// vertex by `⊗`-edges; the rest split into the connected components of
/// "not joined by arcs in both directions". Singletons hang by a `symbol`-edge,
/// larger components recurse below a new `symbol`-edge and must have at least
/// one vertex without incoming arcs there.
pub fn least_resolved_simple_with(
    g: &Digraph,
    symbol: &Symbol,
) -> Result<SimpleTree, SimpleFitchError> {
    let n = g.len();
    if n == 0 {
        return Err(SimpleFitchError::Empty);
    }
    if n == 1 {
        return Ok(SimpleTree::SingleLeaf(g.vertices[0].clone()));
    }
    let event = Label::Event(symbol.clone());
    let mut builder = TreeBuilder::new();
    let mut work: Vec<(VertexId, Vec<usize>, bool)> =
        vec![(builder.root(), (0..n).collect(), true)];
    while let Some((node, members, top)) = work.pop() {
        let (sources, rest): (Vec<usize>, Vec<usize>) = members
            .iter()
            .partition(|&&x| members.iter().all(|&z| !g.has_arc(z, x)));
        if !top && sources.is_empty() {
            return Err(SimpleFitchError::NotFitch(format!(
                "every vertex of {{{}}} has an incoming arc",
                names(g, &members)
            )));
        }
        let components = bidirectional_cocomponents(g, &rest);
        if sources.is_empty() && components.len() == 1 {
            return Err(SimpleFitchError::NotFitch(format!(
                "{{{}}} has no source and does not split",
                names(g, &members)
            )));
        }
        for &z in &sources {
            builder.add_leaf(node, &g.vertices[z], Label::NoEvent);
        }
        for comp in components {
            if comp.len() == 1 {
                builder.add_leaf(node, &g.vertices[comp[0]], event.clone());
            } else {
                let child = builder.add_inner(node, event.clone());
                work.push((child, comp, false));
            }
        }
    }
    let tree = builder
        .build()
        .map_err(|e| SimpleFitchError::NotFitch(e.to_string()))?;
    verify(g, &tree)?;
    Ok(SimpleTree::Tree(tree))
}

fn names(g: &Digraph, idx: &[usize]) -> String {
    idx.iter()
        .map(|&i| g.vertices[i].as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Components of the relation `x ~ y ⇔ ¬(x → y ∧ y → x)` on `members`.
fn bidirectional_cocomponents(g: &Digraph, members: &[usize]) -> Vec<Vec<usize>> {
    let mut unvisited: Vec<usize> = members.to_vec();
    let mut out = Vec::new();
    while let Some(start) = unvisited.pop() {
        let mut comp = vec![start];
        let mut head = 0;
        while head < comp.len() {
            let x = comp[head];
            head += 1;
            let mut k = 0;
            while k < unvisited.len() {
                let y = unvisited[k];
                if !(g.has_arc(x, y) && g.has_arc(y, x)) {
                    comp.push(unvisited.swap_remove(k));
                } else {
                    k += 1;
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out.sort();
    out
}

fn verify(g: &Digraph, tree: &LabeledTree) -> Result<(), SimpleFitchError> {
    let dense = evaluate_dense(tree).map_err(|e| SimpleFitchError::NotFitch(e.to_string()))?;
    let n = g.len();
    let pos: HashMap<&str, usize> = g
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let idx: Vec<usize> = dense.names.iter().map(|s| pos[s.as_str()]).collect();
    for a in 0..n {
        for b in 0..n {
            if a != b && (dense.codes[a * n + b] != 0) != g.has_arc(idx[a], idx[b]) {
                return Err(SimpleFitchError::NotFitch(format!(
                    "constructed tree disagrees on arc ({}, {})",
                    dense.names[a], dense.names[b]
                )));
            }
        }
    }
    Ok(())
}

/// Structural least-resolved test: every inner edge is an event edge and its
/// lower end has an outer `⊗`-edge.
pub fn is_least_resolved_simple(tree: &LabeledTree) -> Result<bool, SimpleFitchError> {
    let used = tree.symbols().len();
    if used > 1 {
        return Err(SimpleFitchError::AlphabetTooLarge(used));
    }
    Ok(tree.inner_edges().all(|(_, v)| {
        tree.label(v).is_event()
            && tree
                .children(v)
                .iter()
                .any(|&c| tree.is_leaf(c) && !tree.label(c).is_event())
    }))
}
