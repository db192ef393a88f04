//! Rooted triples: informative triples of a map, BUILD, and triple closure.
//!
//! A 3-leaf restriction of a map is *informative* when exactly one labeled
//! binary triple explains it (up to renaming symbols). The table of such
//! patterns is derived by evaluating every labeled 3-leaf tree.

use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use thiserror::Error;

use crate::evaluate::{evaluate_dense, is_label_consistent};
use crate::model::{FitchMap, Label, LabelCode, RootedTriple, TripleSet};
use crate::oracle::{topology_clusters, MAX_TOPOLOGY_LEAVES};
use crate::simple_fitch::TRIAD_PAIRS;
use crate::tree::{LabeledTree, TreeBuilder, TreeError, VertexId};
use crate::treeops::lca_of;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TripleError {
    #[error("triples are inconsistent on {{{}}}", .0.join(", "))]
    Inconsistent(Vec<String>),
    #[error("{got} leaves exceed the closure bound of {max}")]
    TooManyLeaves { got: usize, max: usize },
    #[error("no tree displays every input triple")]
    InconsistentInput,
    #[error("at least 2 leaves are needed, got {0}")]
    TooFewLeaves(usize),
    #[error("triple mentions unknown leaf {0:?}")]
    UnknownLeaf(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Six pair codes of a 3-leaf map in [`TRIAD_PAIRS`] order.
pub type PatternCodes = [u8; 6];

/// An informative pattern with its unique explaining triple.
#[derive(Debug, Clone)]
pub struct InformativePattern {
    /// Codes with symbols renamed `1, 2, ...` by first occurrence.
    pub codes: PatternCodes,
    /// The labeled triple on leaves `"0"`, `"1"`, `"2"`.
    pub tree: LabeledTree,
    /// Cherry and outgroup as positions `(a, b, c)`.
    pub triple: (usize, usize, usize),
}

#[derive(Debug, Clone)]
pub struct InformativePatternTable {
    patterns: Vec<InformativePattern>,
    lookup: HashMap<PatternCodes, usize>,
    classes: Vec<PatternCodes>,
}

impl InformativePatternTable {
    pub fn patterns(&self) -> &[InformativePattern] {
        &self.patterns
    }

    /// Canonical representative of each class under leaf permutation and
    /// symbol renaming.
    pub fn classes(&self) -> &[PatternCodes] {
        &self.classes
    }

    /// The pattern matching `codes`, which need not be normalized.
    pub fn get(&self, codes: PatternCodes) -> Option<&InformativePattern> {
        self.lookup
            .get(&normalize(codes)?)
            .map(|&i| &self.patterns[i])
    }
}

/// Renames nonzero codes `1, 2, 3` by first occurrence; `None` for more than
/// three distinct symbols.
pub fn normalize(codes: PatternCodes) -> Option<PatternCodes> {
    let mut seen: Vec<u8> = Vec::with_capacity(3);
    let mut out = [0; 6];
    for (o, &c) in out.iter_mut().zip(&codes) {
        if c == 0 {
            continue;
        }
        let k = match seen.iter().position(|&s| s == c) {
            Some(k) => k,
            None => {
                if seen.len() == 3 {
                    return None;
                }
                seen.push(c);
                seen.len() - 1
            }
        };
        *o = k as u8 + 1;
    }
    Some(out)
}

/// Codes after relabeling leaf `i` as `perm[i]`.
fn permute(codes: PatternCodes, perm: [usize; 3]) -> PatternCodes {
    let mut out = [0; 6];
    for (k, &(a, b)) in TRIAD_PAIRS.iter().enumerate() {
        let target = TRIAD_PAIRS
            .iter()
            .position(|&p| p == (perm[a], perm[b]))
            .unwrap();
        out[target] = codes[k];
    }
    out
}

fn canonical(codes: PatternCodes) -> PatternCodes {
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    PERMS
        .iter()
        .map(|&p| normalize(permute(codes, p)).unwrap())
        .min()
        .unwrap()
}

/// Cherry pair and outgroup of a binary 3-leaf shape.
type Cherry = (usize, usize, usize);

/// Topology, normalized edge codes and tree of one pattern explainer.
type Explainer = (Option<Cherry>, Vec<u8>, LabeledTree);

/// Every label-consistent 3-leaf tree over symbols `1, 2, 3` on leaves
/// `"0"`, `"1"`, `"2"`, with its cherry and outgroup for binary shapes.
fn labeled_three_leaf_trees() -> Vec<(LabeledTree, Option<Cherry>)> {
    let labels: Vec<Label> = std::iter::once(Label::NoEvent)
        .chain((1..=3).map(|s| Label::event(&s.to_string()).unwrap()))
        .collect();
    let mut out = Vec::new();
    let shapes: [Option<usize>; 4] = [None, Some(0), Some(1), Some(2)];
    for shape in shapes {
        let edges = if shape.is_none() { 3 } else { 4 };
        for code in 0..4usize.pow(edges) {
            let lab = |k: u32| labels[code / 4usize.pow(k) % 4].clone();
            let mut b = TreeBuilder::new();
            let triple = match shape {
                None => {
                    for leaf in 0..3u32 {
                        b.add_leaf(0, leaf.to_string(), lab(leaf));
                    }
                    None
                }
                Some(c) => {
                    let inner = b.add_inner(0, lab(0));
                    let pair: Vec<usize> = (0..3).filter(|&l| l != c).collect();
                    b.add_leaf(inner, pair[0].to_string(), lab(1));
                    b.add_leaf(inner, pair[1].to_string(), lab(2));
                    b.add_leaf(0, c.to_string(), lab(3));
                    Some((pair[0], pair[1], c))
                }
            };
            let t = b.build().unwrap();
            if is_label_consistent(&t) {
                out.push((t, triple));
            }
        }
    }
    out
}

/// Pattern of a 3-leaf tree whose symbols are numerals.
fn tree_pattern(t: &LabeledTree) -> PatternCodes {
    let dense = evaluate_dense(t).expect("consistent");
    let mut codes = [0u8; 6];
    for (k, &(a, b)) in TRIAD_PAIRS.iter().enumerate() {
        // map codes are relative to the tree's own symbols; rename to the symbol text
        let c = dense.codes[a * 3 + b];
        codes[k] = if c == 0 {
            0
        } else {
            dense.symbols[c as usize - 1]
                .as_str()
                .parse::<u8>()
                .unwrap()
        };
    }
    codes
}

/// Derives the informative patterns by evaluating every labeled 3-leaf tree
/// and keeping the digraphs explained by exactly one binary labeled triple,
/// up to symbol renaming.
pub fn derive_informative_patterns() -> InformativePatternTable {
    // normalized pattern -> distinct explainers, each as (topology, normalized edge codes)
    let mut explainers: HashMap<PatternCodes, Vec<Explainer>> = HashMap::new();
    for (t, triple) in labeled_three_leaf_trees() {
        let raw = tree_pattern(&t);
        let pattern = normalize(raw).unwrap();
        // apply the pattern's renaming to the edge labels
        let mut rename = [0u8; 4];
        for (r, p) in raw.iter().zip(&pattern) {
            rename[*r as usize] = *p;
        }
        let edge_codes: Vec<u8> = (1..t.num_vertices())
            .map(|v| {
                t.label(v)
                    .symbol()
                    .map_or(0, |s| rename[s.as_str().parse::<usize>().unwrap()])
            })
            .collect();
        let entry = explainers.entry(pattern).or_default();
        if !entry
            .iter()
            .any(|(tr, e, _)| *tr == triple && *e == edge_codes)
        {
            let renamed = t.relabeled(|v, _| match v {
                0 => Label::NoEvent,
                v => match edge_codes[v - 1] {
                    0 => Label::NoEvent,
                    c => Label::event(&c.to_string()).unwrap(),
                },
            });
            entry.push((triple, edge_codes, renamed));
        }
    }
    let mut patterns: Vec<InformativePattern> = explainers
        .into_iter()
        .filter_map(|(codes, mut ex)| match ex.as_slice() {
            [(Some(_), _, _)] => {
                let (triple, _, tree) = ex.pop().unwrap();
                Some(InformativePattern {
                    codes,
                    tree,
                    triple: triple.unwrap(),
                })
            }
            _ => None,
        })
        .collect();
    patterns.sort_by_key(|p| p.codes);
    let lookup = patterns
        .iter()
        .enumerate()
        .map(|(i, p)| (p.codes, i))
        .collect();
    let mut classes: Vec<PatternCodes> = patterns.iter().map(|p| canonical(p.codes)).collect();
    classes.sort_unstable();
    classes.dedup();
    InformativePatternTable {
        patterns,
        lookup,
        classes,
    }
}

pub fn informative_table() -> &'static InformativePatternTable {
    static TABLE: OnceLock<InformativePatternTable> = OnceLock::new();
    TABLE.get_or_init(derive_informative_patterns)
}

/// All informative triples of `map`, as topological triples.
pub fn informative_triples(map: &FitchMap) -> TripleSet {
    let table = informative_table();
    let n = map.len();
    let code = |i: usize, j: usize| -> u8 {
        let c: LabelCode = map.code(i, j);
        u8::try_from(c).unwrap_or(u8::MAX)
    };
    let mut out = TripleSet::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let leaves = [i, j, k];
                let mut codes = [0u8; 6];
                for (slot, &(a, b)) in codes.iter_mut().zip(&TRIAD_PAIRS) {
                    *slot = code(leaves[a], leaves[b]);
                }
                if let Some(p) = table.get(codes) {
                    let (a, b, c) = p.triple;
                    let name = |x: usize| map.leaves()[leaves[x]].clone();
                    out.insert(RootedTriple::new(name(a), name(b), name(c)).unwrap());
                }
            }
        }
    }
    out
}

/// BUILD: the coarsest topology displaying every triple, or the leaf set of
/// the first component that cannot be split. Children are ordered by
/// smallest leaf name; all edges are `⊗`.
pub fn aho_build<S: AsRef<str>>(
    triples: &TripleSet,
    leaves: &[S],
) -> Result<LabeledTree, TripleError> {
    let mut names: Vec<String> = leaves.iter().map(|s| s.as_ref().to_string()).collect();
    names.sort();
    names.dedup();
    if names.len() < 2 {
        return Err(TripleError::TooFewLeaves(names.len()));
    }
    let index: HashMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut encoded = Vec::with_capacity(triples.len());
    for t in triples {
        let pos = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| TripleError::UnknownLeaf(s.to_string()))
        };
        let (a, b) = t.pair();
        encoded.push((pos(a)?, pos(b)?, pos(t.outgroup())?));
    }

    let n = names.len();
    let mut builder = TreeBuilder::new();
    let mut work: Vec<(VertexId, Vec<usize>)> = vec![(builder.root(), (0..n).collect())];
    let mut inside = vec![false; n];
    let mut uf = UnionFind::new(n);
    while let Some((node, set)) = work.pop() {
        for &x in &set {
            inside[x] = true;
            uf.reset(x);
        }
        for &(a, b, c) in &encoded {
            if inside[a] && inside[b] && inside[c] {
                uf.union(a, b);
            }
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for &x in &set {
            groups.entry(uf.find(x)).or_default().push(x);
        }
        for &x in &set {
            inside[x] = false;
        }
        if groups.len() == 1 {
            return Err(TripleError::Inconsistent(
                set.iter().map(|&i| names[i].clone()).collect(),
            ));
        }
        let mut groups: Vec<Vec<usize>> = groups.into_values().collect();
        groups.sort();
        for g in groups {
            if let [x] = g[..] {
                builder.add_leaf(node, &names[x], Label::NoEvent);
            } else {
                let child = builder.add_inner(node, Label::NoEvent);
                work.push((child, g));
            }
        }
    }
    Ok(builder.build()?)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn reset(&mut self, x: usize) {
        self.parent[x] = x;
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Bit position of triple `ab|c` over leaves `0..n` (`a < b`, any `c`).
/// Subsets `i < j < k` are numbered colexicographically; the offset within
/// a subset is the position of the outgroup.
fn triple_bit(a: usize, b: usize, c: usize) -> usize {
    let mut s = [a, b, c];
    s.sort_unstable();
    let subset = s[0] + s[1] * (s[1] - 1) / 2 + s[2] * (s[2] - 1) * (s[2] - 2) / 6;
    3 * subset + s.iter().position(|&x| x == c).unwrap()
}

/// Triple bitsets of every topology on `n ≤ 7` leaves, cached per `n`.
fn topology_triple_sets(n: usize) -> &'static [u128] {
    static CACHE: OnceLock<Vec<Vec<u128>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| {
        (0..=MAX_TOPOLOGY_LEAVES)
            .map(|n| {
                if n < 3 {
                    return vec![0];
                }
                topology_clusters(n)
                    .iter()
                    .map(|clusters| {
                        let mut bits = 0u128;
                        for &cl in clusters {
                            for a in 0..n {
                                for b in a + 1..n {
                                    if cl >> a & 1 == 0 || cl >> b & 1 == 0 {
                                        continue;
                                    }
                                    for c in (0..n).filter(|&c| cl >> c & 1 == 0) {
                                        bits |= 1 << triple_bit(a, b, c);
                                    }
                                }
                            }
                        }
                        bits
                    })
                    .collect()
            })
            .collect()
    });
    &cache[n]
}

/// `cl(R)` over an explicit leaf universe containing `L_R`.
pub fn closure_on<S: AsRef<str>>(
    triples: &TripleSet,
    universe: &[S],
) -> Result<TripleSet, TripleError> {
    let mut names: Vec<String> = universe.iter().map(|s| s.as_ref().to_string()).collect();
    names.sort();
    names.dedup();
    let n = names.len();
    if n > MAX_TOPOLOGY_LEAVES {
        return Err(TripleError::TooManyLeaves {
            got: n,
            max: MAX_TOPOLOGY_LEAVES,
        });
    }
    let pos = |s: &str| {
        names
            .binary_search_by(|x| x.as_str().cmp(s))
            .map_err(|_| TripleError::UnknownLeaf(s.to_string()))
    };
    let mut input = 0u128;
    for t in triples {
        let (a, b) = t.pair();
        input |= 1 << triple_bit(pos(a)?, pos(b)?, pos(t.outgroup())?);
    }
    let mut acc = !0u128;
    let mut any = false;
    for &bits in topology_triple_sets(n) {
        if bits & input == input {
            acc &= bits;
            any = true;
        }
    }
    if !any {
        return Err(TripleError::InconsistentInput);
    }
    let mut out = TripleSet::new();
    for i in 0..n {
        for j in i + 1..n {
            for c in (0..n).filter(|&c| c != i && c != j) {
                if acc >> triple_bit(i, j, c) & 1 == 1 {
                    out.insert(RootedTriple::new(&names[i], &names[j], &names[c]).unwrap());
                }
            }
        }
    }
    Ok(out)
}

/// `cl(R)` over `L_R`, for at most 7 leaves.
pub fn closure_small(triples: &TripleSet) -> Result<TripleSet, TripleError> {
    let universe: Vec<String> = triples.leaf_universe().into_iter().collect();
    closure_on(triples, &universe)
}

/// `R` identifies the topology of `tree`: `cl(R) = r(T)` over the leaves of `tree`.
pub fn identifies(triples: &TripleSet, tree: &LabeledTree) -> Result<bool, TripleError> {
    let names = tree.sorted_leaf_names();
    let leaf_set: BTreeSet<&str> = names.iter().map(String::as_str).collect();
    for t in triples {
        for l in t.leaves() {
            if !leaf_set.contains(l) {
                return Err(TripleError::UnknownLeaf(l.to_string()));
            }
        }
    }
    Ok(closure_on(triples, &names)? == crate::treeops::triples_of(tree))
}

/// `ab|c` distinguishes `(u, v)`: `lca(a, b) = v` and `lca(a, b, c) = u`.
pub fn distinguishes(
    triple: &RootedTriple,
    tree: &LabeledTree,
    edge: (VertexId, VertexId),
) -> Result<bool, TripleError> {
    let (u, v) = edge;
    if u >= tree.num_vertices() || v >= tree.num_vertices() || !tree.is_edge(u, v) {
        return Err(TreeError::UnknownEdge(u, v).into());
    }
    let [a, b, c] = triple.leaves().map(|l| {
        tree.vertex_of(l)
            .ok_or_else(|| TripleError::UnknownLeaf(l.to_string()))
    });
    let (a, b, c) = (a?, b?, c?);
    let ab = lca_of(tree, a, b);
    Ok(ab == v && lca_of(tree, ab, c) == u)
}
