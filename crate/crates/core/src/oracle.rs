//! Brute-force ground truth for small inputs, and seeded instance generators.
//!
//! Nothing here uses the recognizer or the dense evaluator: explainers are
//! found by enumerating every topology and every consistent labeling and
//! checking each ordered pair along its lca path.

use std::collections::HashMap;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::evaluate::evaluate;
use crate::model::{Alphabet, FitchMap, Label, LabelCode, ModelError, Symbol};
use crate::tree::{LabeledTree, TreeBuilder, VertexId};

/// Largest leaf set for exhaustive topology enumeration.
pub const MAX_TOPOLOGY_LEAVES: usize = 7;
/// Largest leaf set and alphabet for explainer searches.
pub const MAX_SEARCH_LEAVES: usize = 5;
pub const MAX_SEARCH_SYMBOLS: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{got} leaves exceed the enumeration bound of {max}")]
    TooManyLeaves { got: usize, max: usize },
    #[error("at least 2 leaves are needed, got {0}")]
    TooFewLeaves(usize),
    #[error("search over {leaves} leaves and {symbols} symbols exceeds the budget")]
    BudgetExceeded { leaves: usize, symbols: usize },
    #[error("map leaves differ from the index leaves")]
    LeafSetMismatch,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Number of rooted phylogenetic trees on `n` labeled leaves.
///
/// Counts trees by the block containing the first leaf: with `g(k)` the
/// number of forests of at least one tree on `k` leaves (`g(1) = 1`,
/// `g(k) = 2 t(k)` for `k ≥ 2`), `t(n) = Σ C(n-1, k-1) t(k) g(n-k)`.
pub fn count_rooted_trees(n: usize) -> u128 {
    if n <= 1 {
        return n as u128;
    }
    let mut binom = vec![vec![0u128; n + 1]; n + 1];
    for i in 0..=n {
        binom[i][0] = 1;
        for j in 1..=i {
            binom[i][j] = binom[i - 1][j - 1] + binom[i - 1][j];
        }
    }
    let mut t = vec![0u128; n + 1];
    let mut g = vec![0u128; n + 1];
    t[1] = 1;
    g[0] = 1;
    g[1] = 1;
    for m in 2..=n {
        t[m] = (1..m).map(|k| binom[m - 1][k - 1] * t[k] * g[m - k]).sum();
        g[m] = 2 * t[m];
    }
    t[n]
}

/// A topology as the list of its non-singleton clusters over leaf bits.
pub(crate) type Clusters = Vec<u8>;

struct TopologyCache {
    trees: Vec<Vec<Clusters>>,
}

fn lowest_bit(mask: u8) -> u8 {
    mask & mask.wrapping_neg()
}

/// Submasks of `mask` that contain `bit`, excluding `mask` itself when `proper`.
fn blocks_with(mask: u8, bit: u8, proper: bool) -> impl Iterator<Item = u8> {
    let rest = mask & !bit;
    let mut sub = rest;
    let mut done = false;
    std::iter::from_fn(move || loop {
        if done {
            return None;
        }
        let block = sub | bit;
        if sub == 0 {
            done = true;
        } else {
            sub = (sub - 1) & rest;
        }
        if !(proper && block == mask) {
            return Some(block);
        }
    })
}

impl TopologyCache {
    fn build() -> Self {
        let size = 1usize << MAX_TOPOLOGY_LEAVES;
        let mut trees: Vec<Vec<Clusters>> = vec![Vec::new(); size];
        let mut forests: Vec<Vec<Clusters>> = vec![Vec::new(); size];
        forests[0] = vec![Vec::new()];
        // submasks are numerically smaller, so increasing order is a valid schedule
        for mask in 1..size {
            let m = mask as u8;
            let low = lowest_bit(m);
            if m == low {
                trees[mask] = vec![Vec::new()];
            } else {
                let mut out = Vec::new();
                for block in blocks_with(m, low, true) {
                    for t in &trees[block as usize] {
                        for f in &forests[(m & !block) as usize] {
                            let mut c = Vec::with_capacity(1 + t.len() + f.len());
                            c.push(m);
                            c.extend_from_slice(t);
                            c.extend_from_slice(f);
                            out.push(c);
                        }
                    }
                }
                trees[mask] = out;
            }
            let mut out = Vec::new();
            for block in blocks_with(m, low, false) {
                for t in &trees[block as usize] {
                    for f in &forests[(m & !block) as usize] {
                        let mut c = t.clone();
                        c.extend_from_slice(f);
                        out.push(c);
                    }
                }
            }
            forests[mask] = out;
        }
        // fewest clusters first, so searches meet the coarsest explainer first
        for list in &mut trees {
            for c in list.iter_mut() {
                c.sort_unstable_by(|a, b| b.cmp(a));
            }
            list.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        }
        TopologyCache { trees }
    }
}

/// Cluster lists of every topology on leaves `0..n`, for `1 ≤ n ≤ 7`.
pub(crate) fn topology_clusters(n: usize) -> &'static [Clusters] {
    static CACHE: OnceLock<TopologyCache> = OnceLock::new();
    let cache = CACHE.get_or_init(TopologyCache::build);
    &cache.trees[(1usize << n) - 1]
}

/// Builds the tree with the given clusters (bit `i` is `names[i]`), all edges `⊗`.
pub(crate) fn tree_from_clusters<S: AsRef<str>>(clusters: &[u8], names: &[S]) -> LabeledTree {
    let mut order: Vec<u8> = clusters.to_vec();
    order.sort_by_key(|c| std::cmp::Reverse(c.count_ones()));
    let mut b = TreeBuilder::new();
    let mut placed: Vec<(u8, VertexId)> = vec![(order[0], b.root())];
    let parent_of = |placed: &[(u8, VertexId)], m: u8| {
        placed
            .iter()
            .rev()
            .find(|(c, _)| c & m == m && *c != m)
            .map(|&(_, v)| v)
            .unwrap()
    };
    for &c in &order[1..] {
        let p = parent_of(&placed, c);
        placed.push((c, b.add_inner(p, Label::NoEvent)));
    }
    for (i, name) in names.iter().enumerate() {
        let p = parent_of(&placed, 1 << i);
        b.add_leaf(p, name.as_ref(), Label::NoEvent);
    }
    b.build().expect("cluster systems yield phylogenetic trees")
}

/// Every rooted phylogenetic topology on `leaves`, each exactly once, all
/// edges `⊗`, ordered by increasing number of inner vertices.
pub fn enumerate_topologies<S: AsRef<str>>(leaves: &[S]) -> Result<Vec<LabeledTree>, OracleError> {
    let n = leaves.len();
    if n < 2 {
        return Err(OracleError::TooFewLeaves(n));
    }
    if n > MAX_TOPOLOGY_LEAVES {
        return Err(OracleError::TooManyLeaves {
            got: n,
            max: MAX_TOPOLOGY_LEAVES,
        });
    }
    Ok(topology_clusters(n)
        .iter()
        .map(|c| tree_from_clusters(c, leaves))
        .collect())
}

/// Every label-consistent labeling of `topology` over `alphabet`.
///
/// Generated root-down: below a free vertex an edge takes `⊗` or any symbol;
/// below a vertex committed to `m` it takes `⊗` or `m`.
pub fn enumerate_consistent_labelings(
    topology: &LabeledTree,
    alphabet: &Alphabet,
) -> Vec<LabeledTree> {
    let nv = topology.num_vertices();
    let k = alphabet.len();
    let mut out = Vec::new();
    let mut labels = vec![0usize; nv];
    let mut state = vec![0usize; nv];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        v: usize,
        nv: usize,
        k: usize,
        topology: &LabeledTree,
        alphabet: &Alphabet,
        labels: &mut Vec<usize>,
        state: &mut Vec<usize>,
        out: &mut Vec<LabeledTree>,
    ) {
        if v == nv {
            out.push(topology.relabeled(|w, _| code_label(alphabet, labels[w])));
            return;
        }
        let s = state[topology.parent(v).unwrap()];
        let choices: Vec<usize> = if s == 0 {
            (0..=k).collect()
        } else {
            vec![0, s]
        };
        for c in choices {
            labels[v] = c;
            state[v] = if c == 0 { s } else { c };
            rec(v + 1, nv, k, topology, alphabet, labels, state, out);
        }
    }
    rec(
        1,
        nv,
        k,
        topology,
        alphabet,
        &mut labels,
        &mut state,
        &mut out,
    );
    out
}

fn code_label(alphabet: &Alphabet, code: usize) -> Label {
    match code {
        0 => Label::NoEvent,
        c => Label::Event(alphabet.symbols()[c - 1].clone()),
    }
}

/// Naive evaluation: for each ordered pair, walk from `y` up to `lca(x, y)`
/// and collect symbols. Codes index into `symbols` (`0` is `⊗`); `None` when
/// some path carries two symbols or a label is outside `symbols`.
pub fn naive_codes<S: AsRef<str>>(
    tree: &LabeledTree,
    leaves: &[S],
    symbols: &[Symbol],
) -> Option<Vec<LabelCode>> {
    let n = leaves.len();
    let vs: Vec<VertexId> = leaves
        .iter()
        .map(|l| tree.vertex_of(l.as_ref()))
        .collect::<Option<_>>()?;
    let code_of = |v: VertexId| -> Option<LabelCode> {
        match tree.label(v).symbol() {
            None => Some(0),
            Some(s) => symbols
                .iter()
                .position(|t| t == s)
                .map(|p| p as LabelCode + 1),
        }
    };
    let mut codes = vec![0; n * n];
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let mut w = vs[j];
            let mut found = 0;
            while !tree.is_ancestor(w, vs[i]) {
                let c = code_of(w)?;
                if c != 0 {
                    if found != 0 && found != c {
                        return None;
                    }
                    found = c;
                }
                w = tree.parent(w).unwrap();
            }
            codes[i * n + j] = found;
        }
    }
    Some(codes)
}

fn search_guard(map: &FitchMap) -> Result<(), OracleError> {
    if map.len() > MAX_SEARCH_LEAVES || map.alphabet().len() > MAX_SEARCH_SYMBOLS {
        return Err(OracleError::BudgetExceeded {
            leaves: map.len(),
            symbols: map.alphabet().len(),
        });
    }
    Ok(())
}

fn map_codes(map: &FitchMap) -> Vec<LabelCode> {
    let n = map.len();
    (0..n * n)
        .map(|p| {
            if p / n == p % n {
                0
            } else {
                map.code(p / n, p % n)
            }
        })
        .collect()
}

fn explainers(map: &FitchMap, first_only: bool) -> Result<Vec<LabeledTree>, OracleError> {
    search_guard(map)?;
    let target = map_codes(map);
    let mut out = Vec::new();
    for topology in enumerate_topologies(map.leaves())? {
        for t in enumerate_consistent_labelings(&topology, map.alphabet()) {
            if naive_codes(&t, map.leaves(), map.alphabet().symbols()).as_ref() == Some(&target) {
                out.push(t);
                if first_only {
                    return Ok(out);
                }
            }
        }
    }
    Ok(out)
}

/// First explaining tree in enumeration order, if any.
pub fn brute_force_tree_like(map: &FitchMap) -> Result<Option<LabeledTree>, OracleError> {
    Ok(explainers(map, true)?.pop())
}

/// Every explaining tree.
pub fn all_explainers(map: &FitchMap) -> Result<Vec<LabeledTree>, OracleError> {
    explainers(map, false)
}

/// All labeled trees on a fixed leaf set and alphabet, grouped by the map
/// they explain. Lookup replaces a full search per map.
pub struct ExplainerIndex {
    leaves: Vec<String>,
    alphabet: Alphabet,
    by_codes: HashMap<Vec<LabelCode>, Vec<LabeledTree>>,
}

impl ExplainerIndex {
    pub fn new(leaves: &[String], alphabet: Alphabet) -> Result<Self, OracleError> {
        if leaves.len() > MAX_SEARCH_LEAVES || alphabet.len() > MAX_SEARCH_SYMBOLS {
            return Err(OracleError::BudgetExceeded {
                leaves: leaves.len(),
                symbols: alphabet.len(),
            });
        }
        let mut by_codes: HashMap<Vec<LabelCode>, Vec<LabeledTree>> = HashMap::new();
        for topology in enumerate_topologies(leaves)? {
            for t in enumerate_consistent_labelings(&topology, &alphabet) {
                let codes = naive_codes(&t, leaves, alphabet.symbols())
                    .expect("generated labelings are consistent");
                by_codes.entry(codes).or_default().push(t);
            }
        }
        Ok(ExplainerIndex {
            leaves: leaves.to_vec(),
            alphabet,
            by_codes,
        })
    }

    pub fn leaves(&self) -> &[String] {
        &self.leaves
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Number of distinct tree-like maps.
    pub fn tree_like_maps(&self) -> usize {
        self.by_codes.len()
    }

    /// Number of labeled trees indexed.
    pub fn trees(&self) -> usize {
        self.by_codes.values().map(Vec::len).sum()
    }

    /// Explainers of the row-major code matrix over the index leaves and alphabet.
    pub fn lookup_codes(&self, codes: &[LabelCode]) -> &[LabeledTree] {
        self.by_codes.get(codes).map_or(&[], Vec::as_slice)
    }

    pub fn lookup(&self, map: &FitchMap) -> Result<&[LabeledTree], OracleError> {
        let n = self.leaves.len();
        if map.len() != n {
            return Err(OracleError::LeafSetMismatch);
        }
        let idx: Vec<usize> = self
            .leaves
            .iter()
            .map(|l| map.leaf_index(l))
            .collect::<Option<_>>()
            .ok_or(OracleError::LeafSetMismatch)?;
        let mut codes = vec![0; n * n];
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                codes[i * n + j] = match map.label_at(idx[i], idx[j]).symbol() {
                    None => 0,
                    Some(s) => match self.alphabet.position(s) {
                        Some(p) => p as LabelCode + 1,
                        None => return Ok(&[]),
                    },
                };
            }
        }
        Ok(self.lookup_codes(&codes))
    }
}

/// Leaf names `x0 .. x{n-1}`, zero-padded to a common width.
pub fn leaf_names(n: usize) -> Vec<String> {
    let width = n.saturating_sub(1).to_string().len();
    (0..n).map(|i| format!("x{i:0width$}")).collect()
}

/// Random topology by sequential leaf attachment: each new leaf picks a
/// uniform vertex and either becomes its extra child (inner vertices, with
/// probability 1/2) or subdivides the edge above it.
pub fn random_topology<R: Rng, S: AsRef<str>>(rng: &mut R, names: &[S]) -> LabeledTree {
    assert!(
        names.len() >= 2,
        "a phylogenetic tree needs at least 2 leaves"
    );
    // vertex ids: 0 inner root, leaves carry Some(name index)
    let mut parent: Vec<Option<usize>> = vec![None, Some(0), Some(0)];
    let mut leaf: Vec<Option<usize>> = vec![None, Some(0), Some(1)];
    let mut root = 0;
    for i in 2..names.len() {
        let v = rng.gen_range(0..parent.len());
        let new_leaf = parent.len();
        if leaf[v].is_none() && rng.gen_bool(0.5) {
            parent.push(Some(v));
            leaf.push(Some(i));
        } else {
            let u = new_leaf + 1;
            parent.push(Some(u));
            leaf.push(Some(i));
            parent.push(parent[v]);
            leaf.push(None);
            parent[v] = Some(u);
            if root == v {
                root = u;
            }
        }
    }
    let mut children = vec![Vec::new(); parent.len()];
    for (v, p) in parent.iter().enumerate() {
        if let Some(p) = p {
            children[*p].push(v);
        }
    }
    let mut b = TreeBuilder::new();
    let mut stack = vec![(root, b.root())];
    while let Some((v, image)) = stack.pop() {
        for &c in &children[v] {
            match leaf[c] {
                Some(i) => {
                    b.add_leaf(image, names[i].as_ref(), Label::NoEvent);
                }
                None => {
                    let w = b.add_inner(image, Label::NoEvent);
                    stack.push((c, w));
                }
            }
        }
    }
    b.build()
        .expect("growth process keeps the tree phylogenetic")
}

/// Random consistent labeling over symbols `1..=k` by the root-down state
/// machine: a free edge stays `⊗` with probability 1/2, a committed edge
/// repeats its symbol with probability 1/2. With `event_leaf_edges` every
/// edge into a leaf carries a symbol, which makes the map `⊗`-free.
pub fn random_labeling<R: Rng>(
    rng: &mut R,
    topology: &LabeledTree,
    k: usize,
    event_leaf_edges: bool,
) -> LabeledTree {
    assert!(k >= 1, "alphabet must be nonempty");
    let alphabet = Alphabet::numbered(k);
    let nv = topology.num_vertices();
    let mut state = vec![0usize; nv];
    let mut labels = vec![0usize; nv];
    for v in 1..nv {
        let s = state[topology.parent(v).unwrap()];
        let forced = event_leaf_edges && topology.is_leaf(v);
        labels[v] = match s {
            0 if forced || rng.gen_bool(0.5) => rng.gen_range(1..=k),
            0 => 0,
            s if forced || rng.gen_bool(0.5) => s,
            _ => 0,
        };
        state[v] = if labels[v] == 0 { s } else { labels[v] };
    }
    topology.relabeled(|w, _| code_label(&alphabet, labels[w]))
}

/// Seeded tree and the map it explains. Identical seeds give identical output.
pub fn random_tree_like_instance(seed: u64, n: usize, k: usize) -> (LabeledTree, FitchMap) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let topology = random_topology(&mut rng, &leaf_names(n));
    let tree = random_labeling(&mut rng, &topology, k, false);
    let map = evaluate(&tree).expect("generated labelings are consistent");
    (tree, map)
}

/// As [`random_tree_like_instance`], restricted to `⊗`-free maps.
pub fn random_no_otimes_instance(seed: u64, n: usize, k: usize) -> (LabeledTree, FitchMap) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let topology = random_topology(&mut rng, &leaf_names(n));
    let tree = random_labeling(&mut rng, &topology, k, true);
    let map = evaluate(&tree).expect("generated labelings are consistent");
    (tree, map)
}

/// Map with every entry drawn uniformly from `⊗` and symbols `1..=k`.
pub fn random_map<R: Rng, S: AsRef<str>>(rng: &mut R, names: &[S], k: usize) -> FitchMap {
    let alphabet = Alphabet::numbered(k);
    FitchMap::from_fn(
        names.iter().map(|s| s.as_ref().to_string()).collect(),
        |_, _| Ok(code_label(&alphabet, rng.gen_range(0..=k))),
    )
    .expect("generated names are valid")
}

/// Rewrites `changes` random off-diagonal entries. Replacement labels come
/// from symbols `1..=k`, plus `⊗` when `allow_no_event`.
pub fn mutate_map<R: Rng>(
    rng: &mut R,
    map: &FitchMap,
    changes: usize,
    k: usize,
    allow_no_event: bool,
) -> FitchMap {
    let n = map.len();
    let alphabet = Alphabet::numbered(k);
    let mut labels: Vec<Label> = (0..n * n)
        .map(|p| {
            if p / n == p % n {
                Label::NoEvent
            } else {
                map.label_at(p / n, p % n)
            }
        })
        .collect();
    let mut pairs: Vec<usize> = (0..n * n).filter(|p| p / n != p % n).collect();
    pairs.shuffle(rng);
    for &p in pairs.iter().take(changes) {
        let low = if allow_no_event { 0 } else { 1 };
        labels[p] = code_label(&alphabet, rng.gen_range(low..=k));
    }
    FitchMap::from_matrix(map.leaves().to_vec(), &labels).expect("leaves come from a valid map")
}
