//! Value types shared by the whole crate: symbols, labels, maps on ordered
//! leaf pairs, rooted triples and the class partition of a map.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Token used for the no-event label in every text format.
pub const NO_EVENT_TOKEN: &str = "-";
/// Token used for the diagonal of a relation matrix.
pub const DIAGONAL_TOKEN: &str = ".";

const DELIMITERS: &[char] = &['(', ')', ',', ':', ';'];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid symbol token {0:?}")]
    InvalidSymbol(String),
    #[error("symbol token {0:?} is reserved")]
    ReservedToken(String),
    #[error("invalid leaf name {0:?}")]
    InvalidLeafName(String),
    #[error("duplicate leaf {0:?}")]
    DuplicateLeaf(String),
    #[error("at least two leaves are required, got {0}")]
    TooFewLeaves(usize),
    #[error("missing entry for pair ({0}, {1})")]
    MissingEntry(String, String),
    #[error("reflexive entry for ({0}, {0})")]
    ReflexiveEntry(String),
    #[error("entry mentions unknown leaf {0:?}")]
    UnknownLeaf(String),
    #[error("duplicate symbol {0:?} in alphabet")]
    DuplicateSymbol(String),
    #[error("triple leaves must be pairwise distinct: {0}, {1}, {2}")]
    DegenerateTriple(String, String, String),
}

fn has_forbidden_chars(token: &str) -> bool {
    token.is_empty()
        || token
            .chars()
            .any(|c| c.is_whitespace() || DELIMITERS.contains(&c))
}

/// Checks that `name` can be used as a leaf name in both text formats.
pub fn validate_leaf_name(name: &str) -> Result<(), ModelError> {
    if has_forbidden_chars(name) {
        return Err(ModelError::InvalidLeafName(name.to_string()));
    }
    Ok(())
}

/// An event symbol `m ∈ M`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Symbol(String);

impl Symbol {
    pub fn new(token: impl Into<String>) -> Result<Self, ModelError> {
        let token = token.into();
        if token == NO_EVENT_TOKEN || token == DIAGONAL_TOKEN {
            return Err(ModelError::ReservedToken(token));
        }
        if has_forbidden_chars(&token) {
            return Err(ModelError::InvalidSymbol(token));
        }
        Ok(Symbol(token))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An edge or pair label: an event symbol or the distinguished no-event value `⊗`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    NoEvent,
    Event(Symbol),
}

impl Label {
    /// Parses `-` as [`Label::NoEvent`], anything else as a symbol.
    pub fn parse(token: &str) -> Result<Self, ModelError> {
        if token == NO_EVENT_TOKEN {
            Ok(Label::NoEvent)
        } else {
            Symbol::new(token).map(Label::Event)
        }
    }

    pub fn event(token: &str) -> Result<Self, ModelError> {
        Symbol::new(token).map(Label::Event)
    }

    pub fn symbol(&self) -> Option<&Symbol> {
        match self {
            Label::NoEvent => None,
            Label::Event(s) => Some(s),
        }
    }

    pub fn is_event(&self) -> bool {
        matches!(self, Label::Event(_))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::NoEvent => f.write_str(NO_EVENT_TOKEN),
            Label::Event(s) => s.fmt(f),
        }
    }
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// The symbol set `M`. Never contains `⊗`; symbols are unique and kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Alphabet {
    symbols: Vec<Symbol>,
}

impl Alphabet {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self, ModelError> {
        let mut sorted = symbols;
        sorted.sort();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(ModelError::DuplicateSymbol(w[0].to_string()));
            }
        }
        Ok(Alphabet { symbols: sorted })
    }

    /// Symbols `"1" ..= "k"`, sorted as strings.
    pub fn numbered(k: usize) -> Self {
        let mut symbols: Vec<Symbol> = (1..=k).map(|i| Symbol(i.to_string())).collect();
        symbols.sort();
        Alphabet { symbols }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn position(&self, s: &Symbol) -> Option<usize> {
        self.symbols.binary_search(s).ok()
    }
}

/// Dense label code used inside algorithms: `0` is `⊗`, `k > 0` is the
/// `(k-1)`-th alphabet symbol.
pub type LabelCode = u32;

/// A map `ε` from ordered pairs of distinct leaves to labels.
///
/// The alphabet always consists of exactly the symbols that occur as some
/// `ε(x, y)`. Leaves keep the order they were given in; equality ignores it.
#[derive(Debug, Clone)]
pub struct FitchMap {
    leaves: Vec<String>,
    index: HashMap<String, usize>,
    alphabet: Alphabet,
    cells: Vec<LabelCode>,
}

impl FitchMap {
    /// Builds a map from a name-keyed table of entries.
    pub fn new(
        leaves: Vec<String>,
        entries: &HashMap<(String, String), Label>,
    ) -> Result<Self, ModelError> {
        let index = build_index(&leaves)?;
        for (x, y) in entries.keys() {
            if x == y {
                return Err(ModelError::ReflexiveEntry(x.clone()));
            }
            for name in [x, y] {
                if !index.contains_key(name) {
                    return Err(ModelError::UnknownLeaf(name.clone()));
                }
            }
        }
        let names = leaves.clone();
        FitchMap::build(leaves, index, |i, j| {
            let (x, y) = (&names[i], &names[j]);
            entries
                .get(&(x.clone(), y.clone()))
                .cloned()
                .ok_or_else(|| ModelError::MissingEntry(x.clone(), y.clone()))
        })
    }

    /// Builds a map by asking `f(x, y)` for every ordered pair of distinct leaves.
    pub fn from_fn<F>(leaves: Vec<String>, mut f: F) -> Result<Self, ModelError>
    where
        F: FnMut(&str, &str) -> Result<Label, ModelError>,
    {
        let index = build_index(&leaves)?;
        let names = leaves.clone();
        FitchMap::build(leaves, index, |i, j| f(&names[i], &names[j]))
    }

    /// Builds a map from a row-major `n × n` label matrix (diagonal ignored).
    pub fn from_matrix(leaves: Vec<String>, labels: &[Label]) -> Result<Self, ModelError> {
        let n = leaves.len();
        assert_eq!(labels.len(), n * n, "label matrix must be n x n");
        let index = build_index(&leaves)?;
        FitchMap::build(leaves, index, |i, j| Ok(labels[i * n + j].clone()))
    }

    fn build<F>(
        leaves: Vec<String>,
        index: HashMap<String, usize>,
        mut f: F,
    ) -> Result<Self, ModelError>
    where
        F: FnMut(usize, usize) -> Result<Label, ModelError>,
    {
        let n = leaves.len();
        let mut raw = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                raw.push(if i == j { Label::NoEvent } else { f(i, j)? });
            }
        }
        let mut symbols: Vec<Symbol> = raw.iter().filter_map(|l| l.symbol().cloned()).collect();
        symbols.sort();
        symbols.dedup();
        let alphabet = Alphabet { symbols };
        let cells = raw
            .iter()
            .map(|l| match l {
                Label::NoEvent => 0,
                Label::Event(s) => alphabet.position(s).unwrap() as LabelCode + 1,
            })
            .collect();
        Ok(FitchMap {
            leaves,
            index,
            alphabet,
            cells,
        })
    }

    /// Builds a map from dense codes relative to `symbols` (which need not all occur).
    pub(crate) fn from_codes(
        leaves: Vec<String>,
        symbols: &[Symbol],
        codes: &[LabelCode],
    ) -> Result<Self, ModelError> {
        let n = leaves.len();
        debug_assert_eq!(codes.len(), n * n);
        let index = build_index(&leaves)?;
        let mut used = vec![false; symbols.len() + 1];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    used[codes[i * n + j] as usize] = true;
                }
            }
        }
        // symbols that occur, sorted; remap codes accordingly
        let mut present: Vec<(Symbol, usize)> = symbols
            .iter()
            .enumerate()
            .filter(|(k, _)| used[k + 1])
            .map(|(k, s)| (s.clone(), k + 1))
            .collect();
        present.sort();
        let mut remap = vec![0 as LabelCode; symbols.len() + 1];
        for (new, (_, old)) in present.iter().enumerate() {
            remap[*old] = new as LabelCode + 1;
        }
        let cells = (0..n * n)
            .map(|p| {
                if p / n == p % n {
                    0
                } else {
                    remap[codes[p] as usize]
                }
            })
            .collect();
        Ok(FitchMap {
            leaves,
            index,
            alphabet: Alphabet {
                symbols: present.into_iter().map(|(s, _)| s).collect(),
            },
            cells,
        })
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn leaves(&self) -> &[String] {
        &self.leaves
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn leaf_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// `ε(x, y)` by name; `None` for unknown leaves or `x == y`.
    pub fn get(&self, x: &str, y: &str) -> Option<Label> {
        let (i, j) = (self.leaf_index(x)?, self.leaf_index(y)?);
        (i != j).then(|| self.label_at(i, j))
    }

    pub fn label_at(&self, i: usize, j: usize) -> Label {
        self.decode(self.code(i, j))
    }

    #[inline]
    pub fn code(&self, i: usize, j: usize) -> LabelCode {
        self.cells[i * self.leaves.len() + j]
    }

    pub fn decode(&self, code: LabelCode) -> Label {
        match code {
            0 => Label::NoEvent,
            k => Label::Event(self.alphabet.symbols[k as usize - 1].clone()),
        }
    }

    /// Code of `symbol` in this map, if it occurs.
    pub fn code_of(&self, symbol: &Symbol) -> Option<LabelCode> {
        self.alphabet.position(symbol).map(|p| p as LabelCode + 1)
    }

    /// True when no pair carries `⊗`.
    pub fn is_no_event_free(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| i == j || self.code(i, j) != 0))
    }

    /// Same map with leaves listed in `order` (a permutation of the leaf names).
    pub fn reordered(&self, order: &[String]) -> Result<Self, ModelError> {
        FitchMap::from_fn(order.to_vec(), |x, y| {
            self.get(x, y)
                .ok_or_else(|| ModelError::UnknownLeaf(format!("{x}/{y}")))
        })
    }
}

impl PartialEq for FitchMap {
    fn eq(&self, other: &Self) -> bool {
        if self.len() != other.len() || self.alphabet != other.alphabet {
            return false;
        }
        let perm: Option<Vec<usize>> = self.leaves.iter().map(|l| other.leaf_index(l)).collect();
        let Some(perm) = perm else { return false };
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| self.code(i, j) == other.code(perm[i], perm[j])))
    }
}

impl Eq for FitchMap {}

fn build_index(leaves: &[String]) -> Result<HashMap<String, usize>, ModelError> {
    if leaves.len() < 2 {
        return Err(ModelError::TooFewLeaves(leaves.len()));
    }
    let mut index = HashMap::with_capacity(leaves.len());
    for (i, l) in leaves.iter().enumerate() {
        validate_leaf_name(l)?;
        if index.insert(l.clone(), i).is_some() {
            return Err(ModelError::DuplicateLeaf(l.clone()));
        }
    }
    Ok(index)
}

/// A rooted triple `ab|c`; `{a, b}` is stored in sorted order so `ab|c == ba|c`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RootedTriple {
    a: String,
    b: String,
    c: String,
}

impl RootedTriple {
    pub fn new(
        a: impl Into<String>,
        b: impl Into<String>,
        c: impl Into<String>,
    ) -> Result<Self, ModelError> {
        let (a, b, c) = (a.into(), b.into(), c.into());
        if a == b || a == c || b == c {
            return Err(ModelError::DegenerateTriple(a, b, c));
        }
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        Ok(RootedTriple { a, b, c })
    }

    /// The cherry `{a, b}` in sorted order.
    pub fn pair(&self) -> (&str, &str) {
        (&self.a, &self.b)
    }

    pub fn outgroup(&self) -> &str {
        &self.c
    }

    pub fn leaves(&self) -> [&str; 3] {
        [&self.a, &self.b, &self.c]
    }
}

impl fmt::Display for RootedTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} | {}", self.a, self.b, self.c)
    }
}

/// A set of rooted triples, iterated in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TripleSet {
    triples: BTreeSet<RootedTriple>,
}

impl TripleSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, t: RootedTriple) -> bool {
        self.triples.insert(t)
    }

    pub fn contains(&self, t: &RootedTriple) -> bool {
        self.triples.contains(t)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &RootedTriple> {
        self.triples.iter()
    }

    pub fn is_subset(&self, other: &TripleSet) -> bool {
        self.triples.is_subset(&other.triples)
    }

    /// `L_R`: every leaf mentioned by some triple.
    pub fn leaf_universe(&self) -> BTreeSet<String> {
        self.triples
            .iter()
            .flat_map(|t| t.leaves().map(str::to_string))
            .collect()
    }

    /// Triples whose three leaves all lie in `names`.
    pub fn restricted_to(&self, names: &BTreeSet<String>) -> TripleSet {
        self.triples
            .iter()
            .filter(|t| t.leaves().iter().all(|l| names.contains(*l)))
            .cloned()
            .collect()
    }
}

impl FromIterator<RootedTriple> for TripleSet {
    fn from_iter<I: IntoIterator<Item = RootedTriple>>(iter: I) -> Self {
        TripleSet {
            triples: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a TripleSet {
    type Item = &'a RootedTriple;
    type IntoIter = std::collections::btree_set::Iter<'a, RootedTriple>;
    fn into_iter(self) -> Self::IntoIter {
        self.triples.iter()
    }
}

/// The classes `X_m` (one per alphabet symbol, alphabet order) and `X_⊗`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiPartition {
    classes: Vec<(Symbol, Vec<String>)>,
    no_event: Vec<String>,
}

impl QuasiPartition {
    pub(crate) fn new(classes: Vec<(Symbol, Vec<String>)>, no_event: Vec<String>) -> Self {
        QuasiPartition { classes, no_event }
    }

    pub fn classes(&self) -> &[(Symbol, Vec<String>)] {
        &self.classes
    }

    pub fn class_of(&self, symbol: &Symbol) -> Option<&[String]> {
        self.classes
            .iter()
            .find(|(s, _)| s == symbol)
            .map(|(_, c)| c.as_slice())
    }

    /// `X_⊗`.
    pub fn no_event(&self) -> &[String] {
        &self.no_event
    }

    /// Disjoint, covering `leaves`, at most one empty class.
    pub fn is_quasi_partition_of(&self, leaves: &[String]) -> bool {
        let mut seen = BTreeSet::new();
        let mut total = 0;
        let mut empty = 0;
        for members in self.classes.iter().map(|(_, c)| c).chain([&self.no_event]) {
            if members.is_empty() {
                empty += 1;
            }
            total += members.len();
            seen.extend(members.iter().cloned());
        }
        let all: BTreeSet<String> = leaves.iter().cloned().collect();
        empty <= 1 && total == seen.len() && seen == all
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn entries(v: &[(&str, &str, &str)]) -> HashMap<(String, String), Label> {
        v.iter()
            .map(|(x, y, l)| ((x.to_string(), y.to_string()), Label::parse(l).unwrap()))
            .collect()
    }

    #[test]
    fn reserved_symbols_rejected() {
        assert_eq!(Symbol::new("-"), Err(ModelError::ReservedToken("-".into())));
        assert!(matches!(
            Symbol::new("."),
            Err(ModelError::ReservedToken(_))
        ));
        assert!(Symbol::new("").is_err());
        assert!(Symbol::new("a b").is_err());
        assert!(Symbol::new("a:b").is_err());
        assert!(Symbol::new("hgt").is_ok());
    }

    #[test]
    fn all_no_event_map_has_empty_alphabet() {
        let m = FitchMap::new(
            names(&["a", "b"]),
            &entries(&[("a", "b", "-"), ("b", "a", "-")]),
        )
        .unwrap();
        assert!(m.alphabet().is_empty());
        assert_eq!(m.get("a", "b"), Some(Label::NoEvent));
    }

    #[test]
    fn alphabet_is_normalized_to_occurring_symbols() {
        let m = FitchMap::new(
            names(&["a", "b"]),
            &entries(&[("a", "b", "1"), ("b", "a", "-")]),
        )
        .unwrap();
        assert_eq!(m.alphabet().symbols(), &[Symbol::new("1").unwrap()]);
    }

    #[test]
    fn construction_errors() {
        let e = FitchMap::new(names(&["a", "b"]), &entries(&[("a", "b", "1")])).unwrap_err();
        assert_eq!(e, ModelError::MissingEntry("b".into(), "a".into()));
        let e = FitchMap::new(
            names(&["a", "b"]),
            &entries(&[("a", "b", "1"), ("b", "a", "-"), ("a", "a", "-")]),
        )
        .unwrap_err();
        assert_eq!(e, ModelError::ReflexiveEntry("a".into()));
        let e = FitchMap::new(names(&["a", "a"]), &HashMap::new()).unwrap_err();
        assert_eq!(e, ModelError::DuplicateLeaf("a".into()));
        let e = FitchMap::new(names(&["a"]), &HashMap::new()).unwrap_err();
        assert_eq!(e, ModelError::TooFewLeaves(1));
    }

    #[test]
    fn equality_ignores_leaf_order() {
        let e = entries(&[
            ("a", "b", "1"),
            ("b", "a", "-"),
            ("a", "c", "2"),
            ("c", "a", "-"),
            ("b", "c", "2"),
            ("c", "b", "1"),
        ]);
        let m1 = FitchMap::new(names(&["a", "b", "c"]), &e).unwrap();
        let m2 = FitchMap::new(names(&["c", "a", "b"]), &e).unwrap();
        assert_eq!(m1, m2);
        let mut e2 = e.clone();
        e2.insert(("c".into(), "b".into()), Label::NoEvent);
        let m3 = FitchMap::new(names(&["a", "b", "c"]), &e2).unwrap();
        assert_ne!(m1, m3);
    }

    #[test]
    fn triple_symmetry() {
        let t1 = RootedTriple::new("a", "b", "c").unwrap();
        let t2 = RootedTriple::new("b", "a", "c").unwrap();
        let t3 = RootedTriple::new("a", "c", "b").unwrap();
        assert_eq!(t1, t2);
        assert_ne!(t1, t3);
        assert!(RootedTriple::new("a", "a", "c").is_err());
        assert_eq!(t1.to_string(), "a b | c");
    }

    #[test]
    fn from_codes_drops_unused_symbols() {
        let syms = vec![Symbol::new("1").unwrap(), Symbol::new("2").unwrap()];
        let m = FitchMap::from_codes(names(&["a", "b"]), &syms, &[0, 2, 0, 0]).unwrap();
        assert_eq!(m.alphabet().symbols(), &[Symbol::new("2").unwrap()]);
        assert_eq!(m.code(0, 1), 1);
        assert_eq!(m.get("a", "b"), Some(Label::event("2").unwrap()));
    }
}
