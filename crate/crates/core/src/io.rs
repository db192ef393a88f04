//! Text formats.
//!
//! * Relation matrix (`.fm`): a `#fitchmap v1` header, a tab-separated leaf
//!   line, then one tab-separated row per leaf. Cell `(i, j)` holds
//!   `ε(leaf_i, leaf_j)`: `-` for `⊗`, a symbol token otherwise, and `.` on
//!   the diagonal. LF line endings, trailing newline required.
//! * Labeled Newick (`.lnw`): `((a:-,b:2):2,c:-);` where each edge label sits
//!   after the colon at the child end.
//! * Triple lists: one `a b | c` per line, sorted.
//!
//! Writers are canonical, so `write(read(text)) == text` for canonical files.

use std::collections::HashSet;

use thiserror::Error;

use crate::model::{
    validate_leaf_name, FitchMap, Label, ModelError, RootedTriple, TripleSet, DIAGONAL_TOKEN,
    NO_EVENT_TOKEN,
};
use crate::tree::{LabeledTree, TreeBuilder, TreeError, VertexId};

pub const MAP_HEADER: &str = "#fitchmap v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("{line}:{col}: parse error: {reason}")]
    Parse {
        line: usize,
        col: usize,
        reason: String,
    },
    #[error("{line}:{col}: shape error: {reason}")]
    Shape {
        line: usize,
        col: usize,
        reason: String,
    },
    #[error("{line}:{col}: reserved token {token:?}")]
    ReservedToken {
        line: usize,
        col: usize,
        token: String,
    },
    #[error("{line}:{col}: vertex has {children} children, a phylogenetic tree needs at least 2")]
    NonPhylogenetic {
        line: usize,
        col: usize,
        children: usize,
    },
    #[error("{line}:{col}: duplicate leaf name {name:?}")]
    DuplicateLeafName {
        line: usize,
        col: usize,
        name: String,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

impl FormatError {
    /// Short machine-readable kind, e.g. `"ParseError"`.
    pub fn kind(&self) -> &'static str {
        match self {
            FormatError::Parse { .. } => "ParseError",
            FormatError::Shape { .. } => "ShapeError",
            FormatError::ReservedToken { .. } => "ReservedToken",
            FormatError::NonPhylogenetic { .. } => "NonPhylogenetic",
            FormatError::DuplicateLeafName { .. } => "DuplicateLeafName",
            FormatError::Model(_) => "ModelError",
            FormatError::Tree(_) => "TreeError",
        }
    }

    /// `(line, column)`, both 1-based, when the error has a position.
    pub fn position(&self) -> Option<(usize, usize)> {
        match *self {
            FormatError::Parse { line, col, .. }
            | FormatError::Shape { line, col, .. }
            | FormatError::ReservedToken { line, col, .. }
            | FormatError::NonPhylogenetic { line, col, .. }
            | FormatError::DuplicateLeafName { line, col, .. } => Some((line, col)),
            _ => None,
        }
    }
}

fn parse_err(line: usize, col: usize, reason: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        col,
        reason: reason.into(),
    }
}

fn shape_err(line: usize, col: usize, reason: impl Into<String>) -> FormatError {
    FormatError::Shape {
        line,
        col,
        reason: reason.into(),
    }
}

/// Splits `line` on tabs, yielding `(1-based column, cell)`.
fn cells(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut col = 1;
    line.split('\t').map(move |cell| {
        let at = col;
        col += cell.chars().count() + 1;
        (at, cell)
    })
}

fn check_plain_token(line: usize, col: usize, token: &str) -> Result<(), FormatError> {
    if token.is_empty() {
        return Err(parse_err(line, col, "empty cell"));
    }
    if let Some((off, c)) = token.char_indices().find(|(_, c)| c.is_whitespace()) {
        let col = col + token[..off].chars().count();
        return Err(parse_err(line, col, format!("unexpected whitespace {c:?}")));
    }
    Ok(())
}

pub fn read_map(text: &str) -> Result<FitchMap, FormatError> {
    let Some(body) = text.strip_suffix('\n') else {
        let line = text.split('\n').count();
        let col = text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        return Err(parse_err(line, col, "missing trailing newline"));
    };
    let lines: Vec<&str> = body.split('\n').collect();
    if lines[0] != MAP_HEADER {
        return Err(parse_err(1, 1, format!("expected header {MAP_HEADER:?}")));
    }
    let Some(leaf_line) = lines.get(1) else {
        return Err(shape_err(2, 1, "missing leaf line"));
    };
    let mut leaves = Vec::new();
    let mut seen = HashSet::new();
    for (col, name) in cells(leaf_line) {
        check_plain_token(2, col, name)?;
        if name == NO_EVENT_TOKEN || name == DIAGONAL_TOKEN {
            return Err(FormatError::ReservedToken {
                line: 2,
                col,
                token: name.to_string(),
            });
        }
        validate_leaf_name(name).map_err(|e| parse_err(2, col, e.to_string()))?;
        if !seen.insert(name) {
            return Err(FormatError::DuplicateLeafName {
                line: 2,
                col,
                name: name.to_string(),
            });
        }
        leaves.push(name.to_string());
    }
    let n = leaves.len();
    if n < 2 {
        return Err(shape_err(2, 1, format!("need at least 2 leaves, got {n}")));
    }
    let rows = &lines[2..];
    if rows.len() != n {
        let line = 3 + rows.len().min(n);
        return Err(shape_err(
            line,
            1,
            format!("expected {n} rows, found {}", rows.len()),
        ));
    }
    let mut labels = vec![Label::NoEvent; n * n];
    for (i, row) in rows.iter().enumerate() {
        let line = i + 3;
        let mut count = 0;
        for (j, (col, cell)) in cells(row).enumerate() {
            count += 1;
            if j >= n {
                return Err(shape_err(line, col, format!("row has more than {n} cells")));
            }
            check_plain_token(line, col, cell)?;
            if i == j {
                if cell != DIAGONAL_TOKEN {
                    return Err(parse_err(
                        line,
                        col,
                        format!("diagonal cell must be {DIAGONAL_TOKEN:?}"),
                    ));
                }
                continue;
            }
            if cell == DIAGONAL_TOKEN {
                return Err(FormatError::ReservedToken {
                    line,
                    col,
                    token: cell.to_string(),
                });
            }
            labels[i * n + j] =
                Label::parse(cell).map_err(|e| parse_err(line, col, e.to_string()))?;
        }
        if count != n {
            let col = row.chars().count() + 1;
            return Err(shape_err(
                line,
                col,
                format!("row has {count} cells, expected {n}"),
            ));
        }
    }
    Ok(FitchMap::from_matrix(leaves, &labels)?)
}

/// Relation matrix text, leaves in the map's own order.
pub fn write_map(map: &FitchMap) -> String {
    let n = map.len();
    let mut out = String::with_capacity(16 + n * n * 2);
    out.push_str(MAP_HEADER);
    out.push('\n');
    out.push_str(&map.leaves().join("\t"));
    out.push('\n');
    for i in 0..n {
        for j in 0..n {
            if j > 0 {
                out.push('\t');
            }
            if i == j {
                out.push_str(DIAGONAL_TOKEN);
            } else {
                match map.code(i, j) {
                    0 => out.push_str(NO_EVENT_TOKEN),
                    k => out.push_str(map.alphabet().symbols()[k as usize - 1].as_str()),
                }
            }
        }
        out.push('\n');
    }
    out
}

struct NewickParser {
    chars: Vec<char>,
    pos: usize,
    line_starts: Vec<usize>,
    seen: HashSet<String>,
    // vertex created by the last `node` call, waiting for its edge label
    pending: Option<VertexId>,
}

impl NewickParser {
    fn new(text: &str) -> Self {
        let chars: Vec<char> = text.chars().collect();
        let mut line_starts = vec![0];
        for (i, &c) in chars.iter().enumerate() {
            if c == '\n' {
                line_starts.push(i + 1);
            }
        }
        NewickParser {
            chars,
            pos: 0,
            line_starts,
            seen: HashSet::new(),
            pending: None,
        }
    }

    fn at(&self, pos: usize) -> (usize, usize) {
        let line = self.line_starts.partition_point(|&s| s <= pos);
        (line, pos - self.line_starts[line - 1] + 1)
    }

    fn err(&self, pos: usize, reason: impl Into<String>) -> FormatError {
        let (line, col) = self.at(pos);
        parse_err(line, col, reason)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), FormatError> {
        match self.peek() {
            Some(d) if d == c => {
                self.pos += 1;
                Ok(())
            }
            Some(d) => Err(self.err(self.pos, format!("expected {c:?}, found {d:?}"))),
            None => Err(self.err(self.pos, format!("expected {c:?}, found end of input"))),
        }
    }

    fn token(&mut self) -> (usize, String) {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || "(),:;".contains(c) {
                break;
            }
            self.pos += 1;
        }
        (start, self.chars[start..self.pos].iter().collect())
    }

    /// Parses a node below `parent` (or the root when `parent` is `None`).
    fn node(&mut self, b: &mut TreeBuilder, parent: Option<VertexId>) -> Result<(), FormatError> {
        if self.peek() == Some('(') {
            let open = self.pos;
            self.pos += 1;
            let me = match parent {
                None => b.root(),
                // placeholder label, fixed by the caller after ':'
                Some(p) => b.add_inner(p, Label::NoEvent),
            };
            let mut children = 0;
            loop {
                self.child(b, me)?;
                children += 1;
                match self.peek() {
                    Some(',') => self.pos += 1,
                    _ => break,
                }
            }
            self.expect(')')?;
            if children < 2 {
                let (line, col) = self.at(open);
                return Err(FormatError::NonPhylogenetic {
                    line,
                    col,
                    children,
                });
            }
            self.pending = Some(me);
            Ok(())
        } else {
            let (start, name) = self.token();
            if name.is_empty() {
                return Err(self.err(start, "expected leaf name or '('"));
            }
            let Some(p) = parent else {
                let (line, col) = self.at(start);
                return Err(FormatError::NonPhylogenetic {
                    line,
                    col,
                    children: 0,
                });
            };
            validate_leaf_name(&name).map_err(|e| self.err(start, e.to_string()))?;
            if !self.seen.insert(name.clone()) {
                let (line, col) = self.at(start);
                return Err(FormatError::DuplicateLeafName { line, col, name });
            }
            self.pending = Some(b.add_leaf(p, name, Label::NoEvent));
            Ok(())
        }
    }

    fn child(&mut self, b: &mut TreeBuilder, parent: VertexId) -> Result<(), FormatError> {
        self.node(b, Some(parent))?;
        let v = self.pending.take().unwrap();
        self.expect(':')?;
        let (start, tok) = self.token();
        if tok.is_empty() {
            return Err(self.err(start, "expected edge label"));
        }
        if tok == DIAGONAL_TOKEN {
            let (line, col) = self.at(start);
            return Err(FormatError::ReservedToken {
                line,
                col,
                token: tok,
            });
        }
        let label = Label::parse(&tok).map_err(|e| self.err(start, e.to_string()))?;
        b.set_label(v, label);
        Ok(())
    }
}

pub fn read_tree(text: &str) -> Result<LabeledTree, FormatError> {
    let mut p = NewickParser::new(text);
    let mut b = TreeBuilder::new();
    p.node(&mut b, None)?;
    p.pending = None;
    p.expect(';')?;
    if p.peek() == Some('\n') {
        p.pos += 1;
    }
    if p.pos != p.chars.len() {
        return Err(p.err(p.pos, "trailing characters after ';'"));
    }
    Ok(b.build()?)
}

/// Canonical labeled Newick without a trailing newline.
pub fn newick_string(tree: &LabeledTree) -> String {
    fn rec(t: &LabeledTree, v: VertexId, out: &mut String) {
        if let Some(name) = t.leaf_name(v) {
            out.push_str(name);
            return;
        }
        out.push('(');
        for (k, &c) in t.children(v).iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            rec(t, c, out);
            out.push(':');
            out.push_str(&t.label(c).to_string());
        }
        out.push(')');
    }
    let mut out = String::new();
    rec(tree, tree.root(), &mut out);
    out.push(';');
    out
}

/// Canonical labeled Newick followed by a newline.
pub fn write_tree(tree: &LabeledTree) -> String {
    let mut s = newick_string(tree);
    s.push('\n');
    s
}

/// One `a b | c` per line, lexicographically sorted.
pub fn write_triples(triples: &TripleSet) -> String {
    let mut lines: Vec<String> = triples.iter().map(|t| t.to_string()).collect();
    lines.sort();
    lines.iter().map(|l| format!("{l}\n")).collect()
}

pub fn read_triples(text: &str) -> Result<TripleSet, FormatError> {
    let mut out = TripleSet::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 4 || toks[2] != "|" {
            return Err(parse_err(line_no, 1, "expected `a b | c`"));
        }
        let t = RootedTriple::new(toks[0], toks[1], toks[3])
            .map_err(|e| parse_err(line_no, 1, e.to_string()))?;
        out.insert(t);
    }
    Ok(out)
}
