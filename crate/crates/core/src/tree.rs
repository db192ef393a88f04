//! Edge-labeled rooted phylogenetic trees.
//!
//! A [`LabeledTree`] is only obtained through [`TreeBuilder::build`], which
//! checks the phylogenetic degree conditions and puts the tree into canonical
//! form: children are ordered by the smallest leaf name below them and vertex
//! ids follow the resulting preorder, so the root is always vertex `0` and a
//! parent id is always smaller than its children's ids. Two trees compare equal
//! iff they are isomorphic with identical leaf names and edge labels.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::model::{validate_leaf_name, Label, ModelError, Symbol};

pub type VertexId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("vertex {vertex} has {children} children; inner vertices need at least 2")]
    NonPhylogenetic { vertex: VertexId, children: usize },
    #[error("duplicate leaf name {0:?}")]
    DuplicateLeafName(String),
    #[error("leaf vertex {0} has no name")]
    UnnamedLeaf(VertexId),
    #[error("named vertex {0:?} has children")]
    NamedInnerVertex(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("unknown leaf {0:?}")]
    UnknownLeaf(String),
    #[error("path query needs two distinct leaves, got {0:?} twice")]
    SameLeaf(String),
    #[error("need at least {needed} leaves, got {got}")]
    TooFewLeaves { needed: usize, got: usize },
    #[error("path between vertices {upper} and {lower} carries symbols {first} and {second}")]
    LabelConflict {
        upper: VertexId,
        lower: VertexId,
        first: Symbol,
        second: Symbol,
    },
    #[error("({0}, {1}) is an outer edge")]
    OuterEdge(VertexId, VertexId),
    #[error("({0}, {1}) is not an edge")]
    UnknownEdge(VertexId, VertexId),
    #[error("leaf {0:?} of the displayed tree is missing from the displaying tree")]
    LeafSetNotContained(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Vertex {
    parent: Option<VertexId>,
    children: Vec<VertexId>,
    // label of the edge (parent, self); NoEvent on the root
    label: Label,
    name: Option<String>,
}

/// Incremental construction of a [`LabeledTree`]. Vertex ids handed out by the
/// builder are only meaningful until [`TreeBuilder::build`].
#[derive(Debug, Clone)]
pub struct TreeBuilder {
    nodes: Vec<Vertex>,
}

impl Default for TreeBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl TreeBuilder {
    /// A builder holding only the root, id `0`.
    pub fn new() -> Self {
        TreeBuilder {
            nodes: vec![Vertex {
                parent: None,
                children: Vec::new(),
                label: Label::NoEvent,
                name: None,
            }],
        }
    }

    pub fn root(&self) -> VertexId {
        0
    }

    pub fn add_inner(&mut self, parent: VertexId, label: Label) -> VertexId {
        self.push(parent, label, None)
    }

    pub fn add_leaf(
        &mut self,
        parent: VertexId,
        name: impl Into<String>,
        label: Label,
    ) -> VertexId {
        self.push(parent, label, Some(name.into()))
    }

    pub fn set_label(&mut self, v: VertexId, label: Label) {
        self.nodes[v].label = label;
    }

    fn push(&mut self, parent: VertexId, label: Label, name: Option<String>) -> VertexId {
        let id = self.nodes.len();
        self.nodes.push(Vertex {
            parent: Some(parent),
            children: Vec::new(),
            label,
            name,
        });
        self.nodes[parent].children.push(id);
        id
    }

    /// Validates and canonicalizes. Vertices unreachable from the root are dropped.
    pub fn build(self) -> Result<LabeledTree, TreeError> {
        let nodes = self.nodes;
        let mut seen = HashMap::new();
        // postorder over reachable vertices
        let mut order = Vec::with_capacity(nodes.len());
        let mut stack = vec![(0usize, false)];
        while let Some((v, expanded)) = stack.pop() {
            if expanded {
                order.push(v);
                continue;
            }
            stack.push((v, true));
            for &c in nodes[v].children.iter().rev() {
                stack.push((c, false));
            }
        }
        let mut min_name: Vec<Option<&str>> = vec![None; nodes.len()];
        for &v in &order {
            let node = &nodes[v];
            match &node.name {
                Some(name) => {
                    if !node.children.is_empty() {
                        return Err(TreeError::NamedInnerVertex(name.clone()));
                    }
                    validate_leaf_name(name)?;
                    if seen.insert(name.as_str(), v).is_some() {
                        return Err(TreeError::DuplicateLeafName(name.clone()));
                    }
                    min_name[v] = Some(name);
                }
                None => {
                    if node.children.is_empty() {
                        return Err(TreeError::UnnamedLeaf(v));
                    }
                    if node.children.len() < 2 {
                        return Err(TreeError::NonPhylogenetic {
                            vertex: v,
                            children: node.children.len(),
                        });
                    }
                    min_name[v] = node.children.iter().filter_map(|&c| min_name[c]).min();
                }
            }
        }

        // preorder renumbering with sorted children
        let mut new_id = vec![usize::MAX; nodes.len()];
        let mut preorder = Vec::with_capacity(order.len());
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            new_id[v] = preorder.len();
            preorder.push(v);
            let mut kids = nodes[v].children.clone();
            kids.sort_by(|&a, &b| min_name[a].cmp(&min_name[b]));
            for &c in kids.iter().rev() {
                stack.push(c);
            }
        }
        let mut vertices: Vec<Vertex> = preorder
            .iter()
            .map(|&old| {
                let n = &nodes[old];
                let mut children: Vec<VertexId> = n.children.iter().map(|&c| new_id[c]).collect();
                children.sort_unstable();
                Vertex {
                    parent: n.parent.map(|p| new_id[p]),
                    children,
                    label: n.label.clone(),
                    name: n.name.clone(),
                }
            })
            .collect();
        vertices[0].label = Label::NoEvent;
        Ok(LabeledTree::from_canonical(vertices))
    }
}

/// An edge-labeled rooted phylogenetic tree `(T, λ)`.
#[derive(Debug, Clone)]
pub struct LabeledTree {
    vertices: Vec<Vertex>,
    depth: Vec<usize>,
    leaves: Vec<VertexId>,
    leaf_index: HashMap<String, VertexId>,
}

impl LabeledTree {
    fn from_canonical(vertices: Vec<Vertex>) -> Self {
        let mut depth = vec![0; vertices.len()];
        let mut leaves = Vec::new();
        let mut leaf_index = HashMap::new();
        for (v, vert) in vertices.iter().enumerate() {
            if let Some(p) = vert.parent {
                depth[v] = depth[p] + 1;
            }
            if let Some(name) = &vert.name {
                leaves.push(v);
                leaf_index.insert(name.clone(), v);
            }
        }
        LabeledTree {
            vertices,
            depth,
            leaves,
            leaf_index,
        }
    }

    /// The star tree on `names` with all edges labeled by `label(name)`.
    pub fn star<S: AsRef<str>>(
        names: &[S],
        mut label: impl FnMut(&str) -> Label,
    ) -> Result<Self, TreeError> {
        let mut b = TreeBuilder::new();
        for n in names {
            b.add_leaf(0, n.as_ref(), label(n.as_ref()));
        }
        b.build()
    }

    pub fn root(&self) -> VertexId {
        0
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_leaves(&self) -> usize {
        self.leaves.len()
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.vertices[v].parent
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.vertices[v].children
    }

    pub fn depth(&self, v: VertexId) -> usize {
        self.depth[v]
    }

    /// Label of the edge from `v`'s parent to `v` (`⊗` for the root).
    pub fn label(&self, v: VertexId) -> &Label {
        &self.vertices[v].label
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.vertices[v].name.is_some()
    }

    pub fn leaf_name(&self, v: VertexId) -> Option<&str> {
        self.vertices[v].name.as_deref()
    }

    pub fn vertex_of(&self, name: &str) -> Option<VertexId> {
        self.leaf_index.get(name).copied()
    }

    /// Leaf vertices in preorder.
    pub fn leaves(&self) -> &[VertexId] {
        &self.leaves
    }

    /// Leaf names in preorder.
    pub fn leaf_names(&self) -> impl Iterator<Item = &str> + '_ {
        self.leaves.iter().map(move |&v| self.leaf_name(v).unwrap())
    }

    /// Sorted leaf names.
    pub fn sorted_leaf_names(&self) -> Vec<String> {
        let mut v: Vec<String> = self.leaf_names().map(str::to_string).collect();
        v.sort();
        v
    }

    /// All edges `(parent, child)` in preorder of the child.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (1..self.vertices.len()).map(move |v| (self.vertices[v].parent.unwrap(), v))
    }

    /// Edges whose endpoints are both inner vertices.
    pub fn inner_edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges().filter(move |&(_, v)| !self.is_leaf(v))
    }

    pub fn is_edge(&self, u: VertexId, v: VertexId) -> bool {
        v < self.vertices.len() && self.vertices[v].parent == Some(u)
    }

    /// Distinct event symbols used on edges, sorted.
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut s: Vec<Symbol> = self
            .vertices
            .iter()
            .filter_map(|v| v.label.symbol().cloned())
            .collect();
        s.sort();
        s.dedup();
        s
    }

    /// True iff `u` is an ancestor of `v` (reflexive).
    pub fn is_ancestor(&self, u: VertexId, mut v: VertexId) -> bool {
        while self.depth[v] > self.depth[u] {
            v = self.vertices[v].parent.unwrap();
        }
        u == v
    }

    /// Same tree with every edge label replaced by `f(child vertex, old label)`.
    pub fn relabeled(&self, mut f: impl FnMut(VertexId, &Label) -> Label) -> LabeledTree {
        let mut t = self.clone();
        for v in 1..t.vertices.len() {
            t.vertices[v].label = f(v, &self.vertices[v].label);
        }
        t
    }

    /// Topology only: every edge relabeled `⊗`.
    pub fn topology(&self) -> LabeledTree {
        self.relabeled(|_, _| Label::NoEvent)
    }

    /// Equal up to isomorphism ignoring edge labels.
    pub fn same_topology(&self, other: &LabeledTree) -> bool {
        self.vertices.len() == other.vertices.len()
            && self
                .vertices
                .iter()
                .zip(&other.vertices)
                .all(|(a, b)| a.parent == b.parent && a.name == b.name)
    }

    /// A builder pre-populated with this tree, keeping vertex ids.
    pub fn to_builder(&self) -> TreeBuilder {
        TreeBuilder {
            nodes: self.vertices.clone(),
        }
    }
}

impl PartialEq for LabeledTree {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
    }
}

impl Eq for LabeledTree {}

impl fmt::Display for LabeledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::io::newick_string(self))
    }
}
