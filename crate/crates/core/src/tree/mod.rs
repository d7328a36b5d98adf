//! Decorated planted trees, forests, letters and words.
//!
//! A [`Tree`] is `I_e(λ_k ∏ children)`: one edge `e` leaving the root, ending
//! at a node decorated by `k`, with the children grafted there.

mod text;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::freq_poly::{FreqVector, PolyError};

pub use text::parse_tree;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum TreeError {
    #[error("node {path:?}: decoration {found} but children give {expected}")]
    Inconsistent { path: Vec<usize>, expected: FreqVector, found: FreqVector },
    #[error("leaf {path:?}: decoration {freq} has a coefficient outside {{-1, 0, 1}}")]
    LeafCoefficient { path: Vec<usize>, freq: FreqVector },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("tree syntax: {0}")]
    Syntax(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    T1,
    T2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeDeco {
    pub kind: EdgeKind,
    pub conj: bool,
}

impl EdgeDeco {
    pub const T1: EdgeDeco = EdgeDeco { kind: EdgeKind::T1, conj: false };
    pub const T1_BAR: EdgeDeco = EdgeDeco { kind: EdgeKind::T1, conj: true };
    pub const T2: EdgeDeco = EdgeDeco { kind: EdgeKind::T2, conj: false };
    pub const T2_BAR: EdgeDeco = EdgeDeco { kind: EdgeKind::T2, conj: true };

    pub fn new(kind: EdgeKind, conj: bool) -> Self {
        EdgeDeco { kind, conj }
    }

    pub fn sign(&self) -> i64 {
        if self.conj {
            -1
        } else {
            1
        }
    }
}

impl fmt::Display for EdgeDeco {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            EdgeKind::T1 => "t1",
            EdgeKind::T2 => "t2",
        };
        write!(f, "{k},{}", self.conj as u8)
    }
}

/// Non-planar planted tree. Children are kept sorted, so the derived order
/// and equality act on the canonical form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tree {
    edge: EdgeDeco,
    children: Vec<Tree>,
    freq: FreqVector,
}

impl Tree {
    pub fn new(edge: EdgeDeco, freq: FreqVector, mut children: Vec<Tree>) -> Self {
        children.sort();
        Tree { edge, children, freq }
    }

    pub fn leaf(edge: EdgeDeco, freq: FreqVector) -> Self {
        Tree { edge, children: Vec::new(), freq }
    }

    /// Inner node whose decoration is derived from its children.
    pub fn node(edge: EdgeDeco, children: Vec<Tree>) -> Self {
        let freq = derived_freq(edge, &children);
        Tree::new(edge, freq, children)
    }

    pub fn edge(&self) -> EdgeDeco {
        self.edge
    }

    pub fn freq(&self) -> &FreqVector {
        &self.freq
    }

    pub fn children(&self) -> &[Tree] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Number of t2 edges.
    pub fn order(&self) -> usize {
        (self.edge.kind == EdgeKind::T2) as usize + self.children.iter().map(Tree::order).sum::<usize>()
    }

    pub fn edge_count(&self) -> usize {
        1 + self.children.iter().map(Tree::edge_count).sum::<usize>()
    }

    /// Nodes including the root.
    pub fn node_count(&self) -> usize {
        1 + self.edge_count()
    }

    pub fn leaves(&self) -> Vec<&Tree> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Tree>) {
        if self.is_leaf() {
            out.push(self);
        }
        for c in &self.children {
            c.collect_leaves(out);
        }
    }

    /// Checks leaf coefficients and frequency consistency at every inner node.
    pub fn validate(&self) -> Result<(), TreeError> {
        self.validate_at(&mut Vec::new())
    }

    fn validate_at(&self, path: &mut Vec<usize>) -> Result<(), TreeError> {
        if self.is_leaf() {
            if !self.freq.is_leaf_like() {
                return Err(TreeError::LeafCoefficient { path: path.clone(), freq: self.freq.clone() });
            }
            return Ok(());
        }
        let expected = derived_freq(self.edge, &self.children);
        if expected != self.freq {
            return Err(TreeError::Inconsistent { path: path.clone(), expected, found: self.freq.clone() });
        }
        for (i, c) in self.children.iter().enumerate() {
            path.push(i);
            c.validate_at(path)?;
            path.pop();
        }
        Ok(())
    }

    /// Departures from the structural class assumed by the algebra: a t2 edge
    /// sits under a t1 edge unless it is the root edge, at most one t2 edge per
    /// node, t2 edges end at nodes with t1 children only, leaves are t1 edges.
    pub fn shape_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.shape_at(None, &mut Vec::new(), &mut out);
        out
    }

    fn shape_at(&self, parent: Option<EdgeKind>, path: &mut Vec<usize>, out: &mut Vec<String>) {
        let t2 = self.edge.kind == EdgeKind::T2;
        if t2 && parent == Some(EdgeKind::T2) {
            out.push(format!("{path:?}: t2 edge directly under a t2 edge"));
        }
        if t2 && self.is_leaf() {
            out.push(format!("{path:?}: t2 edge ends at a leaf"));
        }
        let n_t2 = self.children.iter().filter(|c| c.edge.kind == EdgeKind::T2).count();
        if n_t2 > 1 {
            out.push(format!("{path:?}: {n_t2} t2 edges at one node"));
        }
        if t2 && n_t2 > 0 {
            out.push(format!("{path:?}: t2 edge ends at a node with a t2 child"));
        }
        for (i, c) in self.children.iter().enumerate() {
            path.push(i);
            c.shape_at(Some(self.edge.kind), path, out);
            path.pop();
        }
    }

    /// The tree with every node decoration set to zero.
    pub fn erased(&self) -> Tree {
        Tree::new(self.edge, FreqVector::zero(), self.children.iter().map(Tree::erased).collect())
    }

    /// Symmetry factor on edge decorations only.
    pub fn symmetry_factor(&self) -> u64 {
        self.erased().automorphisms()
    }

    /// Automorphisms preserving edge and node decorations.
    pub fn automorphisms(&self) -> u64 {
        forest_automorphisms(&self.children)
    }

    pub fn is_letter(&self) -> bool {
        self.edge.kind == EdgeKind::T2
            && !self.children.is_empty()
            && self.children.iter().all(|c| c.edge.kind == EdgeKind::T1 && c.is_leaf())
    }

    /// Largest symbol index in any decoration.
    pub fn max_symbol(&self) -> u32 {
        let own = self.freq.symbols().max().unwrap_or(0);
        self.children.iter().map(Tree::max_symbol).fold(own, u32::max)
    }

    /// `T = (∏ T_j) ⋆ T_r`: the root letter and the subtrees hanging below its leaves.
    pub fn star_decompose(&self) -> Result<StarDecomposition, TreeError> {
        if self.edge.kind != EdgeKind::T2 || self.children.is_empty() {
            return Err(TreeError::Shape(format!("{self} is not t2-planted with children")));
        }
        if let Some(c) = self.children.iter().find(|c| c.edge.kind != EdgeKind::T1) {
            return Err(TreeError::Shape(format!("child {c} of the root letter is not a t1 edge")));
        }
        let mut pairs: Vec<(Tree, &[Tree])> =
            self.children.iter().map(|c| (Tree::leaf(c.edge, c.freq.clone()), c.children.as_slice())).collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut grafts = Vec::new();
        for (i, (_, subs)) in pairs.iter().enumerate() {
            for s in subs.iter() {
                grafts.push((i, s.clone()));
            }
        }
        let root = Tree { edge: self.edge, freq: self.freq.clone(), children: pairs.into_iter().map(|p| p.0).collect() };
        Ok(StarDecomposition { root: Letter(root), grafts })
    }

    #[cfg(test)]
    pub(crate) fn children_mut(&mut self) -> &mut Vec<Tree> {
        &mut self.children
    }

    #[cfg(test)]
    pub(crate) fn resort(&mut self) {
        self.children.sort();
    }
}

/// Decoration forced on a node by its children.
pub fn derived_freq(edge: EdgeDeco, children: &[Tree]) -> FreqVector {
    let mut acc = FreqVector::zero();
    for c in children {
        acc = &acc + &c.freq.scale(c.edge.sign());
    }
    acc.scale(edge.sign())
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

fn forest_automorphisms(trees: &[Tree]) -> u64 {
    // trees are sorted, so equal ones are adjacent
    let mut s = 1u64;
    let mut i = 0;
    while i < trees.len() {
        let mut j = i;
        while j < trees.len() && trees[j] == trees[i] {
            j += 1;
        }
        let g = (j - i) as u64;
        s *= trees[i].automorphisms().pow(g as u32) * factorial(g);
        i = j;
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarDecomposition {
    pub root: Letter,
    /// `(leaf index in the root letter, subtree grafted there)`.
    pub grafts: Vec<(usize, Tree)>,
}

impl StarDecomposition {
    pub fn subtrees(&self) -> Vec<&Tree> {
        self.grafts.iter().map(|g| &g.1).collect()
    }

    /// Simultaneous grafting, the inverse of [`Tree::star_decompose`].
    pub fn reassemble(&self) -> Tree {
        let mut t = self.root.0.clone();
        for (i, s) in &self.grafts {
            t.children[*i].children.push(s.clone());
        }
        for c in &mut t.children {
            c.children.sort();
        }
        t.children.sort();
        t
    }
}

/// Multiset of trees; the empty forest is the unit.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Forest(Vec<Tree>);

impl Forest {
    pub fn unit() -> Self {
        Forest(Vec::new())
    }

    pub fn from_trees(mut trees: Vec<Tree>) -> Self {
        trees.sort();
        Forest(trees)
    }

    pub fn single(t: Tree) -> Self {
        Forest(vec![t])
    }

    pub fn trees(&self) -> &[Tree] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, o: &Forest) -> Forest {
        let mut v = self.0.clone();
        v.extend(o.0.iter().cloned());
        Forest::from_trees(v)
    }

    pub fn order(&self) -> usize {
        self.0.iter().map(Tree::order).sum()
    }

    pub fn node_count(&self) -> usize {
        self.0.iter().map(Tree::node_count).sum()
    }

    pub fn validate(&self) -> Result<(), TreeError> {
        self.0.iter().try_for_each(Tree::validate)
    }

    pub fn symmetry_factor(&self) -> u64 {
        let erased = Forest::from_trees(self.0.iter().map(Tree::erased).collect());
        forest_automorphisms(&erased.0)
    }

    pub fn automorphisms(&self) -> u64 {
        forest_automorphisms(&self.0)
    }

    pub fn single_tree(&self) -> Option<&Tree> {
        match self.0.as_slice() {
            [t] => Some(t),
            _ => None,
        }
    }
}

impl From<Tree> for Forest {
    fn from(t: Tree) -> Forest {
        Forest::single(t)
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " · ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// `I_(t2,a)(λ_ℓ ∏ I_(t1,a_j)(λ_ℓj))`: a t2 edge whose children are t1 leaves.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(Tree);

impl Letter {
    pub fn tree(&self) -> &Tree {
        &self.0
    }

    pub fn into_tree(self) -> Tree {
        self.0
    }
}

impl TryFrom<Tree> for Letter {
    type Error = TreeError;
    fn try_from(t: Tree) -> Result<Letter, TreeError> {
        if t.is_letter() {
            Ok(Letter(t))
        } else {
            Err(TreeError::Shape(format!("{t} is not a letter")))
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Letters indexed from the root side: `letters()[0]` is position 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// From letters listed root side first.
    pub fn from_root_side(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Positions `1..=j`.
    pub fn prefix(&self, j: usize) -> Word {
        Word(self.0[..j].to_vec())
    }

    /// Letter at 1-based position `j`.
    pub fn at(&self, j: usize) -> &Letter {
        &self.0[j - 1]
    }

    /// `L · self`: `L` becomes the new highest position.
    pub fn push_left(&self, l: Letter) -> Word {
        let mut v = self.0.clone();
        v.push(l);
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        // paper order: highest position on the left
        for (i, l) in self.0.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "[{l}]")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    kind: EdgeKind,
    conj: u8,
}

#[derive(Serialize, Deserialize)]
struct TreeJson {
    edge: EdgeJson,
    freq: String,
    #[serde(default)]
    children: Vec<TreeJson>,
}

impl Tree {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_json_struct()).expect("tree json")
    }

    fn to_json_struct(&self) -> TreeJson {
        TreeJson {
            edge: EdgeJson { kind: self.edge.kind, conj: self.edge.conj as u8 },
            freq: self.freq.to_string(),
            children: self.children.iter().map(Tree::to_json_struct).collect(),
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Tree, TreeError> {
        let j: TreeJson = serde_json::from_value(v.clone()).map_err(|e| TreeError::Syntax(e.to_string()))?;
        Tree::from_json_struct(&j)
    }

    fn from_json_struct(j: &TreeJson) -> Result<Tree, TreeError> {
        if j.edge.conj > 1 {
            return Err(TreeError::Syntax(format!("conj bit {} is not 0 or 1", j.edge.conj)));
        }
        let children = j.children.iter().map(Tree::from_json_struct).collect::<Result<Vec<_>, _>>()?;
        Ok(Tree::new(EdgeDeco::new(j.edge.kind, j.edge.conj == 1), FreqVector::parse(&j.freq)?, children))
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "I[{}]({}", self.edge, self.freq)?;
        for (i, c) in self.children.iter().enumerate() {
            write!(f, "{}{c}", if i == 0 { "; " } else { ", " })?;
        }
        write!(f, ")")
    }
}

/// Relabels symbols, e.g. to instantiate a template with fresh frequencies.
pub fn relabel(t: &Tree, map: &BTreeMap<u32, FreqVector>) -> Tree {
    let mut freq = FreqVector::zero();
    for (&s, &c) in t.freq.coefficients() {
        let img = map.get(&s).cloned().unwrap_or_else(|| FreqVector::symbol(s));
        freq = &freq + &img.scale(c);
    }
    Tree::new(t.edge, freq, t.children.iter().map(|c| relabel(c, map)).collect())
}

#[cfg(test)]
mod tests;
