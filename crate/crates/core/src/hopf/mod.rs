//! Coproduct, grafting and its adjoint, arborification and shuffles.

mod universe;

use std::collections::BTreeMap;
use std::fmt;

use crate::tree::{EdgeKind, Forest, Letter, Tree, Word};

pub use universe::{class_universe, pairing_duality_check, DualityReport};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum HopfError {
    #[error("arborification needs t2-planted trees, got {0}")]
    NotT2Planted(String),
    #[error("expected the unit or a single tree, got a forest of {0} trees")]
    NotATree(usize),
}

/// Integer combination of `left ⊗ right` forests.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TensorSum(BTreeMap<(Forest, Forest), i64>);

impl TensorSum {
    pub fn zero() -> Self {
        TensorSum::default()
    }

    pub fn term(l: Forest, r: Forest) -> Self {
        let mut s = TensorSum::zero();
        s.add(l, r, 1);
        s
    }

    pub fn add(&mut self, l: Forest, r: Forest, c: i64) {
        if c == 0 {
            return;
        }
        let key = (l, r);
        let e = self.0.entry(key.clone()).or_insert(0);
        *e += c;
        if *e == 0 {
            self.0.remove(&key);
        }
    }

    pub fn add_sum(&mut self, o: &TensorSum, c: i64) {
        for ((l, r), v) in &o.0 {
            self.add(l.clone(), r.clone(), v * c);
        }
    }

    /// Componentwise forest product.
    pub fn mul(&self, o: &TensorSum) -> TensorSum {
        let mut out = TensorSum::zero();
        for ((a, b), x) in &self.0 {
            for ((c, d), y) in &o.0 {
                out.add(a.mul(c), b.mul(d), x * y);
            }
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Forest, &Forest, i64)> {
        self.0.iter().map(|((l, r), c)| (l, r, *c))
    }

    pub fn coefficient(&self, l: &Forest, r: &Forest) -> i64 {
        self.0.get(&(l.clone(), r.clone())).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms()
                .map(|(l, r, c)| {
                    serde_json::json!({
                        "coeff": c,
                        "left": l.trees().iter().map(Tree::to_json).collect::<Vec<_>>(),
                        "right": r.trees().iter().map(Tree::to_json).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        )
    }
}

impl fmt::Display for TensorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, (l, r, c)) in self.terms().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{c:+} {l} ⊗ {r}")?;
        }
        Ok(())
    }
}

/// Integer combination of words.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WordSum(BTreeMap<Word, i64>);

impl WordSum {
    pub fn zero() -> Self {
        WordSum::default()
    }

    pub fn word(w: Word) -> Self {
        let mut s = WordSum::zero();
        s.add(w, 1);
        s
    }

    pub fn add(&mut self, w: Word, c: i64) {
        if c == 0 {
            return;
        }
        let e = self.0.entry(w.clone()).or_insert(0);
        *e += c;
        if *e == 0 {
            self.0.remove(&w);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, i64)> {
        self.0.iter().map(|(w, c)| (w, *c))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of coefficients, i.e. the number of words counted with multiplicity.
    pub fn total(&self) -> i64 {
        self.0.values().sum()
    }

    pub fn shuffle(&self, o: &WordSum) -> WordSum {
        let mut out = WordSum::zero();
        for (u, a) in self.terms() {
            for (v, b) in o.terms() {
                for (w, c) in shuffle(u, v).terms() {
                    out.add(w.clone(), a * b * c);
                }
            }
        }
        out
    }
}

impl fmt::Display for WordSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{c:+} {w}")?;
        }
        Ok(())
    }
}

/// Integer combination of forests.
pub type ForestSum = BTreeMap<Forest, i64>;

fn is_t2(t: &Tree) -> bool {
    t.edge().kind == EdgeKind::T2
}

/// Butcher–Connes–Kreimer coproduct of a tree: admissible cuts of t2 edges,
/// cut branches left, root part right.
pub fn coproduct_tree(t: &Tree) -> TensorSum {
    let below = coproduct_bck(&Forest::from_trees(t.children().to_vec()));
    let mut out = TensorSum::zero();
    for (l, r, c) in below.terms() {
        let root = Tree::new(t.edge(), t.freq().clone(), r.trees().to_vec());
        out.add(l.clone(), Forest::single(root), c);
    }
    if is_t2(t) {
        out.add(Forest::single(t.clone()), Forest::unit(), 1);
    }
    out
}

/// Multiplicative extension to forests; `Δ 1 = 1 ⊗ 1`.
pub fn coproduct_bck(f: &Forest) -> TensorSum {
    f.trees().iter().fold(TensorSum::term(Forest::unit(), Forest::unit()), |acc, t| acc.mul(&coproduct_tree(t)))
}

/// `Δ T − T ⊗ 1`.
pub fn reduced_coproduct(t: &Tree) -> TensorSum {
    let mut d = coproduct_tree(t);
    d.add(Forest::single(t.clone()), Forest::unit(), -1);
    d
}

fn single_or_unit(f: &Forest) -> Result<Option<&Tree>, HopfError> {
    match f.trees() {
        [] => Ok(None),
        [t] => Ok(Some(t)),
        ts => Err(HopfError::NotATree(ts.len())),
    }
}

/// `s ↷ t`: graft `s` on every leaf of `t`, keeping frequency-consistent results.
pub fn graft(s: &Forest, t: &Forest) -> Result<ForestSum, HopfError> {
    let mut out = ForestSum::new();
    match (single_or_unit(s)?, single_or_unit(t)?) {
        (None, _) => {
            out.insert(t.clone(), 1);
        }
        (Some(_), None) => {
            out.insert(s.clone(), 1);
        }
        (Some(s), Some(t)) => {
            for g in graft_on_leaves(s, t) {
                *out.entry(Forest::single(g)).or_insert(0) += 1;
            }
        }
    }
    Ok(out)
}

fn graft_on_leaves(s: &Tree, t: &Tree) -> Vec<Tree> {
    if t.is_leaf() {
        let derived = s.freq().scale(s.edge().sign() * t.edge().sign());
        if &derived == t.freq() {
            return vec![Tree::new(t.edge(), t.freq().clone(), vec![s.clone()])];
        }
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, c) in t.children().iter().enumerate() {
        for g in graft_on_leaves(s, c) {
            let mut cs = t.children().to_vec();
            cs[i] = g;
            out.push(Tree::new(t.edge(), t.freq().clone(), cs));
        }
    }
    out
}

/// Adjoint of grafting on a tree: at most one t2 edge cut.
pub fn graft_adjoint_tree(t: &Tree) -> TensorSum {
    let below = graft_adjoint(&Forest::from_trees(t.children().to_vec()));
    let mut out = TensorSum::zero();
    for (l, r, c) in below.terms() {
        let root = Tree::new(t.edge(), t.freq().clone(), r.trees().to_vec());
        out.add(l.clone(), Forest::single(root), c);
    }
    if is_t2(t) {
        out.add(Forest::single(t.clone()), Forest::unit(), 1);
    }
    out
}

/// Adjoint of grafting on forests. With `D = ↷* − 1 ⊗ id` the rule is
/// `D(F1 F2) = D(F1)(1 ⊗ F2) + (1 ⊗ F1) D(F2)`, and `↷* 1 = 1 ⊗ 1`.
pub fn graft_adjoint(f: &Forest) -> TensorSum {
    let mut out = TensorSum::term(Forest::unit(), f.clone());
    let ts = f.trees();
    for i in 0..ts.len() {
        let rest = Forest::from_trees(ts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, t)| t.clone()).collect());
        let mut d = graft_adjoint_tree(&ts[i]);
        d.add(Forest::unit(), Forest::single(ts[i].clone()), -1);
        out.add_sum(&d.mul(&TensorSum::term(Forest::unit(), rest)), 1);
    }
    out
}

/// Single-letter forests.
pub fn as_letter(f: &Forest) -> Option<Letter> {
    f.single_tree().and_then(|t| Letter::try_from(t.clone()).ok())
}

/// Arborification of a forest of t2-planted trees.
pub fn arborify(f: &Forest) -> Result<WordSum, HopfError> {
    let mut acc = WordSum::word(Word::empty());
    for t in f.trees() {
        acc = acc.shuffle(&arborify_tree(t)?);
    }
    Ok(acc)
}

pub fn arborify_tree(t: &Tree) -> Result<WordSum, HopfError> {
    if !is_t2(t) {
        return Err(HopfError::NotT2Planted(t.to_string()));
    }
    let mut out = WordSum::zero();
    for (l, r, c) in graft_adjoint_tree(t).terms() {
        let Some(letter) = as_letter(l) else { continue };
        let rest = if r.is_unit() { WordSum::word(Word::empty()) } else { arborify(r)? };
        for (w, d) in rest.terms() {
            out.add(w.push_left(letter.clone()), c * d);
        }
    }
    Ok(out)
}

/// Shuffle product of two words.
pub fn shuffle(u: &Word, v: &Word) -> WordSum {
    let mut out = WordSum::zero();
    for w in shuffle_vec(u.letters(), v.letters()) {
        out.add(Word::from_root_side(w), 1);
    }
    out
}

// letters are stored root side first, so the leftmost letter is the last element
fn shuffle_vec(u: &[Letter], v: &[Letter]) -> Vec<Vec<Letter>> {
    if u.is_empty() {
        return vec![v.to_vec()];
    }
    if v.is_empty() {
        return vec![u.to_vec()];
    }
    let (a, u1) = u.split_last().unwrap();
    let (b, v1) = v.split_last().unwrap();
    let mut out = Vec::new();
    for mut w in shuffle_vec(u1, v) {
        w.push(a.clone());
        out.push(w);
    }
    for mut w in shuffle_vec(u, v1) {
        w.push(b.clone());
        out.push(w);
    }
    out
}

/// Integer combination of triple tensors.
pub type TripleSum = BTreeMap<(Forest, Forest, Forest), i64>;

#[derive(Clone, Debug)]
pub struct CoassocReport {
    pub lhs: TripleSum,
    pub rhs: TripleSum,
}

impl CoassocReport {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

fn add3(s: &mut TripleSum, k: (Forest, Forest, Forest), c: i64) {
    let e = s.entry(k.clone()).or_insert(0);
    *e += c;
    if *e == 0 {
        s.remove(&k);
    }
}

/// Both sides of `(id⊗P_A⊗id)(Δ⊗id)Δ = (id⊗P_A⊗id)(id⊗↷*)Δ`.
pub fn coassoc_check(t: &Tree) -> CoassocReport {
    let mut lhs = TripleSum::new();
    let mut rhs = TripleSum::new();
    for (f, r, c) in coproduct_tree(t).terms() {
        for (a, b, d) in coproduct_bck(f).terms() {
            if as_letter(b).is_some() {
                add3(&mut lhs, (a.clone(), b.clone(), r.clone()), c * d);
            }
        }
        for (a, b, d) in graft_adjoint(r).terms() {
            if as_letter(a).is_some() {
                add3(&mut rhs, (f.clone(), a.clone(), b.clone()), c * d);
            }
        }
    }
    CoassocReport { lhs, rhs }
}

/// `⟨x, y⟩` with `⟨a⊗b, a⊗b⟩ = s(a) s(b)` for a chosen symmetry function `s`.
pub fn pairing(x: &TensorSum, y: &TensorSum, s: impl Fn(&Forest) -> u64) -> i128 {
    let mut acc = 0i128;
    for (l, r, c) in x.terms() {
        let d = y.coefficient(l, r);
        if d != 0 {
            acc += c as i128 * d as i128 * s(l) as i128 * s(r) as i128;
        }
    }
    acc
}
