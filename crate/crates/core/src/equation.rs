//! Equation description, tree generation, elementary differentials and weights.

use std::collections::BTreeSet;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};
use serde_json::{json, Value};

use crate::freq_poly::{parse_poly, FreqPoly, FreqVector, PolyError};
use crate::tree::{EdgeDeco, EdgeKind, Tree, TreeError};

#[derive(Debug, thiserror::Error)]
pub enum EquationError {
    #[error("malformed equation JSON: {0}")]
    Json(String),
    #[error("field `{field}`: {source}")]
    Poly { field: &'static str, source: PolyError },
    #[error("field `{0}` must be a polynomial in the single symbol `k`")]
    NotUnivariate(&'static str),
    #[error("nonlinearity must be a nonempty list of 0/1 conjugation bits")]
    Nonlinearity,
    #[error("alpha must be a nonnegative rational")]
    Alpha,
    #[error("tree does not match the equation: {0}")]
    Shape(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// `i ∂_t u + L(∇) u = |∇|^α p(u, ū)` in Fourier variables.
#[derive(Clone, Debug, PartialEq)]
pub struct EquationSpec {
    /// Free propagator symbol on t1 edges, in the symbol `k`.
    pub p_t1: FreqPoly,
    /// Phase on t2 edges.
    pub p_t2: FreqPoly,
    /// Derivative weight `|∇|^α(k)` multiplying the nonlinearity.
    pub nabla_alpha: FreqPoly,
    /// Exponent entering the regularity condition.
    pub alpha: BigRational,
    /// Conjugation bits `a_j`: the nonlinearity is `∏ u^{(a_j)}`.
    pub nonlinearity: Vec<bool>,
}

impl EquationSpec {
    /// Cubic NLS `i ∂_t u + ∂_x^2 u = |u|^2 u`.
    pub fn cubic_nls() -> Self {
        EquationSpec {
            p_t1: parse_poly("-k^2").unwrap(),
            p_t2: parse_poly("k^2").unwrap(),
            nabla_alpha: FreqPoly::one(),
            alpha: BigRational::zero(),
            nonlinearity: vec![true, false, false],
        }
    }

    /// Leading exponent of `P_t2`.
    pub fn sigma(&self) -> u32 {
        self.p_t2.degree()
    }

    /// `(-1)^p P_t((-1)^p k)` for an edge `(t, p)` ending at a node decorated by `k`.
    pub fn edge_phase(&self, edge: EdgeDeco, k: &FreqVector) -> FreqPoly {
        let p = match edge.kind {
            EdgeKind::T1 => &self.p_t1,
            EdgeKind::T2 => &self.p_t2,
        };
        let s = edge.sign();
        p.substitute(0, &k.scale(s).to_poly()).scale(&BigRational::from_integer(s.into()))
    }

    pub fn nabla(&self, k: &FreqVector) -> FreqPoly {
        self.nabla_alpha.substitute(0, &k.to_poly())
    }

    pub fn from_json_str(s: &str) -> Result<Self, EquationError> {
        let v: Value = serde_json::from_str(s).map_err(|e| EquationError::Json(e.to_string()))?;
        Self::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Self, EquationError> {
        let poly = |field: &'static str| -> Result<FreqPoly, EquationError> {
            let s = v.get(field).and_then(Value::as_str).ok_or_else(|| EquationError::Json(format!("missing string field `{field}`")))?;
            let p = parse_poly(s).map_err(|source| EquationError::Poly { field, source })?;
            if p.symbols().iter().any(|&s| s != 0) {
                return Err(EquationError::NotUnivariate(field));
            }
            Ok(p)
        };
        let alpha = match v.get("alpha") {
            None => BigRational::zero(),
            Some(Value::String(s)) => parse_poly(s)
                .ok()
                .filter(FreqPoly::is_constant)
                .map(|p| p.constant_term())
                .ok_or(EquationError::Alpha)?,
            Some(Value::Number(n)) => {
                if let Some(i) = n.as_i64() {
                    BigRational::from_integer(i.into())
                } else {
                    n.as_f64().and_then(BigRational::from_float).ok_or(EquationError::Alpha)?
                }
            }
            Some(_) => return Err(EquationError::Alpha),
        };
        if alpha.is_negative() {
            return Err(EquationError::Alpha);
        }
        let nonlinearity = v
            .get("nonlinearity")
            .and_then(Value::as_array)
            .ok_or(EquationError::Nonlinearity)?
            .iter()
            .map(|b| match b.as_u64() {
                Some(0) => Ok(false),
                Some(1) => Ok(true),
                _ => Err(EquationError::Nonlinearity),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if nonlinearity.is_empty() {
            return Err(EquationError::Nonlinearity);
        }
        Ok(EquationSpec { p_t1: poly("P_t1")?, p_t2: poly("P_t2")?, nabla_alpha: poly("nabla_alpha")?, alpha, nonlinearity })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "P_t1": self.p_t1.to_string(),
            "P_t2": self.p_t2.to_string(),
            "nabla_alpha": self.nabla_alpha.to_string(),
            "alpha": self.alpha.to_string(),
            "nonlinearity": self.nonlinearity.iter().map(|&b| b as u8).collect::<Vec<_>>(),
        })
    }
}

/// Tree shape with branches listed in nonlinearity order.
#[derive(Clone, Debug)]
enum Shape {
    Leaf,
    Node(Vec<Shape>),
}

impl Shape {
    fn order(&self) -> usize {
        match self {
            Shape::Leaf => 0,
            Shape::Node(cs) => 1 + cs.iter().map(Shape::order).sum::<usize>(),
        }
    }
}

fn shapes(arity: usize, max_order: usize) -> Vec<Shape> {
    let mut out = vec![Shape::Leaf];
    if max_order == 0 {
        return out;
    }
    let sub = shapes(arity, max_order - 1);
    let mut cur = Vec::new();
    fill(&sub, arity, max_order - 1, &mut cur, &mut out);
    out
}

fn fill(sub: &[Shape], arity: usize, budget: usize, cur: &mut Vec<Shape>, out: &mut Vec<Shape>) {
    if cur.len() == arity {
        out.push(Shape::Node(cur.clone()));
        return;
    }
    for s in sub {
        let o = s.order();
        if o <= budget {
            cur.push(s.clone());
            fill(sub, arity, budget - o, cur, out);
            cur.pop();
        }
    }
}

/// Instantiate a shape rooted in `T_conj`, numbering nested branches first,
/// then leaves, each in nonlinearity order.
fn build(shape: &Shape, conj: bool, eq: &EquationSpec, next: &mut u32) -> Tree {
    let t1 = EdgeDeco::new(EdgeKind::T1, conj);
    match shape {
        Shape::Leaf => {
            *next += 1;
            Tree::leaf(t1, FreqVector::symbol(*next))
        }
        Shape::Node(cs) => {
            let bits: Vec<bool> = eq.nonlinearity.iter().map(|&a| a ^ conj).collect();
            let mut built: Vec<Option<Tree>> = vec![None; cs.len()];
            for (j, c) in cs.iter().enumerate() {
                if matches!(c, Shape::Node(_)) {
                    built[j] = Some(build(c, bits[j], eq, next));
                }
            }
            for (j, c) in cs.iter().enumerate() {
                if matches!(c, Shape::Leaf) {
                    built[j] = Some(build(c, bits[j], eq, next));
                }
            }
            let t2 = Tree::node(EdgeDeco::new(EdgeKind::T2, conj), built.into_iter().flatten().collect());
            Tree::node(t1, vec![t2])
        }
    }
}

#[derive(Clone, Debug)]
pub struct NamedTree {
    pub name: String,
    pub tree: Tree,
}

/// Trees of order at most `order` rooted at an unconjugated frequency `k`.
#[derive(Clone, Debug)]
pub struct TreeSet {
    pub order: usize,
    pub trees: Vec<NamedTree>,
}

impl TreeSet {
    pub fn get(&self, name: &str) -> Option<&Tree> {
        self.trees.iter().find(|t| t.name == name).map(|t| &t.tree)
    }
}

pub fn generate_trees(eq: &EquationSpec, order: usize) -> TreeSet {
    let mut seen = BTreeSet::new();
    let mut trees = Vec::new();
    for s in shapes(eq.nonlinearity.len(), order) {
        let mut next = 0;
        let t = build(&s, false, eq, &mut next);
        if seen.insert(t.erased()) {
            trees.push(t);
        }
    }
    trees.sort_by(|a, b| {
        (a.order(), a.symmetry_factor(), a.erased()).cmp(&(b.order(), b.symmetry_factor(), b.erased()))
    });
    TreeSet {
        order,
        trees: trees.into_iter().enumerate().map(|(i, tree)| NamedTree { name: format!("T{i}"), tree }).collect(),
    }
}

/// `coeff · ∏ v_k^{(conj)}` for the leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Upsilon {
    pub coeff: BigInt,
    pub factors: Vec<(FreqVector, bool)>,
}

impl fmt::Display for Upsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeff)?;
        for (k, c) in &self.factors {
            write!(f, " {}[{}]", if *c { "vbar" } else { "v" }, k)?;
        }
        Ok(())
    }
}

fn falling(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i))
}

/// Elementary differential of a tree generated from `eq` (full or t2-planted).
pub fn upsilon(t: &Tree, eq: &EquationSpec) -> Result<Upsilon, EquationError> {
    let e = t.edge();
    if e.kind == EdgeKind::T1 {
        return match t.children() {
            [] => Ok(Upsilon { coeff: BigInt::one(), factors: vec![(t.freq().clone(), e.conj)] }),
            [c] if c.edge() == EdgeDeco::new(EdgeKind::T2, e.conj) => upsilon(c, eq),
            _ => Err(EquationError::Shape(format!("{t}"))),
        };
    }
    let want_v = eq.nonlinearity.iter().filter(|&&a| a == e.conj).count();
    let want_vbar = eq.nonlinearity.len() - want_v;
    let n = t.children().iter().filter(|c| !c.edge().conj).count();
    let m = t.children().len() - n;
    if n != want_v || m != want_vbar {
        return Err(EquationError::Shape(format!("{t}: {n} v and {m} vbar branches, nonlinearity has {want_v} and {want_vbar}")));
    }
    let mut coeff = falling(want_v, n) * falling(want_vbar, m);
    let mut factors = Vec::new();
    for c in t.children() {
        if c.edge().kind != EdgeKind::T1 {
            return Err(EquationError::Shape(format!("{t}")));
        }
        let u = upsilon(c, eq)?;
        coeff *= u.coeff;
        factors.extend(u.factors);
    }
    factors.sort_by(|a, b| (!a.1, &a.0).cmp(&(!b.1, &b.0)));
    Ok(Upsilon { coeff, factors })
}

#[derive(Clone, Debug)]
pub struct WeightedTree {
    pub name: String,
    pub tree: Tree,
    pub upsilon: Upsilon,
    pub symmetry: u64,
    pub weight: BigRational,
}

/// `Υ / S` per tree.
pub fn series_weights(ts: &TreeSet, eq: &EquationSpec) -> Result<Vec<WeightedTree>, EquationError> {
    ts.trees
        .iter()
        .map(|nt| {
            let u = upsilon(&nt.tree, eq)?;
            let s = nt.tree.symmetry_factor();
            Ok(WeightedTree {
                name: nt.name.clone(),
                tree: nt.tree.clone(),
                weight: BigRational::new(u.coeff.clone(), BigInt::from(s)),
                upsilon: u,
                symmetry: s,
            })
        })
        .collect()
}
