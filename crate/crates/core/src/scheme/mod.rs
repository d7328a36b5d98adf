//! Low regularity schemes `Π^{n,r}`, the exact iterated integrals and the local error terms.

mod checks;
mod exppoly;
mod psi;
#[cfg(test)]
mod tests;

use std::collections::BTreeSet;
use std::fmt;

use num::BigRational;

pub use checks::{dt_identity_check, ibp_identity_check, DtReport, IbpReport};
pub use exppoly::{CompiledExpPoly, ExpPoly, ZeroDenominator};
pub use psi::{letter_weight, psi, psi_sum, psi_tilde, psi_tilde_at, psi_tilde_sum, PsiPath, PsiTable, Resonant, ZeroTest};

use crate::equation::EquationSpec;
use crate::freq_poly::{FreqPoly, RationalExpr};
use crate::hopf::{arborify_tree, coproduct_tree, reduced_coproduct, HopfError, WordSum};
use crate::tree::{EdgeKind, Tree};

#[derive(Debug, thiserror::Error)]
pub enum SchemeError {
    #[error(transparent)]
    Hopf(#[from] HopfError),
    #[error(transparent)]
    ZeroDenominator(#[from] ZeroDenominator),
    #[error("tree {0} is not a t2-planted tree or a full tree over one")]
    Shape(String),
}

/// Builds `Π^{n,r}` with a fixed zero test.
#[derive(Clone, Copy)]
pub struct SchemeBuilder<'a> {
    pub n: i64,
    pub eq: &'a EquationSpec,
    pub zero: ZeroTest<'a>,
}

impl<'a> SchemeBuilder<'a> {
    pub fn new(n: i64, eq: &'a EquationSpec) -> Self {
        SchemeBuilder { n, eq, zero: ZeroTest::Symbolic }
    }

    pub fn with_zero_test(mut self, zero: ZeroTest<'a>) -> Self {
        self.zero = zero;
        self
    }

    fn words(&self, ws: &WordSum, r: i64) -> Vec<(PsiTable, i64)> {
        ws.terms().map(|(w, c)| (PsiTable::new(w, self.n, r, self.eq, self.zero), c)).collect()
    }

    fn sum(tables: &[(PsiTable, i64)], m: u32, a: bool) -> ExpPoly {
        tables.iter().fold(ExpPoly::zero(), |acc, (t, c)| acc.add(&t.get(m, a).scale(&RationalExpr::int(*c))))
    }

    /// `Π^{n,r}(T)`; zero when the order of `T` exceeds `r`.
    pub fn tree(&self, t: &Tree, r: i64) -> Result<ExpPoly, SchemeError> {
        if t.order() as i64 > r {
            return Ok(ExpPoly::zero());
        }
        match t.edge().kind {
            EdgeKind::T1 => {
                let inner = self.forest(t.children(), r)?;
                Ok(ExpPoly::exp(self.eq.edge_phase(t.edge(), t.freq())).mul(&inner))
            }
            EdgeKind::T2 => {
                let rt = r - t.order() as i64;
                let top = self.words(&arborify_tree(t)?, rt);
                let mut out = Self::sum(&top, 0, true).sub(&Self::sum(&top, 0, false));
                for (f, rr, c) in reduced_coproduct(t).terms() {
                    let rtree = rr.single_tree().ok_or_else(|| SchemeError::Shape(rr.to_string()))?;
                    let tabs = self.words(&arborify_tree(rtree)?, rt);
                    for m in 0..=r {
                        let ps = Self::sum(&tabs, m as u32, false);
                        if ps.is_zero() {
                            continue;
                        }
                        let pf = self.forest(f.trees(), r - m)?.truncate((r - m) as u32);
                        out = out.add(&pf.mul(&ps).scale(&RationalExpr::int(c)));
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn forest(&self, trees: &[Tree], r: i64) -> Result<ExpPoly, SchemeError> {
        let mut acc = ExpPoly::one();
        for t in trees {
            let x = self.tree(t, r)?;
            if x.is_zero() {
                return Ok(x);
            }
            acc = acc.mul(&x);
        }
        Ok(acc)
    }
}

/// `Π^{n,r}(T)` with symbolic zero tests.
pub fn scheme(t: &Tree, n: i64, r: i64, eq: &EquationSpec) -> Result<ExpPoly, SchemeError> {
    SchemeBuilder::new(n, eq).tree(t, r)
}

/// The exact iterated integral `Π(T)`.
pub fn pi_exact(t: &Tree, eq: &EquationSpec, zero: ZeroTest<'_>) -> ExpPoly {
    let inner = pi_exact_forest(t.children(), eq, zero);
    let e = ExpPoly::exp(eq.edge_phase(t.edge(), t.freq())).mul(&inner);
    match t.edge().kind {
        EdgeKind::T1 => e,
        EdgeKind::T2 => {
            let c = RationalExpr::from_poly(eq.nabla(t.freq())).scale(&BigRational::from_integer((-t.edge().sign()).into())).mul_i(1);
            e.integrate(&|p| zero.holds(p)).scale(&c)
        }
    }
}

pub fn pi_exact_forest(trees: &[Tree], eq: &EquationSpec, zero: ZeroTest<'_>) -> ExpPoly {
    trees.iter().fold(ExpPoly::one(), |acc, t| acc.mul(&pi_exact(t, eq, zero)))
}

/// One term `t^{tpow} · weight · ∏ L^e` of the local error.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ErrorTerm {
    pub factors: Vec<(FreqPoly, u32)>,
    pub weight: FreqPoly,
    pub tpow: u32,
}

impl ErrorTerm {
    pub fn expanded(&self) -> FreqPoly {
        self.factors.iter().fold(self.weight.clone(), |acc, (p, e)| &acc * &p.pow(*e))
    }

    /// Number of derivatives the term costs: largest exponent of a single frequency.
    pub fn required_regularity(&self) -> u32 {
        self.expanded().degree()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let f: Vec<_> = self.factors.iter().map(|(p, e)| serde_json::json!({"poly": p.to_string(), "exp": e})).collect();
        serde_json::json!({"tpow": self.tpow, "weight": self.weight.to_string(), "factors": f, "regularity": self.required_regularity()})
    }
}

impl fmt::Display for ErrorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t^{}", self.tpow)?;
        if self.weight != FreqPoly::one() {
            write!(f, " * ({})", self.weight)?;
        }
        for (p, e) in &self.factors {
            if *e == 1 {
                write!(f, " * ({p})")?;
            } else {
                write!(f, " * ({p})^{e}")?;
            }
        }
        Ok(())
    }
}

fn nabla_weight(t: &Tree, eq: &EquationSpec) -> FreqPoly {
    let own = if t.edge().kind == EdgeKind::T2 { eq.nabla(t.freq()) } else { FreqPoly::one() };
    t.children().iter().fold(own, |acc, c| &acc * &nabla_weight(c, eq))
}

/// The terms of `E^{n,r}(T)`, deduplicated.
pub fn local_error_terms(t: &Tree, n: i64, r: i64, eq: &EquationSpec) -> Result<Vec<ErrorTerm>, SchemeError> {
    let mut out = BTreeSet::new();
    error_terms_into(t, n, r, eq, &mut out)?;
    Ok(out.into_iter().collect())
}

pub fn required_regularity(terms: &[ErrorTerm]) -> u32 {
    terms.iter().map(ErrorTerm::required_regularity).max().unwrap_or(0)
}

fn error_terms_into(t: &Tree, n: i64, r: i64, eq: &EquationSpec, out: &mut BTreeSet<ErrorTerm>) -> Result<(), SchemeError> {
    if t.order() as i64 > r {
        return Ok(());
    }
    if t.edge().kind == EdgeKind::T1 {
        for c in t.children() {
            error_terms_into(c, n, r, eq, out)?;
        }
        return Ok(());
    }
    let rt = r - t.order() as i64;
    let weight = nabla_weight(t, eq);
    for (_, rr, _) in coproduct_tree(t).terms() {
        let Some(rtree) = rr.single_tree() else { continue };
        for (w, _) in arborify_tree(rtree)?.terms() {
            let tab = PsiTable::new(w, n, rt, eq, ZeroTest::Symbolic);
            let mut seen = BTreeSet::new();
            for path in &tab.paths {
                if !seen.insert(path.ms.clone()) {
                    continue;
                }
                let mut factors = Vec::new();
                for (j, (l, &m)) in path.lowers.iter().zip(&path.ms).enumerate() {
                    let e = rt + j as i64 + 1 - m as i64;
                    if e > 0 && !l.is_zero() {
                        factors.push((l.clone(), e as u32));
                    }
                }
                out.insert(ErrorTerm { factors, weight: weight.clone(), tpow: (r + 1) as u32 });
            }
        }
    }
    for (f, rr, _) in reduced_coproduct(t).terms() {
        if f.is_unit() {
            continue;
        }
        let rtree = rr.single_tree().ok_or_else(|| SchemeError::Shape(rr.to_string()))?;
        let ws = arborify_tree(rtree)?;
        for m in 0..=r {
            if psi_sum(&ws, m as u32, false, n, rt, eq, ZeroTest::Symbolic).is_zero() {
                continue;
            }
            let mut sub = BTreeSet::new();
            for x in f.trees() {
                error_terms_into(x, n, r - m, eq, &mut sub)?;
            }
            for e in sub {
                out.insert(ErrorTerm { factors: e.factors, weight: weight.clone(), tpow: e.tpow + m as u32 });
            }
        }
    }
    Ok(())
}

/// `|Π^{n,r}(T) - Π(T)|` at one tuple and time.
pub fn scheme_defect(
    t: &Tree,
    n: i64,
    r: i64,
    eq: &EquationSpec,
    fa: &std::collections::BTreeMap<u32, i64>,
    time: f64,
) -> Result<f64, SchemeError> {
    let zt = ZeroTest::At(fa);
    let s = SchemeBuilder::new(n, eq).with_zero_test(zt).tree(t, r)?;
    let e = pi_exact(t, eq, zt);
    let d = s.sub(&e).eval(fa, time)?;
    Ok(d.norm())
}
