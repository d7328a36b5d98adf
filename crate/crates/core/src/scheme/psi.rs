use std::collections::BTreeMap;

use num::complex::Complex64;
use num::{BigInt, BigRational, One, ToPrimitive, Zero};

use super::exppoly::ExpPoly;
use crate::equation::EquationSpec;
use crate::freq_poly::{FreqPoly, RationalExpr};
use crate::hopf::WordSum;
use crate::phase::{phase_tree, split_adaptive};
use crate::tree::{Letter, Word};

/// Decides when a dominant phase counts as zero.
#[derive(Clone, Copy, Debug)]
pub enum ZeroTest<'a> {
    /// Only the zero polynomial.
    Symbolic,
    /// Also phases vanishing at this integer tuple (resonant fallback).
    At(&'a BTreeMap<u32, i64>),
}

impl ZeroTest<'_> {
    pub fn holds(&self, p: &FreqPoly) -> bool {
        p.is_zero()
            || match self {
                ZeroTest::Symbolic => false,
                ZeroTest::At(fa) => p.eval_exact(fa).is_zero(),
            }
    }
}

/// `(-1)^a |∇|^α(k)` for the t2 edge of a letter.
pub fn letter_weight(l: &Letter, eq: &EquationSpec) -> FreqPoly {
    let t = l.tree();
    eq.nabla(t.freq()).scale(&BigRational::from_integer(t.edge().sign().into()))
}

fn binom(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// One admissible choice of `(p_j, q_j)` along a word.
#[derive(Clone, Debug)]
pub struct PsiPath {
    /// `m_1, …, m_|w|`.
    pub ms: Vec<u32>,
    /// `m_{|w|+1}`, the final power of `t`.
    pub m: u32,
    pub coeff: RationalExpr,
    /// Dominant phase of the whole word for this path.
    pub dominant: FreqPoly,
    /// Lower parts `L_j` of each prefix.
    pub lowers: Vec<FreqPoly>,
}

/// All paths of a word; `Ψ_{m,a}` for any `m`, `a` is read off from it.
#[derive(Clone, Debug)]
pub struct PsiTable {
    pub paths: Vec<PsiPath>,
    empty: bool,
}

impl PsiTable {
    pub fn new(w: &Word, n: i64, r: i64, eq: &EquationSpec, zt: ZeroTest<'_>) -> PsiTable {
        let mut paths = Vec::new();
        if r >= 0 && !w.is_empty() {
            walk(w, 0, 0, &mut Vec::new(), &mut Vec::new(), RationalExpr::one(), n, r, eq, zt, &mut paths);
        }
        PsiTable { paths, empty: w.is_empty() }
    }

    /// `Ψ_{m,a}(w)`; the empty word gives `δ_{m,0}(1-a)`.
    pub fn get(&self, m: u32, a: bool) -> ExpPoly {
        if self.empty {
            return if m == 0 && !a { ExpPoly::one() } else { ExpPoly::zero() };
        }
        let mut out = ExpPoly::zero();
        let fact: BigInt = (1..=m).map(BigInt::from).product();
        let pre = BigRational::new(BigInt::from(-1), fact);
        for p in self.paths.iter().filter(|p| p.m == m) {
            let c = p.coeff.scale(&pre);
            out.add_term(c.clone(), m, p.dominant.clone());
            if a && m == 0 {
                out.add_term(c.neg(), 0, FreqPoly::zero());
            }
        }
        out
    }
}

#[allow(clippy::too_many_arguments)]
fn walk(
    w: &Word,
    j: usize,
    m_cur: u32,
    ms: &mut Vec<u32>,
    lowers: &mut Vec<FreqPoly>,
    acc: RationalExpr,
    n: i64,
    r: i64,
    eq: &EquationSpec,
    zt: ZeroTest<'_>,
    out: &mut Vec<PsiPath>,
) {
    ms.push(m_cur);
    let split = split_adaptive(&w.prefix(j + 1), ms, n, r, &eq.alpha, eq).pop().expect("non-empty prefix").split;
    let last = j + 1 == w.len();
    let pmax = r + j as i64 - m_cur as i64;
    let c = letter_weight(w.at(j + 1), eq);
    lowers.push(split.lower.clone());
    let mut lp = FreqPoly::one();
    for p in 0..=pmax.max(-1) {
        let p = p as u32;
        if p > 0 {
            lp = &lp * &split.lower;
        }
        if lp.is_zero() {
            break;
        }
        let base = acc.mul_poly(&(&c * &lp)).scale(&BigRational::from_integer(binom(m_cur + p, p)));
        let mut next = |m_next: u32, k: RationalExpr| {
            if last {
                out.push(PsiPath { ms: ms.clone(), m: m_next, coeff: k, dominant: split.dominant.clone(), lowers: lowers.clone() });
            } else {
                walk(w, j + 1, m_next, ms, lowers, k, n, r, eq, zt, out);
            }
        };
        if zt.holds(&split.dominant) {
            next(m_cur + p + 1, base.mul_i(p as i64 - 1).neg());
        } else {
            for q in 0..=m_cur + p {
                next(m_cur + p - q, base.mul_i((p + q) as i64).div_poly(&split.dominant, q + 1));
            }
        }
    }
    lowers.pop();
    ms.pop();
}

pub fn psi(w: &Word, m: u32, a: bool, n: i64, r: i64, eq: &EquationSpec) -> ExpPoly {
    PsiTable::new(w, n, r, eq, ZeroTest::Symbolic).get(m, a)
}

/// `Σ c_w Ψ_{m,a}(w)` over a linear combination of words.
pub fn psi_sum(ws: &WordSum, m: u32, a: bool, n: i64, r: i64, eq: &EquationSpec, zt: ZeroTest<'_>) -> ExpPoly {
    let mut out = ExpPoly::zero();
    for (w, c) in ws.terms() {
        let x = PsiTable::new(w, n, r, eq, zt).get(m, a);
        out = out.add(&x.scale(&RationalExpr::int(c)));
    }
    out
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
#[error("partial phase sum {0} vanishes")]
pub struct Resonant(pub String);

/// `e^{it Σ F(T_j)} / ∏_m Σ_{j<=m} F(T_j)`.
pub fn psi_tilde(w: &Word, eq: &EquationSpec) -> Result<ExpPoly, Resonant> {
    let mut s = FreqPoly::zero();
    let mut c = RationalExpr::one();
    for l in w.letters() {
        s = &s + &phase_tree(l.tree(), eq);
        if s.is_zero() {
            return Err(Resonant(w.to_string()));
        }
        c = c.div_poly(&s, 1);
    }
    Ok(ExpPoly::term(c, 0, s))
}

pub fn psi_tilde_sum(ws: &WordSum, eq: &EquationSpec) -> Result<ExpPoly, Resonant> {
    let mut out = ExpPoly::zero();
    for (w, c) in ws.terms() {
        out = out.add(&psi_tilde(w, eq)?.scale(&RationalExpr::int(c)));
    }
    Ok(out)
}

/// `Ψ̃(w)` evaluated at one tuple and time, without building the symbolic form.
pub fn psi_tilde_at(w: &Word, eq: &EquationSpec, fa: &BTreeMap<u32, i64>, t: f64) -> Result<Complex64, Resonant> {
    let mut s = 0.0;
    let mut den = 1.0;
    for l in w.letters() {
        s += phase_tree(l.tree(), eq).eval_exact(fa).to_f64().unwrap_or(f64::NAN);
        if s == 0.0 {
            return Err(Resonant(w.to_string()));
        }
        den *= s;
    }
    Ok(Complex64::from_polar(1.0 / den, t * s))
}
