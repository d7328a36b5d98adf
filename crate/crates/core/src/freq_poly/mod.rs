//! Exact polynomials in frequency symbols `k1, k2, ...`.
//!
//! Symbol index 0 is the bare `k` used for one-variable dispersion
//! polynomials such as `P_t1(k) = -k^2`.

mod parse;
mod rational;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

pub use parse::parse_poly;
pub use rational::RationalExpr;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("division by a non-constant polynomial")]
    NonConstantDivisor,
    #[error("division by zero")]
    DivisionByZero,
    #[error("`{0}` is not an integer linear combination of frequencies")]
    NotLinear(String),
    #[error("leaf frequency `{0}` has a coefficient outside {{-1, 0, 1}}")]
    LeafCoefficient(String),
}

/// Identifies `k_i`; index 0 renders as the bare `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreqSymbol(pub u32);

impl fmt::Display for FreqSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            write!(f, "k")
        } else {
            write!(f, "k{}", self.0)
        }
    }
}

/// Integer linear combination of frequency symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreqVector(BTreeMap<u32, i64>);

impl FreqVector {
    pub fn zero() -> Self {
        FreqVector(BTreeMap::new())
    }

    pub fn symbol(i: u32) -> Self {
        let mut m = BTreeMap::new();
        m.insert(i, 1);
        FreqVector(m)
    }

    pub fn from_pairs(pairs: &[(u32, i64)]) -> Self {
        let mut v = FreqVector::zero();
        for &(s, c) in pairs {
            v.add_term(s, c);
        }
        v
    }

    fn add_term(&mut self, s: u32, c: i64) {
        let e = self.0.entry(s).or_insert(0);
        *e += c;
        if *e == 0 {
            self.0.remove(&s);
        }
    }

    pub fn coefficients(&self) -> &BTreeMap<u32, i64> {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `true` when every coefficient lies in {-1, 0, 1}.
    pub fn is_leaf_like(&self) -> bool {
        self.0.values().all(|c| c.abs() <= 1)
    }

    pub fn scale(&self, c: i64) -> Self {
        if c == 0 {
            return FreqVector::zero();
        }
        FreqVector(self.0.iter().map(|(&s, &v)| (s, v * c)).collect())
    }

    pub fn symbols(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.keys().copied()
    }

    pub fn to_poly(&self) -> FreqPoly {
        let mut p = FreqPoly::zero();
        for (&s, &c) in &self.0 {
            p.add_monomial(Monomial::var(s, 1), BigRational::from_integer(c.into()));
        }
        p
    }

    pub fn eval(&self, fa: &BTreeMap<u32, i64>) -> i64 {
        self.0.iter().map(|(s, c)| c * fa.get(s).copied().unwrap_or(0)).sum()
    }

    pub fn parse(s: &str) -> Result<Self, PolyError> {
        let p = parse_poly(s)?;
        FreqVector::try_from(&p)
    }
}

impl TryFrom<&FreqPoly> for FreqVector {
    type Error = PolyError;

    fn try_from(p: &FreqPoly) -> Result<Self, PolyError> {
        let mut v = FreqVector::zero();
        for (m, c) in &p.terms {
            let lin = m.0.len() == 1 && m.0[0].1 == 1;
            if !lin || !c.is_integer() {
                return Err(PolyError::NotLinear(p.to_string()));
            }
            let c = c.to_integer().to_i64().ok_or_else(|| PolyError::NotLinear(p.to_string()))?;
            v.add_term(m.0[0].0, c);
        }
        Ok(v)
    }
}

impl Add for &FreqVector {
    type Output = FreqVector;
    fn add(self, rhs: &FreqVector) -> FreqVector {
        let mut v = self.clone();
        for (&s, &c) in &rhs.0 {
            v.add_term(s, c);
        }
        v
    }
}

impl Sub for &FreqVector {
    type Output = FreqVector;
    fn sub(self, rhs: &FreqVector) -> FreqVector {
        self + &rhs.scale(-1)
    }
}

impl Neg for &FreqVector {
    type Output = FreqVector;
    fn neg(self) -> FreqVector {
        self.scale(-1)
    }
}

impl fmt::Display for FreqVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, (&s, &c)) in self.0.iter().enumerate() {
            let sym = FreqSymbol(s);
            match (i, c) {
                (0, 1) => write!(f, "{sym}")?,
                (0, -1) => write!(f, "-{sym}")?,
                (0, c) => write!(f, "{c}*{sym}")?,
                (_, 1) => write!(f, "+{sym}")?,
                (_, -1) => write!(f, "-{sym}")?,
                (_, c) if c > 0 => write!(f, "+{c}*{sym}")?,
                (_, c) => write!(f, "{c}*{sym}")?,
            }
        }
        Ok(())
    }
}

/// Exponent vector: sorted `(symbol, exponent)` pairs with positive exponents.
///
/// The ordering puts monomials in graded-lex descending order, which is the
/// printing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(s: u32, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(s, e)])
        }
    }

    pub fn exponents(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|x| x.1).sum()
    }

    /// Largest single-variable exponent.
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|x| x.1).max().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn mul(&self, o: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < o.0.len() {
            match (self.0.get(i), o.0.get(j)) {
                (Some(a), Some(b)) if a.0 == b.0 => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a.0 < b.0 => {
                    out.push(*a);
                    i += 1;
                }
                (Some(a), None) => {
                    out.push(*a);
                    i += 1;
                }
                (_, Some(b)) => {
                    out.push(*b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Monomial(out)
    }

    fn exponent_of(&self, s: u32) -> u32 {
        self.0.iter().find(|x| x.0 == s).map(|x| x.1).unwrap_or(0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        // higher total degree first, then higher exponent on the lowest symbol
        other.total_degree().cmp(&self.total_degree()).then_with(|| {
            let (mut i, mut j) = (0, 0);
            loop {
                match (self.0.get(i), other.0.get(j)) {
                    (None, None) => return Ordering::Equal,
                    (Some(_), None) => return Ordering::Less,
                    (None, Some(_)) => return Ordering::Greater,
                    (Some(a), Some(b)) => {
                        if a.0 != b.0 {
                            // the one containing the smaller symbol comes first
                            return a.0.cmp(&b.0);
                        }
                        if a.1 != b.1 {
                            return b.1.cmp(&a.1);
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, &(s, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if e == 1 {
                write!(f, "{}", FreqSymbol(s))?;
            } else {
                write!(f, "{}^{}", FreqSymbol(s), e)?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial with rational coefficients; no zero terms stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FreqPoly {
    terms: BTreeMap<Monomial, BigRational>,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl FreqPoly {
    pub fn zero() -> Self {
        FreqPoly::default()
    }

    pub fn one() -> Self {
        FreqPoly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = FreqPoly::zero();
        p.add_monomial(Monomial::one(), c);
        p
    }

    pub fn int(c: i64) -> Self {
        FreqPoly::constant(BigRational::from_integer(c.into()))
    }

    pub fn var(s: u32) -> Self {
        let mut p = FreqPoly::zero();
        p.add_monomial(Monomial::var(s, 1), BigRational::one());
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = FreqPoly::zero();
        for (m, c) in terms {
            p.add_monomial(m, c);
        }
        p
    }

    pub fn add_monomial(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_term(&self) -> BigRational {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn symbols(&self) -> Vec<u32> {
        let mut s: Vec<u32> = self.terms.keys().flat_map(|m| m.0.iter().map(|x| x.0)).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return FreqPoly::zero();
        }
        FreqPoly { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = FreqPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Maximum over monomials of the largest single-variable exponent; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    /// Dominant part: the leading pure powers folded as `a (sum a_i k_i)^p`, else 0.
    pub fn p_dom(&self) -> FreqPoly {
        let p = self.degree();
        if p == 0 {
            return FreqPoly::zero();
        }
        let top: Vec<(&Monomial, &BigRational)> =
            self.terms.iter().filter(|(m, _)| m.degree() == p).collect();
        let mut lin = FreqPoly::zero();
        let mut a: Option<BigRational> = None;
        for (m, c) in top {
            if m.0.len() != 1 {
                return FreqPoly::zero();
            }
            let sign = match &a {
                None => {
                    a = Some(c.clone());
                    1
                }
                Some(a0) if a0 == c => 1,
                Some(a0) if p % 2 == 1 && &-a0.clone() == c => -1,
                _ => return FreqPoly::zero(),
            };
            lin.add_monomial(Monomial::var(m.0[0].0, 1), BigRational::from_integer(sign.into()));
        }
        lin.pow(p).scale(&a.expect("degree > 0 implies a top monomial"))
    }

    /// Replace symbol `s` by the polynomial `q`.
    pub fn substitute(&self, s: u32, q: &FreqPoly) -> FreqPoly {
        let mut out = FreqPoly::zero();
        let mut powers: Vec<FreqPoly> = vec![FreqPoly::one()];
        for (m, c) in &self.terms {
            let e = m.exponent_of(s) as usize;
            while powers.len() <= e {
                let next = powers.last().unwrap() * q;
                powers.push(next);
            }
            let rest = Monomial(m.0.iter().copied().filter(|x| x.0 != s).collect());
            let mut term = FreqPoly::zero();
            term.add_monomial(rest, c.clone());
            out = &out + &(&term * &powers[e]);
        }
        out
    }

    pub fn eval_exact(&self, fa: &BTreeMap<u32, i64>) -> BigRational {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut v = BigInt::one();
            for &(s, e) in &m.0 {
                v *= BigInt::from(fa.get(&s).copied().unwrap_or(0)).pow(e);
            }
            acc += c * BigRational::from_integer(v);
        }
        acc
    }

    pub fn eval_f64(&self, fa: &BTreeMap<u32, f64>) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let v: f64 = m.0.iter().map(|&(s, e)| fa.get(&s).copied().unwrap_or(0.0).powi(e as i32)).product();
                c.to_f64().unwrap_or(f64::NAN) * v
            })
            .sum()
    }

    /// `(c, q)` with `self = c * q` and the leading coefficient of `q` equal to 1.
    pub fn split_content(&self) -> (BigRational, FreqPoly) {
        match self.terms.values().next() {
            None => (BigRational::zero(), FreqPoly::zero()),
            Some(c) => {
                let c = c.clone();
                (c.clone(), self.scale(&c.recip()))
            }
        }
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (c.to_f64().unwrap_or(f64::NAN), m.0.clone()))
                .collect(),
        }
    }
}

/// Floating-point evaluator for a polynomial, symbols indexing a dense slice.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(f64, Vec<(u32, u32)>)>,
}

impl CompiledPoly {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (c, m) in &self.terms {
            let mut v = *c;
            for &(s, e) in m {
                v *= x[s as usize].powi(e as i32);
            }
            acc += v;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl Add for &FreqPoly {
    type Output = FreqPoly;
    fn add(self, rhs: &FreqPoly) -> FreqPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_monomial(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &FreqPoly {
    type Output = FreqPoly;
    fn sub(self, rhs: &FreqPoly) -> FreqPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_monomial(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &FreqPoly {
    type Output = FreqPoly;
    fn mul(self, rhs: &FreqPoly) -> FreqPoly {
        let mut out = FreqPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_monomial(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &FreqPoly {
    type Output = FreqPoly;
    fn neg(self) -> FreqPoly {
        self.scale(&-BigRational::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for FreqPoly {
            type Output = FreqPoly;
            fn $f(self, rhs: FreqPoly) -> FreqPoly {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for FreqPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let a = c.abs();
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for FreqPoly {
    type Err = PolyError;
    fn from_str(s: &str) -> Result<Self, PolyError> {
        parse_poly(s)
    }
}
