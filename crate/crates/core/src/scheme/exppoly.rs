use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::complex::Complex64;
use num::{BigInt, BigRational, One, Signed};

use crate::freq_poly::{CompiledPoly, FreqPoly, RationalExpr};

/// `Σ coeff · t^m · e^{i t φ}` with exact rational-function coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExpPoly {
    terms: BTreeMap<(u32, FreqPoly), RationalExpr>,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
#[error("denominator factor {factor} vanishes at this frequency tuple")]
pub struct ZeroDenominator {
    pub factor: String,
}

impl ExpPoly {
    pub fn zero() -> Self {
        ExpPoly::default()
    }

    pub fn one() -> Self {
        ExpPoly::term(RationalExpr::one(), 0, FreqPoly::zero())
    }

    pub fn term(c: RationalExpr, tpow: u32, phase: FreqPoly) -> Self {
        let mut e = ExpPoly::zero();
        e.add_term(c, tpow, phase);
        e
    }

    /// `e^{i t φ}`.
    pub fn exp(phase: FreqPoly) -> Self {
        ExpPoly::term(RationalExpr::one(), 0, phase)
    }

    pub fn add_term(&mut self, c: RationalExpr, tpow: u32, phase: FreqPoly) {
        if c.is_zero() {
            return;
        }
        let key = (tpow, phase);
        let merged = match self.terms.get(&key) {
            Some(old) => old.add(&c),
            None => c,
        };
        if merged.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, merged);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &FreqPoly, &RationalExpr)> {
        self.terms.iter().map(|((m, p), c)| (*m, p, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        for (m, p, c) in o.terms() {
            out.add_term(c.clone(), m, p.clone());
        }
        out
    }

    pub fn sub(&self, o: &ExpPoly) -> ExpPoly {
        self.add(&o.scale(&RationalExpr::int(-1)))
    }

    pub fn scale(&self, c: &RationalExpr) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for (m, p, x) in self.terms() {
            out.add_term(x.mul(c), m, p.clone());
        }
        out
    }

    pub fn mul(&self, o: &ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for (m1, p1, c1) in self.terms() {
            for (m2, p2, c2) in o.terms() {
                out.add_term(c1.mul(c2), m1 + m2, p1 + p2);
            }
        }
        out
    }

    /// Drop every term with `t^m`, `m > p`.
    pub fn truncate(&self, p: u32) -> ExpPoly {
        ExpPoly { terms: self.terms.iter().filter(|((m, _), _)| *m <= p).map(|(k, v)| (k.clone(), v.clone())).collect() }
    }

    pub fn equals(&self, o: &ExpPoly) -> bool {
        self.sub(o).is_zero()
    }

    /// `∫_0^t (·)(s) ds`; phases for which `is_zero` holds are integrated as polynomials.
    pub fn integrate(&self, is_zero: &dyn Fn(&FreqPoly) -> bool) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for (m, phi, c) in self.terms() {
            if phi.is_zero() || is_zero(phi) {
                out.add_term(c.scale(&BigRational::new(BigInt::one(), BigInt::from(m + 1))), m + 1, phi.clone());
                continue;
            }
            // Σ_q (-1)^q m!/(m-q)! t^{m-q} e^{itφ}/(iφ)^{q+1} − (-1)^m m!/(iφ)^{m+1}
            let mut ff = BigInt::one();
            for q in 0..=m {
                if q > 0 {
                    ff *= BigInt::from(m - q + 1);
                }
                let sign = if q % 2 == 0 { 1 } else { -1 };
                let k = c.scale(&BigRational::from_integer(ff.clone() * sign)).mul_i(-(q as i64 + 1)).div_poly(phi, q + 1);
                out.add_term(k, m - q, phi.clone());
            }
            let sign = if m % 2 == 0 { 1 } else { -1 };
            let k = c.scale(&BigRational::from_integer(ff * -sign)).mul_i(-(m as i64 + 1)).div_poly(phi, m + 1);
            out.add_term(k, 0, FreqPoly::zero());
        }
        out
    }

    /// Exact `∂_t`.
    pub fn derivative(&self) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for (m, p, c) in self.terms() {
            if m > 0 {
                out.add_term(c.scale(&BigRational::from_integer(m.into())), m - 1, p.clone());
            }
            if !p.is_zero() {
                out.add_term(c.mul_poly(p).mul_i(1), m, p.clone());
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<_> = self
            .terms()
            .map(|(m, p, c)| serde_json::json!({"tpow": m, "phase": p.to_string(), "coeff": c.to_string()}))
            .collect();
        serde_json::json!({"terms": terms, "text": self.to_string()})
    }

    pub fn denominator_factors(&self) -> BTreeSet<FreqPoly> {
        self.terms.values().flat_map(|c| c.denominator_factors().keys().cloned()).collect()
    }

    pub fn max_symbol(&self) -> u32 {
        let mut s = 0;
        for (_, p, c) in self.terms() {
            let (re, im) = c.numerator();
            for q in [p, re, im].into_iter().chain(c.denominator_factors().keys()) {
                s = s.max(q.symbols().last().copied().unwrap_or(0));
            }
        }
        s
    }

    pub fn eval(&self, fa: &BTreeMap<u32, i64>, t: f64) -> Result<Complex64, ZeroDenominator> {
        let n = self.max_symbol().max(fa.keys().last().copied().unwrap_or(0)) as usize;
        let mut x = vec![0.0; n + 1];
        for (&s, &v) in fa {
            x[s as usize] = v as f64;
        }
        self.compile().eval(&x, t)
    }

    pub fn compile(&self) -> CompiledExpPoly {
        CompiledExpPoly {
            terms: self
                .terms()
                .map(|(m, p, c)| {
                    let (re, im) = c.numerator();
                    CompiledTerm {
                        tpow: m as i32,
                        phase: p.compile(),
                        re: re.compile(),
                        im: im.compile(),
                        den: c.denominator_factors().iter().map(|(q, &e)| (q.compile(), e as i32, q.to_string())).collect(),
                    }
                })
                .collect(),
        }
    }
}

struct CompiledTerm {
    tpow: i32,
    phase: CompiledPoly,
    re: CompiledPoly,
    im: CompiledPoly,
    den: Vec<(CompiledPoly, i32, String)>,
}

/// Floating-point evaluator; `x[s]` is the value of symbol `k_s`.
pub struct CompiledExpPoly {
    terms: Vec<CompiledTerm>,
}

impl CompiledExpPoly {
    pub fn eval(&self, x: &[f64], t: f64) -> Result<Complex64, ZeroDenominator> {
        let mut acc = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            let mut d = 1.0;
            for (q, e, name) in &term.den {
                let v = q.eval(x);
                if v == 0.0 {
                    return Err(ZeroDenominator { factor: name.clone() });
                }
                d *= v.powi(*e);
            }
            let c = Complex64::new(term.re.eval(x), term.im.eval(x)) / d;
            let ph = if term.phase.is_zero() { Complex64::new(1.0, 0.0) } else { Complex64::from_polar(1.0, t * term.phase.eval(x)) };
            acc += c * t.powi(term.tpow) * ph;
        }
        Ok(acc)
    }
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, p, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, "\n  + ")?;
            }
            let has_rest = m > 0 || !p.is_zero();
            match c.as_real_constant() {
                Some(r) if r.is_one() && has_rest => {}
                Some(r) if r == -BigRational::one() && has_rest => write!(f, "-")?,
                Some(r) if has_rest && r.is_negative() => write!(f, "-{} * ", r.abs())?,
                Some(r) if has_rest => write!(f, "{r} * ")?,
                Some(r) => write!(f, "{r}")?,
                None if has_rest => write!(f, "[{c}] * ")?,
                None => write!(f, "[{c}]")?,
            }
            match m {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{m}")?,
            }
            if !p.is_zero() {
                if m > 0 {
                    write!(f, " * ")?;
                }
                write!(f, "exp(i*t*({p}))")?;
            }
        }
        Ok(())
    }
}
