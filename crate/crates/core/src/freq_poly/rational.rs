use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::complex::Complex64;
use num::{BigRational, One, Signed, Zero};

use super::FreqPoly;

/// Complex rational function `(re + i*im) / prod f^e` of the frequencies.
///
/// Denominator factors are stored with leading coefficient 1, so a common
/// multiple of two denominators is the exponentwise maximum. This is a common
/// multiple, not always the least one; equality goes through cross-multiplication.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RationalExpr {
    re: FreqPoly,
    im: FreqPoly,
    den: BTreeMap<FreqPoly, u32>,
}

impl RationalExpr {
    pub fn zero() -> Self {
        RationalExpr::default()
    }

    pub fn one() -> Self {
        RationalExpr::from_poly(FreqPoly::one())
    }

    pub fn from_poly(p: FreqPoly) -> Self {
        RationalExpr { re: p, im: FreqPoly::zero(), den: BTreeMap::new() }
    }

    pub fn from_rational(c: BigRational) -> Self {
        RationalExpr::from_poly(FreqPoly::constant(c))
    }

    pub fn int(c: i64) -> Self {
        RationalExpr::from_poly(FreqPoly::int(c))
    }

    pub fn numerator(&self) -> (&FreqPoly, &FreqPoly) {
        (&self.re, &self.im)
    }

    pub fn denominator_factors(&self) -> &BTreeMap<FreqPoly, u32> {
        &self.den
    }

    pub fn denominator(&self) -> FreqPoly {
        self.den.iter().fold(FreqPoly::one(), |acc, (f, &e)| &acc * &f.pow(e))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Multiply by `i^k`.
    pub fn mul_i(&self, k: i64) -> Self {
        let (re, im) = match k.rem_euclid(4) {
            0 => (self.re.clone(), self.im.clone()),
            1 => (-&self.im, self.re.clone()),
            2 => (-&self.re, -&self.im),
            _ => (self.im.clone(), -&self.re),
        };
        RationalExpr { re, im, den: self.den.clone() }.tidy()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        RationalExpr { re: self.re.scale(c), im: self.im.scale(c), den: self.den.clone() }.tidy()
    }

    pub fn mul_poly(&self, p: &FreqPoly) -> Self {
        RationalExpr { re: &self.re * p, im: &self.im * p, den: self.den.clone() }.tidy()
    }

    /// Divide by `p^e`; panics on the zero polynomial.
    pub fn div_poly(&self, p: &FreqPoly, e: u32) -> Self {
        assert!(!p.is_zero(), "division by the zero polynomial");
        if e == 0 {
            return self.clone();
        }
        let (c, q) = p.split_content();
        let s = c.recip().pow(e as i32);
        let mut out = self.scale(&s);
        if !q.is_constant() {
            *out.den.entry(q).or_insert(0) += e;
        }
        out
    }

    fn tidy(mut self) -> Self {
        if self.is_zero() {
            self.den.clear();
        }
        self
    }

    fn lift(&self, den: &BTreeMap<FreqPoly, u32>) -> (FreqPoly, FreqPoly) {
        let mut f = FreqPoly::one();
        for (q, &e) in den {
            let have = self.den.get(q).copied().unwrap_or(0);
            if e > have {
                f = &f * &q.pow(e - have);
            }
        }
        (&self.re * &f, &self.im * &f)
    }

    fn common_den(&self, o: &RationalExpr) -> BTreeMap<FreqPoly, u32> {
        let mut den = self.den.clone();
        for (q, &e) in &o.den {
            let x = den.entry(q.clone()).or_insert(0);
            *x = (*x).max(e);
        }
        den
    }

    pub fn add(&self, o: &RationalExpr) -> RationalExpr {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        let den = self.common_den(o);
        let (a, b) = self.lift(&den);
        let (c, d) = o.lift(&den);
        RationalExpr { re: &a + &c, im: &b + &d, den }.tidy()
    }

    pub fn neg(&self) -> RationalExpr {
        self.scale(&-BigRational::one())
    }

    pub fn sub(&self, o: &RationalExpr) -> RationalExpr {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RationalExpr) -> RationalExpr {
        let mut den = self.den.clone();
        for (q, &e) in &o.den {
            *den.entry(q.clone()).or_insert(0) += e;
        }
        let re = &(&self.re * &o.re) - &(&self.im * &o.im);
        let im = &(&self.re * &o.im) + &(&self.im * &o.re);
        RationalExpr { re, im, den }.tidy()
    }

    /// Equality as rational functions (cross-multiplication).
    pub fn equals(&self, o: &RationalExpr) -> bool {
        self.sub(o).is_zero()
    }

    /// Denominator factors that vanish at the given integer point.
    pub fn vanishing_factors(&self, fa: &BTreeMap<u32, i64>) -> BTreeSet<FreqPoly> {
        self.den.keys().filter(|q| q.eval_exact(fa).is_zero()).cloned().collect()
    }

    /// Exact value at an integer point; `None` when a denominator factor vanishes.
    pub fn eval_exact(&self, fa: &BTreeMap<u32, i64>) -> Option<(BigRational, BigRational)> {
        let mut d = BigRational::one();
        for (q, &e) in &self.den {
            let v = q.eval_exact(fa);
            if v.is_zero() {
                return None;
            }
            d *= v.pow(e as i32);
        }
        Some((self.re.eval_exact(fa) / &d, self.im.eval_exact(fa) / &d))
    }

    pub fn eval_f64(&self, fa: &BTreeMap<u32, f64>) -> Complex64 {
        let d: f64 = self.den.iter().map(|(q, &e)| q.eval_f64(fa).powi(e as i32)).product();
        Complex64::new(self.re.eval_f64(fa), self.im.eval_f64(fa)) / d
    }

    /// Real rational value if the expression is a real constant.
    pub fn as_real_constant(&self) -> Option<BigRational> {
        (self.den.is_empty() && self.im.is_zero() && self.re.is_constant()).then(|| self.re.constant_term())
    }
}

/// A denominator factor; a raised monomial like `k1^2` is bracketed before its power.
fn fmt_factor(f: &mut fmt::Formatter<'_>, p: &FreqPoly, e: u32) -> fmt::Result {
    let bare = p.to_string();
    if p.num_terms() == 1 && (e == 1 || !bare.contains(['^', '*'])) {
        write!(f, "{bare}")
    } else {
        write!(f, "({p})")
    }
}

impl fmt::Display for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let single = |p: &FreqPoly| p.num_terms() == 1;
        match (self.re.is_zero(), self.im.is_zero()) {
            (true, true) => return write!(f, "0"),
            (false, true) => {
                if self.den.is_empty() || single(&self.re) {
                    write!(f, "{}", self.re)?
                } else {
                    write!(f, "({})", self.re)?
                }
            }
            (true, false) => {
                let (c, rest) = self.im.split_content();
                if rest.is_one_poly() {
                    if c.is_one() {
                        write!(f, "i")?
                    } else if c == -BigRational::one() {
                        write!(f, "-i")?
                    } else if c.is_negative() {
                        write!(f, "-{}*i", c.abs())?
                    } else {
                        write!(f, "{c}*i")?
                    }
                } else {
                    write!(f, "i*({})", self.im)?
                }
            }
            (false, false) => write!(f, "({} + i*({}))", self.re, self.im)?,
        }
        if !self.den.is_empty() {
            write!(f, " / ")?;
            let many = self.den.len() > 1;
            if many {
                write!(f, "(")?;
            }
            for (j, (q, &e)) in self.den.iter().enumerate() {
                if j > 0 {
                    write!(f, " * ")?;
                }
                fmt_factor(f, q, e)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
            if many {
                write!(f, ")")?;
            }
        }
        Ok(())
    }
}

impl FreqPoly {
    fn is_one_poly(&self) -> bool {
        self.is_constant() && self.constant_term().is_one()
    }
}
