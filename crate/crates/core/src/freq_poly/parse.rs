use num::{BigInt, BigRational, Zero};

use super::{FreqPoly, PolyError};

/// Parses `+ - * / ^`, parentheses, integers, `k` and `k<digits>`.
/// Division is only by constants.
pub fn parse_poly(s: &str) -> Result<FreqPoly, PolyError> {
    let mut p = Parser { src: s.as_bytes(), pos: 0 };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> PolyError {
        PolyError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<FreqPoly, PolyError> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<FreqPoly, PolyError> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                b'/' => {
                    self.pos += 1;
                    let d = self.unary()?;
                    if !d.is_constant() {
                        return Err(PolyError::NonConstantDivisor);
                    }
                    let c = d.constant_term();
                    if c.is_zero() {
                        return Err(PolyError::DivisionByZero);
                    }
                    acc = acc.scale(&c.recip());
                }
                // implicit product such as `2k1` or `(..)(..)`
                b'k' | b'(' => acc = &acc * &self.unary()?,
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<FreqPoly, PolyError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<FreqPoly, PolyError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.digits().ok_or_else(|| self.err("expected exponent"))?;
            let e: u32 = e.parse().map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn atom(&mut self) -> Result<FreqPoly, PolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'k') => {
                self.pos += 1;
                let idx = match self.digits() {
                    None => 0,
                    Some(d) => {
                        let i: u32 = d.parse().map_err(|_| self.err("symbol index too large"))?;
                        if i == 0 {
                            return Err(self.err("symbol indices start at 1"));
                        }
                        i
                    }
                };
                Ok(FreqPoly::var(idx))
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits().unwrap();
                let n: BigInt = d.parse().map_err(|_| self.err("bad integer"))?;
                Ok(FreqPoly::constant(BigRational::from_integer(n)))
            }
            _ => Err(self.err("expected a number, a symbol or `(`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_garbage() {
        assert!(parse_poly("k1 +").is_err());
        assert!(parse_poly("k1/k2").is_err());
        assert!(parse_poly("(k1").is_err());
        assert!(parse_poly("k0").is_err());
    }

    #[test]
    fn implicit_products() {
        assert_eq!(parse_poly("2k1").unwrap(), parse_poly("2*k1").unwrap());
        assert_eq!(parse_poly("-k^2").unwrap().to_string(), "-k^2");
    }
}
