//! Parser for the textual form produced by `Display`.
//!
//! Grammar: sums and differences of products and quotients of powers of
//! integers, variable names and parenthesized expressions. Quotients must be
//! exact in the Laurent ring.

use std::str::FromStr;

use crate::{Int, LaurentPoly, PolyError, VarId};

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> PolyError {
        PolyError::Parse(format!("{msg} at offset {} in {:?}", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<LaurentPoly, PolyError> {
        let mut acc = if self.eat('-') { -self.term()? } else { self.eat('+'); self.term()? };
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<LaurentPoly, PolyError> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.power()?;
            } else if self.eat('/') {
                let d = self.power()?;
                acc = acc.exact_divide(&d)?.ok_or_else(|| self.err("inexact division"))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<LaurentPoly, PolyError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let paren = self.eat('(');
        let neg = self.eat('-');
        let n = self.digits()?;
        if paren && !self.eat(')') {
            return Err(self.err("expected ')'"));
        }
        let e: i32 = n.parse().map_err(|_| self.err("exponent out of range"))?;
        base.powi(if neg { -e } else { e })
    }

    fn digits(&mut self) -> Result<&'a str, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        Ok(&self.src[start..self.pos])
    }

    fn atom(&mut self) -> Result<LaurentPoly, PolyError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits()?;
                let n: Int = d.parse().map_err(|_| self.err("bad integer"))?;
                Ok(LaurentPoly::constant(n))
            }
            Some('A' | 'X' | 'Y' | 'Z') => {
                let start = self.pos;
                self.pos += 1;
                if self.src[self.pos..].starts_with('{') {
                    let close = self.src[self.pos..].find('}').ok_or_else(|| self.err("unterminated '{'"))?;
                    self.pos += close + 1;
                } else {
                    while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
                        self.pos += 1;
                    }
                }
                let v: VarId = self.src[start..self.pos].parse()?;
                Ok(LaurentPoly::var(v))
            }
            _ => Err(self.err("unexpected input")),
        }
    }
}

impl FromStr for LaurentPoly {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { src: s, pos: 0 };
        let out = p.expr()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for s in ["(A4 + X2)/X4", "-3*A2*X1^2", "1/(X1*X2)", "Y12^2 + 2*Y1 + 1", "0", "Y{1,10} - Z3", "(-X1 + 1)/X2^2"] {
            let p: LaurentPoly = s.parse().unwrap();
            assert_eq!(p.to_string(), s, "{s}");
        }
    }

    #[test]
    fn arithmetic() {
        let p: LaurentPoly = "(X1 + 1)^2 - X1^2 - 2*X1".parse().unwrap();
        assert!(p.is_one());
        let q: LaurentPoly = "(X1^2 - 1)/(X1 - 1)".parse().unwrap();
        assert_eq!(q, "X1 + 1".parse().unwrap());
        assert!("X1/(X1 + 1)".parse::<LaurentPoly>().is_err());
        assert!("X1 +".parse::<LaurentPoly>().is_err());
        assert_eq!("X1^-2".parse::<LaurentPoly>().unwrap(), LaurentPoly::var_pow(VarId::x(1), -2));
    }
}
