//! Recursive-descent parser for rational functions in `t` over `F_p`.
//!
//! ```text
//! expr    := ['+'|'-'] term (('+'|'-') term)*
//! term    := power (['*'|'/'] power)*        juxtaposition multiplies
//! power   := primary ('^' ['-'] integer)?
//! primary := integer | 't' | '(' expr ')' | '-' primary
//! ```

use super::{check_prime, Poly, RationalFunction};
use crate::{Error, Result};

/// Parses text such as `(1+t+t^2)^-1 * t` into a canonical rational function.
pub fn parse_rational(p: u32, text: &str) -> Result<RationalFunction> {
    check_prime(p)?;
    let mut parser = Parser { p, src: text.as_bytes(), pos: 0 };
    let value = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(value)
}

struct Parser<'a> {
    p: u32,
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> Error {
        let text = String::from_utf8_lossy(self.src);
        Error::Parse(format!("{what} at offset {} in `{text}`", self.pos))
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = if self.eat(b'-') {
            -&self.term()?
        } else {
            self.eat(b'+');
            self.term()?
        };
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.power()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.power()?;
                    acc = acc.checked_div(&rhs).map_err(|_| self.error("division by zero"))?;
                }
                Some(c) if c == b'(' || c == b't' || c.is_ascii_digit() => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<RationalFunction> {
        let base = self.primary()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let negative = self.eat(b'-');
        let e = self.integer_exponent()?;
        let e = if negative { -e } else { e };
        base.pow(e).map_err(|_| self.error("zero raised to a negative power"))
    }

    fn primary(&mut self) -> Result<RationalFunction> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            Some(b't') => {
                self.pos += 1;
                Ok(RationalFunction::t(self.p))
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.primary()?)
            }
            Some(c) if c.is_ascii_digit() => {
                let mut r: u64 = 0;
                while let Some(&c) = self.src.get(self.pos).filter(|c| c.is_ascii_digit()) {
                    r = (r * 10 + (c - b'0') as u64) % self.p as u64;
                    self.pos += 1;
                }
                Ok(RationalFunction::from_poly(Poly::constant(self.p, r as u32)))
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn integer_exponent(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse::<i64>().ok())
            .filter(|&e| e <= 4096)
            .ok_or_else(|| self.error("expected an exponent"))
    }
}
