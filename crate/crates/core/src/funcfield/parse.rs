//! Infix expressions over `x` with integer and `algebraic(...)` literals.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := atom ('^' ['-'] integer)?
//! atom    := integer | 'x' | '(' expr ')' | algebraic
//! algebraic := 'algebraic' '(' '[' int (',' int)* ']' ',' rat ',' rat ')'
//! ```
//!
//! The Unicode minus sign is accepted wherever `-` is.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::RationalFunction;
use crate::numbers::RealAlgebraic;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message} at offset {offset}")]
pub struct ParseError {
    /// Byte offset into the parsed text.
    pub offset: usize,
    pub message: String,
}

type R = RationalFunction<RealAlgebraic>;

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, offset: usize, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            offset,
            message: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next().map(|c| if c == '−' { '-' } else { c })
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        let raw = self.src[self.pos..].chars().next().unwrap();
        self.pos += raw.len_utf8();
        Some(c)
    }

    fn expect(&mut self, want: char) -> Result<(), ParseError> {
        let at = {
            self.skip_ws();
            self.pos
        };
        match self.bump() {
            Some(c) if c == want => Ok(()),
            Some(c) => self.err(at, format!("expected '{want}', found '{c}'")),
            None => self.err(at, format!("expected '{want}', found end of input")),
        }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let digits: String = self.src[self.pos..]
            .chars()
            .take_while(|c| c.is_ascii_digit())
            .collect();
        if digits.is_empty() {
            return match self.peek() {
                Some(c) => self.err(start, format!("expected a number, found '{c}'")),
                None => self.err(start, "expected a number, found end of input"),
            };
        }
        self.pos += digits.len();
        Ok(digits.parse().unwrap())
    }

    fn signed_integer(&mut self) -> Result<BigInt, ParseError> {
        if self.peek() == Some('-') {
            self.bump();
            Ok(-self.integer()?)
        } else {
            if self.peek() == Some('+') {
                self.bump();
            }
            self.integer()
        }
    }

    fn signed_rational(&mut self) -> Result<BigRational, ParseError> {
        let n = self.signed_integer()?;
        if self.peek() == Some('/') {
            self.bump();
            self.skip_ws();
            let at = self.pos;
            let d = self.integer()?;
            if d.is_zero() {
                return self.err(at, "zero denominator");
            }
            Ok(BigRational::new(n, d))
        } else {
            Ok(BigRational::from_integer(n))
        }
    }

    fn expr(&mut self) -> Result<R, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some('-') => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<R, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Some('/') => {
                    self.bump();
                    self.skip_ws();
                    let at = self.pos;
                    let rhs = self.unary()?;
                    if rhs.is_zero() {
                        return self.err(at, "division by zero");
                    }
                    acc = &acc / &rhs;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<R, ParseError> {
        match self.peek() {
            Some('-') => {
                self.bump();
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<R, ParseError> {
        self.skip_ws();
        let base_at = self.pos;
        let base = self.atom()?;
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.bump();
        self.skip_ws();
        let at = self.pos;
        let paren = self.peek() == Some('(');
        if paren {
            self.bump();
        }
        let e = self.signed_integer()?;
        if paren {
            self.expect(')')?;
        }
        let e: i64 = match i64::try_from(e) {
            Ok(v) if v.abs() <= 4096 => v,
            _ => return self.err(at, "exponent out of range"),
        };
        if e < 0 && base.is_zero() {
            return self.err(base_at, "negative power of zero");
        }
        Ok(base.pow(e))
    }

    fn atom(&mut self) -> Result<R, ParseError> {
        self.skip_ws();
        let at = self.pos;
        match self.peek() {
            Some('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(R::constant(RealAlgebraic::from_rational(BigRational::from_integer(n))))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let word: String = self.src[self.pos..]
                    .chars()
                    .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
                    .collect();
                self.pos += word.len();
                match word.as_str() {
                    "x" => Ok(R::x()),
                    "algebraic" => Ok(R::constant(self.algebraic_args(at)?)),
                    _ => self.err(at, format!("unknown identifier '{word}'")),
                }
            }
            Some(c) => self.err(at, format!("unexpected '{c}'")),
            None => self.err(at, "unexpected end of input"),
        }
    }

    fn algebraic_args(&mut self, at: usize) -> Result<RealAlgebraic, ParseError> {
        self.expect('(')?;
        self.expect('[')?;
        let mut coeffs = vec![self.signed_integer()?];
        while self.peek() == Some(',') {
            self.bump();
            coeffs.push(self.signed_integer()?);
        }
        self.expect(']')?;
        self.expect(',')?;
        let lo = self.signed_rational()?;
        self.expect(',')?;
        let hi = self.signed_rational()?;
        self.expect(')')?;
        if coeffs.iter().all(|c| c.is_zero()) {
            return self.err(at, "algebraic(...) needs a nonzero polynomial");
        }
        RealAlgebraic::from_isolating(&coeffs, &lo, &hi).or_else(|e| self.err(at, e.to_string()))
    }
}

/// Parses a rational function in `x`.
pub fn parse_ratfunc(src: &str) -> Result<R, ParseError> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < src.len() {
        let c = p.peek().unwrap();
        return p.err(p.pos, format!("unexpected '{c}' after expression"));
    }
    Ok(e)
}

/// Parses an expression that must not depend on `x`.
pub fn parse_constant(src: &str) -> Result<RealAlgebraic, ParseError> {
    let f = parse_ratfunc(src)?;
    f.constant_value().ok_or(ParseError {
        offset: 0,
        message: "expected a constant, found an expression in x".into(),
    })
}
