//! Expression parser.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' integer)?
//! base   := literal | identifier | '(' expr ')' | '-' factor
//! ```
//!
//! A literal such as `3/4` is read as the quotient of two integer literals,
//! which gives the same value as a signed rational literal.

use num_bigint::BigInt;

use super::field::Scalar;
use super::poly::Rational;
use crate::error::{Error, Result};

pub fn parse_scalar(text: &str, names: &[String]) -> Result<Scalar> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        names,
    };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(p.error("empty expression"));
    }
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error(&format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
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

    fn expr(&mut self) -> Result<Scalar> {
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

    fn term(&mut self) -> Result<Scalar> {
        let mut acc = self.factor()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc = &acc * &self.factor()?;
                }
                b'/' => {
                    self.pos += 1;
                    let d = self.factor()?;
                    acc = (&acc / &d)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Scalar> {
        let b = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.error("expected integer exponent"));
            }
            let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let e: u32 = s.parse().map_err(|_| Error::Syntax {
                pos: start,
                msg: "exponent too large".into(),
            })?;
            return Ok(b.pow(e));
        }
        Ok(b)
    }

    fn base(&mut self) -> Result<Scalar> {
        match self.peek() {
            None => Err(self.error("unexpected end of expression")),
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.factor()
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let n: BigInt = s.parse().unwrap();
                Ok(Scalar::from_rational(Rational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match self.names.iter().position(|n| n == name) {
                    Some(i) => Ok(Scalar::var(i)),
                    None => Err(Error::UnknownIdentifier {
                        name: name.to_string(),
                        pos: start,
                    }),
                }
            }
            Some(c) => Err(self.error(&format!("unexpected `{}`", c as char))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    fn p(s: &str) -> Scalar {
        parse_scalar(s, &xy()).unwrap()
    }

    #[test]
    fn zero_and_cancellation() {
        assert!(p("0").is_zero());
        assert!(p("x^2*y - x^2*y").is_zero());
    }

    #[test]
    fn reduces_fraction() {
        assert_eq!(p("(x+y)^2/(x+y)"), p("x+y"));
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        assert_eq!(p("-x^2"), -&p("x*x"));
        assert_eq!(p("2--x"), p("2+x"));
    }

    #[test]
    fn print_round_trip() {
        for s in ["x^2*y - 3/2*x + 7", "1/(1+x)", "(x - y)/(x^2 + 3*y)", "-5/3", "0"] {
            let v = p(s);
            assert_eq!(p(&v.to_text(&xy())), v, "{s}");
        }
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_scalar("x^", &xy()),
            Err(Error::Syntax {
                pos: 2,
                msg: "expected integer exponent".into()
            })
        );
        assert_eq!(
            parse_scalar("x + q", &xy()),
            Err(Error::UnknownIdentifier {
                name: "q".into(),
                pos: 4
            })
        );
        assert_eq!(parse_scalar("x/(y-y)", &xy()), Err(Error::DivisionByZero));
        assert!(matches!(parse_scalar("(x", &xy()), Err(Error::Syntax { .. })));
    }
}
