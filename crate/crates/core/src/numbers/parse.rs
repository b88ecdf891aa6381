//! Surd-expression parser.
//!
//! ```text
//! EXPR   := ['+'|'-'] TERM (('+'|'-') TERM)*
//! TERM   := FACTOR (('*'|'/') FACTOR)*
//! FACTOR := NUMBER | ("sqrt" | "√") "(" EXPR ")" | "(" EXPR ")"
//! NUMBER := DIGITS ['.' DIGITS]
//! ```
//!
//! This accepts every `RATIONAL ['*' SQRT]` sum as well as forms like `sqrt(13)/2`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Zero};

use super::exact::{ExactNumber, TowerContext};
use super::NumberError;

/// Parses `text` into an exact value, adjoining square roots through `ctx`.
pub fn parse_number(text: &str, ctx: &TowerContext) -> Result<ExactNumber, NumberError> {
    let chars: Vec<char> = text.chars().collect();
    let mut p = Parser {
        s: &chars,
        pos: 0,
        ctx,
    };
    p.skip_ws();
    if p.pos == chars.len() {
        return Err(NumberError::Syntax {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != chars.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(v)
}

struct Parser<'a> {
    s: &'a [char],
    pos: usize,
    ctx: &'a TowerContext,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> NumberError {
        NumberError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), NumberError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<ExactNumber, NumberError> {
        let mut neg = false;
        match self.peek() {
            Some('-') => {
                neg = true;
                self.pos += 1;
            }
            Some('+') => self.pos += 1,
            _ => {}
        }
        let mut acc = self.term()?;
        if neg {
            acc = -acc;
        }
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.checked_add(&t)?;
                }
                Some('-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.checked_sub(&t)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ExactNumber, NumberError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = acc.checked_mul(&f)?;
                }
                Some('/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let f = self.factor()?;
                    if f.is_zero() {
                        return Err(NumberError::ZeroDenominator { pos: at });
                    }
                    acc = acc.checked_div(&f)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<ExactNumber, NumberError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => self.number(),
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Some('√') => {
                self.pos += 1;
                self.radical()
            }
            Some('s') => {
                let word: String = self.s[self.pos..].iter().take(4).collect();
                if word != "sqrt" {
                    return Err(self.err("unknown identifier"));
                }
                self.pos += 4;
                self.radical()
            }
            Some(_) => Err(self.err("expected a number, 'sqrt(' or '('")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn radical(&mut self) -> Result<ExactNumber, NumberError> {
        self.expect('(')?;
        let at = self.pos;
        let v = self.expr()?;
        self.expect(')')?;
        if v.is_negative() {
            return Err(NumberError::NegativeRadicandAt {
                pos: at,
                value: v.to_string(),
            });
        }
        self.ctx.sqrt(&v)
    }

    fn number(&mut self) -> Result<ExactNumber, NumberError> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let int_part: String = self.s[start..self.pos].iter().collect();
        let mut frac = String::new();
        if self.pos < self.s.len() && self.s[self.pos] == '.' {
            self.pos += 1;
            let fs = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if fs == self.pos {
                return Err(self.err("expected digits after '.'"));
            }
            frac = self.s[fs..self.pos].iter().collect();
        }
        let digits = format!("{int_part}{frac}");
        let n = BigInt::from_str_radix(&digits, 10).map_err(|_| NumberError::Syntax {
            pos: start,
            msg: "bad integer".into(),
        })?;
        let d = BigInt::from(10u32).pow(frac.len() as u32);
        debug_assert!(!d.is_zero());
        Ok(ExactNumber::from_rational(BigRational::new(n, d)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Result<ExactNumber, NumberError> {
        parse_number(s, &TowerContext::new())
    }

    #[test]
    fn rational_literals() {
        assert_eq!(p("3/4").unwrap(), ExactNumber::from_ratio(3, 4));
        assert_eq!(p("-6/8").unwrap(), ExactNumber::from_ratio(-3, 4));
        assert_eq!(p("0.3").unwrap(), ExactNumber::from_ratio(3, 10));
    }

    #[test]
    fn surd_forms() {
        let ctx = TowerContext::new();
        let a = parse_number("sqrt(13)/2", &ctx).unwrap();
        let b = parse_number("1/2*sqrt(13)", &ctx).unwrap();
        assert_eq!(a, b);
        let c = parse_number("√(115/13)/2", &ctx).unwrap();
        assert_eq!(
            &(&c * &c) * &ExactNumber::from_int(52),
            ExactNumber::from_int(115)
        );
    }

    #[test]
    fn errors_carry_positions() {
        match p("1 + sqrt(2") {
            Err(NumberError::Syntax { pos, .. }) => assert_eq!(pos, 10),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            p("sqrt(1-3)"),
            Err(NumberError::NegativeRadicandAt { pos: 5, .. })
        ));
        assert!(matches!(
            p("3/0"),
            Err(NumberError::ZeroDenominator { pos: 2 })
        ));
        assert!(matches!(p(""), Err(NumberError::Syntax { .. })));
        assert!(matches!(p("2x"), Err(NumberError::Syntax { pos: 1, .. })));
    }

    #[test]
    fn canonical_text_round_trips() {
        let ctx = TowerContext::new();
        let v = parse_number("1/4 - 1/2*sqrt(sqrt(5)-2)", &ctx).unwrap();
        let text = v.to_string();
        assert_eq!(text, "1/4 - 1/2*sqrt(-2 + sqrt(5))");
        let again = parse_number(&text, &ctx).unwrap();
        assert_eq!(again, v);
        assert_eq!(again.to_string(), text);
    }
}
