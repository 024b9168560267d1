//! Coefficient lists: `1,0,3` over prime fields, `[1,2],[0,1]` over
//! extension fields, constant term first.

use primpair::ffcore::{Elem, FieldCtx};
use primpair::polyrat::Poly;

#[derive(Debug, PartialEq, Eq)]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "at column {}: {}", self.pos + 1, self.msg)
    }
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { pos, msg: msg.into() })
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.s.get(self.pos).is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => err(self.pos, format!("expected `{}`, found `{}`", c as char, x as char)),
            None => err(self.pos, format!("expected `{}`, found end of input", c as char)),
        }
    }

    fn integer(&mut self, p: u64) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return match self.s.get(start) {
                Some(&c) => err(start, format!("expected a coefficient, found `{}`", c as char)),
                None => err(start, "expected a coefficient, found end of input"),
            };
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
        match text.parse::<u64>() {
            Ok(v) if v < p => Ok(v),
            _ => err(start, format!("coefficient {text} is not below the characteristic {p}")),
        }
    }
}

fn element(cur: &mut Cursor<'_>, ctx: &FieldCtx) -> Result<Elem, ParseError> {
    if cur.peek() == Some(b'[') {
        let start = cur.pos;
        cur.pos += 1;
        let mut coeffs = vec![cur.integer(ctx.p())?];
        while cur.peek() == Some(b',') {
            cur.pos += 1;
            coeffs.push(cur.integer(ctx.p())?);
        }
        cur.expect(b']')?;
        return ctx.from_coeffs(&coeffs).or_else(|e| err(start, e.to_string()));
    }
    let v = cur.integer(ctx.p())?;
    Ok(ctx.from_coeffs(&[v]).expect("one coefficient"))
}

/// Parses a polynomial given as its coefficients, constant term first.
pub fn parse_poly(text: &str, ctx: &FieldCtx) -> Result<Poly, ParseError> {
    let mut cur = Cursor { s: text.as_bytes(), pos: 0 };
    let mut coeffs = vec![element(&mut cur, ctx)?];
    loop {
        match cur.peek() {
            None => break,
            Some(b',') => {
                cur.pos += 1;
                coeffs.push(element(&mut cur, ctx)?);
            }
            Some(c) => return err(cur.pos, format!("unexpected `{}`", c as char)),
        }
    }
    let poly = Poly::new(coeffs);
    if poly.is_zero() {
        return err(0, "the zero polynomial is not allowed here");
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_lists() {
        let f = FieldCtx::from_order(13).unwrap();
        let p = parse_poly("1, 1", &f).unwrap();
        assert_eq!(p.to_indices(), vec![1, 1]);
        assert_eq!(parse_poly("2,0,0", &f).unwrap().degree(), Some(0));
        let e = parse_poly("1,13", &f).unwrap_err();
        assert_eq!(e.pos, 2);
        let e = parse_poly("1,,2", &f).unwrap_err();
        assert_eq!(e.pos, 2);
        assert!(parse_poly("0,0", &f).is_err());
        assert!(parse_poly("1 2", &f).is_err());
    }

    #[test]
    fn extension_tuples() {
        let f = FieldCtx::from_order(9).unwrap();
        let p = parse_poly("[0,1],1", &f).unwrap();
        assert_eq!(f.coeffs(p.coeff(0)), vec![0, 1]);
        assert_eq!(p.coeff(1), Elem::ONE);
        let e = parse_poly("[1,1,1]", &f).unwrap_err();
        assert_eq!(e.pos, 0);
        assert!(parse_poly("[1,2", &f).unwrap_err().msg.contains("`]`"));
    }
}
