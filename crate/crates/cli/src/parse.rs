//! Expression syntax.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | power
//! power  := postfix ('^' exponent)?
//! postfix:= primary ('+'|'-')?        -- after ')' only: the P+ / P- parts
//! primary:= int | int '/' int | 'd'i | 'z'i | 's'i | 'sp'i | tvar
//!         | ident | ident '_{' dir+ '}' | '(' expr ')'
//! dir    := 'x' | 'y' | tvar
//! tvar   := 't[' int (',' int)* ']'
//! ```

use std::fmt;

use num_bigint::BigInt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Dir {
    X,
    Y,
    T(Vec<i32>),
}

/// Which commuting variable family a `z`/`s`/`sp` atom belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Z,
    S,
    SPrime,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Ratio(BigInt, BigInt),
    /// `∂_i`, zero-based.
    D(usize),
    /// A commuting variable, zero-based index.
    Var(Family, usize),
    Symbol(String),
    Jet(String, Vec<Dir>),
    Time(Vec<i32>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i64),
    PlusPart(Box<Expr>),
    MinusPart(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the input.
    pub pos: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at position {}: {}", self.pos, self.message)
    }
}

impl std::error::Error for ParseError {}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected input"));
    }
    Ok(e)
}

/// Identifiers used as symbols or jet bases, in order of first appearance.
pub fn symbols(e: &Expr, out: &mut Vec<String>) {
    match e {
        Expr::Symbol(s) | Expr::Jet(s, _) => {
            if !out.contains(s) {
                out.push(s.clone());
            }
        }
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
            symbols(a, out);
            symbols(b, out);
        }
        Expr::Neg(a) | Expr::Pow(a, _) | Expr::PlusPart(a) | Expr::MinusPart(a) => symbols(a, out),
        _ => {}
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, msg: &str) -> ParseError {
        ParseError { pos: self.pos, message: msg.to_string() }
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

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat(b'*') {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.postfix()?;
        if self.eat(b'^') {
            let k = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    /// A signed integer, possibly parenthesized, with right-associative `^`.
    fn exponent(&mut self) -> Result<i64, ParseError> {
        let paren = self.eat(b'(');
        let neg = self.eat(b'-');
        let start = self.pos;
        let v = self.integer()?;
        let v: i64 = i64::try_from(v).map_err(|_| ParseError { pos: start, message: "exponent too large".into() })?;
        let v = if neg { -v } else { v };
        if paren {
            self.expect(b')')?;
        }
        if self.eat(b'^') {
            let e = self.exponent()?;
            if e < 0 {
                return Err(self.error("exponent of an exponent must be nonnegative"));
            }
            let r = v.checked_pow(e as u32).ok_or_else(|| self.error("exponent too large"))?;
            return Ok(r);
        }
        Ok(v)
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let (e, closed) = self.primary()?;
        if closed && self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
            // `(..)+` is a projection when nothing that could start a term follows.
            let mut k = self.pos + 1;
            while k < self.src.len() && self.src[k].is_ascii_whitespace() {
                k += 1;
            }
            let next = self.src.get(k).copied();
            if matches!(next, None | Some(b')') | Some(b',') | Some(b'*') | Some(b'^') | Some(b'+') | Some(b'-')) {
                let plus = self.src[self.pos] == b'+';
                self.pos += 1;
                return Ok(if plus { Expr::PlusPart(Box::new(e)) } else { Expr::MinusPart(Box::new(e)) });
            }
        }
        Ok(e)
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digits parse"))
    }

    fn small_int(&mut self) -> Result<i32, ParseError> {
        let neg = self.eat(b'-');
        let start = self.pos;
        let v = self.integer()?;
        let v = i32::try_from(v).map_err(|_| ParseError { pos: start, message: "index too large".into() })?;
        Ok(if neg { -v } else { v })
    }

    fn tvar(&mut self) -> Result<Vec<i32>, ParseError> {
        self.expect(b'[')?;
        let mut v = vec![self.small_int()?];
        while self.eat(b',') {
            v.push(self.small_int()?);
        }
        self.expect(b']')?;
        Ok(v)
    }

    /// Returns the expression and whether it ended with `)`.
    fn primary(&mut self) -> Result<(Expr, bool), ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok((e, true))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                if self.src.get(self.pos) == Some(&b'/') {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.integer()?;
                    if d == BigInt::from(0) {
                        return Err(ParseError { pos: at, message: "zero denominator".into() });
                    }
                    return Ok((Expr::Ratio(n, d), false));
                }
                Ok((Expr::Int(n), false))
            }
            Some(c) if c.is_ascii_alphabetic() => self.word().map(|e| (e, false)),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn word(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let w = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii").to_string();
        if w == "t" && self.src.get(self.pos) == Some(&b'[') {
            return Ok(Expr::Time(self.tvar()?));
        }
        for (prefix, family) in [("sp", Some(Family::SPrime)), ("d", None), ("z", Some(Family::Z)), ("s", Some(Family::S))] {
            if let Some(rest) = w.strip_prefix(prefix) {
                if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                    let i: usize = rest.parse().map_err(|_| ParseError { pos: start, message: "index too large".into() })?;
                    if i == 0 {
                        return Err(ParseError { pos: start, message: "indices start at 1".into() });
                    }
                    return Ok(match family {
                        None => Expr::D(i - 1),
                        Some(f) => Expr::Var(f, i - 1),
                    });
                }
            }
        }
        if self.src.get(self.pos) == Some(&b'_') && self.src.get(self.pos + 1) == Some(&b'{') {
            self.pos += 2;
            let mut dirs = Vec::new();
            loop {
                match self.peek() {
                    Some(b'}') => {
                        self.pos += 1;
                        break;
                    }
                    Some(b'x') => {
                        self.pos += 1;
                        dirs.push(Dir::X);
                    }
                    Some(b'y') => {
                        self.pos += 1;
                        dirs.push(Dir::Y);
                    }
                    Some(b't') => {
                        self.pos += 1;
                        dirs.push(Dir::T(self.tvar()?));
                    }
                    _ => return Err(self.error("expected x, y, t[..] or '}'")),
                }
            }
            if dirs.is_empty() {
                return Err(self.error("empty derivative list"));
            }
            return Ok(Expr::Jet(w, dirs));
        }
        Ok(Expr::Symbol(w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let e = parse("a + b*c^2").unwrap();
        let expected = Expr::Add(
            Box::new(Expr::Symbol("a".into())),
            Box::new(Expr::Mul(
                Box::new(Expr::Symbol("b".into())),
                Box::new(Expr::Pow(Box::new(Expr::Symbol("c".into())), 2)),
            )),
        );
        assert_eq!(e, expected);
        assert_eq!(parse("d2^-1").unwrap(), Expr::Pow(Box::new(Expr::D(1)), -1));
        assert_eq!(parse("z1^2^3").unwrap(), Expr::Pow(Box::new(Expr::Var(Family::Z, 0)), 8));
        assert_eq!(parse("-a^2").unwrap(), Expr::Neg(Box::new(Expr::Pow(Box::new(Expr::Symbol("a".into())), 2))));
    }

    #[test]
    fn atoms() {
        assert_eq!(parse("a_{t[1,1]}").unwrap(), Expr::Jet("a".into(), vec![Dir::T(vec![1, 1])]));
        assert_eq!(parse("c_{yx}").unwrap(), Expr::Jet("c".into(), vec![Dir::Y, Dir::X]));
        assert_eq!(parse("t[1,2]").unwrap(), Expr::Time(vec![1, 2]));
        assert_eq!(parse("sp2").unwrap(), Expr::Var(Family::SPrime, 1));
        assert_eq!(parse("s").unwrap(), Expr::Symbol("s".into()));
        assert_eq!(parse("d").unwrap(), Expr::Symbol("d".into()));
        assert_eq!(parse("3/4").unwrap(), Expr::Ratio(3.into(), 4.into()));
    }

    #[test]
    fn projections() {
        let e = parse("(l1*l2)+").unwrap();
        assert!(matches!(e, Expr::PlusPart(_)));
        let e = parse("(a)+ + b").unwrap();
        assert!(matches!(e, Expr::Add(ref l, _) if matches!(**l, Expr::PlusPart(_))));
        let e = parse("(a)+b").unwrap();
        assert!(matches!(e, Expr::Add(_, _)));
        assert!(matches!(parse("(a)-").unwrap(), Expr::MinusPart(_)));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("a + * b").unwrap_err();
        assert_eq!(e.pos, 4);
        assert_eq!(parse("d0").unwrap_err().pos, 0);
        assert!(parse("a_{q}").is_err());
        assert!(parse("(a").is_err());
        assert!(parse("1/0").is_err());
    }
}
