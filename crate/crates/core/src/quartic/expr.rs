//! Sparse integer polynomials in `x, y, z, w` and a small expression parser.
//!
//! Grammar: sums and differences of products of factors, where a factor is
//! an integer, a variable, a bound name (e.g. `f1`), or a parenthesised
//! expression, optionally raised to a nonnegative integer power with `^`.
//! Juxtaposition multiplies (`3x^2y`).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub const VARIABLES: [char; 4] = ['x', 'y', 'z', 'w'];

/// A polynomial with integer coefficients in `x, y, z, w`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SparsePoly {
    terms: BTreeMap<[u32; 4], BigInt>,
}

impl SparsePoly {
    pub fn zero() -> SparsePoly {
        SparsePoly::default()
    }

    pub fn constant(c: impl Into<BigInt>) -> SparsePoly {
        SparsePoly::monomial([0; 4], c)
    }

    pub fn var(i: usize) -> SparsePoly {
        let mut e = [0; 4];
        e[i] = 1;
        SparsePoly::monomial(e, 1)
    }

    pub fn monomial(exponents: [u32; 4], c: impl Into<BigInt>) -> SparsePoly {
        let mut p = SparsePoly::zero();
        p.add_term(exponents, c.into());
        p
    }

    pub fn add_term(&mut self, exponents: [u32; 4], c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exponents).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&exponents);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; 4], &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exponents: [u32; 4]) -> BigInt {
        self.terms.get(&exponents).cloned().unwrap_or_default()
    }

    /// `Some(d)` when every term has total degree `d`; `None` for zero or mixed.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    pub fn add(&self, other: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, -c);
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> SparsePoly {
        let mut out = SparsePoly::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, c * k);
        }
        out
    }

    pub fn mul(&self, other: &SparsePoly) -> SparsePoly {
        let mut out = SparsePoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> SparsePoly {
        let mut out = SparsePoly::constant(1);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Partial derivative in variable `i`.
    pub fn derivative(&self, i: usize) -> SparsePoly {
        let mut out = SparsePoly::zero();
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = *e;
                f[i] -= 1;
                out.add_term(f, c * BigInt::from(e[i]));
            }
        }
        out
    }

    pub fn eval(&self, point: &[BigInt; 4]) -> BigInt {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut acc = c.clone();
                for (v, &k) in point.iter().zip(e.iter()) {
                    acc *= num_traits::pow(v.clone(), k as usize);
                }
                acc
            })
            .sum()
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest monomials first
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mut factors = Vec::new();
            if !mag.is_one() || e.iter().all(|&x| x == 0) {
                factors.push(mag.to_string());
            }
            for (v, &k) in VARIABLES.iter().zip(e.iter()) {
                match k {
                    0 => {}
                    1 => factors.push(v.to_string()),
                    _ => factors.push(format!("{v}^{k}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected character {0:?} at offset {1}")]
    UnexpectedChar(char, usize),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unknown name {0:?}")]
    UnknownName(String),
    #[error("trailing input at offset {0}")]
    Trailing(usize),
    #[error("exponent too large")]
    ExponentTooLarge,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => Token::Plus,
            '-' => Token::Minus,
            '*' => Token::Star,
            '^' => Token::Caret,
            '(' => Token::LParen,
            ')' => Token::RParen,
            '0'..='9' => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push((Token::Num(s.parse().expect("digits")), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                // single-letter variables may be juxtaposed ("xy"); other names
                // run over letters, digits and underscores
                if VARIABLES.contains(&c) && !chars.get(i + 1).is_some_and(|n| n.is_ascii_digit() || *n == '_') {
                    i += 1;
                    out.push((Token::Ident(c.to_string()), start));
                    continue;
                }
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push((Token::Ident(s), start));
                continue;
            }
            other => return Err(ParseError::UnexpectedChar(other, start)),
        };
        out.push((tok, start));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Token, usize)>,
    pos: usize,
    bindings: &'a HashMap<String, SparsePoly>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<SparsePoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<SparsePoly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(Token::Num(_)) | Some(Token::Ident(_)) | Some(Token::LParen) => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<SparsePoly, ParseError> {
        match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                Ok(self.unary()?.scale(&BigInt::from(-1)))
            }
            Some(Token::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<SparsePoly, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            match self.next() {
                Some(Token::Num(k)) => {
                    let k: u32 = k.try_into().map_err(|_| ParseError::ExponentTooLarge)?;
                    if k > 64 {
                        return Err(ParseError::ExponentTooLarge);
                    }
                    return Ok(base.pow(k));
                }
                Some(_) => {
                    let off = self.toks[self.pos - 1].1;
                    return Err(ParseError::UnexpectedChar('^', off));
                }
                None => return Err(ParseError::UnexpectedEnd),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<SparsePoly, ParseError> {
        let off = self.toks.get(self.pos).map(|(_, o)| *o).unwrap_or(0);
        match self.next() {
            Some(Token::Num(n)) => Ok(SparsePoly::constant(n)),
            Some(Token::Ident(name)) => {
                if let Some(i) = VARIABLES.iter().position(|v| v.to_string() == name) {
                    return Ok(SparsePoly::var(i));
                }
                self.bindings.get(&name).cloned().ok_or(ParseError::UnknownName(name))
            }
            Some(Token::LParen) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Token::RParen) => Ok(inner),
                    Some(_) => Err(ParseError::UnexpectedChar('(', off)),
                    None => Err(ParseError::UnexpectedEnd),
                }
            }
            Some(_) => Err(ParseError::UnexpectedChar(
                src_char_hint(&self.toks[self.pos - 1].0),
                off,
            )),
            None => Err(ParseError::UnexpectedEnd),
        }
    }
}

fn src_char_hint(t: &Token) -> char {
    match t {
        Token::Plus => '+',
        Token::Minus => '-',
        Token::Star => '*',
        Token::Caret => '^',
        Token::LParen => '(',
        Token::RParen => ')',
        _ => '?',
    }
}

/// Parse an expression with extra named polynomials in scope.
pub fn parse_with(src: &str, bindings: &HashMap<String, SparsePoly>) -> Result<SparsePoly, ParseError> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(ParseError::UnexpectedEnd);
    }
    let mut parser = Parser { toks, pos: 0, bindings };
    let out = parser.expr()?;
    if parser.pos < parser.toks.len() {
        return Err(ParseError::Trailing(parser.toks[parser.pos].1));
    }
    Ok(out)
}

pub fn parse(src: &str) -> Result<SparsePoly, ParseError> {
    parse_with(src, &HashMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints() {
        let p = parse("3*x^2*y^2 + x*y^2*z - (z - w)^2*z^2").unwrap();
        assert_eq!(p.homogeneous_degree(), Some(4));
        assert_eq!(p.coeff([2, 2, 0, 0]), BigInt::from(3));
        assert_eq!(p.coeff([0, 0, 3, 1]), BigInt::from(2));
        let again = parse(&p.to_string()).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn juxtaposition_and_names() {
        let mut env = HashMap::new();
        env.insert("g1".to_string(), parse("z^2 + xy").unwrap());
        let p = parse_with("2x g1 - 2*x*g1", &env).unwrap();
        assert!(p.is_zero());
        assert_eq!(parse("xyz").unwrap(), SparsePoly::monomial([1, 1, 1, 0], 1));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse("x + $"), Err(ParseError::UnexpectedChar('$', 4))));
        assert!(matches!(parse("h1 + x"), Err(ParseError::UnknownName(_))));
        assert!(matches!(parse("(x + y"), Err(ParseError::UnexpectedEnd)));
        assert!(matches!(parse("x )"), Err(ParseError::Trailing(2))));
    }

    #[test]
    fn derivative_of_power() {
        let p = parse("(x + y)^4").unwrap();
        assert_eq!(p.derivative(0), parse("4*(x + y)^3").unwrap());
    }
}
