//! A small infix grammar for substitutions such as `V=lc*phi^2/2`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' exponent)?
//! exponent := '-'? number | '(' '-'? number ('/' number)? ')'
//! atom   := number | ident | '(' expr ')'
//! ```
//!
//! Numbers are integers or decimals and are read exactly. `pi` and `e` are
//! the constants, `V` and `phi` are fields, any other identifier is a
//! parameter.

use super::{Exponent, Expr, Q};
use crate::error::{Error, Result};

pub const FIELDS: [&str; 2] = ["V", "phi"];

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Q),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            out.push(Tok::Num(decimal(&cs[start..i].iter().collect::<String>())?));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else if c == '−' {
            out.push(Tok::Op('-'));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character '{c}' at {i}")));
        }
    }
    Ok(out)
}

fn decimal(s: &str) -> Result<Q> {
    let bad = || Error::Parse(format!("bad number '{s}'"));
    match s.split_once('.') {
        None => s.parse::<Q>().map_err(|_| bad()),
        Some((int, frac)) => {
            if frac.contains('.') || (int.is_empty() && frac.is_empty()) {
                return Err(bad());
            }
            let digits = format!("{int}{frac}");
            let n: Q = digits.parse().map_err(|_| bad())?;
            let scale: Q = format!("1{}", "0".repeat(frac.len())).parse().map_err(|_| bad())?;
            Ok(n / scale)
        }
    }
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected '{op}' at token {}", self.pos)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc * self.unary()?;
            } else if self.eat('/') {
                acc = acc / self.unary()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            Ok(base.pow(Exponent::constant(self.exponent()?)))
        } else {
            Ok(base)
        }
    }

    fn number(&mut self) -> Result<Q> {
        let neg = self.eat('-');
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(if neg { -n } else { n })
            }
            t => Err(Error::Parse(format!("expected a number in the exponent, got {t:?}"))),
        }
    }

    fn exponent(&mut self) -> Result<Q> {
        if self.eat('(') {
            let mut n = self.number()?;
            if self.eat('/') {
                n /= self.number()?;
            }
            self.expect(')')?;
            Ok(n)
        } else {
            self.number()
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        match t {
            Some(Tok::Num(n)) => Ok(Expr::Rational(n)),
            Some(Tok::Ident(id)) => Ok(match id.as_str() {
                "pi" => Expr::pi(),
                "e" => Expr::e(),
                f if FIELDS.contains(&f) => Expr::field(f),
                p => Expr::param(p),
            }),
            Some(Tok::Op('(')) => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            t => Err(Error::Parse(format!("unexpected {t:?}"))),
        }
    }
}

/// Parses an expression in the substitution grammar.
pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    if p.toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
    }
    Ok(e)
}

/// Parses `NAME=EXPR`.
pub fn parse_substitution(src: &str) -> Result<(String, Expr)> {
    let (lhs, rhs) = src.split_once('=').ok_or_else(|| Error::Parse(format!("expected NAME=EXPR, got '{src}'")))?;
    let name = lhs.trim();
    if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
        return Err(Error::Parse(format!("bad substitution target '{name}'")));
    }
    Ok((name.to_string(), parse_expr(rhs)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{qr, simplify};

    #[test]
    fn phi4_potential() {
        let (name, e) = parse_substitution("V = lc*phi^2/2").unwrap();
        assert_eq!(name, "V");
        let want = Expr::param("lc") * Expr::field("phi").powi(2) / Expr::int(2);
        assert_eq!(simplify(&e), simplify(&want));
    }

    #[test]
    fn precedence_and_signs() {
        let e = parse_expr("-m^2 + 3*(x - 1)/4").unwrap();
        let x = Expr::param("x");
        let want = -Expr::param("m").powi(2) + Expr::int(3) * (x - Expr::one()) / Expr::int(4);
        assert_eq!(simplify(&e), simplify(&want));
    }

    #[test]
    fn rational_exponents_and_decimals() {
        let e = parse_expr("phi^(-3/2) * 0.25").unwrap();
        let want = Expr::field("phi").pow(Exponent::constant(qr(-3, 2))) * Expr::rat(1, 4);
        assert_eq!(simplify(&e), simplify(&want));
    }

    #[test]
    fn errors() {
        for bad in ["", "lc*", "(phi", "phi^x", "V", "a=b)", "1..2", "phi $ 2"] {
            let r = if bad.contains('=') || bad == "V" { parse_substitution(bad).map(|_| ()) } else { parse_expr(bad).map(|_| ()) };
            assert!(matches!(r, Err(Error::Parse(_))), "{bad}");
        }
    }
}
