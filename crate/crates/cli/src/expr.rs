//! Expression language for phase-space polynomials.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := atom ('^' exponent)?
//! exponent := '-' exponent | atom ('^' exponent)?
//! atom     := number | 'x' | 'p' | 'q' | 'kappa' | 'hbar' | '(' expr ')'
//! ```
//!
//! Exponents are integers; `q` alone also takes halves, `q^(3/2)`. Division is by
//! invertible constants only (a nonzero rational times a power of `q`). `hbar` is
//! another name for `kappa`.

use std::fmt;

use num_traits::Zero;
use qmoyal_core::ring::{CoeffKey, ExactScalar};
use qmoyal_core::{Coeff, Poly, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lexical,
    Syntax,
    /// Well-formed but not a phase-space polynomial (bad exponent, bad division, ...).
    Semantic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
    /// Tokens that would have been accepted here; empty for non-syntax errors.
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ParseErrorKind::Lexical => "lexical error",
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::Semantic => "error",
        };
        write!(f, "{kind} at line {}, column {}: {}", self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    X,
    P,
    Q,
    Kappa,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rational),
    Sym(Symbol),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, Pos),
    Pow(Box<Expr>, Box<Expr>, Pos),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational, String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(_, s) => format!("number {s}"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn err(kind: ParseErrorKind, pos: Pos, message: impl Into<String>, expected: &[&str]) -> ParseError {
    ParseError {
        kind,
        line: pos.line,
        column: pos.column,
        message: message.into(),
        expected: expected.iter().map(|s| s.to_string()).collect(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let ch = chars[i];
        let pos = Pos { line, column: col };
        if ch == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if ch.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = i;
        let tok = if ch.is_ascii_digit() || (ch == '.' && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit())) {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let int_part: String = chars[start..i].iter().collect();
            let mut frac = String::new();
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                let fs = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                frac = chars[fs..i].iter().collect();
            }
            let text: String = chars[start..i].iter().collect();
            let num = format!("{}{}", if int_part.is_empty() { "0" } else { &int_part }, frac);
            let den = format!("1{}", "0".repeat(frac.len()));
            let value = Rational::from_decimal_parts(&num, &den)
                .ok_or_else(|| err(ParseErrorKind::Lexical, pos, format!("malformed number {text}"), &[]))?;
            Tok::Num(value, text)
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else {
            i += 1;
            match ch {
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '^' => Tok::Caret,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => return Err(err(ParseErrorKind::Lexical, pos, format!("unexpected character '{ch}'"), &[])),
            }
        };
        col += i - start;
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, column: col }));
    Ok(out)
}

const ATOM_START: &[&str] = &["number", "'x'", "'p'", "'q'", "'kappa'", "'hbar'", "'('"];

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &(Tok, Pos) {
        &self.toks[self.at]
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let (tok, pos) = self.peek();
        err(ParseErrorKind::Syntax, *pos, format!("unexpected {}", tok.describe()), expected)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().0 {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().0 {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    let (_, pos) = self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?), pos);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().0 == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek().0 == Tok::Caret {
            self.bump();
            let pos = self.peek().1;
            let e = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(e), pos));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Expr, ParseError> {
        if self.peek().0 == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.exponent()?)));
        }
        let base = self.atom()?;
        if self.peek().0 == Tok::Caret {
            self.bump();
            let pos = self.peek().1;
            let e = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(e), pos));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (tok, pos) = self.peek().clone();
        match tok {
            Tok::Num(v, _) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::Ident(name) => {
                let sym = match name.as_str() {
                    "x" => Symbol::X,
                    "p" => Symbol::P,
                    "q" => Symbol::Q,
                    "kappa" | "hbar" => Symbol::Kappa,
                    _ => {
                        return Err(err(
                            ParseErrorKind::Syntax,
                            pos,
                            format!("unknown symbol '{name}' (implicit multiplication is not allowed)"),
                            ATOM_START,
                        ))
                    }
                };
                self.bump();
                Ok(Expr::Sym(sym))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if self.peek().0 != Tok::RParen {
                    return Err(self.unexpected(&["')'", "'+'", "'-'", "'*'", "'/'", "'^'"]));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.unexpected(ATOM_START)),
        }
    }
}

/// Parses to an abstract syntax tree without evaluating.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let e = p.expr()?;
    if p.peek().0 != Tok::Eof {
        return Err(p.unexpected(&["'+'", "'-'", "'*'", "'/'", "'^'", "end of input"]));
    }
    Ok(e)
}

/// Parses and evaluates to a canonical polynomial.
pub fn parse(src: &str) -> Result<Poly, ParseError> {
    eval(&parse_expr(src)?)
}

const MAX_EXPONENT: i64 = 4096;

fn semantic(pos: Pos, message: impl Into<String>) -> ParseError {
    err(ParseErrorKind::Semantic, pos, message, &[])
}

/// The single term `c * kappa^k * q^h * x^a * p^b`, if `f` is one.
fn single_term(f: &Poly) -> Option<((i64, i64), CoeffKey, Rational)> {
    let (e, c) = f.as_monomial()?;
    let mut terms = c.terms();
    let (k, v) = terms.next()?;
    if terms.next().is_some() {
        return None;
    }
    Some((e, *k, v.clone()))
}

fn invert(f: &Poly, pos: Pos) -> Result<Poly, ParseError> {
    match single_term(f) {
        Some((_, key, _)) if key.kappa > 0 => Err(semantic(pos, "kappa cannot have a negative exponent")),
        Some(((a, b), key, v)) => Ok(Poly::monomial(-a, -b, Coeff::term(num_traits::Inv::inv(v), -key.q_half, 0))),
        None if f.is_zero() => Err(semantic(pos, "division by zero")),
        None => Err(semantic(pos, "only a single term can be raised to a negative power or divided by")),
    }
}

fn pow(base: &Poly, n: i64, pos: Pos) -> Result<Poly, ParseError> {
    if n.abs() > MAX_EXPONENT {
        return Err(semantic(pos, format!("exponent {n} exceeds the limit of {MAX_EXPONENT}")));
    }
    let b = if n < 0 { invert(base, pos)? } else { base.clone() };
    let mut acc = Poly::one();
    let mut sq = b;
    let mut e = n.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &sq;
        }
        e >>= 1;
        if e > 0 {
            sq = &sq * &sq;
        }
    }
    Ok(acc)
}

fn eval(e: &Expr) -> Result<Poly, ParseError> {
    Ok(match e {
        Expr::Num(v) => Poly::constant(Coeff::constant(v.clone())),
        Expr::Sym(Symbol::X) => Poly::x(),
        Expr::Sym(Symbol::P) => Poly::p(),
        Expr::Sym(Symbol::Q) => Poly::constant(Coeff::q_pow(1)),
        Expr::Sym(Symbol::Kappa) => Poly::constant(Coeff::kappa_pow(1)),
        Expr::Neg(a) => -eval(a)?,
        Expr::Add(a, b) => &eval(a)? + &eval(b)?,
        Expr::Sub(a, b) => &eval(a)? - &eval(b)?,
        Expr::Mul(a, b) => &eval(a)? * &eval(b)?,
        Expr::Div(a, b, pos) => {
            let d = eval(b)?;
            if d.as_monomial().is_none_or(|(e, _)| e != (0, 0)) {
                return Err(semantic(*pos, "division is only by a nonzero constant"));
            }
            &eval(a)? * &invert(&d, *pos)?
        }
        Expr::Pow(base, exp, pos) => {
            let b = eval(base)?;
            let n = eval(exp)?;
            let value = if n.is_zero() {
                Rational::zero()
            } else {
                match single_term(&n) {
                    Some(((0, 0), key, v)) if key == CoeffKey::new(0, 0) => v,
                    _ => return Err(semantic(*pos, "exponent must be a number")),
                }
            };
            if value.is_integral() {
                let n = value.to_integer().try_into().map_err(|_| semantic(*pos, "exponent too large"))?;
                pow(&b, n, *pos)?
            } else if value.denom() == &2.into() && is_bare_q(&b) {
                let h: i64 = value.numer().try_into().map_err(|_| semantic(*pos, "exponent too large"))?;
                let q_half = single_term(&b).map(|(_, k, _)| k.q_half).unwrap_or(0);
                if (q_half * h) % 2 != 0 {
                    return Err(semantic(*pos, "q exponents are limited to multiples of 1/2"));
                }
                if (q_half * h / 2).abs() > 2 * MAX_EXPONENT {
                    return Err(semantic(*pos, "exponent too large"));
                }
                Poly::constant(Coeff::q_half_pow(q_half * h / 2))
            } else {
                return Err(err(
                    ParseErrorKind::Syntax,
                    *pos,
                    format!("integer exponent required, found {value}"),
                    &[],
                ));
            }
        }
    })
}

/// `q^e` with unit coefficient, nothing else.
fn is_bare_q(f: &Poly) -> bool {
    matches!(single_term(f), Some(((0, 0), key, v)) if key.kappa == 0 && v == Rational::from_i64(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_fraction(n, d)
    }

    #[test]
    fn spec_examples() {
        let mut f = Poly::zero();
        f.add_term((2, 1), Coeff::integer(1));
        f.add_term((0, 0), Coeff::integer(-3));
        assert_eq!(parse("x^2*p - 3").unwrap(), f);
        assert_eq!(parse("q^-1*x*p").unwrap(), Poly::monomial(1, 1, Coeff::q_pow(-1)));
        let e = parse("x^(1/2)").unwrap_err();
        assert!(e.message.contains("integer exponent required"), "{e}");
        assert!(e.to_string().starts_with("syntax error at line 1, column 3"), "{e}");
        assert_eq!((e.line, e.column), (1, 3));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse("-x^2").unwrap(), -Poly::unit_monomial(2, 0));
        assert_eq!(parse("x^2^3").unwrap(), Poly::unit_monomial(8, 0));
        assert_eq!(parse("2*x + 3*x").unwrap(), Poly::monomial(1, 0, Coeff::integer(5)));
        assert_eq!(parse("1 - 2 - 3").unwrap(), Poly::constant(Coeff::integer(-4)));
        assert_eq!(parse("(x + p)^2").unwrap(), parse("x^2 + 2*x*p + p^2").unwrap());
        assert_eq!(parse("x/2").unwrap(), Poly::monomial(1, 0, Coeff::constant(r(1, 2))));
        assert_eq!(parse("x/q^2").unwrap(), Poly::monomial(1, 0, Coeff::q_pow(-2)));
        assert_eq!(parse("0.25*p").unwrap(), Poly::monomial(0, 1, Coeff::constant(r(1, 4))));
        assert_eq!(parse("hbar^2").unwrap(), parse("kappa^2").unwrap());
        assert_eq!(parse("q^(3/2)").unwrap(), Poly::constant(Coeff::q_half_pow(3)));
        assert_eq!(parse("q^(-1/2)*x").unwrap(), Poly::monomial(1, 0, Coeff::q_half_pow(-1)));
        assert_eq!(parse("(2*x)^-2").unwrap(), Poly::monomial(-2, 0, Coeff::constant(r(1, 4))));
        assert_eq!(parse("x^0").unwrap(), Poly::one());
        assert_eq!(parse("x^(2 - 3)").unwrap(), Poly::unit_monomial(-1, 0));
    }

    #[test]
    fn diagnostics() {
        let e = parse("2x").unwrap_err();
        assert_eq!((e.kind.clone(), e.column), (ParseErrorKind::Syntax, 2));
        assert!(e.expected.contains(&"'*'".to_string()));
        let e = parse("qx").unwrap_err();
        assert!(e.message.contains("unknown symbol 'qx'"));
        let e = parse("x +\n  $").unwrap_err();
        assert_eq!((e.kind, e.line, e.column), (ParseErrorKind::Lexical, 2, 3));
        let e = parse("x + ").unwrap_err();
        assert!(e.message.contains("end of input"));
        assert!(parse("(x").unwrap_err().expected.contains(&"')'".to_string()));
        assert!(parse("kappa^-1").unwrap_err().message.contains("kappa"));
        assert!(parse("x/p").unwrap_err().message.contains("constant"));
        assert!(parse("x/0").unwrap_err().message.contains("zero"));
        assert!(parse("(x + p)^-1").unwrap_err().message.contains("single term"));
        assert!(parse("x^q").unwrap_err().message.contains("number"));
        assert!(parse("x^100000").unwrap_err().message.contains("limit"));
        assert!(parse("q^(1/3)").unwrap_err().message.contains("integer exponent required"));
    }
}
