//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr     := term (("+"|"-") term)* ;
//! term     := factor (("*"|"/") factor)* ;
//! factor   := ("-")? power ;
//! power    := atom ("^" rational)? ;
//! atom     := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")" ;
//! rational := NUMBER | "(" NUMBER "/" NUMBER ")" ;
//! ```
//!
//! The parser builds raw nodes (no folding) so the tree mirrors the source.

use num_complex::Complex64;
use thiserror::Error;

use super::{Expr, Func, Node, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedEnd,
    Expected(&'static str),
    UnknownFunction(String),
    BadNumber(String),
    BadExponent(String),
    TrailingInput,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: {kind:?}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if !c.is_ascii() {
            let ch = src[i..].chars().next().unwrap_or('?');
            return Err(ParseError {
                offset: i,
                kind: ParseErrorKind::UnexpectedChar(ch),
            });
        }
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
            }
            b'+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            b'-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            b'*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            b'/' => {
                out.push((i, Tok::Slash));
                i += 1;
            }
            b'^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            b'(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                out.push((start, Tok::Num(src[start..i].to_string())));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
            }
            other => {
                return Err(ParseError {
                    offset: i,
                    kind: ParseErrorKind::UnexpectedChar(other as char),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            offset: self.offset(),
            kind,
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &'static str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            None => Err(self.err(ParseErrorKind::UnexpectedEnd)),
            Some(_) => Err(self.err(ParseErrorKind::Expected(what))),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::from_node(Node::Add(lhs, rhs));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::from_node(Node::Sub(lhs, rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    lhs = Expr::from_node(Node::Mul(lhs, rhs));
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    lhs = Expr::from_node(Node::Div(lhs, rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            let inner = self.power()?;
            return Ok(Expr::from_node(Node::Neg(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let r = self.rational()?;
            return Ok(Expr::from_node(Node::Pow(base, r)));
        }
        Ok(base)
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Num(s)) => number_to_rational(&s).ok_or(ParseError {
                offset: at,
                kind: ParseErrorKind::BadExponent(s),
            }),
            Some(Tok::LParen) => {
                let at_num = self.offset();
                let num = match self.bump() {
                    Some(Tok::Num(s)) => number_to_rational(&s).ok_or(ParseError {
                        offset: at_num,
                        kind: ParseErrorKind::BadExponent(s),
                    })?,
                    None => return Err(self.err(ParseErrorKind::UnexpectedEnd)),
                    Some(_) => {
                        return Err(ParseError {
                            offset: at_num,
                            kind: ParseErrorKind::Expected("exponent numerator"),
                        })
                    }
                };
                self.expect(Tok::Slash, "'/' in rational exponent")?;
                let at_den = self.offset();
                let den = match self.bump() {
                    Some(Tok::Num(s)) => number_to_rational(&s).ok_or(ParseError {
                        offset: at_den,
                        kind: ParseErrorKind::BadExponent(s),
                    })?,
                    None => return Err(self.err(ParseErrorKind::UnexpectedEnd)),
                    Some(_) => {
                        return Err(ParseError {
                            offset: at_den,
                            kind: ParseErrorKind::Expected("exponent denominator"),
                        })
                    }
                };
                if den.num() == 0 {
                    return Err(ParseError {
                        offset: at_den,
                        kind: ParseErrorKind::BadExponent("zero denominator".into()),
                    });
                }
                self.expect(Tok::RParen, "')' after rational exponent")?;
                Ok(Rational::new(num.num() * den.den(), num.den() * den.num()))
            }
            None => Err(ParseError {
                offset: at,
                kind: ParseErrorKind::UnexpectedEnd,
            }),
            Some(_) => Err(ParseError {
                offset: at,
                kind: ParseErrorKind::Expected("rational exponent"),
            }),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Num(s)) => {
                let x: f64 = s.parse().map_err(|_| ParseError {
                    offset: at,
                    kind: ParseErrorKind::BadNumber(s.clone()),
                })?;
                Ok(Expr::from_node(Node::Num(Complex64::new(x, 0.0))))
            }
            Some(Tok::Ident(name)) => {
                if self.peek() == Some(&Tok::LParen) {
                    let f = Func::from_name(&name).ok_or(ParseError {
                        offset: at,
                        kind: ParseErrorKind::UnknownFunction(name.clone()),
                    })?;
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "')' after function argument")?;
                    Ok(Expr::from_node(Node::Func(f, arg)))
                } else {
                    Ok(Expr::ident(&name))
                }
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            None => Err(ParseError {
                offset: at,
                kind: ParseErrorKind::UnexpectedEnd,
            }),
            Some(t) => Err(ParseError {
                offset: at,
                kind: ParseErrorKind::UnexpectedChar(tok_char(&t)),
            }),
        }
    }
}

fn tok_char(t: &Tok) -> char {
    match t {
        Tok::Plus => '+',
        Tok::Minus => '-',
        Tok::Star => '*',
        Tok::Slash => '/',
        Tok::Caret => '^',
        Tok::LParen => '(',
        Tok::RParen => ')',
        Tok::Num(s) | Tok::Ident(s) => s.chars().next().unwrap_or('?'),
    }
}

/// Exact decimal-to-rational conversion (`2.5` → 5/2). Exponent notation
/// is not accepted in exponents.
fn number_to_rational(s: &str) -> Option<Rational> {
    if s.contains(['e', 'E']) {
        return None;
    }
    let (int, frac) = match s.split_once('.') {
        Some((a, b)) => (a, b),
        None => (s, ""),
    };
    if frac.len() > 12 || int.len() > 12 || (int.is_empty() && frac.is_empty()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let num: i64 = digits.parse().ok()?;
    let den = 10i64.checked_pow(frac.len() as u32)?;
    Some(Rational::new(num, den))
}

/// Parses `source` into an expression tree.
pub fn parse(source: &str) -> Result<Expr, ParseError> {
    let toks = lex(source)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: source.len(),
    };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.err(ParseErrorKind::TrailingInput));
    }
    Ok(e)
}
