//! Printing in the parser's grammar, with the minimum parentheses needed to
//! reproduce the same tree. Negative rational exponents have no spelling in
//! the grammar and print as `1/x^(p/q)`.

use std::fmt::{self, Write};

use num_complex::Complex64;

use super::{Expr, Node, Rational};

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const FACTOR: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn level(e: &Expr) -> u8 {
    match e.node() {
        Node::Add(..) | Node::Sub(..) => SUM,
        Node::Mul(..) | Node::Div(..) => PRODUCT,
        Node::Pow(_, r) if r.num() < 0 => PRODUCT,
        Node::Neg(_) => FACTOR,
        Node::Num(z) if z.im == 0.0 && z.re.is_sign_negative() && z.re != 0.0 => FACTOR,
        Node::Pow(..) => POWER,
        _ => ATOM,
    }
}

fn write_real(out: &mut impl Write, x: f64) -> fmt::Result {
    if x == 0.0 {
        out.write_char('0')
    } else {
        write!(out, "{x}")
    }
}

fn write_num(out: &mut impl Write, z: Complex64) -> fmt::Result {
    if z.im == 0.0 {
        return write_real(out, z.re);
    }
    out.write_char('(')?;
    if z.re != 0.0 {
        write_real(out, z.re)?;
        out.write_char(if z.im < 0.0 { '-' } else { '+' })?;
        write_real(out, z.im.abs())?;
    } else {
        write_real(out, z.im)?;
    }
    out.write_str("*i)")
}

fn write_exponent(out: &mut impl Write, r: Rational) -> fmt::Result {
    debug_assert!(r.num() >= 0);
    if r.is_integer() {
        write!(out, "^{}", r.num())
    } else {
        write!(out, "^({}/{})", r.num(), r.den())
    }
}

fn write_at(out: &mut impl Write, e: &Expr, min: u8) -> fmt::Result {
    if level(e) < min {
        out.write_char('(')?;
        write_expr(out, e)?;
        out.write_char(')')
    } else {
        write_expr(out, e)
    }
}

fn write_expr(out: &mut impl Write, e: &Expr) -> fmt::Result {
    match e.node() {
        Node::Num(z) => write_num(out, *z),
        Node::Param(p) => out.write_str(p.name()),
        Node::Const(name) => out.write_str(name),
        Node::Neg(a) => {
            out.write_char('-')?;
            write_at(out, a, POWER)
        }
        Node::Add(a, b) => {
            write_at(out, a, SUM)?;
            out.write_str(" + ")?;
            write_at(out, b, PRODUCT)
        }
        Node::Sub(a, b) => {
            write_at(out, a, SUM)?;
            out.write_str(" - ")?;
            write_at(out, b, PRODUCT)
        }
        Node::Mul(a, b) => {
            write_at(out, a, PRODUCT)?;
            out.write_char('*')?;
            write_at(out, b, FACTOR)
        }
        Node::Div(a, b) => {
            write_at(out, a, PRODUCT)?;
            out.write_char('/')?;
            write_at(out, b, FACTOR)
        }
        Node::Pow(a, r) => {
            if r.num() < 0 {
                out.write_str("1/")?;
                write_at(out, a, ATOM)?;
                write_exponent(out, Rational::new(-r.num(), r.den()))
            } else {
                write_at(out, a, ATOM)?;
                write_exponent(out, *r)
            }
        }
        Node::Func(f, a) => {
            out.write_str(f.name())?;
            out.write_char('(')?;
            write_expr(out, a)?;
            out.write_char(')')
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}
