//! Scalar expression trees over the surface parameters `u`, `v` and named
//! constants.
//!
//! An [`Expr`] is an immutable, reference-counted tree. Cloning is cheap and
//! subtrees are shared freely between expressions. The arithmetic operator
//! impls (`+`, `-`, `*`, `/`, unary `-`) fold literals and apply the 0/1
//! identities as they build, which keeps derived quantities (derivatives,
//! operator coefficients) from growing needlessly. The parser builds raw
//! nodes instead so that [`fold_constants`] has something to do.
//!
//! The identifier `i` is reserved for the imaginary unit; `u` and `v` are the
//! surface parameters; every other identifier is a named constant resolved
//! against a [`ConstTable`] at evaluation time.

mod diff;
mod eval;
mod fold;
mod normalize;
mod parse;
mod print;
mod tape;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use diff::differentiate;
pub use eval::{evaluate, EvalError};
pub use fold::fold_constants;
pub use normalize::normalize;
pub use parse::{parse, ParseError, ParseErrorKind};
pub use tape::Tape;

/// Surface parameter symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Param {
    #[serde(rename = "u")]
    U,
    #[serde(rename = "v")]
    V,
}

impl Param {
    pub const BOTH: [Param; 2] = [Param::U, Param::V];

    pub fn name(self) -> &'static str {
        match self {
            Param::U => "u",
            Param::V => "v",
        }
    }

    pub fn from_name(name: &str) -> Option<Param> {
        match name {
            "u" => Some(Param::U),
            "v" => Some(Param::V),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Param::U => 0,
            Param::V => 1,
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Supported elementary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sec,
    Ln,
    Exp,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sec,
        Func::Ln,
        Func::Exp,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sec => "sec",
            Func::Ln => "ln",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Exact rational exponent `num/den` with `den > 0` and `gcd(num, den) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational {
    num: i64,
    den: i64,
}

impl Rational {
    /// Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Rational {
        assert!(den != 0, "rational with zero denominator");
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i64;
        let sign = if den < 0 { -1 } else { 1 };
        Rational {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn int(n: i64) -> Rational {
        Rational { num: n, den: 1 }
    }

    pub fn num(self) -> i64 {
        self.num
    }

    pub fn den(self) -> i64 {
        self.den
    }

    pub fn is_integer(self) -> bool {
        self.den == 1
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn minus_one(self) -> Rational {
        Rational::new(self.num - self.den, self.den)
    }
}

impl std::ops::Mul for Rational {
    type Output = Rational;

    fn mul(self, other: Rational) -> Rational {
        Rational::new(self.num * other.num, self.den * other.den)
    }
}

impl std::ops::Add for Rational {
    type Output = Rational;

    fn add(self, other: Rational) -> Rational {
        Rational::new(self.num * other.den + other.num * self.den, self.den * other.den)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// A node of the expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(Complex64),
    Param(Param),
    Const(Arc<str>),
    Neg(Expr),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Pow(Expr, Rational),
    Func(Func, Expr),
}

/// Immutable, shareable scalar expression.
#[derive(Clone, PartialEq)]
pub struct Expr(Arc<Node>);

impl Expr {
    /// Wraps a node without any folding.
    pub fn from_node(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    /// Pointer identity, used to memoize over shared subtrees.
    pub(crate) fn ptr_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn num(x: f64) -> Expr {
        Expr::complex(Complex64::new(x, 0.0))
    }

    pub fn complex(z: Complex64) -> Expr {
        Expr::from_node(Node::Num(z))
    }

    pub fn zero() -> Expr {
        Expr::num(0.0)
    }

    pub fn one() -> Expr {
        Expr::num(1.0)
    }

    /// The imaginary unit.
    pub fn i() -> Expr {
        Expr::complex(Complex64::new(0.0, 1.0))
    }

    pub fn param(p: Param) -> Expr {
        Expr::from_node(Node::Param(p))
    }

    pub fn u() -> Expr {
        Expr::param(Param::U)
    }

    pub fn v() -> Expr {
        Expr::param(Param::V)
    }

    /// Named constant (or the parameter / imaginary unit if `name` is one of
    /// the reserved identifiers).
    pub fn ident(name: &str) -> Expr {
        if let Some(p) = Param::from_name(name) {
            Expr::param(p)
        } else if name == "i" {
            Expr::i()
        } else {
            Expr::from_node(Node::Const(Arc::from(name)))
        }
    }

    pub fn as_num(&self) -> Option<Complex64> {
        match self.node() {
            Node::Num(z) => Some(*z),
            _ => None,
        }
    }

    /// True for the literal zero only; no numeric testing.
    pub fn is_zero(&self) -> bool {
        matches!(self.node(), Node::Num(z) if *z == Complex64::new(0.0, 0.0))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.node(), Node::Num(z) if *z == Complex64::new(1.0, 0.0))
    }

    pub fn func(f: Func, arg: Expr) -> Expr {
        if let Some(z) = arg.as_num() {
            if let Ok(val) = eval::apply_func(f, z) {
                if let Some(val) = tidy_literal(val) {
                    return Expr::complex(val);
                }
            }
        }
        Expr::from_node(Node::Func(f, arg))
    }

    pub fn sin(&self) -> Expr {
        Expr::func(Func::Sin, self.clone())
    }

    pub fn cos(&self) -> Expr {
        Expr::func(Func::Cos, self.clone())
    }

    pub fn tan(&self) -> Expr {
        Expr::func(Func::Tan, self.clone())
    }

    pub fn sec(&self) -> Expr {
        Expr::func(Func::Sec, self.clone())
    }

    pub fn ln(&self) -> Expr {
        Expr::func(Func::Ln, self.clone())
    }

    pub fn exp(&self) -> Expr {
        Expr::func(Func::Exp, self.clone())
    }

    pub fn sqrt(&self) -> Expr {
        Expr::func(Func::Sqrt, self.clone())
    }

    /// `self^r` with literal folding and the `x^0`, `x^1` identities.
    pub fn pow(&self, r: Rational) -> Expr {
        if r == Rational::int(0) {
            return Expr::one();
        }
        if r == Rational::int(1) {
            return self.clone();
        }
        if let Some(z) = self.as_num() {
            if r.is_integer() && !(z == Complex64::new(0.0, 0.0) && r.num() < 0) {
                if let Some(val) = tidy_literal(z.powi(r.num() as i32)) {
                    return Expr::complex(val);
                }
            }
        }
        if let Node::Pow(base, inner) = self.node() {
            // (b^p)^q = b^(pq) is only safe for integer powers.
            if inner.is_integer() && r.is_integer() {
                return base.pow(*inner * r);
            }
        }
        Expr::from_node(Node::Pow(self.clone(), r))
    }

    pub fn powi(&self, n: i64) -> Expr {
        self.pow(Rational::int(n))
    }

    /// Identifiers (other than `u`, `v`, `i`) referenced by this expression.
    pub fn constants(&self) -> Vec<String> {
        let mut out = std::collections::BTreeSet::new();
        collect_consts(self, &mut out);
        out.into_iter().collect()
    }

    /// Does the expression mention parameter `p`?
    pub fn depends_on(&self, p: Param) -> bool {
        match self.node() {
            Node::Num(_) | Node::Const(_) => false,
            Node::Param(q) => *q == p,
            Node::Neg(a) | Node::Pow(a, _) | Node::Func(_, a) => a.depends_on(p),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.depends_on(p) || b.depends_on(p)
            }
        }
    }

    /// Number of nodes in the tree, counting shared subtrees once per use.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Num(_) | Node::Param(_) | Node::Const(_) => 1,
            Node::Neg(a) | Node::Pow(a, _) | Node::Func(_, a) => 1 + a.size(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }
}

fn collect_consts(e: &Expr, out: &mut std::collections::BTreeSet<String>) {
    match e.node() {
        Node::Const(name) => {
            out.insert(name.to_string());
        }
        Node::Num(_) | Node::Param(_) => {}
        Node::Neg(a) | Node::Pow(a, _) | Node::Func(_, a) => collect_consts(a, out),
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
            collect_consts(a, out);
            collect_consts(b, out);
        }
    }
}

/// Folded literals must stay finite.
fn tidy_literal(z: Complex64) -> Option<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return None;
    }
    Some(z)
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl From<f64> for Expr {
    fn from(x: f64) -> Expr {
        Expr::num(x)
    }
}

impl From<Param> for Expr {
    fn from(p: Param) -> Expr {
        Expr::param(p)
    }
}

fn fold_add(a: &Expr, b: &Expr) -> Expr {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if let (Some(x), Some(y)) = (a.as_num(), b.as_num()) {
        return Expr::complex(x + y);
    }
    if let Node::Neg(bb) = b.node() {
        return fold_sub(a, bb);
    }
    Expr::from_node(Node::Add(a.clone(), b.clone()))
}

fn fold_sub(a: &Expr, b: &Expr) -> Expr {
    if b.is_zero() {
        return a.clone();
    }
    if a.is_zero() {
        return fold_neg(b);
    }
    if let (Some(x), Some(y)) = (a.as_num(), b.as_num()) {
        return Expr::complex(x - y);
    }
    if let Node::Neg(bb) = b.node() {
        return fold_add(a, bb);
    }
    Expr::from_node(Node::Sub(a.clone(), b.clone()))
}

fn fold_mul(a: &Expr, b: &Expr) -> Expr {
    if a.is_zero() || b.is_zero() {
        return Expr::zero();
    }
    if a.is_one() {
        return b.clone();
    }
    if b.is_one() {
        return a.clone();
    }
    match (a.as_num(), b.as_num()) {
        (Some(x), Some(y)) => return Expr::complex(x * y),
        (Some(x), None) if x == Complex64::new(-1.0, 0.0) => return fold_neg(b),
        (None, Some(y)) if y == Complex64::new(-1.0, 0.0) => return fold_neg(a),
        // Keep literals on the left so they can meet and fold.
        (None, Some(_)) => return fold_mul(b, a),
        (Some(x), None) => {
            if let Node::Mul(l, r) = b.node() {
                if let Some(y) = l.as_num() {
                    return fold_mul(&Expr::complex(x * y), r);
                }
            }
            if let Node::Neg(inner) = b.node() {
                return fold_mul(&Expr::complex(-x), inner);
            }
        }
        (None, None) => {}
    }
    match (a.node(), b.node()) {
        (Node::Neg(x), Node::Neg(y)) => fold_mul(x, y),
        (Node::Neg(x), _) => fold_neg(&fold_mul(x, b)),
        (_, Node::Neg(y)) => fold_neg(&fold_mul(a, y)),
        _ => Expr::from_node(Node::Mul(a.clone(), b.clone())),
    }
}

fn fold_div(a: &Expr, b: &Expr) -> Expr {
    if b.is_one() {
        return a.clone();
    }
    if a.is_zero() && !b.is_zero() {
        return Expr::zero();
    }
    if let (Some(x), Some(y)) = (a.as_num(), b.as_num()) {
        if y != Complex64::new(0.0, 0.0) {
            return Expr::complex(x / y);
        }
    }
    if let Some(y) = b.as_num() {
        if y != Complex64::new(0.0, 0.0) {
            return fold_mul(&Expr::complex(1.0 / y), a);
        }
    }
    match (a.node(), b.node()) {
        (Node::Neg(x), Node::Neg(y)) => fold_div(x, y),
        (Node::Neg(x), _) => fold_neg(&fold_div(x, b)),
        (_, Node::Neg(y)) => fold_neg(&fold_div(a, y)),
        _ => Expr::from_node(Node::Div(a.clone(), b.clone())),
    }
}

fn fold_neg(a: &Expr) -> Expr {
    if let Some(x) = a.as_num() {
        return Expr::complex(-x);
    }
    if let Node::Neg(inner) = a.node() {
        return inner.clone();
    }
    if let Node::Mul(l, r) = a.node() {
        if let Some(x) = l.as_num() {
            return fold_mul(&Expr::complex(-x), r);
        }
    }
    Expr::from_node(Node::Neg(a.clone()))
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $fold:ident) => {
        impl std::ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $fold(self, rhs)
            }
        }
        impl std::ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $fold(&self, &rhs)
            }
        }
        impl std::ops::$trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $fold(&self, rhs)
            }
        }
        impl std::ops::$trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $fold(self, &rhs)
            }
        }
        impl std::ops::$trait<f64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                $fold(self, &Expr::num(rhs))
            }
        }
        impl std::ops::$trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                $fold(&self, &Expr::num(rhs))
            }
        }
        impl std::ops::$trait<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $fold(&Expr::num(self), &rhs)
            }
        }
        impl std::ops::$trait<&Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $fold(&Expr::num(self), rhs)
            }
        }
    };
}

impl_binop!(Add, add, fold_add);
impl_binop!(Sub, sub, fold_sub);
impl_binop!(Mul, mul, fold_mul);
impl_binop!(Div, div, fold_div);

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        fold_neg(&self)
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        fold_neg(self)
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |acc, e| acc + e)
    }
}

impl Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Expr, D::Error> {
        let src = String::deserialize(d)?;
        parse(&src).map_err(serde::de::Error::custom)
    }
}

/// Values of the two surface parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub u: f64,
    pub v: f64,
}

impl ParamPoint {
    pub fn new(u: f64, v: f64) -> ParamPoint {
        debug_assert!(u.is_finite() && v.is_finite());
        ParamPoint { u, v }
    }

    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::U => self.u,
            Param::V => self.v,
        }
    }

    pub fn with(&self, p: Param, x: f64) -> ParamPoint {
        match p {
            Param::U => ParamPoint { u: x, v: self.v },
            Param::V => ParamPoint { u: self.u, v: x },
        }
    }
}

impl fmt::Display for ParamPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(u={}, v={})", self.u, self.v)
    }
}

/// Values for named constants (`alpha`, `beta`, `hbar`, `m`, ...).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConstTable(BTreeMap<String, f64>);

impl ConstTable {
    pub fn new() -> ConstTable {
        ConstTable::default()
    }

    pub fn with(mut self, name: &str, value: f64) -> ConstTable {
        self.0.insert(name.to_string(), value);
        self
    }

    pub fn insert(&mut self, name: &str, value: f64) {
        self.0.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Entries of `other` override entries of `self`.
    pub fn merged(&self, other: &ConstTable) -> ConstTable {
        let mut out = self.clone();
        for (k, v) in other.iter() {
            out.insert(k, v);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smart_constructors_fold_identities() {
        let u = Expr::u();
        assert_eq!((&u + 0.0).to_string(), "u");
        assert_eq!((0.0 * u.sin()).to_string(), "0");
        assert_eq!((&u * 1.0).to_string(), "u");
        assert_eq!((Expr::num(2.0) * 3.0).to_string(), "6");
        assert_eq!(u.pow(Rational::int(1)).to_string(), "u");
        assert_eq!(Expr::num(0.0).cos().to_string(), "1");
    }

    #[test]
    fn rational_normalizes() {
        let r = Rational::new(6, -4);
        assert_eq!((r.num(), r.den()), (-3, 2));
        assert_eq!(Rational::new(3, 2).minus_one(), Rational::new(1, 2));
    }

    #[test]
    fn ident_reserves_parameters_and_unit() {
        assert_eq!(Expr::ident("u"), Expr::u());
        assert_eq!(Expr::ident("i").as_num(), Some(Complex64::new(0.0, 1.0)));
        assert_eq!(Expr::ident("alpha").constants(), vec!["alpha".to_string()]);
    }
}
