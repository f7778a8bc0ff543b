//! Expanded sum-of-products normal form.
//!
//! Products are distributed, like monomials are collected, and integer powers
//! of the same atom are merged. Atoms are parameters, constants, function
//! applications (with normalized arguments), fractional powers and
//! non-monomial denominators. Fractional powers are never merged with other
//! powers of their base (`sqrt(u^2)` is not `u`). `sec` and `tan` are
//! rewritten through `cos` and `sin`, a sum divided by a sum is replaced by a
//! monomial when one is an exact monomial multiple of the other, and
//! `c·cos(x)^2 + c·sin(x)^2` folds to `c`. `sqrt(x)^2` is replaced by `x`,
//! which holds for the principal root on all of ℂ. Nothing else is attempted, so this
//! is a tidy-up for display and structural zero detection, not a decision
//! procedure.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{Expr, Func, Node};

/// Integer powers of a sum up to this exponent are expanded.
const MAX_EXPAND_POWER: i64 = 4;
/// Products whose expansion would exceed this many terms keep the sum opaque.
const MAX_TERMS: usize = 4096;

type Factors = BTreeMap<String, (Expr, i64)>;

#[derive(Clone)]
struct Term {
    coef: Complex64,
    scale: f64,
    factors: Factors,
}

#[derive(Clone, Default)]
struct Poly(BTreeMap<Vec<(String, i64)>, Term>);

fn key_of(f: &Factors) -> Vec<(String, i64)> {
    f.iter().map(|(k, (_, p))| (k.clone(), *p)).collect()
}

impl Poly {
    fn constant(z: Complex64) -> Poly {
        let mut p = Poly::default();
        p.add_term(Term {
            coef: z,
            scale: z.norm(),
            factors: Factors::new(),
        });
        p
    }

    fn atom(e: Expr, power: i64) -> Poly {
        let mut factors = Factors::new();
        factors.insert(e.to_string(), (e, power));
        let mut p = Poly::default();
        p.add_term(Term {
            coef: Complex64::new(1.0, 0.0),
            scale: 1.0,
            factors,
        });
        p
    }

    fn add_term(&mut self, t: Term) {
        if t.coef == Complex64::new(0.0, 0.0) {
            return;
        }
        let key = key_of(&t.factors);
        match self.0.get_mut(&key) {
            Some(existing) => {
                existing.coef += t.coef;
                existing.scale = existing.scale.max(t.scale);
                if existing.coef.norm() <= 1e-14 * existing.scale {
                    self.0.remove(&key);
                }
            }
            None => {
                self.0.insert(key, t);
            }
        }
    }

    fn add(mut self, other: Poly, sign: f64) -> Poly {
        for (_, mut t) in other.0 {
            t.coef *= sign;
            self.add_term(t);
        }
        self
    }

    fn scale(mut self, z: Complex64) -> Poly {
        if z == Complex64::new(0.0, 0.0) {
            return Poly::default();
        }
        for t in self.0.values_mut() {
            t.coef *= z;
            t.scale *= z.norm();
        }
        self
    }

    fn mul(&self, other: &Poly) -> Option<Poly> {
        if self.0.len() * other.0.len() > MAX_TERMS {
            return None;
        }
        let mut out = Poly::default();
        for a in self.0.values() {
            for b in other.0.values() {
                let mut factors = a.factors.clone();
                for (k, (e, p)) in &b.factors {
                    let entry = factors.entry(k.clone()).or_insert((e.clone(), 0));
                    entry.1 += p;
                    if entry.1 == 0 {
                        factors.remove(k);
                    }
                }
                out.add_term(Term {
                    coef: a.coef * b.coef,
                    scale: a.scale * b.scale,
                    factors,
                });
            }
        }
        Some(out)
    }

    /// Folds `c·t·cos(x)^2 + c·t·sin(x)^2` into `c·t`, and `c·t − c·t·cos(x)^2`
    /// into `c·t·sin(x)^2` (likewise with sin and cos swapped), until no such
    /// pair remains. Every fold removes a term, so this terminates.
    fn pythagoras(mut self) -> Poly {
        'scan: loop {
            for (key, t) in &self.0 {
                for (name, (atom, power)) in &t.factors {
                    let (arg, other) = match atom.node() {
                        Node::Func(Func::Cos, a) => (a, Func::Sin),
                        Node::Func(Func::Sin, a) => (a, Func::Cos),
                        _ => continue,
                    };
                    let co = Expr::func(other, arg.clone());
                    let with_power = |pw: i64| {
                        let mut f = t.factors.clone();
                        if pw == 0 {
                            f.remove(name);
                        } else {
                            f.insert(name.clone(), (atom.clone(), pw));
                        }
                        f
                    };
                    let times_co2 = |mut f: Factors| {
                        let e = f.entry(co.to_string()).or_insert((co.clone(), 0));
                        e.1 += 2;
                        if e.1 == 0 {
                            f.remove(&co.to_string());
                        }
                        f
                    };
                    let close = |a: Complex64, b: Complex64, scale: f64| (a - b).norm() <= 1e-14 * scale;
                    // t = c·m·f^2 paired with c·m·co^2
                    {
                        let reduced = with_power(power - 2);
                        let partner_key = key_of(&times_co2(reduced.clone()));
                        if let Some(o) = self.0.get(&partner_key) {
                            let scale = t.scale.max(o.scale);
                            if close(t.coef, o.coef, scale) {
                                let merged = Term { coef: t.coef, scale, factors: reduced };
                                let key = key.clone();
                                self.0.remove(&key);
                                self.0.remove(&partner_key);
                                self.add_term(merged);
                                continue 'scan;
                            }
                        }
                    }
                    // t = c·m paired with −c·m·f^2, seen from either term
                    for (low_factors, high_key) in [
                        (t.factors.clone(), key_of(&with_power(power + 2))),
                        (with_power(power - 2), key.clone()),
                    ] {
                        let low_key = key_of(&low_factors);
                        let (Some(lo), Some(hi)) = (self.0.get(&low_key), self.0.get(&high_key)) else {
                            continue;
                        };
                        let scale = lo.scale.max(hi.scale);
                        if !close(lo.coef, -hi.coef, scale) || low_key == high_key {
                            continue;
                        }
                        let merged = Term { coef: lo.coef, scale, factors: times_co2(low_factors) };
                        self.0.remove(&low_key);
                        self.0.remove(&high_key);
                        self.add_term(merged);
                        continue 'scan;
                    }
                }
            }
            return self;
        }
    }

    /// Uses `sqrt(x)^2 = x` to merge a square root with integer powers of its
    /// argument, leaving at most one power of the root in each term. Unless
    /// `eager`, a root of a sum is only expanded when that sum also appears
    /// as a factor, so it can still cancel against a later denominator.
    fn square_roots(self, eager: bool) -> Poly {
        let mut out = Poly::default();
        'terms: for t in self.0.into_values() {
            for (name, (atom, p)) in &t.factors {
                let Node::Func(Func::Sqrt, arg) = atom.node() else {
                    continue;
                };
                let arg_key = arg.to_string();
                let q = t.factors.get(&arg_key).map_or(0, |f| f.1);
                let base = poly(arg);
                if q == 0 && (p.abs() < 2 || !(eager || base.single_term().is_some())) {
                    continue;
                }
                let s = p + 2 * q;
                let rem = if s % 2 == 0 { 0 } else { s.signum() };
                let k = (s - rem) / 2;
                let mut rest = t.clone();
                rest.factors.remove(name);
                rest.factors.remove(&arg_key);
                if rem != 0 {
                    rest.factors.insert(name.clone(), (atom.clone(), rem));
                }
                let lifted = match (k < 0, base.single_term()) {
                    (false, _) => repeat_mul(&base, k),
                    (true, Some(b)) => repeat_mul(&Poly::invert_monomial(b), -k),
                    (true, None) => opaque(&base, k),
                };
                let mut single = Poly::default();
                single.add_term(rest);
                if let Some(m) = single.mul(&lifted) {
                    for r in m.0.into_values() {
                        out.add_term(r);
                    }
                    continue 'terms;
                }
            }
            out.add_term(t);
        }
        out
    }

    fn settle(self) -> Poly {
        self.square_roots(false).pythagoras()
    }

    /// `self / d` when it is a single monomial.
    fn exact_quotient(&self, d: &Poly) -> Option<Poly> {
        let first = self.0.values().next()?;
        for t in d.0.values() {
            let mut lead = Poly::default();
            lead.add_term(first.clone());
            let m = lead.mul(&Poly::invert_monomial(t))?;
            let back = m.mul(d)?;
            if back.add(self.clone(), -1.0).is_zero() {
                return Some(m);
            }
        }
        None
    }

    fn single_term(&self) -> Option<&Term> {
        if self.0.len() == 1 {
            self.0.values().next()
        } else {
            None
        }
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn invert_monomial(t: &Term) -> Poly {
        let mut factors = Factors::new();
        for (k, (e, p)) in &t.factors {
            factors.insert(k.clone(), (e.clone(), -p));
        }
        let mut out = Poly::default();
        out.add_term(Term {
            coef: 1.0 / t.coef,
            scale: 1.0 / t.coef.norm(),
            factors,
        });
        out
    }

    fn to_expr(&self) -> Expr {
        let mut acc: Option<Expr> = None;
        for t in self.0.values() {
            let mut num = Expr::one();
            let mut den = Expr::one();
            for (e, p) in t.factors.values() {
                if *p > 0 {
                    num = num * e.powi(*p);
                } else {
                    den = den * e.powi(-p);
                }
            }
            let negative = t.coef.im == 0.0 && t.coef.re < 0.0;
            let c = if negative { -t.coef } else { t.coef };
            let mag = Expr::complex(c) * num / den;
            acc = Some(match acc {
                None if negative => -mag,
                None => mag,
                Some(a) if negative => a - mag,
                Some(a) => a + mag,
            });
        }
        acc.unwrap_or_else(Expr::zero)
    }
}

fn opaque(p: &Poly, power: i64) -> Poly {
    Poly::atom(p.to_expr(), power)
}

fn poly(e: &Expr) -> Poly {
    match e.node() {
        Node::Num(z) => Poly::constant(*z),
        Node::Param(_) | Node::Const(_) => Poly::atom(e.clone(), 1),
        Node::Neg(a) => poly(a).scale(Complex64::new(-1.0, 0.0)),
        Node::Add(a, b) => poly(a).add(poly(b), 1.0).settle(),
        Node::Sub(a, b) => poly(a).add(poly(b), -1.0).settle(),
        Node::Mul(a, b) => {
            let (pa, pb) = (poly(a), poly(b));
            pa.mul(&pb)
                .unwrap_or_else(|| opaque(&pa, 1).mul(&opaque(&pb, 1)).unwrap_or_default())
                .settle()
        }
        Node::Div(a, b) => {
            let (pa, pb) = (poly(a), poly(b));
            if pb.is_zero() {
                return Poly::atom(Expr::from_node(Node::Div(pa.to_expr(), Expr::zero())), 1);
            }
            let inv = match (pb.single_term(), b.node()) {
                (Some(t), _) => Poly::invert_monomial(t),
                (None, Node::Pow(base, r)) if r.is_integer() && r.num() > 0 => {
                    match pa.exact_quotient(&pb) {
                        Some(q) => return q,
                        None => opaque(&poly(base), -r.num()),
                    }
                }
                (None, _) => match pa.exact_quotient(&pb) {
                    Some(q) => return q,
                    None => opaque(&pb, -1),
                },
            };
            pa.mul(&inv)
                .unwrap_or_else(|| opaque(&pa, 1).mul(&inv).unwrap_or_default())
                .settle()
        }
        Node::Pow(a, r) => {
            let pa = poly(a);
            if r.is_integer() {
                let n = r.num();
                if let Some(t) = pa.single_term() {
                    let base = if n < 0 { Poly::invert_monomial(t) } else { pa.clone() };
                    return repeat_mul(&base, n.abs()).settle();
                }
                if (1..=MAX_EXPAND_POWER).contains(&n) {
                    if let Some(expanded) = try_repeat_mul(&pa, n).map(Poly::settle) {
                        return expanded;
                    }
                }
                return opaque(&pa, n);
            }
            Poly::atom(pa.to_expr().pow(*r), 1)
        }
        Node::Func(Func::Sec, a) => Poly::atom(Expr::func(Func::Cos, poly(a).to_expr()), -1),
        Node::Func(Func::Tan, a) => {
            let arg = poly(a).to_expr();
            let sin = Poly::atom(Expr::func(Func::Sin, arg.clone()), 1);
            sin.mul(&Poly::atom(Expr::func(Func::Cos, arg), -1)).unwrap_or_default()
        }
        Node::Func(f, a) => {
            let arg = poly(a).to_expr();
            let applied = Expr::func(*f, arg);
            match applied.as_num() {
                Some(z) => Poly::constant(z),
                None => Poly::atom(applied, 1),
            }
        }
    }
}

fn try_repeat_mul(p: &Poly, n: i64) -> Option<Poly> {
    let mut out = Poly::constant(Complex64::new(1.0, 0.0));
    for _ in 0..n {
        out = out.mul(p)?;
    }
    Some(out)
}

fn repeat_mul(p: &Poly, n: i64) -> Poly {
    try_repeat_mul(p, n).unwrap_or_else(|| opaque(p, n))
}

/// Rewrites `e` in expanded sum-of-products form. The result evaluates to
/// the same value as `e` wherever `e` is defined.
pub fn normalize(e: &Expr) -> Expr {
    poly(e).square_roots(true).pythagoras().to_expr()
}
