use std::collections::HashMap;

use super::{Expr, Func, Node, Param};

/// Symbolic partial derivative with respect to a surface parameter.
///
/// Named constants have zero derivative. Shared subtrees are differentiated
/// once per call.
pub fn differentiate(e: &Expr, wrt: Param) -> Expr {
    let mut memo = HashMap::new();
    diff(e, wrt, &mut memo)
}

fn diff(e: &Expr, wrt: Param, memo: &mut HashMap<usize, (Expr, Expr)>) -> Expr {
    if let Some((_, d)) = memo.get(&e.ptr_id()) {
        return d.clone();
    }
    let d = match e.node() {
        Node::Num(_) | Node::Const(_) => Expr::zero(),
        Node::Param(p) => {
            if *p == wrt {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Neg(a) => -diff(a, wrt, memo),
        Node::Add(a, b) => diff(a, wrt, memo) + diff(b, wrt, memo),
        Node::Sub(a, b) => diff(a, wrt, memo) - diff(b, wrt, memo),
        Node::Mul(a, b) => diff(a, wrt, memo) * b + a * diff(b, wrt, memo),
        Node::Div(a, b) => {
            let da = diff(a, wrt, memo);
            let db = diff(b, wrt, memo);
            if db.is_zero() {
                da / b
            } else {
                (da * b - a * db) / b.powi(2)
            }
        }
        Node::Pow(a, r) => {
            let da = diff(a, wrt, memo);
            Expr::complex(r.to_f64().into()) * a.pow(r.minus_one()) * da
        }
        Node::Func(f, a) => {
            let da = diff(a, wrt, memo);
            let outer = match f {
                Func::Sin => a.cos(),
                Func::Cos => -a.sin(),
                Func::Tan => a.sec().powi(2),
                Func::Sec => a.sec() * a.tan(),
                Func::Ln => return finish(e, da / a, memo),
                Func::Exp => e.clone(),
                Func::Sqrt => return finish(e, da / (2.0 * e), memo),
            };
            outer * da
        }
    };
    finish(e, d, memo)
}

fn finish(e: &Expr, d: Expr, memo: &mut HashMap<usize, (Expr, Expr)>) -> Expr {
    // Keep `e` alive in the memo so its pointer id cannot be reused.
    memo.insert(e.ptr_id(), (e.clone(), d.clone()));
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{evaluate, fold_constants, parse, ConstTable, ParamPoint};

    fn consts() -> ConstTable {
        ConstTable::new().with("alpha", 1.3).with("beta", 0.8)
    }

    fn val(e: &Expr, u: f64, v: f64) -> f64 {
        evaluate(e, ParamPoint::new(u, v), &consts()).unwrap().re
    }

    #[test]
    fn textbook_product() {
        let d = differentiate(&parse("alpha*cos(u)*cos(v)").unwrap(), Param::U);
        let expected = parse("-alpha*sin(u)*cos(v)").unwrap();
        for (u, v) in [(0.1, 0.2), (0.9, -1.4), (2.0, 3.0)] {
            assert!((val(&d, u, v) - val(&expected, u, v)).abs() < 1e-15);
        }
    }

    #[test]
    fn tractrix_log_derivative_is_secant() {
        let d = fold_constants(&differentiate(&parse("ln(sec(u)+tan(u))").unwrap(), Param::U));
        let sec = parse("sec(u)").unwrap();
        for k in 0..20 {
            let u = 0.05 + 1.4 * k as f64 / 19.0;
            let h = 1e-5;
            let e = parse("ln(sec(u)+tan(u))").unwrap();
            let fd = (val(&e, u + h, 0.0) - val(&e, u - h, 0.0)) / (2.0 * h);
            assert!((val(&d, u, 0.0) - fd).abs() < 1e-6 * fd.abs());
            assert!((val(&d, u, 0.0) - val(&sec, u, 0.0)).abs() < 1e-12 * fd.abs());
        }
    }

    #[test]
    fn v_independent_is_literal_zero() {
        let d = differentiate(&parse("u^2+beta^2").unwrap(), Param::V);
        assert!(d.is_zero());
    }

    #[test]
    fn fractional_power() {
        let e = parse("(u^2+beta^2)^(3/2)").unwrap();
        let d = differentiate(&e, Param::U);
        let u: f64 = 0.7;
        let expected = 3.0 * u * (u * u + 0.64f64).sqrt();
        assert!((val(&d, u, 0.0) - expected).abs() < 1e-14);
    }

    #[test]
    fn only_supported_functions_appear() {
        for src in ["tan(u)", "sec(u)*ln(u)", "sqrt(exp(u)+1)", "cos(sin(v))"] {
            for p in Param::BOTH {
                let d = differentiate(&parse(src).unwrap(), p);
                let printed = d.to_string();
                assert!(parse(&printed).is_ok(), "{printed}");
            }
        }
    }
}
