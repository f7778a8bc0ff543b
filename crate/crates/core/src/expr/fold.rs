use std::collections::HashMap;

use super::{Expr, Node};

/// Collapses literal subtrees and applies the 0/1 identities
/// (`x+0 → x`, `x*1 → x`, `x*0 → 0`, `x^1 → x`) bottom-up.
pub fn fold_constants(e: &Expr) -> Expr {
    let mut memo = HashMap::new();
    fold(e, &mut memo)
}

fn fold(e: &Expr, memo: &mut HashMap<usize, (Expr, Expr)>) -> Expr {
    if let Some((_, f)) = memo.get(&e.ptr_id()) {
        return f.clone();
    }
    let out = match e.node() {
        Node::Num(_) | Node::Param(_) | Node::Const(_) => e.clone(),
        Node::Neg(a) => -fold(a, memo),
        Node::Add(a, b) => fold(a, memo) + fold(b, memo),
        Node::Sub(a, b) => fold(a, memo) - fold(b, memo),
        Node::Mul(a, b) => fold(a, memo) * fold(b, memo),
        Node::Div(a, b) => fold(a, memo) / fold(b, memo),
        Node::Pow(a, r) => fold(a, memo).pow(*r),
        Node::Func(f, a) => Expr::func(*f, fold(a, memo)),
    };
    memo.insert(e.ptr_id(), (e.clone(), out.clone()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{differentiate, evaluate, parse, ConstTable, Param, ParamPoint};

    #[test]
    fn identities() {
        let f = fold_constants(&parse("0*sin(u)+cos(v)*1").unwrap());
        assert_eq!(f.to_string(), "cos(v)");
        assert_eq!(fold_constants(&parse("2*3").unwrap()).to_string(), "6");
        assert_eq!(fold_constants(&parse("u^1 - 0").unwrap()).to_string(), "u");
    }

    #[test]
    fn derivative_of_product_folds_to_other_factor() {
        let raw = differentiate(&parse("u*v").unwrap(), Param::U);
        let folded = fold_constants(&raw);
        assert_eq!(folded.to_string(), "v");
        let c = ConstTable::new();
        let mut state = 7u64;
        for _ in 0..50 {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let u = (state >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0;
            let v = u * 1.7 - 0.3;
            let p = ParamPoint::new(u, v);
            assert_eq!(evaluate(&raw, p, &c).unwrap(), evaluate(&folded, p, &c).unwrap());
        }
    }
}
