use num_complex::Complex64;
use thiserror::Error;

use super::{ConstTable, Expr, Func, Node, ParamPoint, Rational};

/// Poles of tan/sec are rejected when |cos| falls below this.
pub(crate) const POLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unresolved identifier `{0}`")]
    Unresolved(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{source} at {point}")]
    AtPoint {
        point: ParamPoint,
        #[source]
        source: Box<EvalError>,
    },
}

impl EvalError {
    pub fn at(self, point: ParamPoint) -> EvalError {
        match self {
            e @ EvalError::AtPoint { .. } => e,
            e => EvalError::AtPoint {
                point,
                source: Box::new(e),
            },
        }
    }
}

fn finite(z: Complex64, what: &str) -> Result<Complex64, EvalError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(EvalError::Domain(format!("{what} produced a non-finite value")))
    }
}

pub(crate) fn apply_func(f: Func, z: Complex64) -> Result<Complex64, EvalError> {
    let real = z.im == 0.0;
    let out = match f {
        Func::Sin => {
            if real {
                Complex64::new(z.re.sin(), 0.0)
            } else {
                z.sin()
            }
        }
        Func::Cos => {
            if real {
                Complex64::new(z.re.cos(), 0.0)
            } else {
                z.cos()
            }
        }
        Func::Tan | Func::Sec => {
            let c = if real { Complex64::new(z.re.cos(), 0.0) } else { z.cos() };
            if c.norm() < POLE_TOL {
                return Err(EvalError::Domain(format!("{} at a pole", f.name())));
            }
            if f == Func::Sec {
                1.0 / c
            } else if real {
                Complex64::new(z.re.tan(), 0.0)
            } else {
                z.sin() / c
            }
        }
        Func::Ln => {
            if z.im.abs() <= 1e-15 * z.re.abs().max(1.0) && z.re <= 0.0 {
                return Err(EvalError::Domain("ln of a non-positive real".into()));
            }
            if real {
                Complex64::new(z.re.ln(), 0.0)
            } else {
                z.ln()
            }
        }
        Func::Exp => {
            if real {
                Complex64::new(z.re.exp(), 0.0)
            } else {
                z.exp()
            }
        }
        Func::Sqrt => {
            if real && z.re >= 0.0 {
                Complex64::new(z.re.sqrt(), 0.0)
            } else {
                z.sqrt()
            }
        }
    };
    finite(out, f.name())
}

pub(crate) fn apply_pow(z: Complex64, r: Rational) -> Result<Complex64, EvalError> {
    if z == Complex64::new(0.0, 0.0) && r.to_f64() < 0.0 {
        return Err(EvalError::Domain("zero raised to a negative power".into()));
    }
    let out = if r.is_integer() {
        if z.im == 0.0 {
            Complex64::new(z.re.powi(r.num() as i32), 0.0)
        } else {
            z.powi(r.num() as i32)
        }
    } else if z.im == 0.0 && z.re >= 0.0 {
        Complex64::new(z.re.powf(r.to_f64()), 0.0)
    } else {
        z.powf(r.to_f64())
    };
    finite(out, "power")
}

pub(crate) fn apply_div(a: Complex64, b: Complex64) -> Result<Complex64, EvalError> {
    if b == Complex64::new(0.0, 0.0) {
        return Err(EvalError::Domain("division by zero".into()));
    }
    finite(a / b, "division")
}

/// Tree-walking evaluator. For repeated evaluation of large expressions use
/// [`super::Tape`], which shares common subexpressions.
pub fn evaluate(e: &Expr, p: ParamPoint, c: &ConstTable) -> Result<Complex64, EvalError> {
    eval_inner(e, p, c).map_err(|err| err.at(p))
}

fn eval_inner(e: &Expr, p: ParamPoint, c: &ConstTable) -> Result<Complex64, EvalError> {
    Ok(match e.node() {
        Node::Num(z) => *z,
        Node::Param(q) => Complex64::new(p.get(*q), 0.0),
        Node::Const(name) => match c.get(name) {
            Some(x) => Complex64::new(x, 0.0),
            None => return Err(EvalError::Unresolved(name.to_string())),
        },
        Node::Neg(a) => -eval_inner(a, p, c)?,
        Node::Add(a, b) => eval_inner(a, p, c)? + eval_inner(b, p, c)?,
        Node::Sub(a, b) => eval_inner(a, p, c)? - eval_inner(b, p, c)?,
        Node::Mul(a, b) => eval_inner(a, p, c)? * eval_inner(b, p, c)?,
        Node::Div(a, b) => apply_div(eval_inner(a, p, c)?, eval_inner(b, p, c)?)?,
        Node::Pow(a, r) => apply_pow(eval_inner(a, p, c)?, *r)?,
        Node::Func(f, a) => apply_func(*f, eval_inner(a, p, c)?)?,
    })
}
