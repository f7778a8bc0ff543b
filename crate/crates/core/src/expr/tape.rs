//! Linearized evaluation of a batch of expressions.
//!
//! Compilation resolves named constants, numbers common subexpressions by
//! structure (so two separately derived but identical subtrees are evaluated
//! once), and emits a flat instruction list. Evaluating the tape at a point
//! is a single forward pass.

use std::collections::HashMap;

use num_complex::Complex64;

use super::eval::{apply_div, apply_func, apply_pow};
use super::{ConstTable, EvalError, Expr, Func, Node, ParamPoint, Rational};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Instr {
    Lit(Complex64),
    U,
    V,
    Neg(usize),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    Pow(usize, Rational),
    Func(Func, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Key {
    Lit(u64, u64),
    U,
    V,
    Neg(usize),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    Pow(usize, Rational),
    Func(Func, usize),
}

#[derive(Debug, Clone)]
pub struct Tape {
    instrs: Vec<Instr>,
    outputs: Vec<usize>,
}

struct Builder<'a> {
    consts: &'a ConstTable,
    instrs: Vec<Instr>,
    by_key: HashMap<Key, usize>,
    by_ptr: HashMap<usize, (Expr, usize)>,
}

impl Builder<'_> {
    fn push(&mut self, key: Key, instr: Instr) -> usize {
        if let Some(&i) = self.by_key.get(&key) {
            return i;
        }
        let i = self.instrs.len();
        self.instrs.push(instr);
        self.by_key.insert(key, i);
        i
    }

    fn lit(&mut self, z: Complex64) -> usize {
        self.push(Key::Lit(z.re.to_bits(), z.im.to_bits()), Instr::Lit(z))
    }

    fn literal_at(&self, i: usize) -> Option<Complex64> {
        match self.instrs[i] {
            Instr::Lit(z) => Some(z),
            _ => None,
        }
    }

    fn binary(&mut self, a: usize, b: usize, key: Key, instr: Instr) -> usize {
        if let (Some(x), Some(y)) = (self.literal_at(a), self.literal_at(b)) {
            let folded = match instr {
                Instr::Add(..) => Ok(x + y),
                Instr::Sub(..) => Ok(x - y),
                Instr::Mul(..) => Ok(x * y),
                Instr::Div(..) => apply_div(x, y),
                _ => unreachable!(),
            };
            if let Ok(z) = folded {
                return self.lit(z);
            }
        }
        self.push(key, instr)
    }

    fn compile(&mut self, e: &Expr) -> Result<usize, EvalError> {
        if let Some((_, i)) = self.by_ptr.get(&e.ptr_id()) {
            return Ok(*i);
        }
        let idx = match e.node() {
            Node::Num(z) => self.lit(*z),
            Node::Param(super::Param::U) => self.push(Key::U, Instr::U),
            Node::Param(super::Param::V) => self.push(Key::V, Instr::V),
            Node::Const(name) => match self.consts.get(name) {
                Some(x) => self.lit(Complex64::new(x, 0.0)),
                None => return Err(EvalError::Unresolved(name.to_string())),
            },
            Node::Neg(a) => {
                let a = self.compile(a)?;
                match self.literal_at(a) {
                    Some(z) => self.lit(-z),
                    None => self.push(Key::Neg(a), Instr::Neg(a)),
                }
            }
            Node::Add(a, b) => {
                let (a, b) = (self.compile(a)?, self.compile(b)?);
                let (x, y) = (a.min(b), a.max(b));
                self.binary(a, b, Key::Add(x, y), Instr::Add(a, b))
            }
            Node::Sub(a, b) => {
                let (a, b) = (self.compile(a)?, self.compile(b)?);
                self.binary(a, b, Key::Sub(a, b), Instr::Sub(a, b))
            }
            Node::Mul(a, b) => {
                let (a, b) = (self.compile(a)?, self.compile(b)?);
                let (x, y) = (a.min(b), a.max(b));
                self.binary(a, b, Key::Mul(x, y), Instr::Mul(a, b))
            }
            Node::Div(a, b) => {
                let (a, b) = (self.compile(a)?, self.compile(b)?);
                self.binary(a, b, Key::Div(a, b), Instr::Div(a, b))
            }
            Node::Pow(a, r) => {
                let a = self.compile(a)?;
                match self.literal_at(a).map(|z| apply_pow(z, *r)) {
                    Some(Ok(z)) => self.lit(z),
                    _ => self.push(Key::Pow(a, *r), Instr::Pow(a, *r)),
                }
            }
            Node::Func(f, a) => {
                let a = self.compile(a)?;
                match self.literal_at(a).map(|z| apply_func(*f, z)) {
                    Some(Ok(z)) => self.lit(z),
                    _ => self.push(Key::Func(*f, a), Instr::Func(*f, a)),
                }
            }
        };
        self.by_ptr.insert(e.ptr_id(), (e.clone(), idx));
        Ok(idx)
    }
}

impl Tape {
    /// Compiles `exprs` into one tape; outputs are in input order.
    pub fn compile(exprs: &[Expr], consts: &ConstTable) -> Result<Tape, EvalError> {
        let mut b = Builder {
            consts,
            instrs: Vec::new(),
            by_key: HashMap::new(),
            by_ptr: HashMap::new(),
        };
        let outputs = exprs
            .iter()
            .map(|e| b.compile(e))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Tape {
            instrs: b.instrs,
            outputs,
        })
    }

    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instrs.is_empty()
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// Evaluates every output at `p`.
    pub fn eval(&self, p: ParamPoint) -> Result<Vec<Complex64>, EvalError> {
        let mut regs = Vec::with_capacity(self.instrs.len());
        self.run(p, &mut regs).map_err(|e| e.at(p))?;
        Ok(self.outputs.iter().map(|&i| regs[i]).collect())
    }

    fn run(&self, p: ParamPoint, regs: &mut Vec<Complex64>) -> Result<(), EvalError> {
        regs.clear();
        for instr in &self.instrs {
            let val = match *instr {
                Instr::Lit(z) => z,
                Instr::U => Complex64::new(p.u, 0.0),
                Instr::V => Complex64::new(p.v, 0.0),
                Instr::Neg(a) => -regs[a],
                Instr::Add(a, b) => regs[a] + regs[b],
                Instr::Sub(a, b) => regs[a] - regs[b],
                Instr::Mul(a, b) => regs[a] * regs[b],
                Instr::Div(a, b) => apply_div(regs[a], regs[b])?,
                Instr::Pow(a, r) => apply_pow(regs[a], r)?,
                Instr::Func(f, a) => apply_func(f, regs[a])?,
            };
            regs.push(val);
        }
        Ok(())
    }
}
