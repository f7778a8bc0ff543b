use serde::{Deserialize, Serialize};

use crate::expr::Expr;

/// Two-component spinor field `(ψ₁(u,v), ψ₂(u,v))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinorField {
    pub psi1: Expr,
    pub psi2: Expr,
}

impl SpinorField {
    pub fn new(psi1: Expr, psi2: Expr) -> SpinorField {
        SpinorField { psi1, psi2 }
    }

    pub fn component(&self, k: usize) -> &Expr {
        match k {
            0 => &self.psi1,
            1 => &self.psi2,
            _ => panic!("spinor component index {k} out of range"),
        }
    }

    pub fn scale(&self, s: &Expr) -> SpinorField {
        SpinorField::new(s * &self.psi1, s * &self.psi2)
    }
}
