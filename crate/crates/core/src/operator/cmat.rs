use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::expr::{Expr, Param};

/// Index of a Pauli-basis component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn label(self) -> &'static str {
        match self {
            Pauli::I => "I",
            Pauli::X => "sigma_x",
            Pauli::Y => "sigma_y",
            Pauli::Z => "sigma_z",
        }
    }

    pub fn from_label(s: &str) -> Option<Pauli> {
        match s {
            "I" | "1" | "id" => Some(Pauli::I),
            "x" | "sigma_x" | "X" => Some(Pauli::X),
            "y" | "sigma_y" | "Y" => Some(Pauli::Y),
            "z" | "sigma_z" | "Z" => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// 2×2 complex-matrix field `c0·I + cx·σx + cy·σy + cz·σz`.
#[derive(Clone, PartialEq)]
pub struct CMat {
    pub c: [Expr; 4],
}

/// Numeric value of a [`CMat`] in the Pauli basis.
pub type PauliVec = [Complex64; 4];

impl CMat {
    pub fn new(c0: Expr, cx: Expr, cy: Expr, cz: Expr) -> CMat {
        CMat {
            c: [c0, cx, cy, cz],
        }
    }

    pub fn zero() -> CMat {
        CMat::scalar(Expr::zero())
    }

    pub fn identity() -> CMat {
        CMat::scalar(Expr::one())
    }

    pub fn scalar(e: Expr) -> CMat {
        CMat::new(e, Expr::zero(), Expr::zero(), Expr::zero())
    }

    /// `e · σ_k` (or `e · I`).
    pub fn along(k: Pauli, e: Expr) -> CMat {
        let mut m = CMat::zero();
        m.c[k as usize] = e;
        m
    }

    pub fn sigma(k: Pauli) -> CMat {
        CMat::along(k, Expr::one())
    }

    pub fn get(&self, k: Pauli) -> &Expr {
        &self.c[k as usize]
    }

    /// Literal zero in every component.
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Expr::is_zero)
    }

    /// Only the identity component is non-zero.
    pub fn is_scalar(&self) -> bool {
        self.c[1..].iter().all(Expr::is_zero)
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> CMat {
        CMat {
            c: [f(&self.c[0]), f(&self.c[1]), f(&self.c[2]), f(&self.c[3])],
        }
    }

    pub fn add(&self, o: &CMat) -> CMat {
        CMat {
            c: std::array::from_fn(|k| &self.c[k] + &o.c[k]),
        }
    }

    pub fn sub(&self, o: &CMat) -> CMat {
        CMat {
            c: std::array::from_fn(|k| &self.c[k] - &o.c[k]),
        }
    }

    pub fn neg(&self) -> CMat {
        self.map(|e| -e)
    }

    pub fn scale(&self, s: &Expr) -> CMat {
        self.map(|e| s * e)
    }

    pub fn differentiate(&self, p: Param) -> CMat {
        self.map(|e| crate::expr::differentiate(e, p))
    }

    /// Pauli-algebra product, `σ_j σ_k = δ_jk I + i ε_jkl σ_l`.
    pub fn mul(&self, o: &CMat) -> CMat {
        let [a0, ax, ay, az] = &self.c;
        let [b0, bx, by, bz] = &o.c;
        let i = Expr::i();
        let c0 = a0 * b0 + ax * bx + ay * by + az * bz;
        let cx = a0 * bx + ax * b0 + &i * (ay * bz - az * by);
        let cy = a0 * by + ay * b0 + &i * (az * bx - ax * bz);
        let cz = a0 * bz + az * b0 + &i * (ax * by - ay * bx);
        CMat::new(c0, cx, cy, cz)
    }

    pub fn commutator(&self, o: &CMat) -> CMat {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn anticommutator(&self, o: &CMat) -> CMat {
        self.mul(o).add(&o.mul(self))
    }
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CMat({self})")
    }
}

impl fmt::Display for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for k in Pauli::ALL {
            let e = self.get(k);
            if e.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if k == Pauli::I {
                write!(f, "({e})*I")?;
            } else {
                write!(f, "({e})*{}", k.label())?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Dense `[[a, b], [c, d]]` form of a Pauli-basis vector.
pub fn to_dense(p: &PauliVec) -> [[Complex64; 2]; 2] {
    let i = Complex64::new(0.0, 1.0);
    [
        [p[0] + p[3], p[1] - i * p[2]],
        [p[1] + i * p[2], p[0] - p[3]],
    ]
}

pub fn from_dense(m: &[[Complex64; 2]; 2]) -> PauliVec {
    let i = Complex64::new(0.0, 1.0);
    [
        (m[0][0] + m[1][1]) * 0.5,
        (m[0][1] + m[1][0]) * 0.5,
        (m[1][0] - m[0][1]) * 0.5 / i,
        (m[0][0] - m[1][1]) * 0.5,
    ]
}

/// Frobenius norm of the dense matrix, `sqrt(2 Σ|c_k|²)`.
pub fn frobenius(p: &PauliVec) -> f64 {
    (2.0 * p.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
}

/// Numeric Pauli-basis product.
pub fn pauli_mul(a: &PauliVec, b: &PauliVec) -> PauliVec {
    let i = Complex64::new(0.0, 1.0);
    [
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + i * (a[2] * b[3] - a[3] * b[2]),
        a[0] * b[2] + a[2] * b[0] + i * (a[3] * b[1] - a[1] * b[3]),
        a[0] * b[3] + a[3] * b[0] + i * (a[1] * b[2] - a[2] * b[1]),
    ]
}

/// Applies a numeric matrix to a 2-spinor.
pub fn mat_vec(p: &PauliVec, psi: [Complex64; 2]) -> [Complex64; 2] {
    let m = to_dense(p);
    [
        m[0][0] * psi[0] + m[0][1] * psi[1],
        m[1][0] * psi[0] + m[1][1] * psi[1],
    ]
}
