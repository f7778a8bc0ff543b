use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{evaluate, ConstTable, Expr, ParamPoint};
use crate::geometry::Convention;
use crate::operator::{CMat, Pauli, PauliVec};

/// Constant Dirac matrices `(γ_1, γ_2, γ_0)`, each a signed Pauli matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaRep {
    pub gamma: [(i8, Pauli); 3],
}

impl Default for GammaRep {
    /// `(σx, σy, −σz)`, which turns `−γ_0 m` into `+σz m`.
    fn default() -> GammaRep {
        GammaRep {
            gamma: [(1, Pauli::X), (1, Pauli::Y), (-1, Pauli::Z)],
        }
    }
}

impl GammaRep {
    pub fn matrix(&self, k: usize) -> CMat {
        let (s, p) = self.gamma[k];
        CMat::along(p, Expr::num(f64::from(s)))
    }

    pub fn spatial(&self) -> [CMat; 2] {
        [self.matrix(0), self.matrix(1)]
    }

    /// Checks that `γ_1, γ_2` do not commute and that `γ_0` anticommutes with
    /// both.
    pub fn validate(&self) -> Result<()> {
        let g: [CMat; 3] = std::array::from_fn(|k| self.matrix(k));
        if norm(&g[0].commutator(&g[1])) < 1e-12 {
            return Err(Error::Config(format!("gamma_1 and gamma_2 commute in `{self}`")));
        }
        for k in 0..2 {
            if norm(&g[2].anticommutator(&g[k])) > 1e-12 {
                return Err(Error::Config(format!(
                    "gamma_0 does not anticommute with gamma_{} in `{self}`",
                    k + 1
                )));
            }
        }
        Ok(())
    }
}

fn norm(m: &CMat) -> f64 {
    let p = ParamPoint::new(0.0, 0.0);
    let c = ConstTable::new();
    let v: PauliVec = std::array::from_fn(|k| evaluate(&m.c[k], p, &c).unwrap_or(Complex64::new(f64::NAN, 0.0)));
    crate::operator::frobenius(&v)
}

impl fmt::Display for GammaRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .gamma
            .iter()
            .map(|(s, p)| {
                let axis = match p {
                    Pauli::I => "I",
                    Pauli::X => "x",
                    Pauli::Y => "y",
                    Pauli::Z => "z",
                };
                format!("{}{axis}", if *s < 0 { "-" } else { "" })
            })
            .collect();
        f.write_str(&parts.join(","))
    }
}

/// Parses `default` or three signed axes such as `x,y,-z`.
impl FromStr for GammaRep {
    type Err = Error;

    fn from_str(s: &str) -> Result<GammaRep> {
        if s.trim() == "default" {
            return Ok(GammaRep::default());
        }
        let bad = || Error::Config(format!("gamma representation `{s}` is not `default` or like `x,y,-z`"));
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let mut gamma = [(1i8, Pauli::I); 3];
        for (slot, part) in gamma.iter_mut().zip(parts) {
            let (sign, axis) = match part.strip_prefix('-') {
                Some(rest) => (-1, rest),
                None => (1, part.strip_prefix('+').unwrap_or(part)),
            };
            let p = Pauli::from_label(axis).ok_or_else(bad)?;
            *slot = (sign, p);
        }
        let rep = GammaRep { gamma };
        rep.validate()?;
        Ok(rep)
    }
}

/// Physical constants and conventions shared by every operator builder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicsConfig {
    pub hbar: f64,
    pub mass: f64,
    pub gamma: GammaRep,
    pub convention: Convention,
}

impl Default for PhysicsConfig {
    fn default() -> PhysicsConfig {
        PhysicsConfig {
            hbar: 1.0,
            mass: 1.0,
            gamma: GammaRep::default(),
            convention: Convention::default(),
        }
    }
}

impl PhysicsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(Error::Config(format!("hbar must be positive, got {}", self.hbar)));
        }
        if !self.mass.is_finite() {
            return Err(Error::Config(format!("mass must be finite, got {}", self.mass)));
        }
        self.gamma.validate()
    }

    /// `hbar` and `m` as named constants.
    pub fn constants(&self) -> ConstTable {
        ConstTable::new().with("hbar", self.hbar).with("m", self.mass)
    }
}

/// Geometric potential `V_G = a0 I + ax σx + ay σy + az σz`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VGAnsatz {
    pub a0: Expr,
    pub ax: Expr,
    pub ay: Expr,
    pub az: Expr,
}

impl VGAnsatz {
    pub fn zero() -> VGAnsatz {
        VGAnsatz::from_cmat(&CMat::zero())
    }

    /// The constant generator `I`, `σx`, `σy` or `σz`.
    pub fn generator(p: Pauli) -> VGAnsatz {
        VGAnsatz::from_cmat(&CMat::sigma(p))
    }

    pub fn from_cmat(m: &CMat) -> VGAnsatz {
        let [a0, ax, ay, az] = m.c.clone();
        VGAnsatz { a0, ax, ay, az }
    }

    pub fn to_cmat(&self) -> CMat {
        CMat::new(self.a0.clone(), self.ax.clone(), self.ay.clone(), self.az.clone())
    }
}

/// Parses a generator label (`I`, `sigma_x`, ...) or four comma-separated
/// coefficient expressions `a0,ax,ay,az`.
impl FromStr for VGAnsatz {
    type Err = Error;

    fn from_str(s: &str) -> Result<VGAnsatz> {
        if let Some(p) = Pauli::from_label(s.trim()) {
            return Ok(VGAnsatz::generator(p));
        }
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::Config(format!(
                "V_G `{s}` is neither a generator label nor four expressions a0,ax,ay,az"
            )));
        }
        let e: Vec<Expr> = parts
            .iter()
            .map(|p| crate::expr::parse(p))
            .collect::<std::result::Result<_, _>>()?;
        Ok(VGAnsatz::from_cmat(&CMat::new(e[0].clone(), e[1].clone(), e[2].clone(), e[3].clone())))
    }
}
