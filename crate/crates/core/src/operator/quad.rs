//! Tensor-product Gauss–Legendre quadrature and the symmetry defect of an
//! operator under the area measure `√g du dv`.

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{DiffOp, SpinorField};
use crate::error::{Error, Result};
use crate::expr::{ConstTable, Expr, ParamPoint, Tape};
use crate::par::{try_map_indexed, Exec};

pub const DEFAULT_NODES: usize = 64;

/// Closed parameter rectangle `[u0,u1]×[v0,v1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub u: [f64; 2],
    pub v: [f64; 2],
}

impl Rect {
    pub fn new(u: [f64; 2], v: [f64; 2]) -> Rect {
        Rect { u, v }
    }

    pub fn contains_rect(&self, o: &Rect) -> bool {
        self.u[0] <= o.u[0] && o.u[1] <= self.u[1] && self.v[0] <= o.v[0] && o.v[1] <= self.v[1]
    }

    /// Shrinks each side by `frac` of the side length.
    pub fn shrink(&self, frac: f64) -> Rect {
        let du = (self.u[1] - self.u[0]) * frac;
        let dv = (self.v[1] - self.v[0]) * frac;
        Rect::new([self.u[0] + du, self.u[1] - du], [self.v[0] + dv, self.v[1] - dv])
    }
}

impl std::fmt::Display for Rect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]x[{}, {}]", self.u[0], self.u[1], self.v[0], self.v[1])
    }
}

/// Nodes and weights of an `n×n` Gauss–Legendre rule on a rectangle.
pub struct Quadrature {
    pub rect: Rect,
    points: Vec<ParamPoint>,
    weights: Vec<f64>,
}

impl Quadrature {
    pub fn new(rect: Rect, n: usize) -> Result<Quadrature> {
        let rule = GaussLegendre::new(n)
            .map_err(|_| Error::Config(format!("quadrature needs at least 2 nodes, got {n}")))?;
        let map = |x: f64, [a, b]: [f64; 2]| (0.5 * ((b - a) * x + (b + a)), 0.5 * (b - a));
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for (xu, wu) in rule.iter() {
            let (u, su) = map(*xu, rect.u);
            for (xv, wv) in rule.iter() {
                let (v, sv) = map(*xv, rect.v);
                points.push(ParamPoint::new(u, v));
                weights.push(wu * su * wv * sv);
            }
        }
        Ok(Quadrature {
            rect,
            points,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `∫∫ f du dv` for a tape whose outputs are combined by `f` at each node.
    pub fn integrate<F>(&self, exec: Exec, f: F) -> Result<Complex64>
    where
        F: Fn(ParamPoint) -> Result<Complex64> + Sync + Send,
    {
        let vals = try_map_indexed(self.points.len(), exec, |k| {
            Ok::<_, Error>(f(self.points[k])? * self.weights[k])
        })?;
        Ok(vals.into_iter().sum())
    }
}

/// Polynomial bump `((u-u0)(u1-u)(v-v0)(v1-v))^2`, vanishing to second order
/// on the rectangle boundary.
pub fn bump(rect: &Rect) -> Expr {
    let (u, v) = (Expr::u(), Expr::v());
    let f = (&u - rect.u[0]) * (rect.u[1] - &u) * (&v - rect.v[0]) * (rect.v[1] - &v);
    f.powi(2)
}

/// Two fixed bump-modulated test spinors supported in `rect`.
pub fn bump_spinors(rect: &Rect) -> (SpinorField, SpinorField) {
    let b = bump(rect);
    let (u, v, i) = (Expr::u(), Expr::v(), Expr::i());
    let phi = SpinorField::new(1.0 + &i * u.sin(), (&u - &v).cos() * 0.5);
    let psi = SpinorField::new(v.cos() - 0.3 * &u, &u * 0.7 + &i * (&u * &v).sin());
    (phi.scale(&b), psi.scale(&b))
}

/// `∫ (φ†(Aψ) − (Aφ)†ψ) √g du dv`. Zero when `A` is symmetric on states
/// supported inside the quadrature rectangle.
pub fn hermiticity_defect(
    op: &DiffOp,
    sqrt_g: &Expr,
    phi: &SpinorField,
    psi: &SpinorField,
    quad: &Quadrature,
    consts: &ConstTable,
    exec: Exec,
) -> Result<Complex64> {
    let a_phi = op.apply(phi);
    let a_psi = op.apply(psi);
    let exprs = [
        phi.psi1.clone(),
        phi.psi2.clone(),
        psi.psi1.clone(),
        psi.psi2.clone(),
        a_phi.psi1,
        a_phi.psi2,
        a_psi.psi1,
        a_psi.psi2,
        sqrt_g.clone(),
    ];
    let tape = Tape::compile(&exprs, consts)?;
    quad.integrate(exec, |p| {
        let x = tape.eval(p).map_err(|e| e.at(p))?;
        let lhs = x[0].conj() * x[6] + x[1].conj() * x[7];
        let rhs = x[4].conj() * x[2] + x[5].conj() * x[3];
        Ok((lhs - rhs) * x[8])
    })
}
