use std::collections::BTreeMap;
use std::fmt;

use super::cmat::{frobenius, CMat, PauliVec};
use super::spinor::SpinorField;
use super::MAX_ORDER;
use crate::error::{Error, Result};
use crate::expr::{differentiate, normalize, ConstTable, Expr, Param, ParamPoint, Tape};
use crate::par::{try_map_indexed, Exec};

/// Derivative multi-index: `(i, j)` stands for `∂u^i ∂v^j`.
pub type MultiIndex = (u8, u8);

fn order_of(k: MultiIndex) -> usize {
    k.0 as usize + k.1 as usize
}

fn binomial(n: u8, k: u8) -> f64 {
    (0..k).fold(1.0, |acc, t| acc * f64::from(n - t) / f64::from(t + 1))
}

/// Linear differential operator `Σ c_(i,j)(u,v) ∂u^i ∂v^j` with 2×2 matrix
/// coefficients. Terms whose coefficient is the literal zero are never stored.
#[derive(Clone, Default, PartialEq)]
pub struct DiffOp {
    terms: BTreeMap<MultiIndex, CMat>,
}

impl DiffOp {
    pub fn zero() -> DiffOp {
        DiffOp::default()
    }

    pub fn identity() -> DiffOp {
        DiffOp::mul_by(CMat::identity())
    }

    /// Order-0 operator: multiplication by `c`.
    pub fn mul_by(c: CMat) -> DiffOp {
        DiffOp::term((0, 0), c)
    }

    /// Multiplication by a scalar field.
    pub fn scalar(e: Expr) -> DiffOp {
        DiffOp::mul_by(CMat::scalar(e))
    }

    pub fn term(k: MultiIndex, c: CMat) -> DiffOp {
        let mut op = DiffOp::zero();
        op.add_term(k, c);
        op
    }

    /// The bare partial derivative `∂p`.
    pub fn partial(p: Param) -> DiffOp {
        let k = match p {
            Param::U => (1, 0),
            Param::V => (0, 1),
        };
        DiffOp::term(k, CMat::identity())
    }

    fn add_term(&mut self, k: MultiIndex, c: CMat) {
        let merged = match self.terms.remove(&k) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !merged.is_zero() {
            self.terms.insert(k, merged);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, &CMat)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn coefficient(&self, k: MultiIndex) -> Option<&CMat> {
        self.terms.get(&k)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Highest total derivative order present (0 for the zero operator).
    pub fn order(&self) -> usize {
        self.terms.keys().map(|k| order_of(*k)).max().unwrap_or(0)
    }

    pub fn add(&self, o: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &DiffOp) -> DiffOp {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> DiffOp {
        self.map_coeffs(CMat::neg)
    }

    /// Left multiplication of every coefficient by `m`.
    pub fn left_mul(&self, m: &CMat) -> DiffOp {
        self.map_coeffs(|c| m.mul(c))
    }

    pub fn scale(&self, s: &Expr) -> DiffOp {
        self.map_coeffs(|c| c.scale(s))
    }

    pub fn map_coeffs(&self, f: impl Fn(&CMat) -> CMat) -> DiffOp {
        let mut out = DiffOp::zero();
        for (k, c) in &self.terms {
            out.add_term(*k, f(c));
        }
        out
    }

    /// Rewrites each coefficient in expanded normal form and drops terms that
    /// become the literal zero. Meant for display; values are unchanged.
    pub fn tidy(&self) -> DiffOp {
        self.map_coeffs(|c| c.map(normalize))
    }

    /// `A ∘ B` by the Leibniz rule. Fails if any resulting term would exceed
    /// [`MAX_ORDER`].
    pub fn compose(&self, o: &DiffOp) -> Result<DiffOp> {
        let need = self.order() + o.order();
        if !self.is_zero() && !o.is_zero() && need > MAX_ORDER {
            return Err(Error::OrderOverflow(need));
        }
        let max_u = self.terms.keys().map(|k| k.0).max().unwrap_or(0);
        let max_v = self.terms.keys().map(|k| k.1).max().unwrap_or(0);
        let mut out = DiffOp::zero();
        for (&beta, b) in &o.terms {
            // derivs[s][t] = ∂u^s ∂v^t b
            let mut derivs: Vec<Vec<CMat>> = Vec::with_capacity(max_u as usize + 1);
            let mut row_start = b.clone();
            for s in 0..=max_u {
                if s > 0 {
                    row_start = row_start.differentiate(Param::U);
                }
                let mut row = Vec::with_capacity(max_v as usize + 1);
                let mut cur = row_start.clone();
                for t in 0..=max_v {
                    if t > 0 {
                        cur = cur.differentiate(Param::V);
                    }
                    row.push(cur.clone());
                }
                derivs.push(row);
            }
            for (&alpha, a) in &self.terms {
                for s in 0..=alpha.0 {
                    for t in 0..=alpha.1 {
                        let db = &derivs[s as usize][t as usize];
                        if db.is_zero() {
                            continue;
                        }
                        let w = binomial(alpha.0, s) * binomial(alpha.1, t);
                        let mut c = a.mul(db);
                        if w != 1.0 {
                            c = c.scale(&Expr::num(w));
                        }
                        let k = (alpha.0 - s + beta.0, alpha.1 - t + beta.1);
                        out.add_term(k, c);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `[A, B] = A∘B − B∘A`.
    pub fn commutator(&self, o: &DiffOp) -> Result<DiffOp> {
        Ok(self.compose(o)?.sub(&o.compose(self)?))
    }

    /// Symbolic application to a spinor field.
    pub fn apply(&self, psi: &SpinorField) -> SpinorField {
        let mut out = [Expr::zero(), Expr::zero()];
        for (&(i, j), c) in &self.terms {
            let d: [Expr; 2] = std::array::from_fn(|l| {
                let mut e = psi.component(l).clone();
                for _ in 0..i {
                    e = differentiate(&e, Param::U);
                }
                for _ in 0..j {
                    e = differentiate(&e, Param::V);
                }
                e
            });
            let m = dense_exprs(c);
            for (r, slot) in out.iter_mut().enumerate() {
                *slot = &*slot + &m[r][0] * &d[0] + &m[r][1] * &d[1];
            }
        }
        let [psi1, psi2] = out;
        SpinorField::new(psi1, psi2)
    }

    /// Compiles every coefficient into one shared tape.
    pub fn compile(&self, consts: &ConstTable) -> Result<CompiledOp> {
        let keys: Vec<MultiIndex> = self.terms.keys().copied().collect();
        let exprs: Vec<Expr> = self
            .terms
            .values()
            .flat_map(|c| c.c.iter().cloned())
            .collect();
        let tape = Tape::compile(&exprs, consts)?;
        Ok(CompiledOp { keys, tape })
    }

    /// Max over `points` and multi-indices of the Frobenius norm of the
    /// evaluated coefficient. Zero exactly when the operator vanishes on the
    /// sample.
    pub fn residual_norm(
        &self,
        points: &[ParamPoint],
        consts: &ConstTable,
        exec: Exec,
    ) -> Result<f64> {
        if points.is_empty() {
            return Err(Error::EmptySample);
        }
        let compiled = self.compile(consts)?;
        compiled.max_norm(points, exec)
    }
}

/// Dense `[[a, b], [c, d]]` entries of a coefficient, symbolically.
fn dense_exprs(c: &CMat) -> [[Expr; 2]; 2] {
    let [c0, cx, cy, cz] = &c.c;
    let i = Expr::i();
    [
        [c0 + cz, cx - &i * cy],
        [cx + &i * cy, c0 - cz],
    ]
}

/// A [`DiffOp`] with its coefficients compiled for fast repeated evaluation.
pub struct CompiledOp {
    keys: Vec<MultiIndex>,
    tape: Tape,
}

impl CompiledOp {
    pub fn keys(&self) -> &[MultiIndex] {
        &self.keys
    }

    /// Coefficient values at `p`, in the order of [`CompiledOp::keys`].
    pub fn eval(&self, p: ParamPoint) -> Result<Vec<PauliVec>> {
        let vals = self.tape.eval(p).map_err(|e| e.at(p))?;
        Ok(vals
            .chunks_exact(4)
            .map(|c| [c[0], c[1], c[2], c[3]])
            .collect())
    }

    pub fn norm_at(&self, p: ParamPoint) -> Result<f64> {
        Ok(self
            .eval(p)?
            .iter()
            .map(frobenius)
            .fold(0.0, f64::max))
    }

    pub fn norms(&self, points: &[ParamPoint], exec: Exec) -> Result<Vec<f64>> {
        try_map_indexed(points.len(), exec, |k| self.norm_at(points[k]))
    }

    pub fn max_norm(&self, points: &[ParamPoint], exec: Exec) -> Result<f64> {
        Ok(self.norms(points, exec)?.into_iter().fold(0.0, f64::max))
    }
}

fn write_index(f: &mut fmt::Formatter<'_>, k: MultiIndex) -> fmt::Result {
    for (name, n) in [("u", k.0), ("v", k.1)] {
        match n {
            0 => {}
            1 => write!(f, " ∂{name}")?,
            n => write!(f, " ∂{name}^{n}")?,
        }
    }
    Ok(())
}

impl fmt::Display for DiffOp {
    /// `[coef] ∂u^i ∂v^j + …`, lowest order first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut keys: Vec<MultiIndex> = self.terms.keys().copied().collect();
        keys.sort_by_key(|k| (order_of(*k), std::cmp::Reverse(k.0)));
        for (n, k) in keys.into_iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "[{}]", self.terms[&k])?;
            write_index(f, k)?;
        }
        Ok(())
    }
}

impl fmt::Debug for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffOp({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{evaluate, parse};
    use crate::operator::Pauli;

    fn pts() -> Vec<ParamPoint> {
        vec![
            ParamPoint::new(0.3, 0.4),
            ParamPoint::new(1.2, -0.7),
            ParamPoint::new(-0.9, 2.1),
        ]
    }

    fn resid(op: &DiffOp) -> f64 {
        op.residual_norm(&pts(), &ConstTable::new(), Exec::Sequential)
            .unwrap()
    }

    #[test]
    fn product_rule() {
        let du = DiffOp::partial(Param::U);
        let u = DiffOp::scalar(Expr::u());
        let c = du.compose(&u).unwrap();
        let expected = u.compose(&du).unwrap().add(&DiffOp::identity());
        assert_eq!(c.order(), 1);
        assert!(resid(&c.sub(&expected)) == 0.0);
    }

    #[test]
    fn commutators() {
        let du = DiffOp::partial(Param::U);
        let dv = DiffOp::partial(Param::V);
        assert!(du.commutator(&dv).unwrap().is_zero());
        let u = DiffOp::scalar(Expr::u());
        let c = u.commutator(&du).unwrap();
        assert!(resid(&c.add(&DiffOp::identity())) < 1e-14);
        let a = du.left_mul(&CMat::sigma(Pauli::X)).add(&u);
        assert!(resid(&a.commutator(&a).unwrap()) == 0.0);
    }

    #[test]
    fn order_cap() {
        let d2 = DiffOp::term((2, 0), CMat::identity());
        let d3 = DiffOp::term((1, 2), CMat::identity());
        assert!(matches!(d2.compose(&d3), Err(Error::OrderOverflow(5))));
        assert_eq!(d2.compose(&d2).unwrap().order(), 4);
    }

    #[test]
    fn apply_examples() {
        let psi = SpinorField::new(parse("sin(u)").unwrap(), Expr::zero());
        let out = DiffOp::partial(Param::U).apply(&psi);
        let p = ParamPoint::new(0.4, 0.0);
        let c = ConstTable::new();
        assert!((evaluate(out.component(0), p, &c).unwrap().re - 0.4f64.cos()).abs() < 1e-15);
        assert!(DiffOp::identity().apply(&psi) == psi);

        let f = parse("u*v^2 + sin(v)").unwrap();
        let psi = SpinorField::new(f, Expr::zero());
        let op = DiffOp::partial(Param::V).left_mul(&CMat::sigma(Pauli::X));
        let out = op.apply(&psi);
        let p = ParamPoint::new(0.7, 0.3);
        assert!(evaluate(out.component(0), p, &c).unwrap().norm() < 1e-15);
        let want = 2.0 * 0.7 * 0.3 + 0.3f64.cos();
        assert!((evaluate(out.component(1), p, &c).unwrap().re - want).abs() < 1e-14);
    }

    #[test]
    fn pretty_print() {
        let op = DiffOp::partial(Param::U)
            .scale(&Expr::v())
            .add(&DiffOp::mul_by(CMat::sigma(Pauli::Z)));
        assert_eq!(op.to_string(), "[(1)*sigma_z] + [(v)*I] ∂u");
        assert_eq!(DiffOp::zero().to_string(), "0");
        let d = DiffOp::term((1, 2), CMat::identity());
        assert_eq!(d.to_string(), "[(1)*I] ∂u ∂v^2");
    }

    #[test]
    fn residual_reports_point() {
        let op = DiffOp::scalar(parse("1/u").unwrap());
        let err = op
            .residual_norm(&[ParamPoint::new(0.0, 1.0)], &ConstTable::new(), Exec::Sequential)
            .unwrap_err();
        assert!(err.to_string().contains("(u=0, v=1)"), "{err}");
    }
}
