use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::{ConstTable, Expr, ParamPoint};
use crate::geometry::{catalog, SurfaceGeometry};
use crate::operator::{bump_spinors, hermiticity_defect, DiffOp, Quadrature, Rect};
use crate::par::Exec;
use crate::sampling::sample_points;

use super::ops::{covariant_momentum, dirac_hamiltonian, geometric_momentum, geometric_momentum_with, normal_ops, position_ops};
use super::report::CheckReport;
use super::{PhysicsConfig, VGAnsatz};

pub const DEFAULT_SAMPLES: usize = 60;
pub const DEFAULT_SEED: u64 = 42;
pub const FCC_TOL: f64 = 1e-9;
pub const TANGENCY_TOL: f64 = 1e-9;
pub const PPC_TOL: f64 = 1e-8;
pub const DQC_TOL: f64 = 1e-8;
pub const HERMITICITY_TOL: f64 = 1e-6;

pub(crate) const AXES: [&str; 3] = ["x", "y", "z"];

/// Seeded interior points of a surface.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub seed: u64,
    pub points: Vec<ParamPoint>,
}

impl Sample {
    pub fn draw(geom: &SurfaceGeometry, n: usize, seed: u64) -> Result<Sample> {
        Ok(Sample {
            seed,
            points: sample_points(&geom.spec, n, seed)?,
        })
    }
}

/// Everything a check needs besides its tolerance.
pub struct CheckContext<'a> {
    pub geom: &'a SurfaceGeometry,
    pub cfg: &'a PhysicsConfig,
    pub sample: &'a Sample,
    pub exec: Exec,
}

impl CheckContext<'_> {
    pub fn constants(&self) -> ConstTable {
        self.geom.constants(&self.cfg.constants())
    }

    pub fn residual(&self, op: &DiffOp) -> Result<f64> {
        op.residual_norm(&self.sample.points, &self.constants(), self.exec)
    }

    fn report(&self, check: &str, tol: f64, per: BTreeMap<String, f64>) -> CheckReport {
        CheckReport::from_components(
            check,
            &self.geom.spec.name,
            self.geom.convention,
            self.sample.seed,
            self.sample.points.len(),
            tol,
            per,
        )
    }
}

fn i_hbar() -> Expr {
    Expr::i() * Expr::ident("hbar")
}

/// `[x_i, p_j] = iħ(δ_ij − n_i n_j)` for all nine pairs and `[x_i, x_j] = 0`.
pub fn fcc_check(ctx: &CheckContext<'_>, tol: f64) -> Result<CheckReport> {
    let x = position_ops(ctx.geom);
    let p = covariant_momentum(ctx.geom);
    let n = &ctx.geom.normal;
    let mut per = BTreeMap::new();
    for i in 0..3 {
        for j in 0..3 {
            let delta = if i == j { Expr::one() } else { Expr::zero() };
            let rhs = DiffOp::scalar(i_hbar() * (delta - &n[i] * &n[j]));
            let lhs = x[i].commutator(&p[j])?;
            per.insert(format!("[{},p_{}]", AXES[i], AXES[j]), ctx.residual(&lhs.sub(&rhs))?);
        }
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        per.insert(format!("[{},{}]", AXES[i], AXES[j]), ctx.residual(&x[i].commutator(&x[j])?)?);
    }
    Ok(ctx.report("fcc", tol, per))
}

/// `Σ_i (n_i p_i + p_i n_i)`, which must vanish.
pub fn tangency_operator(geom: &SurfaceGeometry, p: &[DiffOp; 3]) -> Result<DiffOp> {
    let n = normal_ops(geom);
    let mut acc = DiffOp::zero();
    for i in 0..3 {
        acc = acc.add(&n[i].compose(&p[i])?).add(&p[i].compose(&n[i])?);
    }
    Ok(acc)
}

pub fn tangency_check(ctx: &CheckContext<'_>, tol: f64) -> Result<CheckReport> {
    let p = covariant_momentum(ctx.geom);
    let mut per = BTreeMap::new();
    per.insert("n.p+p.n".to_string(), ctx.residual(&tangency_operator(ctx.geom, &p)?)?);
    Ok(ctx.report("tangency", tol, per))
}

/// Tangency with the normal curvature term removed from the momentum.
pub fn tangency_without_curvature(ctx: &CheckContext<'_>, tol: f64) -> Result<CheckReport> {
    let p = geometric_momentum_with(ctx.geom, false);
    let mut per = BTreeMap::new();
    per.insert("n.p+p.n".to_string(), ctx.residual(&tangency_operator(ctx.geom, &p)?)?);
    let mut r = ctx.report("tangency-no-curvature", tol, per);
    r.notes.push("momentum built without the normal curvature term".into());
    Ok(r)
}

/// `[Π_i, Π_j] + (iħ/2) Σ_k (c_ijk Π_k + Π_k c_ijk)` with
/// `c_ijk = n_i ∂_j n_k − n_j ∂_i n_k`.
pub fn pp_commutator_operators(geom: &SurfaceGeometry) -> Result<Vec<(String, DiffOp)>> {
    let pi = geometric_momentum(geom);
    let n = &geom.normal;
    let dn = geom.normal_gradient();
    let half = -0.5 * i_hbar();
    let mut out = Vec::new();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let lhs = pi[i].commutator(&pi[j])?;
        let mut rhs = DiffOp::zero();
        for k in 0..3 {
            let c = DiffOp::scalar(&n[i] * &dn[k][j] - &n[j] * &dn[k][i]);
            rhs = rhs.add(&c.compose(&pi[k])?).add(&pi[k].compose(&c)?);
        }
        let rhs = rhs.scale(&half);
        out.push((format!("[p_{},p_{}]", AXES[i], AXES[j]), lhs.sub(&rhs)));
    }
    Ok(out)
}

pub fn pp_commutator_check(ctx: &CheckContext<'_>, tol: f64) -> Result<CheckReport> {
    let mut per = BTreeMap::new();
    for (name, op) in pp_commutator_operators(ctx.geom)? {
        per.insert(name, ctx.residual(&op)?);
    }
    let mut r = ctx.report("ppc", tol, per);
    r.notes.push("evaluated on the geometric momentum (no gauge potential)".into());
    Ok(r)
}

/// `ε_ijk (n_j [p_k, X] − [p_j, X] n_k)` for `X` the given operator.
pub fn wedge_operator(geom: &SurfaceGeometry, p: &[DiffOp; 3], x: &DiffOp) -> Result<[DiffOp; 3]> {
    let n = normal_ops(geom);
    let c: Vec<DiffOp> = p.iter().map(|pk| pk.commutator(x)).collect::<Result<_>>()?;
    let mut out: [DiffOp; 3] = Default::default();
    for (i, slot) in out.iter_mut().enumerate() {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let plus = n[j].compose(&c[k])?.sub(&c[j].compose(&n[k])?);
        let minus = n[k].compose(&c[j])?.sub(&c[k].compose(&n[j])?);
        *slot = plus.sub(&minus);
    }
    Ok(out)
}

/// Wedge condition for `H' = H + V_G`.
pub fn dqc_operators(geom: &SurfaceGeometry, cfg: &PhysicsConfig, vg: &VGAnsatz) -> Result<[DiffOp; 3]> {
    let p = covariant_momentum(geom);
    let h = dirac_hamiltonian(geom, cfg, Some(vg));
    wedge_operator(geom, &p, &h)
}

fn is_catalog_surface(geom: &SurfaceGeometry) -> bool {
    catalog(&geom.spec.name).map(|s| s == geom.spec).unwrap_or(false)
}

pub fn dqc_residual(ctx: &CheckContext<'_>, vg: &VGAnsatz, tol: f64) -> Result<CheckReport> {
    let ops = dqc_operators(ctx.geom, ctx.cfg, vg)?;
    let mut per = BTreeMap::new();
    for (i, op) in ops.iter().enumerate() {
        per.insert(AXES[i].to_string(), ctx.residual(op)?);
    }
    let mut r = ctx.report("dqc", tol, per);
    let v = vg.to_cmat();
    r.notes.push(format!("V_G = {v}"));
    if v.is_zero() && !is_catalog_surface(ctx.geom) {
        r.notes
            .push("user surface with V_G = 0: reported as an observation, not pass/fail".into());
        r.pass = true;
    }
    Ok(r)
}

/// Symmetry defect of `p_x, p_y, p_z` and `H` on bump-supported spinors
/// inside `rect` (default: the largest patch, trimmed).
pub fn hermiticity_check(
    geom: &SurfaceGeometry,
    cfg: &PhysicsConfig,
    rect: Option<Rect>,
    nodes: usize,
    tol: f64,
    exec: Exec,
) -> Result<CheckReport> {
    let rect = rect.unwrap_or_else(|| geom.spec.quadrature_rect());
    if !geom.spec.admits_rect(&rect) {
        return Err(Error::QuadratureDomain(rect.to_string()));
    }
    let quad = Quadrature::new(rect, nodes)?;
    let (phi, psi) = bump_spinors(&rect);
    let consts = geom.constants(&cfg.constants());
    let p = covariant_momentum(geom);
    let h = dirac_hamiltonian(geom, cfg, None);
    let mut per = BTreeMap::new();
    let named = [("p_x", &p[0]), ("p_y", &p[1]), ("p_z", &p[2]), ("H", &h)];
    for (name, op) in named {
        let d = hermiticity_defect(op, &geom.sqrt_g, &phi, &psi, &quad, &consts, exec)?;
        per.insert(name.to_string(), d.norm());
    }
    let mut r = CheckReport::from_components(
        "hermiticity",
        &geom.spec.name,
        geom.convention,
        0,
        quad.len(),
        tol,
        per,
    );
    r.notes.push(format!("{nodes}x{nodes} Gauss-Legendre on {rect}, measure sqrt(g) du dv"));
    Ok(r)
}
