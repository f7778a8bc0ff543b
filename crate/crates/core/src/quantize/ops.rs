use crate::error::Result;
use crate::expr::Expr;
use crate::geometry::{SurfaceGeometry, SurfaceSpec};
use crate::operator::{CMat, DiffOp};

use super::{PhysicsConfig, VGAnsatz};

/// Builds the geometry with the configuration's convention and spatial
/// Dirac matrices.
pub fn build_geometry(spec: &SurfaceSpec, cfg: &PhysicsConfig) -> Result<SurfaceGeometry> {
    cfg.validate()?;
    SurfaceGeometry::build(spec, cfg.convention, cfg.gamma.spatial())
}

fn hbar() -> Expr {
    Expr::ident("hbar")
}

fn minus_i_hbar() -> Expr {
    -(Expr::i() * hbar())
}

/// `r^μ_i ∂_μ` for each ambient component `i`.
fn surface_gradient(geom: &SurfaceGeometry) -> [DiffOp; 3] {
    let params = geom.params();
    std::array::from_fn(|i| {
        (0..2).fold(DiffOp::zero(), |acc, mu| {
            acc.add(&DiffOp::partial(params[mu]).scale(&geom.reciprocal[mu][i]))
        })
    })
}

/// `Π_i = −iħ(r^μ_i ∂_μ + (g^μν b_μν / 2) n_i)`. With `curvature_term` off
/// the normal term is dropped, which breaks symmetry and tangency.
pub fn geometric_momentum_with(geom: &SurfaceGeometry, curvature_term: bool) -> [DiffOp; 3] {
    let grad = surface_gradient(geom);
    let half_trace = 0.5 * &geom.shape_trace;
    std::array::from_fn(|i| {
        let mut op = grad[i].clone();
        if curvature_term {
            op = op.add(&DiffOp::scalar(&half_trace * &geom.normal[i]));
        }
        op.scale(&minus_i_hbar())
    })
}

pub fn geometric_momentum(geom: &SurfaceGeometry) -> [DiffOp; 3] {
    geometric_momentum_with(geom, true)
}

/// `p_i = Π_i + s_A A_i`.
pub fn covariant_momentum(geom: &SurfaceGeometry) -> [DiffOp; 3] {
    let pi = geometric_momentum(geom);
    let s_a = Expr::num(f64::from(geom.convention.s_a));
    std::array::from_fn(|i| pi[i].add(&DiffOp::mul_by(geom.gauge_potential[i].scale(&s_a))))
}

/// `γ^μ = e^{μa} γ_a`.
pub fn curved_gammas(geom: &SurfaceGeometry) -> [CMat; 2] {
    std::array::from_fn(|mu| {
        geom.gammas[0]
            .scale(&geom.transfer[mu][0])
            .add(&geom.gammas[1].scale(&geom.transfer[mu][1]))
    })
}

/// `H = −iħ γ^μ (∂_μ + iΩ_μ) − γ_0 m`, plus `V_G` when given.
pub fn dirac_hamiltonian(geom: &SurfaceGeometry, cfg: &PhysicsConfig, vg: Option<&VGAnsatz>) -> DiffOp {
    let params = geom.params();
    let gam = curved_gammas(geom);
    let mut h = DiffOp::zero();
    for mu in 0..2 {
        let d = DiffOp::partial(params[mu]).left_mul(&gam[mu]);
        let conn = DiffOp::mul_by(gam[mu].mul(&geom.gauge_field[mu]).scale(&Expr::i()));
        h = h.add(&d.add(&conn));
    }
    h = h.scale(&minus_i_hbar());
    let mass = cfg.gamma.matrix(2).scale(&-Expr::ident("m"));
    h = h.add(&DiffOp::mul_by(mass));
    if let Some(v) = vg {
        h = h.add(&DiffOp::mul_by(v.to_cmat()));
    }
    h
}

/// Multiplication by the embedding components.
pub fn position_ops(geom: &SurfaceGeometry) -> [DiffOp; 3] {
    std::array::from_fn(|i| DiffOp::scalar(geom.spec.embedding[i].clone()))
}

/// Multiplication by the normal components.
pub fn normal_ops(geom: &SurfaceGeometry) -> [DiffOp; 3] {
    std::array::from_fn(|i| DiffOp::scalar(geom.normal[i].clone()))
}

