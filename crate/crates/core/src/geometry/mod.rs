//! Differential geometry of a parametric surface, derived symbolically from
//! its embedding.
//!
//! Greek indices run over the declared parameter order, so index 0 is
//! `spec.parameters[0]`. Latin frame indices follow the same order.

mod convention;
mod spec;

use crate::error::{Error, Result};
use crate::expr::{differentiate, normalize, ConstTable, Expr, Param, ParamPoint, Tape};
use crate::operator::{CMat, Pauli};

pub use convention::Convention;
pub use spec::{catalog, Exclusion, SurfaceSpec, CATALOG};

/// Gram determinants below this at a validation point mark the surface as
/// degenerate there.
pub const DEGENERACY_TOL: f64 = 1e-10;

pub type Vec3 = [Expr; 3];
pub type Mat2 = [[Expr; 2]; 2];

pub fn dot(a: &Vec3, b: &Vec3) -> Expr {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn scale3(s: &Expr, a: &Vec3) -> Vec3 {
    [s * &a[0], s * &a[1], s * &a[2]]
}

fn add3(a: &Vec3, b: &Vec3) -> Vec3 {
    [&a[0] + &b[0], &a[1] + &b[1], &a[2] + &b[2]]
}

/// Every derived field of a surface. Immutable once built.
#[derive(Debug, Clone)]
pub struct SurfaceGeometry {
    pub spec: SurfaceSpec,
    pub convention: Convention,
    /// Spatial Dirac matrices `(γ_1, γ_2)` used for the gauge field.
    pub gammas: [CMat; 2],
    /// `r_μ = ∂_μ r`.
    pub basis: [Vec3; 2],
    /// `r_1 × r_2 / |r_1 × r_2|`.
    pub normal: Vec3,
    /// `g_μν = r_μ · r_ν`.
    pub metric: Mat2,
    pub inverse_metric: Mat2,
    /// `√det g`, the area density.
    pub sqrt_g: Expr,
    /// `r^μ = g^μν r_ν`.
    pub reciprocal: [Vec3; 2],
    /// `b_μν = ∂_μ r_ν · n`.
    pub second: Mat2,
    /// `g^μν b_μν`, the trace of the shape operator.
    pub shape_trace: Expr,
    /// Reported mean curvature `s_M · g^μν b_μν / 2`.
    pub mean_curvature: Expr,
    /// `e^a_μ`, row `a`, column `μ`.
    pub dreibein: Mat2,
    /// `e^{μa} = g^μν e^a_ν`, row `μ`, column `a`.
    pub transfer: Mat2,
    /// `Γ^λ_μν`, indexed `[λ][μ][ν]`.
    pub christoffel: [Mat2; 2],
    /// `ω_μ^{12}`.
    pub spin_connection: [Expr; 2],
    /// `Ω_μ = (i/8) ω_μ^{ab} [γ_a, γ_b]`.
    pub gauge_field: [CMat; 2],
    /// `A = ħ r^μ Ω_μ`.
    pub gauge_potential: [CMat; 3],
}

impl SurfaceGeometry {
    /// Builds with the default convention and `γ_1 = σ_x`, `γ_2 = σ_y`.
    pub fn new(spec: &SurfaceSpec) -> Result<SurfaceGeometry> {
        SurfaceGeometry::build(
            spec,
            Convention::default(),
            [CMat::sigma(Pauli::X), CMat::sigma(Pauli::Y)],
        )
    }

    pub fn build(spec: &SurfaceSpec, convention: Convention, gammas: [CMat; 2]) -> Result<SurfaceGeometry> {
        spec.validate()?;
        let params = spec.parameters;
        let d = |e: &Expr, mu: usize| differentiate(e, params[mu]);
        let d3 = |a: &Vec3, mu: usize| -> Vec3 { std::array::from_fn(|i| d(&a[i], mu)) };

        let basis: [Vec3; 2] = std::array::from_fn(|mu| d3(&spec.embedding, mu));
        let c = cross(&basis[0], &basis[1]);
        let gram_cross = dot(&c, &c);
        let inv_len = gram_cross.sqrt().powi(-1);
        let normal = scale3(&inv_len, &c);

        let metric: Mat2 =
            std::array::from_fn(|mu| std::array::from_fn(|nu| normalize(&dot(&basis[mu], &basis[nu]))));
        let det = normalize(&(&metric[0][0] * &metric[1][1] - &metric[0][1] * &metric[1][0]));
        check_surface(spec, &gram_cross, &det)?;

        let diagonal = metric[0][1].is_zero();
        let inverse_metric: Mat2 = if diagonal {
            [
                [metric[0][0].powi(-1), Expr::zero()],
                [Expr::zero(), metric[1][1].powi(-1)],
            ]
        } else {
            let inv_det = det.powi(-1);
            [
                [&metric[1][1] * &inv_det, -(&metric[0][1] * &inv_det)],
                [-(&metric[1][0] * &inv_det), &metric[0][0] * &inv_det],
            ]
        };
        let sqrt_g = det.sqrt();

        let reciprocal: [Vec3; 2] = std::array::from_fn(|mu| {
            add3(
                &scale3(&inverse_metric[mu][0], &basis[0]),
                &scale3(&inverse_metric[mu][1], &basis[1]),
            )
        });

        let second: Mat2 =
            std::array::from_fn(|mu| std::array::from_fn(|nu| dot(&d3(&basis[nu], mu), &normal)));
        let shape_trace: Expr = (0..2)
            .flat_map(|mu| (0..2).map(move |nu| (mu, nu)))
            .map(|(mu, nu)| &inverse_metric[mu][nu] * &second[mu][nu])
            .sum();
        let mean_curvature = Expr::num(0.5 * f64::from(convention.s_m)) * &shape_trace;

        let dreibein = frame(&metric, &det, diagonal);
        // e^{μa} = g^{μν} e^a_ν
        let transfer: Mat2 = std::array::from_fn(|mu| {
            std::array::from_fn(|a| {
                &inverse_metric[mu][0] * &dreibein[a][0] + &inverse_metric[mu][1] * &dreibein[a][1]
            })
        });

        let christoffel = christoffel(&metric, &inverse_metric, params);

        // ω_μ^{12} = e^1_ν (∂_μ e^{ν2} + Γ^ν_{μλ} e^{λ2})
        let s_omega = Expr::num(f64::from(convention.s_omega));
        let spin_connection: [Expr; 2] = std::array::from_fn(|mu| {
            let raw: Expr = (0..2)
                .map(|nu| {
                    let conn: Expr = (0..2)
                        .map(|lam| &christoffel[nu][mu][lam] * &transfer[lam][1])
                        .sum();
                    &dreibein[0][nu] * (d(&transfer[nu][1], mu) + conn)
                })
                .sum();
            &s_omega * raw
        });

        // Ω_μ = (i/8)(ω^{12}[γ_1,γ_2] + ω^{21}[γ_2,γ_1]) = (i/4) ω^{12} [γ_1,γ_2]
        let comm = gammas[0].commutator(&gammas[1]);
        let quarter_i = Expr::i() * 0.25;
        let gauge_field: [CMat; 2] =
            std::array::from_fn(|mu| comm.scale(&(&quarter_i * &spin_connection[mu])));
        let hbar = Expr::ident("hbar");
        let gauge_potential: [CMat; 3] = std::array::from_fn(|i| {
            gauge_field[0]
                .scale(&reciprocal[0][i])
                .add(&gauge_field[1].scale(&reciprocal[1][i]))
                .scale(&hbar)
        });

        Ok(SurfaceGeometry {
            spec: spec.clone(),
            convention,
            gammas,
            basis,
            normal,
            metric,
            inverse_metric,
            sqrt_g,
            reciprocal,
            second,
            shape_trace,
            mean_curvature,
            dreibein,
            transfer,
            christoffel,
            spin_connection,
            gauge_field,
            gauge_potential,
        })
    }

    pub fn params(&self) -> [Param; 2] {
        self.spec.parameters
    }

    /// Surface constants merged with `extra` (e.g. `hbar`, `m`).
    pub fn constants(&self, extra: &ConstTable) -> ConstTable {
        self.spec.constants.merged(extra)
    }

    /// `∂_μ n`.
    pub fn normal_derivative(&self, mu: usize) -> Vec3 {
        let p = self.spec.parameters[mu];
        std::array::from_fn(|i| differentiate(&self.normal[i], p))
    }

    /// Ambient gradient `∂n_k/∂x_j = (r^μ)_j ∂_μ n_k` restricted to the
    /// surface, indexed `[k][j]`.
    pub fn normal_gradient(&self) -> [Vec3; 3] {
        let dn = [self.normal_derivative(0), self.normal_derivative(1)];
        std::array::from_fn(|k| {
            std::array::from_fn(|j| &self.reciprocal[0][j] * &dn[0][k] + &self.reciprocal[1][j] * &dn[1][k])
        })
    }

    /// Gaussian curvature `det b / det g`.
    pub fn gaussian_curvature(&self) -> Expr {
        let b = &self.second;
        let g = &self.metric;
        (&b[0][0] * &b[1][1] - &b[0][1] * &b[1][0]) / (&g[0][0] * &g[1][1] - &g[0][1] * &g[1][0])
    }
}

/// `e^a_μ`: the diagonal square root for orthogonal metrics, otherwise the
/// symmetric square root `(G + √det·I)/√(tr G + 2√det)`.
fn frame(g: &Mat2, det: &Expr, diagonal: bool) -> Mat2 {
    if diagonal {
        return [
            [g[0][0].sqrt(), Expr::zero()],
            [Expr::zero(), g[1][1].sqrt()],
        ];
    }
    let s = det.sqrt();
    let t = (&g[0][0] + &g[1][1] + 2.0 * &s).sqrt().powi(-1);
    [
        [(&g[0][0] + &s) * &t, &g[0][1] * &t],
        [&g[1][0] * &t, (&g[1][1] + &s) * &t],
    ]
}

/// `Γ^λ_μν = ½ g^{λσ}(∂_μ g_σν + ∂_ν g_σμ − ∂_σ g_μν)`.
fn christoffel(g: &Mat2, ginv: &Mat2, params: [Param; 2]) -> [Mat2; 2] {
    // dg[s][m][n] = ∂_s g_mn
    let dg: [Mat2; 2] = std::array::from_fn(|s| {
        std::array::from_fn(|m| std::array::from_fn(|n| differentiate(&g[m][n], params[s])))
    });
    std::array::from_fn(|lam| {
        std::array::from_fn(|mu| {
            std::array::from_fn(|nu| {
                let sum: Expr = (0..2)
                    .map(|sig| &ginv[lam][sig] * (&dg[mu][sig][nu] + &dg[nu][sig][mu] - &dg[sig][mu][nu]))
                    .sum();
                0.5 * sum
            })
        })
    })
}

/// Evaluates the Gram determinant and metric determinant on a 9×9 grid in
/// every patch and rejects degenerate or indefinite surfaces.
fn check_surface(spec: &SurfaceSpec, gram_cross: &Expr, det: &Expr) -> Result<()> {
    let tape = Tape::compile(&[gram_cross.clone(), det.clone()], &spec.constants)?;
    for patch in spec.patches() {
        let r = patch.shrink(crate::sampling::MARGIN);
        for a in 0..9 {
            for b in 0..9 {
                let p = ParamPoint::new(
                    r.u[0] + (r.u[1] - r.u[0]) * f64::from(a) / 8.0,
                    r.v[0] + (r.v[1] - r.v[0]) * f64::from(b) / 8.0,
                );
                let vals = tape.eval(p).map_err(|e| e.at(p))?;
                if vals[0].re.abs() < DEGENERACY_TOL {
                    return Err(Error::DegenerateSurface {
                        point: p,
                        what: format!("|r_1 x r_2|^2 = {:e}", vals[0].re),
                    });
                }
                if vals[1].re <= 0.0 {
                    return Err(Error::NotPositiveDefinite(p));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::evaluate;

    fn at(e: &Expr, spec: &SurfaceSpec, u: f64, v: f64) -> f64 {
        let z = evaluate(e, ParamPoint::new(u, v), &spec.constants.clone().with("hbar", 1.0)).unwrap();
        assert!(z.im.abs() < 1e-12, "{z}");
        z.re
    }

    #[test]
    fn plane_is_flat() {
        let g = SurfaceGeometry::new(&catalog("plane").unwrap()).unwrap();
        assert!(g.shape_trace.is_zero());
        assert!(g.spin_connection.iter().all(Expr::is_zero));
        assert!(g.gauge_potential.iter().all(CMat::is_zero));
        assert_eq!(g.normal[2].to_string(), "1");
    }

    #[test]
    fn helicoid_normal_and_frame() {
        let s = catalog("helicoid").unwrap();
        let g = SurfaceGeometry::new(&s).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let n: Vec<f64> = g.normal.iter().map(|e| at(e, &s, 1.0, 0.0)).collect();
        assert!((n[0]).abs() < 1e-15 && (n[1] + r).abs() < 1e-15 && (n[2] - r).abs() < 1e-15);
        let (u, v) = (1.3, 0.4);
        assert!((at(&g.transfer[1][1], &s, u, v) - 1.0 / (u * u + 1.0f64).sqrt()).abs() < 1e-14);
        assert!((at(&g.transfer[0][0], &s, u, v) - 1.0).abs() < 1e-14);
        assert!(at(&g.mean_curvature, &s, u, v).abs() < 1e-14);
        assert!((at(&g.christoffel[0][1][1], &s, u, v) + u).abs() < 1e-13);
        assert!((at(&g.christoffel[1][0][1], &s, u, v) - u / (u * u + 1.0)).abs() < 1e-13);
    }

    #[test]
    fn pseudosphere_curvatures() {
        let s = catalog("pseudosphere").unwrap();
        let g = SurfaceGeometry::new(&s).unwrap();
        let (u, v) = (0.7, 0.3);
        let m = at(&g.mean_curvature, &s, u, v);
        assert!((m - (-1.0 / u.tan() + u.tan()) / 2.0).abs() < 1e-12, "{m}");
        assert!((at(&g.gaussian_curvature(), &s, u, v) + 1.0).abs() < 1e-12);
        assert!((at(&g.spin_connection[0], &s, u, v) - u.cos()).abs() < 1e-12);
        assert!(at(&g.spin_connection[1], &s, u, v).abs() < 1e-12);
    }

    #[test]
    fn degenerate_surface_is_rejected() {
        let mut s = catalog("plane").unwrap();
        s.embedding = [Expr::u(), Expr::u(), Expr::zero()];
        assert!(matches!(SurfaceGeometry::new(&s), Err(Error::DegenerateSurface { .. })));
    }

    #[test]
    fn non_orthogonal_frame() {
        let mut s = catalog("plane").unwrap();
        s.embedding = [
            crate::expr::parse("u + 0.5*v").unwrap(),
            Expr::v(),
            crate::expr::parse("0.3*u*v").unwrap(),
        ];
        let g = SurfaceGeometry::new(&s).unwrap();
        for (u, v) in [(0.2, 0.1), (-0.5, 0.9)] {
            for mu in 0..2 {
                for nu in 0..2 {
                    let e = &g.dreibein;
                    let lhs = &e[0][mu] * &e[0][nu] + &e[1][mu] * &e[1][nu];
                    assert!((at(&lhs, &s, u, v) - at(&g.metric[mu][nu], &s, u, v)).abs() < 1e-12);
                }
            }
        }
    }
}
