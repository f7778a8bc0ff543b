use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::geometry::SurfaceGeometry;
use crate::operator::{DiffOp, MultiIndex, Pauli};
use crate::par::Exec;

use super::checks::{dqc_operators, wedge_operator, CheckContext, Sample};
use super::ops::covariant_momentum;
use super::report::NullspaceReport;
use super::{PhysicsConfig, VGAnsatz};

pub const NULLSPACE_TOL: f64 = 1e-8;
/// Singular values at or below this are treated as zero regardless of the
/// largest one, so an all-zero constraint matrix has full nullity.
pub const SINGULAR_FLOOR: f64 = 1e-12;
/// Nullspaces from two samples agree when their largest principal angle is
/// below this.
pub const ANGLE_TOL: f64 = 1e-6;

pub const GENERATORS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

/// Stacked real constraint matrix: one column per constant generator.
#[derive(Debug, Clone)]
pub struct ConstraintMap {
    pub matrix: DMatrix<f64>,
    pub points: usize,
    pub seed: u64,
    /// Residual of the wedge condition for `H` alone on the same sample.
    pub hamiltonian_residual: f64,
}

/// Wedge operators `ε_ijk (n_j [p_k, G] − [p_j, G] n_k)` for each generator.
pub fn generator_wedges(geom: &SurfaceGeometry) -> Result<Vec<[DiffOp; 3]>> {
    let p = covariant_momentum(geom);
    GENERATORS
        .iter()
        .map(|g| wedge_operator(geom, &p, &DiffOp::mul_by(VGAnsatz::generator(*g).to_cmat())))
        .collect()
}

/// Rows are ordered point, wedge component, multi-index, Pauli component,
/// then real before imaginary part.
pub fn vg_constraint_map(ctx: &CheckContext<'_>) -> Result<ConstraintMap> {
    let consts = ctx.constants();
    let wedges = generator_wedges(ctx.geom)?;
    let keys: [Vec<MultiIndex>; 3] = std::array::from_fn(|c| {
        let set: BTreeSet<MultiIndex> = wedges
            .iter()
            .flat_map(|w| w[c].terms().map(|(k, _)| k))
            .collect();
        set.into_iter().collect()
    });
    let rows_per_point: usize = keys.iter().map(|k| k.len() * 8).sum();
    let npts = ctx.sample.points.len();
    let mut matrix = DMatrix::<f64>::zeros(rows_per_point * npts, GENERATORS.len());
    for (col, w) in wedges.iter().enumerate() {
        let mut offset = 0;
        for (c, op) in w.iter().enumerate() {
            let compiled = op.compile(&consts)?;
            let vals = crate::par::try_map_indexed(npts, ctx.exec, |k| compiled.eval(ctx.sample.points[k]))?;
            let block = keys[c].len() * 8;
            for (pt, coeffs) in vals.iter().enumerate() {
                let by_key: BTreeMap<MultiIndex, _> =
                    compiled.keys().iter().copied().zip(coeffs.iter()).collect();
                for (ki, key) in keys[c].iter().enumerate() {
                    if let Some(pv) = by_key.get(key) {
                        for (q, z) in pv.iter().enumerate() {
                            let row = pt * rows_per_point + offset + ki * 8 + q * 2;
                            matrix[(row, col)] = z.re;
                            matrix[(row + 1, col)] = z.im;
                        }
                    }
                }
            }
            offset += block;
        }
    }
    let h_ops = dqc_operators(ctx.geom, ctx.cfg, &VGAnsatz::zero())?;
    let mut hamiltonian_residual: f64 = 0.0;
    for op in &h_ops {
        hamiltonian_residual = hamiltonian_residual.max(ctx.residual(op)?);
    }
    Ok(ConstraintMap {
        matrix,
        points: npts,
        seed: ctx.sample.seed,
        hamiltonian_residual,
    })
}

/// Singular values (descending) and an orthonormal nullspace basis.
#[derive(Debug, Clone)]
pub struct Nullspace {
    pub singular_values: Vec<f64>,
    pub basis: Vec<DVector<f64>>,
}

pub fn nullspace(m: &DMatrix<f64>, tol: f64) -> Nullspace {
    let n = m.ncols();
    // QR first: R has the same singular values and right vectors as M but
    // only n rows.
    let r = if m.nrows() > n {
        m.clone().qr().r()
    } else {
        m.clone()
    };
    let svd = r.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut pairs: Vec<(f64, DVector<f64>)> = (0..svd.singular_values.len())
        .map(|k| (svd.singular_values[k], v_t.row(k).transpose()))
        .collect();
    // Rows of R beyond min(m, n) are absent: pad with the orthogonal
    // complement so the full n-dimensional right space is covered.
    if pairs.len() < n {
        let extra = complement(&pairs.iter().map(|p| p.1.clone()).collect::<Vec<_>>(), n);
        pairs.extend(extra.into_iter().map(|v| (0.0, v)));
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let smax = pairs.first().map(|p| p.0).unwrap_or(0.0);
    let cut = (tol * smax).max(SINGULAR_FLOOR);
    let null: Vec<DVector<f64>> = pairs
        .iter()
        .filter(|p| p.0 <= cut)
        .map(|p| p.1.clone())
        .collect();
    Nullspace {
        singular_values: pairs.iter().map(|p| p.0).collect(),
        basis: canonical_basis(&null, n),
    }
}

/// Orthonormal vectors completing `vs` to a basis of `R^n`.
fn complement(vs: &[DVector<f64>], n: usize) -> Vec<DVector<f64>> {
    let mut have: Vec<DVector<f64>> = vs.to_vec();
    let mut out = Vec::new();
    for k in 0..n {
        let mut e = DVector::<f64>::zeros(n);
        e[k] = 1.0;
        for h in &have {
            let d = h.dot(&e);
            e -= h * d;
        }
        let norm = e.norm();
        if norm > 1e-8 {
            e /= norm;
            have.push(e.clone());
            out.push(e);
        }
        if have.len() == n {
            break;
        }
    }
    out
}

/// Re-expresses a basis of the same span by projecting coordinate axes in
/// order and orthonormalizing, so spans aligned with generators come out as
/// unit vectors.
fn canonical_basis(null: &[DVector<f64>], n: usize) -> Vec<DVector<f64>> {
    if null.is_empty() {
        return Vec::new();
    }
    let mut chosen: Vec<DVector<f64>> = Vec::new();
    for k in 0..n {
        if chosen.len() == null.len() {
            break;
        }
        let mut v = DVector::<f64>::zeros(n);
        for b in null {
            v += b * b[k];
        }
        for c in &chosen {
            let d = c.dot(&v);
            v -= c * d;
        }
        let norm = v.norm();
        if norm > 1e-6 {
            chosen.push(v / norm);
        }
    }
    for v in &mut chosen {
        let lead = v.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if lead < 0.0 {
            *v = -v.clone();
        }
        for x in v.iter_mut() {
            if x.abs() < 1e-15 {
                *x = 0.0;
            }
        }
    }
    chosen
}

/// Largest principal angle between the spans of two orthonormal bases,
/// from `sin θ_max = ‖(I − P_a) B‖₂`. Returns `π/2` when the dimensions
/// differ.
pub fn principal_angle(a: &[DVector<f64>], b: &[DVector<f64>]) -> f64 {
    if a.len() != b.len() {
        return std::f64::consts::FRAC_PI_2;
    }
    if a.is_empty() {
        return 0.0;
    }
    let qa = DMatrix::from_columns(a);
    let qb = DMatrix::from_columns(b);
    let resid = &qb - &qa * (qa.transpose() * &qb);
    let sin = resid.singular_values().max();
    sin.min(1.0).asin()
}

/// Human-readable label of a basis vector in generator coordinates.
pub fn label(v: &[f64; 4]) -> String {
    let names = ["I", "sigma_x", "sigma_y", "sigma_z"];
    let big: Vec<usize> = (0..4).filter(|&k| v[k].abs() > 1e-6).collect();
    if big.len() == 1 {
        return names[big[0]].to_string();
    }
    big.iter()
        .map(|&k| format!("{:.6}*{}", v[k], names[k]))
        .collect::<Vec<_>>()
        .join(" + ")
}

fn to_array(v: &DVector<f64>) -> [f64; 4] {
    [v[0], v[1], v[2], v[3]]
}

/// Seed of the second, disjoint sample used for the stability check.
pub fn companion_seed(seed: u64) -> u64 {
    seed ^ 0x9E37_79B9_7F4A_7C15
}

/// Solves for the constant geometric potentials allowed by the wedge
/// condition, cross-checking the nullspace on a second sample.
pub fn vg_nullspace_solve(
    geom: &SurfaceGeometry,
    cfg: &PhysicsConfig,
    samples: usize,
    seed: u64,
    tol: f64,
    exec: Exec,
) -> Result<NullspaceReport> {
    let solve = |s: u64| -> Result<(ConstraintMap, Nullspace)> {
        let sample = Sample::draw(geom, samples, s)?;
        let ctx = CheckContext {
            geom,
            cfg,
            sample: &sample,
            exec,
        };
        let map = vg_constraint_map(&ctx)?;
        let ns = nullspace(&map.matrix, tol);
        Ok((map, ns))
    };
    let (map, ns) = solve(seed)?;
    let (_, ns_b) = solve(companion_seed(seed))?;
    let mut angle = principal_angle(&ns.basis, &ns_b.basis);
    let mut stable = angle < ANGLE_TOL;
    let mut warnings = Vec::new();
    if !stable {
        let third = companion_seed(seed.wrapping_add(1));
        warnings.push(format!(
            "nullspace differs between seeds {seed} and {} (angle {angle:e}); resampled with seed {third}",
            companion_seed(seed)
        ));
        let (_, ns_c) = solve(third)?;
        let angle_c = principal_angle(&ns.basis, &ns_c.basis);
        if angle_c < ANGLE_TOL {
            warnings.push(format!("seed {third} agrees with seed {seed}"));
            angle = angle_c;
            stable = true;
        } else {
            warnings.push(format!("seed {third} also disagrees (angle {angle_c:e})"));
        }
    }

    let smax = ns.singular_values.first().copied().unwrap_or(0.0);
    let mut per_component = BTreeMap::new();
    let basis: Vec<[f64; 4]> = ns.basis.iter().map(to_array).collect();
    let span: Vec<String> = basis.iter().map(label).collect();
    for (v, name) in ns.basis.iter().zip(&span) {
        let r = (&map.matrix * v).amax();
        per_component.insert(name.clone(), r);
    }
    let max_residual = per_component.values().copied().fold(0.0, f64::max);
    let pass = stable && max_residual <= (tol * smax).max(SINGULAR_FLOOR).max(tol);
    Ok(NullspaceReport {
        check: "solve-vg".into(),
        surface: geom.spec.name.clone(),
        convention: geom.convention,
        seed,
        points: map.points,
        tolerance: tol,
        rows: map.matrix.nrows(),
        cols: map.matrix.ncols(),
        singular_values: ns.singular_values,
        dimension: basis.len(),
        basis,
        span,
        max_residual,
        per_component,
        principal_angle: angle,
        stable,
        hamiltonian_residual: map.hamiltonian_residual,
        pass,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_of_known_matrix() {
        // columns 0 and 3 are zero, 1 and 2 independent
        let m = DMatrix::from_row_slice(3, 4, &[0.0, 1.0, 2.0, 0.0, 0.0, -1.0, 0.5, 0.0, 0.0, 3.0, 0.0, 0.0]);
        let ns = nullspace(&m, 1e-8);
        assert_eq!(ns.basis.len(), 2);
        assert_eq!(to_array(&ns.basis[0]), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(to_array(&ns.basis[1]), [0.0, 0.0, 0.0, 1.0]);
        assert_eq!(label(&to_array(&ns.basis[1])), "sigma_z");
    }

    #[test]
    fn zero_matrix_has_full_nullity() {
        let ns = nullspace(&DMatrix::zeros(10, 4), 1e-8);
        assert_eq!(ns.basis.len(), 4);
        assert_eq!(ns.singular_values, vec![0.0; 4]);
    }

    #[test]
    fn principal_angles() {
        let e = |k: usize| {
            let mut v = DVector::zeros(4);
            v[k] = 1.0;
            v
        };
        let a = vec![e(0), e(3)];
        let t = 1e-7f64;
        let b = vec![e(0) * t.cos() + e(1) * t.sin(), e(3)];
        let ang = principal_angle(&a, &b);
        assert!((ang - t).abs() < 1e-12, "{ang}");
        assert_eq!(principal_angle(&a, &[e(0)]), std::f64::consts::FRAC_PI_2);
    }
}
