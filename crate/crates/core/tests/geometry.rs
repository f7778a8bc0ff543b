#![allow(clippy::needless_range_loop)]

use geomom::expr::{differentiate, evaluate, parse, ConstTable, Expr, ParamPoint};
use geomom::geometry::{catalog, SurfaceGeometry, SurfaceSpec, CATALOG};
use geomom::operator::{Pauli, Rect};
use geomom::sampling::sample_points;

struct At<'a> {
    geom: &'a SurfaceGeometry,
    consts: ConstTable,
    p: ParamPoint,
}

impl At<'_> {
    fn x(&self, e: &Expr) -> f64 {
        let z = evaluate(e, self.p, &self.consts).unwrap();
        assert!(z.im.abs() < 1e-12, "{e} is not real at {}", self.p);
        z.re
    }

    fn v3(&self, v: &[Expr; 3]) -> [f64; 3] {
        [self.x(&v[0]), self.x(&v[1]), self.x(&v[2])]
    }

    fn m2(&self, m: &[[Expr; 2]; 2]) -> [[f64; 2]; 2] {
        [[self.x(&m[0][0]), self.x(&m[0][1])], [self.x(&m[1][0]), self.x(&m[1][1])]]
    }

    fn gauss(&self) -> f64 {
        self.x(&self.geom.gaussian_curvature())
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn extra_surfaces() -> Vec<SurfaceSpec> {
    let mut skew = catalog("plane").unwrap();
    skew.name = "skew-saddle".into();
    skew.embedding = ["u + 0.5*v", "v", "0.3*u*v"].map(|s| parse(s).unwrap());
    let mut monkey = catalog("plane").unwrap();
    monkey.name = "monkey-saddle".into();
    monkey.embedding = ["u", "v", "u^3 - 3*u*v^2"].map(|s| parse(s).unwrap());
    let mut cone = catalog("plane").unwrap();
    cone.name = "oblique-cone".into();
    cone.domain = Rect::new([0.5, 2.0], [0.0, 6.0]);
    cone.embedding = ["u*cos(v) + 0.4*u", "u*sin(v)", "0.8*u"].map(|s| parse(s).unwrap());
    vec![skew, monkey, cone]
}

fn all_surfaces() -> Vec<SurfaceSpec> {
    let mut out: Vec<SurfaceSpec> = CATALOG.iter().map(|n| catalog(n).unwrap()).collect();
    out.extend(extra_surfaces());
    out
}

fn for_each_point(spec: &SurfaceSpec, f: impl Fn(&At<'_>)) {
    let geom = SurfaceGeometry::new(spec).unwrap();
    let consts = geom.constants(&ConstTable::new().with("hbar", 1.0));
    for p in sample_points(spec, 12, 7).unwrap() {
        f(&At { geom: &geom, consts: consts.clone(), p });
    }
}

#[test]
fn normal_is_unit_and_orthogonal_to_the_basis() {
    for spec in all_surfaces() {
        for_each_point(&spec, |at| {
            let n = at.v3(&at.geom.normal);
            assert!(close(dot(n, n), 1.0), "{}", spec.name);
            for r in &at.geom.basis {
                assert!(dot(n, at.v3(r)).abs() < 1e-12, "{}", spec.name);
            }
        });
    }
}

#[test]
fn metric_inverse_and_reciprocal_basis() {
    for spec in all_surfaces() {
        for_each_point(&spec, |at| {
            let g = at.m2(&at.geom.metric);
            let gi = at.m2(&at.geom.inverse_metric);
            let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
            assert!(close(at.x(&at.geom.sqrt_g).powi(2), det), "{}", spec.name);
            for mu in 0..2 {
                for nu in 0..2 {
                    let id = gi[mu][0] * g[0][nu] + gi[mu][1] * g[1][nu];
                    let delta = if mu == nu { 1.0 } else { 0.0 };
                    assert!(close(id, delta), "{}", spec.name);
                    let r = dot(at.v3(&at.geom.reciprocal[mu]), at.v3(&at.geom.basis[nu]));
                    assert!(close(r, delta), "{}", spec.name);
                }
            }
        });
    }
}

#[test]
fn frame_reproduces_metric_and_inverts_transfer() {
    for spec in all_surfaces() {
        for_each_point(&spec, |at| {
            let g = at.m2(&at.geom.metric);
            let e = at.m2(&at.geom.dreibein);
            let t = at.m2(&at.geom.transfer);
            for mu in 0..2 {
                for nu in 0..2 {
                    let eg = e[0][mu] * e[0][nu] + e[1][mu] * e[1][nu];
                    assert!(close(eg, g[mu][nu]), "{}: e.e != g", spec.name);
                }
            }
            for a in 0..2 {
                for b in 0..2 {
                    let te = t[0][a] * e[b][0] + t[1][a] * e[b][1];
                    let delta = if a == b { 1.0 } else { 0.0 };
                    assert!(close(te, delta), "{}: transfer", spec.name);
                }
            }
        });
    }
}

#[test]
fn weingarten_equation() {
    for spec in all_surfaces() {
        for_each_point(&spec, |at| {
            let b = at.m2(&at.geom.second);
            for mu in 0..2 {
                let dn = at.v3(&at.geom.normal_derivative(mu));
                for k in 0..3 {
                    let want: f64 = (0..2).map(|nu| -b[mu][nu] * at.v3(&at.geom.reciprocal[nu])[k]).sum();
                    assert!(close(dn[k], want), "{} mu={mu} k={k}: {} vs {want}", spec.name, dn[k]);
                }
            }
        });
    }
}

#[test]
fn second_fundamental_form_from_embedding() {
    for spec in all_surfaces() {
        let params = spec.parameters;
        for_each_point(&spec, |at| {
            let n = at.v3(&at.geom.normal);
            for mu in 0..2 {
                for nu in 0..2 {
                    let d2: [f64; 3] = std::array::from_fn(|k| {
                        let e = differentiate(&differentiate(&spec.embedding[k], params[mu]), params[nu]);
                        at.x(&e)
                    });
                    assert!(close(dot(d2, n), at.x(&at.geom.second[mu][nu])), "{}", spec.name);
                }
            }
        });
    }
}

#[test]
fn curvatures_match_closed_forms() {
    for name in CATALOG {
        let spec = catalog(name).unwrap();
        let c = |k: &str| spec.constants.get(k).unwrap_or(f64::NAN);
        for_each_point(&spec, |at| {
            let u = at.p.u;
            let (gauss, trace) = match name {
                "plane" => (0.0, 0.0),
                "cylinder" => (0.0, 1.0),
                "sphere" => (1.0 / c("rho").powi(2), 2.0 / c("rho")),
                "torus" => {
                    let (a, b) = (c("a"), c("b"));
                    (u.cos() / (b * (a + b * u.cos())), (a + 2.0 * b * u.cos()) / (b * (a + b * u.cos())))
                }
                "catenoid" => (-1.0 / (c("c").powi(2) * (u / c("c")).cosh().powi(4)), 0.0),
                "pseudosphere" => (-1.0 / c("alpha").powi(2), (u.tan() - 1.0 / u.tan()).abs() / c("alpha")),
                "helicoid" => {
                    let b2 = c("beta").powi(2);
                    (-b2 / (b2 + u * u).powi(2), 0.0)
                }
                _ => unreachable!(),
            };
            assert!(close(at.gauss(), gauss), "{name}: K {} vs {gauss}", at.gauss());
            let t = at.x(&at.geom.shape_trace);
            assert!(close(t.abs(), trace), "{name}: trace {t} vs {trace}");
            assert!(close(at.x(&at.geom.mean_curvature).abs(), trace / 2.0), "{name}");
        });
    }
}

#[test]
fn gauge_potential_is_tangent() {
    for spec in all_surfaces() {
        for_each_point(&spec, |at| {
            let n = at.v3(&at.geom.normal);
            for pauli in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
                let mut s = num_complex::Complex64::new(0.0, 0.0);
                for (k, a) in at.geom.gauge_potential.iter().enumerate() {
                    s += evaluate(a.get(pauli), at.p, &at.consts).unwrap() * n[k];
                }
                assert!(s.norm() < 1e-12, "{}: n.A = {s}", spec.name);
            }
        });
    }
}

#[test]
fn gauge_field_is_generated_by_the_spin_connection() {
    // Ω_μ = (i/4) ω_μ [γ1, γ2] = -(1/2) ω_μ σz for γ = (σx, σy)
    for spec in all_surfaces() {
        for_each_point(&spec, |at| {
            for mu in 0..2 {
                let w = at.x(&at.geom.spin_connection[mu]);
                let om = &at.geom.gauge_field[mu];
                let z = evaluate(om.get(Pauli::Z), at.p, &at.consts).unwrap();
                assert!((z.re + 0.5 * w).abs() < 1e-12 && z.im.abs() < 1e-12, "{}", spec.name);
                for pauli in [Pauli::I, Pauli::X, Pauli::Y] {
                    assert!(evaluate(om.get(pauli), at.p, &at.consts).unwrap().norm() < 1e-12);
                }
            }
        });
    }
}

#[test]
fn flat_surfaces_have_no_spin_connection_in_cartesian_frames() {
    for name in ["plane", "cylinder"] {
        let geom = SurfaceGeometry::new(&catalog(name).unwrap()).unwrap();
        for w in &geom.spin_connection {
            assert!(evaluate(w, ParamPoint::new(0.4, 0.2), &ConstTable::new()).unwrap().norm() < 1e-14);
        }
    }
}

#[test]
fn swapping_parameter_order_flips_the_normal() {
    let spec = catalog("helicoid").unwrap();
    let mut swapped = spec.clone();
    swapped.parameters = [spec.parameters[1], spec.parameters[0]];
    let a = SurfaceGeometry::new(&spec).unwrap();
    let b = SurfaceGeometry::new(&swapped).unwrap();
    let consts = spec.constants.clone();
    let p = ParamPoint::new(1.1, 0.6);
    for k in 0..3 {
        let x = evaluate(&a.normal[k], p, &consts).unwrap().re;
        let y = evaluate(&b.normal[k], p, &consts).unwrap().re;
        assert!((x + y).abs() < 1e-14);
    }
    let ka = evaluate(&a.gaussian_curvature(), p, &consts).unwrap().re;
    let kb = evaluate(&b.gaussian_curvature(), p, &consts).unwrap().re;
    assert!((ka - kb).abs() < 1e-14);
}

#[test]
fn spec_files_round_trip_and_reject_mistakes() {
    for spec in all_surfaces() {
        let back = SurfaceSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back.to_json(), spec.to_json());
    }
    let good = catalog("torus").unwrap().to_json();
    let undeclared = good.replace("\"b\": 0.7", "\"bb\": 0.7");
    assert!(SurfaceSpec::from_json(&undeclared).is_err());
    let bad_expr = good.replace("b*sin(u)", "b*sin(u");
    assert!(SurfaceSpec::from_json(&bad_expr).is_err());
    let same_params = good.replace("\"v\"\n  ]", "\"u\"\n  ]");
    assert_ne!(same_params, good);
    assert!(SurfaceSpec::from_json(&same_params).is_err());
}
