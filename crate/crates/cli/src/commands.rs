use std::path::Path;

use anyhow::{bail, Context, Result};
use geomom::expr::{evaluate, normalize, ConstTable, Expr, ParamPoint};
use geomom::geometry::{catalog, SurfaceGeometry, SurfaceSpec, CATALOG};
use geomom::operator::{CMat, DiffOp, MultiIndex, Pauli, PauliVec, SpinorField};
use geomom::par::Exec;
use geomom::quantize::*;
use geomom::sampling::sample_points;
use serde_json::{json, Map, Value};

use crate::render::render;
use crate::Global;

/// A rendered report plus the names of any failed checks.
pub struct Output {
    pub json: Value,
    pub text: String,
    pub failed: Vec<String>,
}

impl Output {
    fn new(title: String, json: Value) -> Output {
        let text = render(&title, &json);
        Output {
            json,
            text,
            failed: Vec::new(),
        }
    }
}

pub struct Surface {
    pub spec: SurfaceSpec,
    pub geom: SurfaceGeometry,
    pub cfg: PhysicsConfig,
}

impl Surface {
    /// Catalog name first, then a spec file path.
    pub fn load(selector: &str, cfg: &PhysicsConfig) -> Result<Surface> {
        let spec = if CATALOG.contains(&selector) {
            catalog(selector)?
        } else if Path::new(selector).is_file() {
            let text = std::fs::read_to_string(selector).with_context(|| format!("reading {selector}"))?;
            SurfaceSpec::from_json(&text).with_context(|| format!("parsing surface spec {selector}"))?
        } else {
            bail!(
                "unknown surface `{selector}`: not a catalog name ({}) and not a file",
                CATALOG.join(", ")
            );
        };
        let geom = build_geometry(&spec, cfg)?;
        Ok(Surface { spec, geom, cfg: *cfg })
    }

    fn consts(&self) -> ConstTable {
        self.geom.constants(&self.cfg.constants())
    }

    fn table_points(&self, g: &Global, n: usize) -> Result<Vec<ParamPoint>> {
        Ok(sample_points(&self.spec, n, g.seed)?)
    }

    fn param_names(&self) -> [&'static str; 2] {
        self.spec.parameters.map(|p| p.name())
    }
}

fn sym(e: &Expr) -> String {
    normalize(e).to_string()
}

fn sym_cmat(m: &CMat) -> String {
    m.map(normalize).to_string()
}

fn sym_op(op: &DiffOp) -> String {
    op.tidy().to_string()
}

fn sym3(v: &[Expr; 3]) -> Value {
    json!(v.iter().map(sym).collect::<Vec<_>>())
}

fn sym2x2(m: &[[Expr; 2]; 2]) -> Value {
    json!(m.iter().map(|r| r.iter().map(sym).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn num(e: &Expr, p: ParamPoint, c: &ConstTable) -> Result<f64> {
    Ok(evaluate(e, p, c)?.re)
}

fn num3(v: &[Expr; 3], p: ParamPoint, c: &ConstTable) -> Result<Value> {
    Ok(json!([num(&v[0], p, c)?, num(&v[1], p, c)?, num(&v[2], p, c)?]))
}

fn num2x2(m: &[[Expr; 2]; 2], p: ParamPoint, c: &ConstTable) -> Result<Value> {
    Ok(json!([
        [num(&m[0][0], p, c)?, num(&m[0][1], p, c)?],
        [num(&m[1][0], p, c)?, num(&m[1][1], p, c)?]
    ]))
}

/// Nonzero Pauli components as `label: [re, im]`.
fn pauli_value(v: &PauliVec) -> Value {
    let mut m = Map::new();
    for k in Pauli::ALL {
        let z = v[k as usize];
        if z.re != 0.0 || z.im != 0.0 {
            m.insert(k.label().to_string(), json!([z.re, z.im]));
        }
    }
    Value::Object(m)
}

fn num_cmat(m: &CMat, p: ParamPoint, c: &ConstTable) -> Result<Value> {
    let mut v = PauliVec::default();
    for k in Pauli::ALL {
        v[k as usize] = evaluate(m.get(k), p, c)?;
    }
    Ok(pauli_value(&v))
}

fn index_label(k: MultiIndex) -> String {
    let mut parts = Vec::new();
    for (name, n) in [("du", k.0), ("dv", k.1)] {
        match n {
            0 => {}
            1 => parts.push(name.to_string()),
            n => parts.push(format!("{name}^{n}")),
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" ")
    }
}

fn coeff_table(op: &DiffOp, p: ParamPoint, c: &ConstTable) -> Result<Value> {
    let compiled = op.compile(c)?;
    let vals = compiled.eval(p)?;
    let mut m = Map::new();
    for (k, v) in compiled.keys().iter().zip(&vals) {
        m.insert(index_label(*k), pauli_value(v));
    }
    Ok(Value::Object(m))
}

fn point_value(p: ParamPoint) -> Value {
    json!({"u": p.u, "v": p.v})
}

fn header(s: &Surface) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("surface".into(), json!(s.spec.name));
    m.insert("parameters".into(), json!(s.param_names()));
    m.insert("constants".into(), serde_json::to_value(&s.spec.constants).unwrap_or(Value::Null));
    m.insert("convention".into(), json!(s.cfg.convention.to_string()));
    m.insert("hbar".into(), json!(s.cfg.hbar));
    m
}

pub fn surfaces_list() -> Output {
    let rows: Vec<Value> = CATALOG
        .iter()
        .filter_map(|name| catalog(name).ok())
        .map(|s| {
            json!({
                "name": s.name,
                "parameters": s.parameters.map(|p| p.name()),
                "embedding": s.embedding.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            })
        })
        .collect();
    let json = json!({ "surfaces": rows });
    let mut text = String::new();
    for name in CATALOG {
        text.push_str(name);
        text.push('\n');
    }
    Output {
        json,
        text,
        failed: Vec::new(),
    }
}

/// The spec file is the same in text and JSON mode.
pub fn surfaces_export(name: &str) -> Result<Output> {
    let spec = catalog(name)?;
    let json: Value = serde_json::from_str(&spec.to_json())?;
    Ok(Output {
        text: spec.to_json(),
        json,
        failed: Vec::new(),
    })
}

pub fn geometry(s: &Surface, g: &Global, points: usize) -> Result<Output> {
    let geom = &s.geom;
    let c = s.consts();
    let names = s.param_names();
    let by_param = |f: &dyn Fn(usize) -> Value| {
        let mut m = Map::new();
        for (mu, n) in names.iter().enumerate() {
            m.insert(n.to_string(), f(mu));
        }
        Value::Object(m)
    };

    let mut out = header(s);
    out.insert("embedding".into(), sym3(&s.spec.embedding));
    out.insert("natural_basis".into(), by_param(&|mu| sym3(&geom.basis[mu])));
    out.insert("normal".into(), sym3(&geom.normal));
    out.insert("metric".into(), sym2x2(&geom.metric));
    out.insert("inverse_metric".into(), sym2x2(&geom.inverse_metric));
    out.insert("sqrt_g".into(), json!(sym(&geom.sqrt_g)));
    out.insert("second_fundamental".into(), sym2x2(&geom.second));
    out.insert("mean_curvature".into(), json!(sym(&geom.mean_curvature)));
    out.insert("gaussian_curvature".into(), json!(sym(&geom.gaussian_curvature())));
    out.insert("dreibein".into(), sym2x2(&geom.dreibein));
    out.insert("transfer".into(), sym2x2(&geom.transfer));
    out.insert("spin_connection".into(), by_param(&|mu| json!(sym(&geom.spin_connection[mu]))));
    out.insert("gauge_field".into(), by_param(&|mu| json!(sym_cmat(&geom.gauge_field[mu]))));
    out.insert(
        "gauge_potential".into(),
        json!(geom.gauge_potential.iter().map(sym_cmat).collect::<Vec<_>>()),
    );

    let mut rows = Vec::new();
    for p in s.table_points(g, points)? {
        let mut row = Map::new();
        row.insert("point".into(), point_value(p));
        row.insert("metric".into(), num2x2(&geom.metric, p, &c)?);
        row.insert("normal".into(), num3(&geom.normal, p, &c)?);
        row.insert("mean_curvature".into(), json!(num(&geom.mean_curvature, p, &c)?));
        row.insert("transfer".into(), num2x2(&geom.transfer, p, &c)?);
        let mut omega = Map::new();
        let mut gauge = Map::new();
        for (mu, n) in names.iter().enumerate() {
            omega.insert(n.to_string(), json!(num(&geom.spin_connection[mu], p, &c)?));
            gauge.insert(n.to_string(), num_cmat(&geom.gauge_field[mu], p, &c)?);
        }
        row.insert("spin_connection".into(), Value::Object(omega));
        row.insert("gauge_field".into(), Value::Object(gauge));
        let a: Vec<Value> = geom
            .gauge_potential
            .iter()
            .map(|m| num_cmat(m, p, &c))
            .collect::<Result<_>>()?;
        row.insert("gauge_potential".into(), json!(a));
        rows.push(Value::Object(row));
    }
    out.insert("seed".into(), json!(g.seed));
    out.insert("samples".into(), json!(rows));
    out.insert(
        "notes".into(),
        json!([
            "mean_curvature = s_M * g^{mu nu} b_{mu nu} / 2; the momentum curvature term is (g^{mu nu} b_{mu nu} / 2) n",
            format!("frame leg 1 is attached to parameter {}, leg 2 to {}", names[0], names[1]),
            "normal = r_1 x r_2 / |r_1 x r_2| in declared parameter order",
        ]),
    );
    Ok(Output::new(format!("geometry of {}", s.spec.name), Value::Object(out)))
}

const AXES: [&str; 3] = ["x", "y", "z"];

pub fn momentum(s: &Surface, g: &Global, points: usize) -> Result<Output> {
    let c = s.consts();
    let pi = geometric_momentum(&s.geom);
    let p = covariant_momentum(&s.geom);
    let mut out = header(s);
    let ops = |v: &[DiffOp; 3]| {
        let mut m = Map::new();
        for (a, op) in AXES.iter().zip(v) {
            m.insert(a.to_string(), json!(sym_op(op)));
        }
        Value::Object(m)
    };
    out.insert("geometric_momentum".into(), ops(&pi));
    out.insert("covariant_momentum".into(), ops(&p));
    let mut a = Map::new();
    for (ax, m) in AXES.iter().zip(&s.geom.gauge_potential) {
        a.insert(ax.to_string(), json!(sym_cmat(&m.scale(&Expr::ident("hbar")))));
    }
    out.insert("gauge_term".into(), Value::Object(a));
    let mut rows = Vec::new();
    for pt in s.table_points(g, points)? {
        let mut row = Map::new();
        row.insert("point".into(), point_value(pt));
        for (ax, op) in AXES.iter().zip(&p) {
            row.insert(format!("p_{ax}"), coeff_table(op, pt, &c)?);
        }
        rows.push(Value::Object(row));
    }
    out.insert("seed".into(), json!(g.seed));
    out.insert("samples".into(), json!(rows));
    out.insert(
        "notes".into(),
        json!([
            format!(
                "p = Pi + s_A * hbar * r^mu Omega_mu with s_A = {:+}; s_A = -1 gives p = Pi - A",
                s.cfg.convention.s_a
            ),
            "Pi = -i hbar (r^mu d_mu + (g^{mu nu} b_{mu nu} / 2) n)",
        ]),
    );
    Ok(Output::new(format!("momentum on {}", s.spec.name), Value::Object(out)))
}

pub fn hamiltonian(s: &Surface, g: &Global, points: usize, vg: Option<&VGAnsatz>) -> Result<Output> {
    let c = s.consts();
    let h = dirac_hamiltonian(&s.geom, &s.cfg, vg);
    let mut out = header(s);
    out.insert("gamma_rep".into(), json!(s.cfg.gamma.to_string()));
    out.insert("mass".into(), json!(s.cfg.mass));
    let gm = curved_gammas(&s.geom);
    out.insert("curved_gammas".into(), json!([sym_cmat(&gm[0]), sym_cmat(&gm[1])]));
    if let Some(v) = vg {
        out.insert("potential".into(), json!(sym_cmat(&v.to_cmat())));
    }
    out.insert("hamiltonian".into(), json!(sym_op(&h)));
    let mut rows = Vec::new();
    for pt in s.table_points(g, points)? {
        rows.push(json!({"point": point_value(pt), "H": coeff_table(&h, pt, &c)?}));
    }
    out.insert("seed".into(), json!(g.seed));
    out.insert("samples".into(), json!(rows));
    Ok(Output::new(format!("hamiltonian on {}", s.spec.name), Value::Object(out)))
}

pub struct Selection {
    pub fcc: bool,
    pub tangency: bool,
    pub ppc: bool,
    pub dqc: bool,
    pub hermiticity: bool,
}

pub fn check(s: &Surface, g: &Global, sel: &Selection, vg: &VGAnsatz) -> Result<Output> {
    let sample = Sample::draw(&s.geom, g.samples, g.seed)?;
    let ctx = CheckContext {
        geom: &s.geom,
        cfg: &s.cfg,
        sample: &sample,
        exec: Exec::default(),
    };
    let tol = |d: f64| g.tol.unwrap_or(d);
    let mut reports = Vec::new();
    if sel.fcc {
        reports.push(fcc_check(&ctx, tol(FCC_TOL))?);
    }
    if sel.tangency {
        reports.push(tangency_check(&ctx, tol(TANGENCY_TOL))?);
    }
    if sel.ppc {
        reports.push(pp_commutator_check(&ctx, tol(PPC_TOL))?);
    }
    if sel.dqc {
        reports.push(dqc_residual(&ctx, vg, tol(DQC_TOL))?);
    }
    if sel.hermiticity {
        reports.push(hermiticity_check(
            &s.geom,
            &s.cfg,
            None,
            geomom::operator::DEFAULT_NODES,
            tol(HERMITICITY_TOL),
            Exec::default(),
        )?);
    }
    let failed: Vec<String> = reports.iter().filter(|r| !r.pass).map(|r| r.check.clone()).collect();
    let json = json!({
        "surface": s.spec.name,
        "pass": failed.is_empty(),
        "reports": reports,
    });
    let title = format!(
        "check on {}: {}",
        s.spec.name,
        if failed.is_empty() { "PASS".to_string() } else { format!("FAIL ({})", failed.join(", ")) }
    );
    let mut out = Output::new(title, json);
    out.failed = failed;
    Ok(out)
}

pub fn solve_vg(s: &Surface, g: &Global) -> Result<Output> {
    let r = vg_nullspace_solve(
        &s.geom,
        &s.cfg,
        g.samples,
        g.seed,
        g.tol.unwrap_or(NULLSPACE_TOL),
        Exec::default(),
    )?;
    let title = format!(
        "solve-vg on {}: {} ({})",
        s.spec.name,
        if r.pass { "PASS" } else { "FAIL" },
        r.summary()
    );
    let mut out = Output::new(title, serde_json::to_value(&r)?);
    if !r.pass {
        out.failed.push(r.check.clone());
    }
    Ok(out)
}

fn named_operator(s: &Surface, name: &str) -> Result<DiffOp> {
    let axis = |n: &str| AXES.iter().position(|a| *a == n);
    let op = match name {
        "H" => dirac_hamiltonian(&s.geom, &s.cfg, None),
        _ => match name.split_once('_') {
            Some(("p", a)) if axis(a).is_some() => covariant_momentum(&s.geom)[axis(a).unwrap()].clone(),
            Some(("Pi", a)) if axis(a).is_some() => geometric_momentum(&s.geom)[axis(a).unwrap()].clone(),
            _ => bail!("unknown operator `{name}` (expected H, p_x, p_y, p_z, Pi_x, Pi_y or Pi_z)"),
        },
    };
    Ok(op)
}

pub fn apply(s: &Surface, g: &Global, op_name: &str, spinor_json: &str, points: usize) -> Result<Output> {
    let psi: SpinorField = serde_json::from_str(spinor_json).context("parsing spinor file")?;
    let op = named_operator(s, op_name)?;
    let res = op.apply(&psi);
    let c = s.consts();
    let mut rows = Vec::new();
    for pt in s.table_points(g, points)? {
        let a = evaluate(&res.psi1, pt, &c)?;
        let b = evaluate(&res.psi2, pt, &c)?;
        rows.push(json!({"point": point_value(pt), "psi1": [a.re, a.im], "psi2": [b.re, b.im]}));
    }
    let mut out = header(s);
    out.insert("operator".into(), json!(op_name));
    out.insert("spinor".into(), json!({"psi1": psi.psi1.to_string(), "psi2": psi.psi2.to_string()}));
    out.insert("result".into(), json!({"psi1": sym(&res.psi1), "psi2": sym(&res.psi2)}));
    out.insert("seed".into(), json!(g.seed));
    out.insert("samples".into(), json!(rows));
    Ok(Output::new(format!("{op_name} applied on {}", s.spec.name), Value::Object(out)))
}
