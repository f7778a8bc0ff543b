use geomom::expr::{parse, Expr};
use geomom::geometry::{catalog, Convention, SurfaceSpec, CATALOG};
use geomom::operator::Pauli;
use geomom::par::Exec;
use geomom::quantize::{
    build_geometry, dqc_operators, dqc_residual, fcc_check, hermiticity_check, pp_commutator_check, tangency_check,
    tangency_without_curvature, vg_nullspace_solve, CheckContext, GammaRep, PhysicsConfig, Sample, VGAnsatz,
    DEFAULT_SEED, NULLSPACE_TOL,
};

const SAMPLES: usize = 16;

fn conventions() -> Vec<Convention> {
    let mut out = Vec::new();
    for s_m in [-1, 1] {
        for s_omega in [-1, 1] {
            for s_a in [-1, 1] {
                out.push(Convention::new(s_m, s_omega, s_a).unwrap());
            }
        }
    }
    out
}

fn cfg_with(convention: Convention) -> PhysicsConfig {
    PhysicsConfig {
        convention,
        ..PhysicsConfig::default()
    }
}

fn user_surface() -> SurfaceSpec {
    let mut s = catalog("plane").unwrap();
    s.name = "bump".into();
    s.constants.insert("h", 0.4);
    s.embedding = [Expr::u(), Expr::v(), parse("h*exp(-u^2 - v^2)").unwrap()];
    s
}

#[test]
fn identities_hold_in_every_convention() {
    for convention in conventions() {
        let cfg = cfg_with(convention);
        for name in CATALOG {
            let geom = build_geometry(&catalog(name).unwrap(), &cfg).unwrap();
            let sample = Sample::draw(&geom, SAMPLES, 3).unwrap();
            let ctx = CheckContext { geom: &geom, cfg: &cfg, sample: &sample, exec: Exec::default() };
            for r in [
                fcc_check(&ctx, 1e-9).unwrap(),
                tangency_check(&ctx, 1e-9).unwrap(),
                pp_commutator_check(&ctx, 1e-8).unwrap(),
            ] {
                assert!(r.pass, "{convention} {name}: {r}");
            }
        }
    }
}

#[test]
fn identities_hold_for_other_units_and_gamma_matrices() {
    for (hbar, gamma) in [(0.37, "y,x,-z"), (2.5, "z,x,y"), (1.0, "-x,y,z")] {
        let cfg = PhysicsConfig {
            hbar,
            mass: 0.3,
            gamma: gamma.parse::<GammaRep>().unwrap(),
            ..PhysicsConfig::default()
        };
        for name in ["sphere", "pseudosphere", "helicoid"] {
            let geom = build_geometry(&catalog(name).unwrap(), &cfg).unwrap();
            let sample = Sample::draw(&geom, SAMPLES, 9).unwrap();
            let ctx = CheckContext { geom: &geom, cfg: &cfg, sample: &sample, exec: Exec::default() };
            assert!(fcc_check(&ctx, 1e-9).unwrap().pass);
            assert!(tangency_check(&ctx, 1e-9).unwrap().pass);
            assert!(pp_commutator_check(&ctx, 1e-8).unwrap().pass);
        }
    }
}

#[test]
fn curvature_term_is_needed_for_tangency() {
    let cfg = PhysicsConfig::default();
    for name in ["sphere", "torus", "pseudosphere"] {
        let geom = build_geometry(&catalog(name).unwrap(), &cfg).unwrap();
        let sample = Sample::draw(&geom, SAMPLES, 1).unwrap();
        let ctx = CheckContext { geom: &geom, cfg: &cfg, sample: &sample, exec: Exec::default() };
        assert!(tangency_without_curvature(&ctx, 1e-9).unwrap().max_residual > 0.1, "{name}");
    }
    let geom = build_geometry(&catalog("plane").unwrap(), &cfg).unwrap();
    let sample = Sample::draw(&geom, SAMPLES, 1).unwrap();
    let ctx = CheckContext { geom: &geom, cfg: &cfg, sample: &sample, exec: Exec::default() };
    assert!(tangency_without_curvature(&ctx, 1e-9).unwrap().pass);
}

#[test]
fn nullspace_is_convention_independent() {
    for convention in conventions() {
        let cfg = cfg_with(convention);
        for name in ["sphere", "pseudosphere", "helicoid"] {
            let geom = build_geometry(&catalog(name).unwrap(), &cfg).unwrap();
            let r = vg_nullspace_solve(&geom, &cfg, SAMPLES, DEFAULT_SEED, NULLSPACE_TOL, Exec::default()).unwrap();
            assert_eq!(r.summary(), "dimension 2: span{I, sigma_z}", "{convention} {name}");
            assert!(r.pass && r.stable);
        }
    }
}

#[test]
fn admitted_direction_follows_the_spin_generator() {
    // [γ1, γ2] ∝ the third Pauli matrix, which commutes with the gauge potential
    for (gamma, want) in [("z,x,y", "sigma_y"), ("y,z,x", "sigma_x"), ("y,x,-z", "sigma_z")] {
        let cfg = PhysicsConfig {
            gamma: gamma.parse().unwrap(),
            ..PhysicsConfig::default()
        };
        let geom = build_geometry(&catalog("torus").unwrap(), &cfg).unwrap();
        let r = vg_nullspace_solve(&geom, &cfg, SAMPLES, DEFAULT_SEED, NULLSPACE_TOL, Exec::default()).unwrap();
        assert_eq!(r.span, ["I", want], "{gamma}");
    }
}

#[test]
fn flat_surfaces_admit_every_constant_potential() {
    let cfg = PhysicsConfig::default();
    for name in ["plane", "cylinder"] {
        let geom = build_geometry(&catalog(name).unwrap(), &cfg).unwrap();
        let r = vg_nullspace_solve(&geom, &cfg, SAMPLES, DEFAULT_SEED, NULLSPACE_TOL, Exec::default()).unwrap();
        assert_eq!(r.dimension, 4, "{name}");
    }
}

#[test]
fn wedge_condition_is_affine_in_the_potential() {
    let cfg = PhysicsConfig::default();
    let geom = build_geometry(&catalog("pseudosphere").unwrap(), &cfg).unwrap();
    let sample = Sample::draw(&geom, SAMPLES, 5).unwrap();
    let ctx = CheckContext { geom: &geom, cfg: &cfg, sample: &sample, exec: Exec::default() };
    let a: VGAnsatz = "0.5,-1,2,0.25".parse().unwrap();
    let b = VGAnsatz::generator(Pauli::Y);
    let sum = VGAnsatz::from_cmat(&a.to_cmat().add(&b.to_cmat()));
    let w = |vg: &VGAnsatz| dqc_operators(&geom, &cfg, vg).unwrap();
    let (wa, wb, ws, w0) = (w(&a), w(&b), w(&sum), w(&VGAnsatz::zero()));
    for k in 0..3 {
        let defect = ws[k].sub(&wa[k]).sub(&wb[k]).add(&w0[k]);
        assert!(ctx.residual(&defect).unwrap() < 1e-12);
    }
}

#[test]
fn admitted_potentials_pass_and_others_fail() {
    let cfg = PhysicsConfig::default();
    for name in ["sphere", "catenoid", "pseudosphere", "helicoid"] {
        let geom = build_geometry(&catalog(name).unwrap(), &cfg).unwrap();
        let sample = Sample::draw(&geom, SAMPLES, 11).unwrap();
        let ctx = CheckContext { geom: &geom, cfg: &cfg, sample: &sample, exec: Exec::default() };
        let ok: VGAnsatz = "1.5,0,0,-0.7".parse().unwrap();
        assert!(dqc_residual(&ctx, &ok, 1e-8).unwrap().pass, "{name}");
        for p in [Pauli::X, Pauli::Y] {
            assert!(!dqc_residual(&ctx, &VGAnsatz::generator(p), 1e-8).unwrap().pass, "{name}");
        }
    }
}

#[test]
fn sequential_and_parallel_reports_agree() {
    let cfg = PhysicsConfig::default();
    for name in CATALOG {
        let geom = build_geometry(&catalog(name).unwrap(), &cfg).unwrap();
        let sample = Sample::draw(&geom, SAMPLES, 21).unwrap();
        let run = |exec: Exec| {
            let ctx = CheckContext { geom: &geom, cfg: &cfg, sample: &sample, exec };
            let reports = vec![
                fcc_check(&ctx, 1e-9).unwrap(),
                tangency_check(&ctx, 1e-9).unwrap(),
                pp_commutator_check(&ctx, 1e-8).unwrap(),
                dqc_residual(&ctx, &VGAnsatz::zero(), 1e-8).unwrap(),
                hermiticity_check(&geom, &cfg, None, 24, 1e-6, exec).unwrap(),
            ];
            let ns = vg_nullspace_solve(&geom, &cfg, SAMPLES, 21, NULLSPACE_TOL, exec).unwrap();
            (serde_json::to_string(&reports).unwrap(), serde_json::to_string(&ns).unwrap())
        };
        assert_eq!(run(Exec::Sequential), run(Exec::Parallel), "{name}");
    }
}

#[test]
fn seed_selects_the_sample() {
    let cfg = PhysicsConfig::default();
    let geom = build_geometry(&catalog("torus").unwrap(), &cfg).unwrap();
    let a = Sample::draw(&geom, 8, 1).unwrap();
    let b = Sample::draw(&geom, 8, 1).unwrap();
    let c = Sample::draw(&geom, 8, 2).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.points, c.points);
}

#[test]
fn user_surface_runs_every_check() {
    let cfg = PhysicsConfig::default();
    let spec = SurfaceSpec::from_json(&user_surface().to_json()).unwrap();
    let geom = build_geometry(&spec, &cfg).unwrap();
    let sample = Sample::draw(&geom, SAMPLES, 4).unwrap();
    let ctx = CheckContext { geom: &geom, cfg: &cfg, sample: &sample, exec: Exec::default() };
    assert!(fcc_check(&ctx, 1e-9).unwrap().pass);
    assert!(tangency_check(&ctx, 1e-9).unwrap().pass);
    assert!(pp_commutator_check(&ctx, 1e-8).unwrap().pass);
    let dqc = dqc_residual(&ctx, &VGAnsatz::zero(), 1e-8).unwrap();
    assert!(!dqc.notes.is_empty(), "{dqc}");
    assert!(hermiticity_check(&geom, &cfg, None, 32, 1e-6, Exec::default()).unwrap().pass);
    let ns = vg_nullspace_solve(&geom, &cfg, SAMPLES, 4, NULLSPACE_TOL, Exec::default()).unwrap();
    assert_eq!(ns.span, ["I", "sigma_z"]);
}

#[test]
fn invalid_configuration_is_rejected() {
    let cfg = PhysicsConfig {
        hbar: 0.0,
        ..PhysicsConfig::default()
    };
    assert!(build_geometry(&catalog("plane").unwrap(), &cfg).is_err());
    assert!("x,x,z".parse::<GammaRep>().is_err());
    assert!("x,y,x".parse::<GammaRep>().is_err());
    assert!(Convention::new(1, 0, 1).is_err());
}
