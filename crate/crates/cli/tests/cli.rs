use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn geomom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geomom"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let o = geomom(&all);
    assert!(o.status.success(), "{:?}: {}", args, String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn surfaces_list_names_the_catalog() {
    let o = geomom(&["surfaces", "list"]);
    assert!(o.status.success());
    let names: Vec<String> = stdout(&o).lines().map(str::to_owned).collect();
    assert_eq!(
        names,
        ["plane", "cylinder", "sphere", "torus", "catenoid", "pseudosphere", "helicoid"]
    );
}

#[test]
fn check_all_passes_on_catalog_surfaces() {
    for s in ["plane", "sphere", "pseudosphere", "helicoid"] {
        let o = geomom(&["check", s, "--all", "--samples", "20"]);
        assert_eq!(o.status.code(), Some(0), "{s}: {}", stdout(&o));
        assert!(stdout(&o).starts_with(&format!("check on {s}: PASS")));
    }
}

#[test]
fn dqc_with_sigma_x_fails_on_pseudosphere() {
    let o = geomom(&["check", "pseudosphere", "--dqc", "--vg", "sigma_x"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("check on pseudosphere: FAIL (dqc)"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("failed: dqc"));
}

#[test]
fn dqc_with_sigma_z_passes_on_helicoid() {
    let v = json(&["check", "helicoid", "--dqc", "--vg", "sigma_z"]);
    assert_eq!(v["pass"], true);
    assert_eq!(v["reports"].as_array().unwrap().len(), 1);
}

#[test]
fn solve_vg_reports_identity_and_sigma_z() {
    for s in ["pseudosphere", "helicoid"] {
        let o = geomom(&["solve-vg", s]);
        assert!(o.status.success());
        assert!(stdout(&o).contains("dimension 2: span{I, sigma_z}"), "{}", stdout(&o));
    }
    let o = geomom(&["solve-vg", "plane"]);
    assert!(stdout(&o).contains("dimension 4"));
}

#[test]
fn helicoid_is_minimal() {
    let v = json(&["geometry", "helicoid"]);
    assert_eq!(v["mean_curvature"], "0");
    assert_eq!(v["metric"][1][1], "beta^2 + u^2");
}

#[test]
fn plane_geometry_is_flat() {
    let o = geomom(&["geometry", "plane"]);
    let text = stdout(&o);
    assert!(text.contains("  mean_curvature: 0\n"));
    assert!(text.contains("  gaussian_curvature: 0\n"));
}

#[test]
fn pseudosphere_samples_match_closed_forms() {
    let v = json(&["geometry", "pseudosphere", "--points", "6"]);
    for s in v["samples"].as_array().unwrap() {
        let u = s["point"]["u"].as_f64().unwrap();
        let m = s["mean_curvature"].as_f64().unwrap();
        let want = (-1.0 / u.tan() + u.tan()) / 2.0;
        assert!((m - want).abs() < 1e-10, "u={u}: {m} vs {want}");
        let omega = s["spin_connection"]["v"].as_f64().unwrap();
        assert!((omega.abs() - u.cos()).abs() < 1e-10);
    }
}

#[test]
fn pseudosphere_momentum_has_sigma_z_gauge_term() {
    let v = json(&["momentum", "pseudosphere"]);
    let x = v["gauge_term"]["x"].as_str().unwrap();
    assert!(x.contains("sigma_z") && x.contains("sin(v)"), "{x}");
    assert_eq!(v["gauge_term"]["z"], "0");
}

#[test]
fn helicoid_hamiltonian_has_curvature_term() {
    let v = json(&["hamiltonian", "helicoid"]);
    let h = v["hamiltonian"].as_str().unwrap();
    assert!(h.contains("(hbar*u)/(beta^2 + u^2))*sigma_x"), "{h}");
    assert!(h.contains("(m)*sigma_z"), "{h}");
}

#[test]
fn hamiltonian_accepts_potential() {
    let v = json(&["hamiltonian", "plane", "--vg", "0,0,0,2"]);
    let h = v["hamiltonian"].as_str().unwrap();
    assert!(h.contains("sigma_z"), "{h}");
}

#[test]
fn exported_spec_round_trips_as_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("torus.json");
    let o = geomom(&["surfaces", "export", "torus", "--output", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let from_file = json(&["check", path.to_str().unwrap(), "--fcc"]);
    let from_name = json(&["check", "torus", "--fcc"]);
    assert_eq!(
        from_file["reports"][0]["max_residual"],
        from_name["reports"][0]["max_residual"]
    );
}

#[test]
fn unknown_surface_is_a_usage_error() {
    let o = geomom(&["geometry", "klein-bottle"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown surface"));
}

#[test]
fn malformed_spec_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\"name\": \"bad\"").unwrap();
    let o = geomom(&["geometry", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_spinor_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.json");
    fs::write(&path, "{\"psi1\": \"u +\", \"psi2\": \"0\"}").unwrap();
    let o = geomom(&["apply", "plane", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    let o = geomom(&["apply", "plane", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_convention_is_rejected() {
    let o = geomom(&["geometry", "plane", "--convention", "1,2,3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn apply_hamiltonian_on_helicoid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.json");
    fs::write(&path, r#"{"psi1": "exp(-u^2)", "psi2": "sin(v)"}"#).unwrap();
    let v = json(&["apply", "helicoid", path.to_str().unwrap(), "--points", "4", "--mass", "0.5"]);
    // H = -i σx ∂u - i σy ∂v / r - i u σx / (2 r²) + m σz with r² = 1 + u²
    for s in v["samples"].as_array().unwrap() {
        let u = s["point"]["u"].as_f64().unwrap();
        let w = s["point"]["v"].as_f64().unwrap();
        let r2 = 1.0 + u * u;
        let e = (-u * u).exp();
        let psi1 = (0.5 * e - w.cos() / r2.sqrt(), -u * w.sin() / (2.0 * r2));
        let psi2 = (-0.5 * w.sin(), 2.0 * u * e - u * e / (2.0 * r2));
        let got1 = (s["psi1"][0].as_f64().unwrap(), s["psi1"][1].as_f64().unwrap());
        let got2 = (s["psi2"][0].as_f64().unwrap(), s["psi2"][1].as_f64().unwrap());
        for (g, want) in [(got1, psi1), (got2, psi2)] {
            assert!((g.0 - want.0).abs() < 1e-12 && (g.1 - want.1).abs() < 1e-12, "{g:?} vs {want:?}");
        }
    }
}

#[test]
fn apply_rejects_unknown_operator() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.json");
    fs::write(&path, r#"{"psi1": "u", "psi2": "v"}"#).unwrap();
    let o = geomom(&["apply", "plane", path.to_str().unwrap(), "--op", "L_z"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_output_is_deterministic() {
    let a = geomom(&["check", "catenoid", "--all", "--json"]);
    let b = geomom(&["check", "catenoid", "--all", "--json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_changes_sample_points() {
    let a = json(&["geometry", "sphere", "--seed", "1"]);
    let b = json(&["geometry", "sphere", "--seed", "2"]);
    assert_ne!(a["samples"], b["samples"]);
}

#[test]
fn text_and_json_carry_the_same_numbers() {
    let v = json(&["check", "cylinder", "--fcc"]);
    let text = stdout(&geomom(&["check", "cylinder", "--fcc"]));
    let r = v["reports"][0]["max_residual"].to_string();
    assert!(text.contains(&format!("max_residual: {r}\n")), "{text}");
}

#[test]
fn tolerance_override_can_fail_a_check() {
    let o = geomom(&["check", "torus", "--ppc", "--tol", "0"]);
    assert_eq!(o.status.code(), Some(1));
}
