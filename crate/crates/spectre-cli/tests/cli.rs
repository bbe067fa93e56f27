//! End-to-end tests of the spectre binary: verbs, exit codes, JSON schema,
//! determinism, lattice-file round-trips and batch mode.

use serde_json::Value;
use std::process::{Command, Output};

fn spectre(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectre"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn spectrum_pairs(v: &Value) -> Vec<(String, u64)> {
    v.as_array()
        .expect("spectrum is an array")
        .iter()
        .map(|e| {
            (
                e["beta"].as_str().unwrap().to_string(),
                e["mult"].as_u64().unwrap(),
            )
        })
        .collect()
}

#[test]
fn spectrum_both_cubic() {
    let out = spectre(&["spectrum", "--method", "both", "-f", "x^3+y^3", "--vars", "x,y"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["mu"], 4);
    assert_eq!(v["checks"]["agreement"], true);
    assert_eq!(
        spectrum_pairs(&v["spectrum"]),
        vec![
            ("2/3".to_string(), 1),
            ("1".to_string(), 2),
            ("4/3".to_string(), 1)
        ]
    );
}

#[test]
fn aomoto_rejects_zero_critical_value() {
    let out = spectre(&["mellin", "aomoto", "-f", "x^3+y^3", "--vars", "x,y"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("0 is a critical value"), "stderr: {err}");
}

#[test]
fn check_passes_on_morse_cubic() {
    let out = spectre(&["check", "-f", "1/3x^3 - x + 1/2y^2", "--vars", "x,y"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    for key in ["symmetry", "positivity", "degree", "newton_vs_vfilt"] {
        assert_eq!(v["checks"][key], true, "check {key}");
    }
}

#[test]
fn goodbasis_pins_pencil() {
    let out = spectre(&["goodbasis", "-f", "1/3x^3 - x + 1/2y^2", "--vars", "x,y"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["a0"][0][1], "-2/3");
    assert_eq!(v["a0"][1][0], "-2/3");
    assert_eq!(v["a1"][0][0], "5/6");
    assert_eq!(v["a1"][1][1], "7/6");
    assert_eq!(v["report"]["all_ok"], true);
    assert_eq!(v["goodbasis"]["very_good"], true);
}

#[test]
fn monodromy_cubic() {
    let out = spectre(&["monodromy", "-f", "x^3+y^3", "--vars", "x,y"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    // (T-1)^2 (T^2+T+1) = T^4 - T^3 - T + 1.
    let coeffs: Vec<&str> = v["monodromy_char_poly"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap())
        .collect();
    assert_eq!(coeffs, vec!["1", "-1", "0", "-1", "1"]);
}

#[test]
fn usage_errors_exit_64() {
    let out = spectre(&["spectrum", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(64));

    let out = spectre(&["spectrum", "-f", "x +", "--vars", "x,y"]);
    assert_eq!(out.status.code(), Some(64));

    let out = spectre(&["spectrum", "-f", "x + z", "--vars", "x,y"]);
    assert_eq!(out.status.code(), Some(64));

    // Both input kinds at once.
    let out = spectre(&[
        "spectrum", "-f", "x^2+y^2", "--vars", "x,y", "--lattice", "nope.json",
    ]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn one_variable_polynomials_rejected_at_cli() {
    let out = spectre(&["spectrum", "-f", "x^3", "--vars", "x"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("two variables"), "stderr: {err}");
}

#[test]
fn non_convenient_rejected() {
    let out = spectre(&["spectrum", "-f", "x^3 + x*y", "--vars", "x,y"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("not convenient"), "stderr: {err}");
}

#[test]
fn deterministic_output() {
    let a = spectre(&["spectrum", "-f", "x^3+y^4", "--vars", "x,y"]);
    let b = spectre(&["spectrum", "-f", "x^3+y^4", "--vars", "x,y"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "byte-identical JSON for identical inputs");
}

#[test]
fn lattice_file_roundtrip() {
    let dir = std::env::temp_dir().join(format!("spectre-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("lattice.json");

    // Emit the Brieskorn lattice of x^2+y^2+1 and feed it back in.
    let out = spectre(&["tmatrix", "-f", "x^2+y^2+1", "--vars", "x,y"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    std::fs::write(&path, serde_json::to_string(&v["lattice"]).unwrap()).unwrap();

    let out = spectre(&["spectrum", "--lattice", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v2 = stdout_json(&out);
    assert_eq!(v2["mu"], 1);
    assert_eq!(spectrum_pairs(&v2["spectrum"]), vec![("1".to_string(), 1)]);

    // Round-trip: tmatrix of the lattice re-emits the same wire object.
    let out = spectre(&["tmatrix", "--lattice", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v3 = stdout_json(&out);
    assert_eq!(v3["lattice"]["t_matrix"], v["lattice"]["t_matrix"]);
    assert_eq!(v3["lattice"]["mu"], v["lattice"]["mu"]);

    // Abstract lattices may not support newton spectra.
    let out = spectre(&[
        "spectrum", "--lattice", path.to_str().unwrap(), "--method", "newton",
    ]);
    assert_eq!(out.status.code(), Some(64));

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn irregular_lattice_exits_3() {
    let dir = std::env::temp_dir().join(format!("spectre-irreg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("irregular.json");
    std::fs::write(&path, r#"{"mu":1,"t_matrix":[[["0","0","1"]]]}"#).unwrap();
    let out = spectre(&["spectrum", "--lattice", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("irregular"), "stderr: {err}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn twist_shifts_a0() {
    let out = spectre(&["twist", "-c", "-1", "-f", "x^2+y^2+1", "--vars", "x,y"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["a0"][0][0], "0");
    assert_eq!(v["a1"][0][0], "1");
    assert_eq!(spectrum_pairs(&v["spectrum"]), vec![("1".to_string(), 1)]);
}

#[test]
fn dual_spectrum_verb() {
    let out = spectre(&["dual", "-f", "1/3x^3 - x + 1/2y^2", "--vars", "x,y"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(
        spectrum_pairs(&v["dual"]),
        vec![("-7/6".to_string(), 1), ("-5/6".to_string(), 1)]
    );
}

#[test]
fn convolve_two_polynomials() {
    let out = spectre(&[
        "convolve", "-f", "x^2+y^3", "--vars", "x,y", "-g", "x^2+y^2", "--vars2", "x,y",
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    // {5/6, 7/6} convolved with {1} = {11/6, 13/6}.
    assert_eq!(
        spectrum_pairs(&v["convolution"]),
        vec![("11/6".to_string(), 1), ("13/6".to_string(), 1)]
    );
}

#[test]
fn batch_mode() {
    let dir = std::env::temp_dir().join(format!("spectre-batch-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let manifest = dir.join("manifest.json");
    std::fs::write(
        &manifest,
        r#"[
          {"command": "milnor", "poly": "x^3+y^3", "vars": ["x","y"]},
          {"command": "spectrum", "poly": "x^3 + x*y", "vars": ["x","y"]},
          {"command": "spectrum", "poly": "x^2+y^2", "vars": ["x","y"]}
        ]"#,
    )
    .unwrap();
    let out = spectre(&["batch", manifest.to_str().unwrap()]);
    assert!(out.status.success(), "batch exits 0 even with failing jobs");
    let v = stdout_json(&out);
    let records = v.as_array().unwrap();
    assert_eq!(records.len(), 3);
    assert_eq!(records[0]["exit_class"], 0);
    assert_eq!(records[0]["output"]["mu"], 4);
    assert_eq!(records[1]["exit_class"], 2, "degenerate entry carries exit class 2");
    assert_eq!(records[2]["exit_class"], 0);

    // Empty manifest: empty array, exit 0.
    let empty = dir.join("empty.json");
    std::fs::write(&empty, "[]").unwrap();
    let out = spectre(&["batch", empty.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out), serde_json::json!([]));

    // Malformed manifest: exit 64.
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    let out = spectre(&["batch", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(64));

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn mellin_dim_and_det() {
    let out = spectre(&["mellin", "dim", "-f", "x^3+y^3", "--vars", "x,y"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["mellin_dimension"], 0);
    assert_eq!(v["irregularity_full"], false);

    let out = spectre(&["mellin", "det-t", "-f", "1/3x^3 - x + 1/2y^2", "--vars", "x,y"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["det_t"]["factored"], "(-4/9)*s^2/((s+5/6)*(s+7/6))");
}
