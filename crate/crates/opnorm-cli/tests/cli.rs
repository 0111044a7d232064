//! End-to-end tests of the `opnorm` binary: exit codes, JSON reports, and
//! the generate/verify round trip.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_opnorm"))
}

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("opnorm-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

const DIAG12_MM: &str = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n2 2 2\n";
const A_TSV: &str = "1\t2\n3\t1\n";
const ID3_MM: &str = "%%MatrixMarket matrix coordinate real general\n3 3 3\n1 1 1\n2 2 1\n3 3 1\n";
const COLS_TSV: &str = "1\t0\t1\n0\t1\t1\n";

#[test]
fn compute_diagonal_reports_two() {
    let dir = workdir("diag");
    let input = write(&dir, "diag12.mtx", DIAG12_MM);
    let out = bin()
        .args(["compute", input.to_str().unwrap(), "--p", "2", "--q", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!((v["estimate"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    assert_eq!(v["converged"], serde_json::json!(true));
    assert!(v["bounds"]["lower"].as_f64().unwrap() <= v["estimate"].as_f64().unwrap());
    assert!(v["estimate"].as_f64().unwrap() <= v["bounds"]["upper"].as_f64().unwrap());
}

#[test]
fn compute_identity_mixed_exponents() {
    let dir = workdir("id3");
    let input = write(&dir, "id3.mtx", ID3_MM);
    let out = bin()
        .args(["compute", input.to_str().unwrap(), "--p", "2", "--q", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    let expected = 3.0_f64.powf(1.0 / 6.0);
    assert!((v["estimate"].as_f64().unwrap() - expected).abs() < 1e-5);
}

#[test]
fn compute_rejects_descending_exponents_with_exit_two() {
    let dir = workdir("gate");
    let input = write(&dir, "a.tsv", A_TSV);
    let out = bin()
        .args(["compute", input.to_str().unwrap(), "--p", "3", "--q", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("oracle"), "stderr: {stderr}");
}

#[test]
fn compute_exhausted_budget_exits_three() {
    let dir = workdir("budget");
    let input = write(&dir, "diag12.mtx", DIAG12_MM);
    let out = bin()
        .args([
            "compute",
            input.to_str().unwrap(),
            "--p",
            "2",
            "--q",
            "2",
            "--max-iter",
            "0",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let v = stdout_json(&out);
    assert_eq!(v["converged"], serde_json::json!(false));
    // Bounds stay valid even without convergence.
    let lo = v["bounds"]["lower"].as_f64().unwrap();
    let hi = v["bounds"]["upper"].as_f64().unwrap();
    assert!(lo <= 2.0 && 2.0 <= hi);
}

#[test]
fn oracle_sign_enumeration_matches_hand_value() {
    let dir = workdir("lvp");
    let input = write(&dir, "cols.tsv", COLS_TSV);
    let out = bin()
        .args([
            "oracle",
            input.to_str().unwrap(),
            "--inf-to-p",
            "--p",
            "3",
            "--emit-vector",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    let expected = 2.0 * 2.0_f64.powf(1.0 / 3.0);
    assert!((v["estimate"].as_f64().unwrap() - expected).abs() < 1e-9);
    assert_eq!(v["exhaustive"], serde_json::json!(true));
    assert_eq!(v["params"]["q"], serde_json::json!("inf"));
    assert_eq!(v["maximizer"].as_array().unwrap().len(), 3);
}

#[test]
fn oracle_agrees_with_compute_on_singular_value() {
    let dir = workdir("agree");
    let input = write(&dir, "a.tsv", A_TSV);
    let compute = bin()
        .args(["compute", input.to_str().unwrap(), "--p", "2", "--q", "2"])
        .output()
        .unwrap();
    let oracle = bin()
        .args([
            "oracle",
            input.to_str().unwrap(),
            "--p",
            "2",
            "--q",
            "2",
            "--restarts",
            "16",
        ])
        .output()
        .unwrap();
    assert!(compute.status.success() && oracle.status.success());
    let c = stdout_json(&compute)["estimate"].as_f64().unwrap();
    let o = stdout_json(&oracle)["estimate"].as_f64().unwrap();
    assert!((c - o).abs() <= 1e-8 * c.max(1.0));
}

#[test]
fn oracle_baseline_respects_the_quartic_factor() {
    let dir = workdir("baseline");
    // 8x8 sign matrix.
    let mut rows = String::new();
    for i in 0..8 {
        let row: Vec<&str> = (0..8)
            .map(|j| if (i * 31 + j * 17 + i * j) % 3 == 0 { "-1" } else { "1" })
            .collect();
        rows.push_str(&row.join("\t"));
        rows.push('\n');
    }
    let input = write(&dir, "pm.tsv", &rows);
    let out = bin()
        .args(["oracle", input.to_str().unwrap(), "--p", "4", "--baseline"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    let lo = v["bounds"]["lower"].as_f64().unwrap();
    let hi = v["bounds"]["upper"].as_f64().unwrap();
    assert_eq!(v["bounds"]["method"], serde_json::json!("interpolation"));
    assert!(lo <= hi);
    assert!(hi / lo <= 8.0_f64.powf(0.25) * (1.0 + 1e-9));
}

#[test]
fn gen_gadget_and_verify_round_trip() {
    let dir = workdir("gadget");
    let out_dir = dir.join("inst");
    let gen = bin()
        .args([
            "gen",
            "gadget",
            "--builtin",
            "cycle4",
            "--c",
            "10",
            "--p",
            "3",
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(gen.status.success());
    let g = stdout_json(&gen);
    assert_eq!(g["expected_ratio_at_witness"], serde_json::json!(84.0));
    assert_eq!(g["rows"], serde_json::json!(20));
    assert_eq!(g["cols"], serde_json::json!(5));

    let verify = bin()
        .args(["verify", out_dir.join("manifest.json").to_str().unwrap()])
        .output()
        .unwrap();
    assert!(verify.status.success(), "{}", String::from_utf8_lossy(&verify.stderr));
    let v = stdout_json(&verify);
    assert_eq!(v["pass"], serde_json::json!(true));
}

#[test]
fn gen_tensor_squares_the_witness_value() {
    let dir = workdir("tensor");
    let out_dir = dir.join("inst");
    let gen = bin()
        .args([
            "gen",
            "tensor",
            "--builtin",
            "complete2",
            "--c",
            "1",
            "--p",
            "3",
            "--k",
            "2",
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(gen.status.success(), "{}", String::from_utf8_lossy(&gen.stderr));
    let g = stdout_json(&gen);
    // Single-edge gadget at C = 1, p = 3 evaluates to 6; squared by k = 2.
    assert!((g["expected_ratio_at_witness"].as_f64().unwrap() - 36.0).abs() < 1e-9);

    let verify = bin()
        .args(["verify", out_dir.join("manifest.json").to_str().unwrap()])
        .output()
        .unwrap();
    assert!(verify.status.success(), "{}", String::from_utf8_lossy(&verify.stderr));
}

#[test]
fn gen_lift_records_weights_and_completeness_factor() {
    let dir = workdir("lift");
    let out_dir = dir.join("inst");
    let gen = bin()
        .args([
            "gen", "lift", "--builtin", "complete2", "--c", "1", "--p", "3", "--q", "4",
            "--out", out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(gen.status.success(), "{}", String::from_utf8_lossy(&gen.stderr));

    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(out_dir.join("manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["alphas"], serde_json::json!([2, 1, 1]));
    let cf = manifest["completeness_factor"].as_f64().unwrap();
    assert!((cf - 4.0_f64.powf(1.0 / 3.0 - 0.25)).abs() < 1e-12);
    let expected = 24.0_f64.powf(1.0 / 3.0) / 4.0_f64.powf(0.25);
    assert!(
        (manifest["expected_ratio_at_witness"].as_f64().unwrap() - expected).abs() < 1e-12
    );

    let verify = bin()
        .args(["verify", out_dir.join("manifest.json").to_str().unwrap()])
        .output()
        .unwrap();
    assert!(verify.status.success(), "{}", String::from_utf8_lossy(&verify.stderr));
}

#[test]
fn verify_catches_a_tampered_manifest() {
    let dir = workdir("tamper");
    let out_dir = dir.join("inst");
    let gen = bin()
        .args([
            "gen", "gadget", "--builtin", "cycle4", "--c", "10", "--p", "3",
            "--out", out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(gen.status.success());
    let manifest_path = out_dir.join("manifest.json");
    let tampered = std::fs::read_to_string(&manifest_path)
        .unwrap()
        .replace("84.0", "184.0");
    std::fs::write(&manifest_path, tampered).unwrap();

    let verify = bin()
        .args(["verify", manifest_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(verify.status.code(), Some(1));
    let v = stdout_json(&verify);
    assert_eq!(v["pass"], serde_json::json!(false));
}

#[test]
fn verify_uses_the_certified_iteration_on_nonnegative_instances() {
    // A hand-written lift manifest over a nonnegative matrix exercises the
    // certified-iteration branch of verify.
    let dir = workdir("nonneg-verify");
    write(&dir, "m.mtx", ID3_MM);
    // Identity at (p, q) = (2, 3): witness = uniform vector, ratio 3^{1/6}.
    let w = 3.0_f64.powf(-1.0 / 3.0);
    let expected = 3.0_f64.powf(1.0 / 6.0);
    let manifest = serde_json::json!({
        "kind": "lift",
        "matrix_file": "m.mtx",
        "c": 1.0,
        "p": 2.0,
        "q": 3.0,
        "k": 1,
        "graph_vertices": 3,
        "graph_degree": 1,
        "alphas": [1, 1, 1],
        "witness": [w, w, w],
        "cut_size": 0,
        "expected_ratio_at_witness": expected,
        "completeness_factor": 3.0_f64.powf(1.0 / 2.0 - 1.0 / 3.0),
        "seed": 0,
    });
    let path = write(&dir, "manifest.json", &manifest.to_string());
    let out = bin().args(["verify", path.to_str().unwrap()]).output().unwrap();
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(out.status.success(), "{stderr}");
    assert!(stderr.contains("certified estimate"), "{stderr}");
}

#[test]
fn verify_rejects_malformed_manifests_with_exit_two() {
    let dir = workdir("badmanifest");
    let path = write(&dir, "manifest.json", "{\"kind\": \"gadget\", \"witness\": null}");
    let out = bin().args(["verify", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dimension_cap_is_enforced() {
    let dir = workdir("cap");
    let input = write(&dir, "id3.mtx", ID3_MM);
    let out = bin()
        .args(["compute", input.to_str().unwrap(), "--p", "2", "--q", "2"])
        .env("OPNORM_MAX_DIM", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("OPNORM_MAX_DIM"));
}

#[test]
fn gen_gates_oversized_graphs_before_building() {
    let dir = workdir("oversize");
    let out = bin()
        .args([
            "gen", "gadget", "--builtin", "hypercube16", "--p", "3",
            "--out", dir.join("inst").to_str().unwrap(),
        ])
        .env("OPNORM_MAX_DIM", "4096")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceed"));
}

#[test]
fn bench_reports_the_iteration_constant() {
    let dir = workdir("bench");
    let _ = dir;
    let out = bin()
        .args(["bench", "--sizes", "4,8", "--seed", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    let runs = v["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 2);
    for run in runs {
        assert_eq!(run["converged"], serde_json::json!(true));
        assert!(run["iteration_constant"].as_f64().unwrap() >= 0.0);
        assert!(run["iterations"].as_u64().unwrap() > 0);
        // The iteration count stays inside the analysis budget.
        assert!(
            (run["iterations"].as_u64().unwrap() as f64)
                <= run["iteration_budget"].as_f64().unwrap()
        );
    }
}

/// The report's key structure is pinned by a golden file.
#[test]
fn report_schema_matches_golden_file() {
    let dir = workdir("golden");
    let input = write(&dir, "diag12.mtx", DIAG12_MM);
    let out = bin()
        .args([
            "compute",
            input.to_str().unwrap(),
            "--p",
            "2",
            "--q",
            "2",
            "--emit-vector",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let got = stdout_json(&out);
    let golden: serde_json::Value = serde_json::from_str(include_str!("golden/compute_report.json")).unwrap();
    assert_eq!(key_paths(&got), key_paths(&golden), "report key structure drifted");

    // No NaN can appear in a report: serde_json would render it as null.
    fn no_nulls_outside_optional(v: &serde_json::Value, path: &str) {
        match v {
            serde_json::Value::Null => {
                let optional = ["restarts", "exhaustive", "manifest"];
                assert!(
                    optional.iter().any(|o| path.ends_with(o)),
                    "unexpected null at {path}"
                );
            }
            serde_json::Value::Object(map) => {
                for (k, val) in map {
                    no_nulls_outside_optional(val, &format!("{path}.{k}"));
                }
            }
            serde_json::Value::Array(items) => {
                for item in items {
                    no_nulls_outside_optional(item, path);
                }
            }
            _ => {}
        }
    }
    no_nulls_outside_optional(&got, "");
}

fn key_paths(v: &serde_json::Value) -> Vec<String> {
    fn walk(v: &serde_json::Value, prefix: &str, out: &mut Vec<String>) {
        if let serde_json::Value::Object(map) = v {
            for (k, val) in map {
                let path = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                out.push(path.clone());
                walk(val, &path, out);
            }
        }
    }
    let mut out = Vec::new();
    walk(v, "", &mut out);
    out.sort();
    out
}
