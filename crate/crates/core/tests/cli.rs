use std::path::PathBuf;
use std::process::{Command, Output};

use qgroup::format::{emit_quantum_group, parse_quantum_group};
use qgroup::linalg::c;
use qgroup::report::Report;

fn qg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qg"))
        .args(args)
        .env_remove("QG_TOL")
        .output()
        .unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn report_on_cs3_lists_expected_irreps() {
    let o = qg(&["report", &data("c_s3.qg"), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = Report::from_json(&stdout(&o)).unwrap();
    let rows: Vec<(usize, usize)> = r.irreps.iter().map(|x| (x.d, x.multiplicity)).collect();
    assert_eq!(rows, vec![(1, 1), (1, 1), (2, 2)]);
    assert_eq!(r.seed, 42);
    assert_eq!(r.tol, "1.0000000000000001e-9");
    assert!(r.conventions.contains_key("fourier"));
}

#[test]
fn emitted_kac_paljutkin_reports_clean() {
    let path = scratch("kp8.qg");
    let p = path.to_str().unwrap();
    assert_eq!(
        qg(&["example", "kac_paljutkin", "--emit", p]).status.code(),
        Some(0)
    );
    let o = qg(&["report", p]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS"));
}

#[test]
fn perturbed_file_fails_validation() {
    let text = std::fs::read_to_string(data("c_z3.qg")).unwrap();
    let g = parse_quantum_group(&text).unwrap();
    let mut delta = g.delta().clone();
    delta[(1, 2)] += c(0.5, 0.0);
    let path = scratch("perturbed.qg");
    std::fs::write(&path, emit_quantum_group(&g.with_delta(delta).unwrap())).unwrap();
    let o = qg(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stdout(&o).contains("CoassociativityViolation"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn malformed_files_exit_with_two() {
    let path = scratch("broken.qg");
    std::fs::write(
        &path,
        "{\"dim\": 2, \"blocks\": [1, 1], \"delta\": [[1, \"x\"]]}",
    )
    .unwrap();
    let o = qg(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("delta"));

    std::fs::write(&path, "{\"dim\": 2, \"blocks\": [1], \"delta\": []}").unwrap();
    assert_eq!(qg(&["haar", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(
        qg(&["report", "/nonexistent/file.qg"]).status.code(),
        Some(2)
    );
}

#[test]
fn tolerance_from_environment_and_flag() {
    let file = data("c_z2.qg");
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_qg"));
        cmd.args(["haar", &file, "--json"]).env_remove("QG_TOL");
        if let Some(v) = env {
            cmd.env("QG_TOL", v);
        }
        if let Some(v) = flag {
            cmd.args(["--tol", v]);
        }
        Report::from_json(&stdout(&cmd.output().unwrap()))
            .unwrap()
            .tol
    };
    assert_eq!(run(Some("1e-7"), None), "9.9999999999999995e-8");
    assert_eq!(run(Some("1e-7"), Some("1e-6")), "9.9999999999999995e-7");
}

#[test]
fn cayley_table_examples() {
    let out = scratch("s3_group.qg");
    let o = qg(&[
        "example",
        "--cayley",
        &data("s3.cayley.json"),
        "--kind",
        "group",
        "--emit",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = qg(&["decompose", out.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = Report::from_json(&stdout(&o)).unwrap();
    assert_eq!(r.irreps.len(), 6);
    assert!(!r.residuals.contains_key("orthogonality"));

    assert_eq!(qg(&["example", "no_such_group"]).status.code(), Some(2));
}

#[test]
fn orthogonality_subcommand_reports_both_normalizations() {
    let o = qg(&["orthogonality", &data("c_s3.qg"), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = Report::from_json(&stdout(&o)).unwrap();
    assert!(r.residual_value("orthogonality", "family3").unwrap() < 1e-9);
    let stated = r
        .residual_value("orthogonality", "family3_as_stated")
        .unwrap();
    assert!((stated - 0.5).abs() < 1e-9);
}
