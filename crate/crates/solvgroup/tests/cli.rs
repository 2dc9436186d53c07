//! Black-box tests of the command-line binary: generation round-trips,
//! report verification, tamper detection, exit codes and byte determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_solvgroup"))
}

fn workdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("solvgroup-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn gen_round_trips_and_is_deterministic() {
    let a = stdout_of(&run(&["gen", "heisenberg-ball", "--radius", "1"]));
    let b = stdout_of(&run(&["gen", "heisenberg-ball", "--radius", "1"]));
    assert_eq!(a, b, "generation must be byte-deterministic");
    let set: solvgroup::GroupSet = serde_json::from_str(&a).unwrap();
    assert_eq!(set.len(), 7);
    let c = stdout_of(&run(&[
        "gen",
        "random-upper-triangular",
        "--n",
        "3",
        "--size",
        "10",
        "--seed",
        "42",
    ]));
    let d = stdout_of(&run(&[
        "gen",
        "random-upper-triangular",
        "--n",
        "3",
        "--size",
        "10",
        "--seed",
        "42",
    ]));
    assert_eq!(c, d, "seeded generation must be reproducible");
    assert_ne!(a, c);
}

#[test]
fn run_reports_verify_and_tampering_is_caught() {
    let dir = workdir();
    let input = dir.join("ball.json");
    let report = dir.join("certify.json");
    assert!(run(&[
        "gen",
        "torsion-diag",
        "--order",
        "4",
        "--output",
        input.to_str().unwrap(),
    ])
    .status
    .success());
    let out = run(&[
        "run",
        "certify",
        "--input",
        input.to_str().unwrap(),
        "--output",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&report).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    // a subgroup is covered by the identity translate alone
    assert_eq!(parsed["payload"]["certificate"]["k_witness"], 1);

    let ok = run(&["verify", report.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("pass"));

    // tamper: claim the square is smaller than it is
    let mut bad: serde_json::Value = parsed.clone();
    let elements = bad["payload"]["a_square"]["elements"]
        .as_array_mut()
        .unwrap();
    elements.pop();
    let bad_path = dir.join("certify-bad.json");
    std::fs::write(&bad_path, serde_json::to_string(&bad).unwrap()).unwrap();
    let fail = run(&["verify", bad_path.to_str().unwrap()]);
    assert_eq!(fail.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&fail.stderr).contains("verification failed"));
}

#[test]
fn deleted_witness_element_is_named() {
    let dir = workdir();
    let input = dir.join("prog.json");
    let report = dir.join("control.json");
    assert!(run(&[
        "gen",
        "corner-progression",
        "--len",
        "4",
        "--n",
        "3",
        "--output",
        input.to_str().unwrap(),
    ])
    .status
    .success());
    let sub = dir.join("sub.json");
    assert!(run(&[
        "gen",
        "corner-progression",
        "--len",
        "2",
        "--n",
        "3",
        "--output",
        sub.to_str().unwrap(),
    ])
    .status
    .success());
    assert!(run(&[
        "run",
        "control",
        "--input",
        input.to_str().unwrap(),
        "--other",
        sub.to_str().unwrap(),
        "--output",
        report.to_str().unwrap(),
    ])
    .status
    .success());
    assert_eq!(run(&["verify", report.to_str().unwrap()]).status.code(), Some(0));
    let mut parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let x = parsed["payload"]["certificate"]["x"]["elements"]
        .as_array_mut()
        .unwrap();
    assert!(x.len() > 1, "need a nontrivial witness to tamper with");
    x.pop();
    let bad_path = dir.join("control-bad.json");
    std::fs::write(&bad_path, serde_json::to_string(&parsed).unwrap()).unwrap();
    let fail = run(&["verify", bad_path.to_str().unwrap()]);
    assert_eq!(fail.status.code(), Some(1));
    let err = String::from_utf8_lossy(&fail.stderr).to_string();
    assert!(err.contains("uncovered element"), "stderr was: {err}");
}

#[test]
fn exit_codes_match_failure_kinds() {
    let dir = workdir();
    // parse failure: 4
    let missing = run(&["run", "stats", "--input", "/does/not/exist.json"]);
    assert_eq!(missing.status.code(), Some(4));
    let garbage = dir.join("garbage.json");
    std::fs::write(&garbage, "{not json").unwrap();
    assert_eq!(
        run(&["run", "stats", "--input", garbage.to_str().unwrap()]).status.code(),
        Some(4)
    );
    // precondition failure: 2 (certify needs a symmetric set)
    let asym = dir.join("asym.json");
    assert!(run(&[
        "gen",
        "random-upper-triangular",
        "--n",
        "2",
        "--size",
        "5",
        "--seed",
        "7",
        "--output",
        asym.to_str().unwrap(),
    ])
    .status
    .success());
    assert_eq!(
        run(&["run", "certify", "--input", asym.to_str().unwrap()]).status.code(),
        Some(2)
    );
    // cap exceeded: 3
    let ball = dir.join("smallball.json");
    assert!(run(&[
        "gen",
        "heisenberg-ball",
        "--radius",
        "1",
        "--output",
        ball.to_str().unwrap(),
    ])
    .status
    .success());
    assert_eq!(
        run(&[
            "run",
            "ball",
            "--input",
            ball.to_str().unwrap(),
            "--radius",
            "9",
            "--cap",
            "100",
        ])
        .status
        .code(),
        Some(3)
    );
}

#[test]
fn sumproduct_inline_sets() {
    let out = stdout_of(&run(&["run", "sumproduct", "--u", "1,2", "--v", "1,2", "--w", "1,2"]));
    let parsed: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(parsed["payload"]["report"]["squared_ratio"]["num"], "81");
    assert_eq!(parsed["payload"]["report"]["squared_ratio"]["den"], "32");
    assert_eq!(parsed["manifest"]["command"], "sumproduct");
}

#[test]
fn jordan_single_matrix_report() {
    let dir = workdir();
    let input = dir.join("one.json");
    std::fs::write(
        &input,
        r#"{"n":2,"elements":[{"n":2,"rows":[[["2","1","0","1"],["1","1","0","1"]],[["0","1","0","1"],["2","1","0","1"]]]}]}"#,
    )
    .unwrap();
    let out = stdout_of(&run(&["run", "jordan", "--input", input.to_str().unwrap()]));
    let report = dir.join("jordan.json");
    std::fs::write(&report, &out).unwrap();
    assert_eq!(run(&["verify", report.to_str().unwrap()]).status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&out).unwrap();
    // [[2,1],[0,2]] splits as 2*id times a unipotent with corner 1/2
    assert_eq!(parsed["payload"]["unipotent"]["rows"][0][1][0], "1");
    assert_eq!(parsed["payload"]["unipotent"]["rows"][0][1][1], "2");
}
