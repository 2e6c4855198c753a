//! End-to-end tests of the binary: determinism of reports, the exit-code
//! contract, and the construction pipeline through temporary files.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_splitquiver"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

#[test]
fn verify_is_deterministic_and_exits_zero() {
    let a = run(&["verify", "--suite", "cartan", "--trials", "9", "--seed", "42"]);
    let b = run(&["verify", "--suite", "cartan", "--trials", "9", "--seed", "42"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "same argv and seed must give identical bytes");
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let out = run(&["verify", "--suite", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_changes_sampled_output_but_not_validity() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = stdout_of(&run(&["fixture", "--name", "a3-involution"]));
    let parsed: serde_json::Value = serde_json::from_str(&fixture).unwrap();
    let qpath = dir.path().join("q.json");
    fs::write(&qpath, serde_json::to_string(&parsed["quiver"]).unwrap()).unwrap();
    let sample = |seed: &str| {
        run(&[
            "sample",
            "--quiver",
            qpath.to_str().unwrap(),
            "--v",
            "1,2,1",
            "--w",
            "0,2,0",
            "--seed",
            seed,
        ])
    };
    let a = sample("1");
    let b = sample("1");
    let c = sample("2");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["status"], "ok");
}

#[test]
fn sample_failure_is_a_clean_report() {
    // v too large for the framing: no stable point exists; the command
    // still exits zero with a failure status field.
    let dir = tempfile::tempdir().unwrap();
    let fixture = stdout_of(&run(&["fixture", "--name", "a3-involution"]));
    let parsed: serde_json::Value = serde_json::from_str(&fixture).unwrap();
    let qpath = dir.path().join("q.json");
    fs::write(&qpath, serde_json::to_string(&parsed["quiver"]).unwrap()).unwrap();
    let out = run(&[
        "sample",
        "--quiver",
        qpath.to_str().unwrap(),
        "--v",
        "3,0,3",
        "--w",
        "0,2,0",
        "--seed",
        "1",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "failure");
}

fn write_json(path: &Path, value: &serde_json::Value) {
    fs::write(path, serde_json::to_string(value).unwrap()).unwrap();
}

#[test]
fn fold_embed_classify_phi1_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name);

    // Fold the A3 fixture and check the Cartan transpose on the way.
    let fixture: serde_json::Value =
        serde_json::from_str(&stdout_of(&run(&["fixture", "--name", "a3-involution"]))).unwrap();
    write_json(&p("q.json"), &fixture["quiver"]);
    write_json(&p("a.json"), &fixture["aut"]);
    let fold: serde_json::Value = serde_json::from_str(&stdout_of(&run(&[
        "fold",
        "--quiver",
        p("q.json").to_str().unwrap(),
        "--aut",
        p("a.json").to_str().unwrap(),
    ])))
    .unwrap();
    assert_eq!(fold["transpose_check"], true);
    write_json(&p("dq.json"), &fold["split_quiver"]);

    // Slice fold context and its middle decomposition.
    let ctx = stdout_of(&run(&["fixture", "--name", "ctx:2,2,1,1"]));
    fs::write(p("ctx.json"), &ctx).unwrap();
    let decomps: serde_json::Value =
        serde_json::from_str(&stdout_of(&run(&["decompose", "--ctx", p("ctx.json").to_str().unwrap()])))
            .unwrap();
    assert_eq!(decomps.as_array().unwrap().len(), 3);
    let middle = decomps
        .as_array()
        .unwrap()
        .iter()
        .find(|d| d["vtilde"]["02@0"] == 1 && d["vtilde"]["02@1"] == 1)
        .expect("middle component exists");
    write_json(&p("d.json"), middle);

    // Sample a split-quotient point, embed it, classify it back.
    let sample: serde_json::Value = serde_json::from_str(&stdout_of(&run(&[
        "sample",
        "--quiver",
        p("dq.json").to_str().unwrap(),
        "--v",
        "1,1,1",
        "--w",
        "0,1,1",
        "--seed",
        "11",
        "--field-order",
        "2",
    ])))
    .unwrap();
    assert_eq!(sample["status"], "ok");
    write_json(&p("y.json"), &sample["datum"]);
    let embedded = stdout_of(&run(&[
        "embed",
        "--ctx",
        p("ctx.json").to_str().unwrap(),
        "--decomposition",
        p("d.json").to_str().unwrap(),
        "--adhm",
        p("y.json").to_str().unwrap(),
    ]));
    fs::write(p("x.json"), &embedded).unwrap();
    let classified: serde_json::Value = serde_json::from_str(&stdout_of(&run(&[
        "classify-fixed",
        "--ctx",
        p("ctx.json").to_str().unwrap(),
        "--adhm",
        p("x.json").to_str().unwrap(),
    ])))
    .unwrap();
    assert_eq!(classified["fixed"], true);
    assert_eq!(classified["vtilde"]["vtilde"]["02@0"], 1);

    // The embedded point maps into the slice with a passing theta check.
    let phi: serde_json::Value = serde_json::from_str(&stdout_of(&run(&[
        "phi1",
        "--adhm",
        p("x.json").to_str().unwrap(),
        "--n",
        "2",
        "--k",
        "2",
        "--signature",
        "1,1",
    ])))
    .unwrap();
    assert_eq!(phi["in_slice"], true);
    assert_eq!(phi["theta_check"], true);
    assert_eq!(phi["in_closure"], true);

    // Nonempty report for the same data.
    let ne: serde_json::Value = serde_json::from_str(&stdout_of(&run(&[
        "nonempty", "--n", "2", "--k", "2", "--v", "1,2,1",
    ])))
    .unwrap();
    assert_eq!(ne["nonempty"], true);
    assert_eq!(ne["ell"], 0);
}

#[test]
fn seed_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let fixture: serde_json::Value =
        serde_json::from_str(&stdout_of(&run(&["fixture", "--name", "a3-involution"]))).unwrap();
    let qpath = dir.path().join("q.json");
    write_json(&qpath, &fixture["quiver"]);
    let with_env = bin()
        .args(["sample", "--quiver", qpath.to_str().unwrap(), "--v", "1,2,1", "--w", "0,2,0"])
        .env("SPLITQUIVER_SEED", "9")
        .output()
        .unwrap();
    let with_flag = run(&[
        "sample",
        "--quiver",
        qpath.to_str().unwrap(),
        "--v",
        "1,2,1",
        "--w",
        "0,2,0",
        "--seed",
        "9",
    ]);
    assert_eq!(with_env.stdout, with_flag.stdout);
}
