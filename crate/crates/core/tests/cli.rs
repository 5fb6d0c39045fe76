//! The `gentrig` binary end to end.

use std::process::{Command, Output};

fn gentrig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gentrig"))
        .args(args)
        .env_remove("GENTRIG_TOL")
        .output()
        .expect("run gentrig")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn constants_json_keys() {
    let o = gentrig(&["constants", "--n", "4", "--k", "2", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["phi"].as_f64().unwrap() - 1.3110287771).abs() < 1e-10);
    for key in ["n", "k", "tail", "axis", "P", "err"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(gentrig(&["eval-s", "--n", "4", "--k", "2", "--re", "10", "--im", "0"]).status.code(), Some(1));
    assert_eq!(gentrig(&["eval-s", "--n", "4", "--k", "2", "--re", "x", "--im", "0"]).status.code(), Some(2));
    assert_eq!(gentrig(&["check", "--n", "4", "--k", "2"]).status.code(), Some(2));
    assert_eq!(gentrig(&["check", "--suite", "pole", "--n", "4", "--k", "2"]).status.code(), Some(2));
    assert_eq!(gentrig(&["check", "--suite", "radius", "--n", "8", "--k", "3", "--order", "100"]).status.code(), Some(2));
    assert_eq!(gentrig(&["check", "--suite", "periodicity", "--n", "2", "--k", "1", "--samples", "20"]).status.code(), Some(0));
    let o = gentrig(&["eval-s", "--n", "4", "--k", "2", "--re", "-0.5", "--im", "0.25"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn check_identities_prints_pass_lines() {
    let o = gentrig(&["check", "--suite", "identities", "--n", "5", "--k", "3"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.lines().next().unwrap().contains("seed=42"));
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 2);
}

#[test]
fn grid_is_deterministic_and_complete() {
    let args = [
        "grid", "--n", "3", "--k", "2", "--csv", "--re-min", "-2", "--re-max", "2", "--im-min", "-2", "--im-max", "2", "--nx",
        "7", "--ny", "5",
    ];
    let a = gentrig(&args);
    let mut seq = args.to_vec();
    seq.push("--sequential");
    let b = gentrig(&seq);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 1 + 35);
}

#[test]
fn out_file_and_tolerance_sources() {
    let dir = std::env::temp_dir().join(format!("gentrig-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("series.csv");
    let o = gentrig(&["series", "--n", "4", "--k", "2", "--order", "9", "--csv", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().nth(2).unwrap().starts_with("1,5,-1.0000000000000001e-1"));

    let cfg = dir.join("eval.toml");
    std::fs::write(&cfg, "newton_tol = 1e-11\n[quad]\nabs_tol = 1e-13\n").unwrap();
    let o = gentrig(&["eval-s", "--n", "3", "--k", "2", "--re", "0.5", "--im", "0.1", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let o = Command::new(env!("CARGO_BIN_EXE_gentrig"))
        .args(["eval-s", "--n", "3", "--k", "2", "--re", "0.5", "--im", "0.1"])
        .env("GENTRIG_TOL", "-3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn domain_export() {
    let o = gentrig(&["domain", "--n", "4", "--k", "3", "--csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("vertex")).count(), 8);
    let o = gentrig(&["domain", "--n", "3", "--k", "1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["region"]["kind"], "K_EQUALS_1");
    assert_eq!(v["omega_boundary"]["rays"].as_array().unwrap().len(), 6);
}
