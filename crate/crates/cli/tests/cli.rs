use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_besicover"));
    c.env_remove("BESICOVER_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("besicover-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn gallery_discrete() {
    let out = run(&["gallery", "--case", "discrete", "--N", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    assert_eq!(v["result"]["all_pass"], true);
    let checks = v["result"]["cases"][0]["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["detail"] == "D = 7 for n = 7"));
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn gallery_all_writes_json_file() {
    let path = tmp("gallery.json");
    let out = run(&["gallery", "--case", "all", "--N", "6", "--json", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(file, report(&out));
    assert_eq!(file["result"]["cases"].as_array().unwrap().len(), 5);
}

#[test]
fn gallery_bad_case_and_precondition() {
    assert_eq!(run(&["gallery", "--case", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["gallery", "--case", "counter07", "--N", "3"]).status.code(), Some(2));
}

#[test]
fn lattice_doubling_constants() {
    for (kind, want) in [("open", 3), ("closed", 3)] {
        let out = run(&["doubling", "--gen", "lattice:1:21:linf", "--kind", kind]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(report(&out)["result"]["D"], want, "{kind}");
    }
    let out = run(&["doubling", "--gen", "lattice:1:21:linf", "--kind", "closed", "--radii", "lattice"]);
    assert_eq!(report(&out)["result"]["D"], 2);
    let out = run(&["doubling", "--gen", "zero_one:5", "--method", "greedy", "--per-ball"]);
    let v = report(&out);
    assert_eq!(v["result"]["D"], 5);
    assert!(v["result"]["per_ball"].as_array().is_some());
}

#[test]
fn validate_reports_triangle_witness() {
    let path = tmp("bad.json");
    std::fs::write(
        &path,
        r#"{"labels":["a","b","c"],"dist":[["0","1","5"],["1","0","1"],["5","1","0"]]}"#,
    )
    .unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = report(&out);
    assert_eq!(v["result"]["valid"], false);
    assert_eq!(v["result"]["witness"]["violation"], "triangle");
    assert_eq!(v["result"]["witness"]["via"], 1);
}

#[test]
fn validate_good_space_embeds_hash() {
    let path = tmp("x5.json");
    let gen = run(&["generate", "--gen", "paper_ultra:5", "-o", path.to_str().unwrap()]);
    assert_eq!(gen.status.code(), Some(0));
    let a = report(&run(&["validate", path.to_str().unwrap()]));
    let b = report(&run(&["validate", "--gen", "paper_ultra:5"]));
    assert_eq!(a["result"]["valid"], true);
    assert_eq!(a["space_hash"].as_str().unwrap().len(), 64);
    assert_eq!(a["space_hash"], b["space_hash"]);
}

#[test]
fn parse_errors_exit_2() {
    let path = tmp("garbage.json");
    std::fs::write(&path, "{ not json").unwrap();
    assert_eq!(run(&["validate", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["validate", "/definitely/missing.json"]).status.code(), Some(2));
    assert_eq!(run(&["doubling", "--gen", "lattice:1:21"]).status.code(), Some(2));
    assert_eq!(run(&["nets", "--gen", "zero_one:3", "--r", "one"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["doubling"]).status.code(), Some(2));
}

#[test]
fn nets_on_nested_ultrametric() {
    let v = report(&run(&["nets", "--gen", "paper_ultra:9", "--r", "1/2", "--strict"]));
    assert_eq!(v["result"]["net"]["points"], serde_json::json!([0, 2, 3, 4, 5, 6, 7, 8]));
    assert_eq!(v["result"]["valid"], true);
}

#[test]
fn besicovitch_constant_of_grid() {
    let v = report(&run(&["besicovitch", "--gen", "grid_square:5", "--kind", "closed"]));
    assert_eq!(v["result"]["L"], 2);
    let v = report(&run(&["besicovitch", "--gen", "paper_ultra:12"]));
    assert_eq!(v["result"]["L"], 1);
}

#[test]
fn cover_commands() {
    let base = ["--gen", "lattice:1:21:linf", "--radii", "1/5,1/2,1", "--per-point", "2"];
    let out = run(&[&["cover", "besicovitch"], &base[..], &["--known-l", "2", "--known-c", "27"]].concat());
    assert_eq!(out.status.code(), Some(0));
    assert!(report(&out)["result"]["overlap"]["max_overlap"].as_u64().unwrap() <= 54);

    let out = run(&[&["cover", "rearrange"], &base[..], &["--known-l", "2", "--known-d", "3"]].concat());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["within_bound"], true);

    let out = run(&[&["cover", "localized"], &base[..], &["--known-d", "3"]].concat());
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["cover", "equal-radius", "--gen", "paper_ultra:10", "--r", "1/2"]);
    assert_eq!(report(&out)["result"]["m"], 1);

    // a bound of 0 families cannot be met
    let out = run(&[&["cover", "localized"], &base[..], &["--known-d", "0"]].concat());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn family_file_input() {
    let path = tmp("family.json");
    std::fs::write(
        &path,
        r#"{"kind":"closed","balls":[{"center":0,"radius":"1/2"},{"center":3,"radius":"1"}]}"#,
    )
    .unwrap();
    let out = run(&["cover", "besicovitch", "--gen", "lattice:1:9:linf", "--family", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::write(&path, r#"{"kind":"closed","balls":[{"center":99,"radius":"1"}]}"#).unwrap();
    let out = run(&["cover", "besicovitch", "--gen", "lattice:1:9:linf", "--family", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn same_argv_same_bytes() {
    let args = [
        "cover", "localized", "--gen", "lattice:2:5:linf", "--radii", "1/10,1/5,2/5", "--set", "random:0.5",
        "--seed", "11", "--per-point", "3",
    ];
    let a = run(&args);
    let b = bin().args(args).env("BESICOVER_THREADS", "1").output().unwrap();
    let c = run(&[&args[..], &["--threads", "3"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let other = run(&[&args[..9], &["--seed", "12"]].concat());
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn zero_threads_rejected() {
    assert_eq!(run(&["--threads", "0", "gallery", "--case", "discrete"]).status.code(), Some(2));
}
