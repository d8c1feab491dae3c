use std::path::Path;
use std::process::{Command, Output};

use homstab_cli::{ExperimentResult, Value};

fn homstab(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_homstab"));
    cmd.args(args).env_remove("HOMSTAB_CACHE_DIR");
    match cache {
        Some(dir) => cmd.env("HOMSTAB_CACHE_DIR", dir),
        None => cmd.arg("--no-cache"),
    };
    cmd.output().expect("binary runs")
}

fn json(args: &[&str]) -> (ExperimentResult, i32) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = homstab(&full, None);
    let text = String::from_utf8(out.stdout).unwrap();
    (ExperimentResult::from_json(&text).unwrap_or_else(|e| panic!("{e}: {text}")), out.status.code().unwrap())
}

fn values_at(r: &ExperimentResult, i: i64) -> Vec<Value> {
    r.results.iter().filter(|x| x.i == Some(i) && x.n.is_some()).map(|x| x.value.clone()).collect()
}

#[test]
fn injwords_five() {
    let (r, code) = json(&["injwords", "5"]);
    assert_eq!(code, 0);
    assert_eq!(r.experiment, "injwords");
    let top: Vec<Value> = (0..5).flat_map(|i| values_at(&r, i)).collect();
    assert_eq!(top, [0usize, 0, 0, 0, 44].map(Value::from));
}

#[test]
fn out_of_range_is_an_error() {
    let out = homstab(&["injwords", "99"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("out of range"));
    assert_eq!(homstab(&["sphere-h1", "1"], None).status.code(), Some(2));
    assert_eq!(homstab(&["tau", "1"], None).status.code(), Some(2));
}

#[test]
fn braid_table_csv() {
    let out = homstab(&["braid-table", "--n-max", "6", "--deg-max", "2", "--format", "csv"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("i,n,value"));
    let row1: Vec<&str> = text
        .lines()
        .map(|l| l.split(',').collect::<Vec<_>>())
        .filter(|f| f[0] == "1" && !f[1].is_empty())
        .map(|f| f[2])
        .collect();
    assert_eq!(row1, ["0", "1", "1", "1", "1", "1"]);
}

#[test]
fn sphere_tau_dold_halfsmash() {
    let (r, code) = json(&["sphere-h1", "12"]);
    assert_eq!((code, r.results[0].value.clone()), (0, Value::from("Z/22")));
    let (r, _) = json(&["sphere-h1", "5", "--char", "3"]);
    assert_eq!(r.results[0].value, Value::from(0usize));
    let (r, code) = json(&["tau", "6"]);
    assert_eq!(code, 0);
    assert!(r.results.iter().any(|x| x.value == Value::from("index 2")));
    let (r, code) = json(&["dold", "--seed", "7", "--len", "5", "--dims", "1,2,0,3"]);
    assert_eq!(code, 0);
    assert!(r.passed());
    let (r, code) = json(&["halfsmash", "3"]);
    assert_eq!(code, 0);
    assert_eq!(r.results.iter().filter(|x| x.i.is_some_and(|i| i <= 2)).count(), 3);
}

#[test]
fn cache_env_and_flag() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let first = homstab(&["tau", "4", "--format", "json"], Some(env_dir.path()));
    assert!(first.status.success());
    assert_eq!(std::fs::read_dir(env_dir.path()).unwrap().count(), 1);
    let again = homstab(&["tau", "4", "--format", "json"], Some(env_dir.path()));
    assert_eq!(first.stdout, again.stdout, "cached result is replayed verbatim");

    let flag = flag_dir.path().to_str().unwrap();
    homstab(&["tau", "5", "--cache-dir", flag], Some(env_dir.path()));
    assert_eq!(std::fs::read_dir(flag_dir.path()).unwrap().count(), 1);
    assert_eq!(std::fs::read_dir(env_dir.path()).unwrap().count(), 1);

    let mut cmd = Command::new(env!("CARGO_BIN_EXE_homstab"));
    cmd.args(["tau", "6", "--no-cache"]).env("HOMSTAB_CACHE_DIR", env_dir.path());
    assert!(cmd.output().unwrap().status.success());
    assert_eq!(std::fs::read_dir(env_dir.path()).unwrap().count(), 1);
}

#[test]
fn jobs_do_not_change_results() {
    let strip = |mut r: ExperimentResult| {
        r.wall_ms = 0;
        r
    };
    let (one, _) = json(&["braid-table", "--n-max", "9", "--deg-max", "4", "--jobs", "1"]);
    let (four, _) = json(&["braid-table", "--n-max", "9", "--deg-max", "4", "--jobs", "4"]);
    assert_eq!(strip(one), strip(four));
}

#[test]
fn verify_all_small() {
    let out = homstab(&["verify-all", "--scale", "small"], None);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS ")).count(), 7);
}
