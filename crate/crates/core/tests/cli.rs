use std::path::PathBuf;
use std::process::Command;

use superthick::cli::run;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn sh(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_superthick"))
        .args(args)
        .env_remove("SUPERTHICK_WINDOW")
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn lib(args: &[&str]) -> superthick::cli::Outcome {
    run(std::iter::once("superthick").chain(args.iter().copied()))
}

#[test]
fn bott_prints_dimension() {
    let (code, out, _) = sh(&["bott", "--n", "2", "--p", "1", "--q", "1", "--k", "0"]);
    assert_eq!((code, out.trim()), (0, "1"));
    let (code, out, _) = sh(&["bott", "--n", "2", "--p", "0", "--q", "2", "--k", "-4"]);
    assert_eq!((code, out.trim()), (0, "3"));
}

#[test]
fn lemma_json_is_canonical() {
    let a = lib(&["check-lemma71", "--degrees", "3,0,-6", "--json"]);
    let b = lib(&["check-lemma71", "--degrees", "3,0,-6", "--json"]);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&a.stdout).unwrap();
    for c in ["c1", "c2", "c3"] {
        assert_eq!(v["outputs"]["direct"][c]["holds"], true);
    }
    assert!(!a.stdout.contains("timing_ms"));
    let t = lib(&["check-lemma71", "--degrees", "3,0,-6", "--json", "--timing"]);
    assert!(t.stdout.contains("timing_ms"));
}

#[test]
fn verify_exit_codes() {
    let f = fixture("split_model_p2.json");
    let (code, out, _) = sh(&["verify", "--file", f.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("all residuals zero"));

    let text = std::fs::read_to_string(&f).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let extra = serde_json::json!({"indices": [1, 2], "coef": [{"exps": [0, 1], "coef": "1"}]});
    v["maps"]["0,1"]["even"][0]["terms"].as_array_mut().unwrap().push(extra);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    let o = lib(&["verify", "--file", bad.to_str().unwrap(), "--json"]);
    assert_eq!(o.code, 1);
    let r: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(r["outputs"]["valid"], false);
    assert_eq!(lib(&["gamma", "--file", bad.to_str().unwrap()]).code, 1);
    assert_eq!(lib(&["gamma", "--file", f.to_str().unwrap()]).code, 0);

    v["maps"]["0,1"]["odd"][1]["terms"][0]["coef"][0]["coef"] = serde_json::json!("x/2");
    std::fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    let o = lib(&["verify", "--file", bad.to_str().unwrap()]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("$.maps.0,1.odd[1].terms[0].coef[0].coef"), "{}", o.stderr);
    assert_eq!(lib(&["verify", "--file", "/nonexistent.json"]).code, 2);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(lib(&["bott", "--n", "2"]).code, 2);
    assert_eq!(lib(&["frobnicate"]).code, 2);
    assert_eq!(lib(&["check-lemma71", "--degrees", "1,2"]).code, 2);
    assert_eq!(lib(&["check-lemma71", "--degrees", "1,a,2"]).code, 2);
    assert_eq!(lib(&["sufficient-l", "--k-prime", "0"]).code, 2);
    assert_eq!(lib(&["cohomology", "--n", "3", "--twists", "0", "--q", "0"]).code, 2);
    assert_eq!(lib(&["search", "--window", "3,1"]).code, 2);
    assert_eq!(lib(&["gamma"]).code, 2);
    assert_eq!(lib(&["--help"]).code, 0);
}

#[test]
fn window_environment_variable() {
    let run_env = |val: &str| {
        Command::new(env!("CARGO_BIN_EXE_superthick"))
            .args(["cohomology", "--n", "2", "--sheaf", "tangent", "--twists", "-3", "--q", "1", "--json"])
            .env("SUPERTHICK_WINDOW", val)
            .output()
            .unwrap()
    };
    let ok = run_env("-6,6");
    assert_eq!(ok.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["inputs"]["window"], serde_json::json!([-6, 6]));
    assert_eq!(v["outputs"]["dim"], 1);
    assert_eq!(run_env("nonsense").status.code(), Some(2));
    // Too narrow to see the class: reported as an error, not a wrong dimension.
    assert_eq!(run_env("0,0").status.code(), Some(1));
}

#[test]
fn pushforward_and_threshold() {
    let o = lib(&["pushforward", "--degrees", "0,0,0"]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.contains("refused"));
    let o = lib(&["pushforward", "--degrees", "3,0,-6", "--n", "1"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("vacuously unobstructed"));
    let o = lib(&["pushforward", "--degrees", "4,-1,-7", "--json"]);
    assert_eq!(o.code, 0);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["outputs"]["verdict"], "obstructed thickening exhibited");
    assert_eq!(v["exact"], true);

    let o = lib(&["sufficient-l", "--k-prime", "-3", "--l", "0", "--json"]);
    assert_eq!(o.code, 0);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["outputs"]["l0"], -2);
    assert_eq!(v["outputs"]["at"]["provable"], false);
}

#[test]
fn search_and_random_gamma() {
    let o = lib(&["search", "--window", "-8,8", "--json"]);
    assert_eq!(o.code, 0);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    let triples = v["outputs"]["triples"].as_array().unwrap();
    assert!(triples.iter().any(|t| t["degrees"] == serde_json::json!([3, 0, -6])));
    assert_eq!(lib(&["search", "--window", "0,2"]).code, 0);

    let a = lib(&["gamma", "--random", "4", "--seed", "2", "--json"]);
    let b = lib(&["gamma", "--random", "4", "--seed", "2", "--json"]);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
}
