use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gjfacets::{build, check_two_slope_facet, EpsilonSchedule, Rational};

fn gjfacets(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gjfacets"))
        .args(args)
        .env_remove("GJFACETS_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn construct(dir: &Path, depth: usize) -> String {
    let path = dir.join(format!("psi{depth}.json"));
    let p = path.to_str().unwrap().to_string();
    let o = gjfacets(&["construct", "--alpha", "1/2", "--geometric", "1/2", "1/4", "--depth", &depth.to_string(), "--out", &p]);
    assert!(o.status.success(), "{}", stderr(&o));
    p
}

#[test]
fn construct_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let p = construct(dir.path(), 3);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(json["breakpoints"].as_array().unwrap().len(), 17);
    assert_eq!(json["tags"].as_array().unwrap().len(), 16);

    let o = gjfacets(&["verify", "--function", &p, "--f", "1/2", "--property", "two-slope-facet"]);
    assert_eq!(o.status.code(), Some(0));
    let in_memory = check_two_slope_facet(&build(&EpsilonSchedule::standard(), 3).unwrap(), &Rational::new(1, 2)).unwrap();
    assert_eq!(stdout(&o), in_memory.to_json() + "\n");
}

#[test]
fn output_is_byte_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (pa, pb) = (construct(a.path(), 6), construct(b.path(), 6));
    assert_eq!(fs::read(&pa).unwrap(), fs::read(&pb).unwrap());
    let run = |threads: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_gjfacets"))
            .args(["verify", "--function", &pa, "--f", "1/2"])
            .env("GJFACETS_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success());
        o.stdout
    };
    assert_eq!(run("1"), run("2"));
}

#[test]
fn violated_property_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bumped.json");
    fs::write(&p, r#"{"breakpoints":["0","3/16","5/16","1/2","1"],"values":["0","637/1000","3/8","1","0"]}"#).unwrap();
    let o = gjfacets(&["verify", "--function", p.to_str().unwrap(), "--f", "1/2", "--property", "subadditive"]);
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["holds"], false);
    assert!(!report["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn limit_example() {
    let o = gjfacets(&["limit", "--alpha", "1/2", "--geometric", "1/2", "1/4", "--x", "3/16", "--tol", "1/1000000"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["mode"], "exact");
    assert_eq!(v["value"], "5/8");
    assert_eq!(v["depth"], 1);

    let o = gjfacets(&["limit", "--x", "1/3", "2/3", "--tol", "1/1000"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
}

#[test]
fn input_errors_exit_two() {
    let o = gjfacets(&["construct", "--alpha", "1/2", "--geometric", "1/2", "1/2", "--depth", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("ratio"), "{}", stderr(&o));

    let o = gjfacets(&["limit", "--x", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--x"));

    let o = gjfacets(&["verify", "--function", "/nonexistent/psi.json", "--f", "1/2"]);
    assert_eq!(o.status.code(), Some(2));

    let o = gjfacets(&["limit", "--x", "1/3", "--tol", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("tol"));

    let o = gjfacets(&["limit", "--alpha", "1/2", "--explicit", "1/8", "--x", "1/3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn schedule_file_matches_inline_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    fs::write(&path, r#"{"kind":"explicit","alpha":"1/2","epsilons":["1/8","1/32"]}"#).unwrap();
    let from_file = gjfacets(&["construct", "--schedule", path.to_str().unwrap(), "--depth", "2"]);
    let inline = gjfacets(&["construct", "--alpha", "1/2", "--explicit", "1/8", "1/32", "--depth", "2"]);
    assert!(from_file.status.success());
    assert_eq!(from_file.stdout, inline.stdout);
    let too_deep = gjfacets(&["construct", "--schedule", path.to_str().unwrap(), "--depth", "3"]);
    assert_eq!(too_deep.status.code(), Some(2));
}

#[test]
fn plot_export() {
    let o = gjfacets(&["export", "--kind", "plot", "--depth", "1", "--resolution", "9", "--digits", "3"]);
    let text = stdout(&o);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "x,y");
    assert_eq!(lines.len(), 10);
    assert_eq!(lines[3], "0.250,0.500");
    assert_eq!(lines[4], "0.375,0.583");
    assert_eq!(lines[8], "0.875,0.250");

    let o = gjfacets(&["export", "--kind", "limit-plot", "--resolution", "5", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[2]["y"], "1");
    assert_eq!(v[4]["y"], "0");
}

#[test]
fn evidence_reports() {
    for kind in ["structure", "recursion", "non-pwl", "facet"] {
        let o = gjfacets(&["evidence", "--kind", kind, "--depth", "3"]);
        assert_eq!(o.status.code(), Some(0), "{kind}: {}", stderr(&o));
    }
    let o = gjfacets(&["evidence", "--kind", "facet", "--depth", "3", "--probe", "2/5"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["components"].as_array().unwrap().len(), 3);
}

#[test]
fn eval_from_file_and_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let p = construct(dir.path(), 1);
    let a = gjfacets(&["eval", "--function", &p, "--x", "3/16", "1/4"]);
    let b = gjfacets(&["eval", "--depth", "1", "--x", "3/16", "1/4"]);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v[0]["value"], "5/8");
    assert_eq!(v[1]["value"], "1/2");
}
