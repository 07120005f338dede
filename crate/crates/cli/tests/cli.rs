use std::path::Path;
use std::process::{Command, Output};

fn parker(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parker"))
        .args(args)
        .env_remove("PARKER_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn field_29_json_lists_two_tuples() {
    let o = parker(&["field", "29", "--list", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["tuple_count"], 2);
    assert_eq!(v["parker"], false);
    let tuples = v["tuples"].as_array().unwrap();
    assert_eq!(tuples.len(), 2);
    assert!(tuples.iter().all(|t| t.as_array().unwrap().len() == 9));
}

#[test]
fn extension_field_elements_are_coefficient_arrays() {
    let o = parker(&["field", "49", "--list", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["modulus_poly"].as_array().unwrap().len(), 3);
    for t in v["tuples"].as_array().unwrap() {
        for cell in t.as_array().unwrap() {
            assert_eq!(cell.as_array().unwrap().len(), 2);
        }
    }
}

#[test]
fn ring_27_is_first_non_parker() {
    let o = parker(&["ring", "27", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["tuple_count"], 3);
    assert_eq!(v["kind"], "ring");
}

#[test]
fn verify_parker_square_fails_with_one_bad_diagonal() {
    let o = parker(&["verify", &data("parker_square.json"), "--json"]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let sums: Vec<u64> = v["line_sums"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap())
        .collect();
    assert_eq!(sums.iter().filter(|&&s| s == 3051).count(), 7);
    assert_eq!(sums.iter().filter(|&&s| s == 4107).count(), 1);
    assert_eq!(v["is_magic_square_of_squares"], false);
}

#[test]
fn verify_accepts_a_field_square() {
    let o = parker(&["verify", &data("f29_square.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("magic square of squares: yes"));
}

#[test]
fn verify_extension_field_cells() {
    let o = parker(&["verify", &data("f9_array.json")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"carrier":{"kind":"field","order":7},"cells":[1,2,3]}"#,
    )
    .unwrap();
    assert_eq!(
        parker(&["verify", bad.to_str().unwrap()]).status.code(),
        Some(1)
    );
    std::fs::write(
        &bad,
        r#"{"carrier":{"kind":"field","order":7},"cells":[1,2,3,4,5,6,7,8,9]}"#,
    )
    .unwrap();
    assert_eq!(
        parker(&["verify", bad.to_str().unwrap()]).status.code(),
        Some(1)
    );
    assert_eq!(
        parker(&["verify", "/nonexistent/square.json"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn congruum_and_chi() {
    assert_eq!(
        stdout(&parker(&["congruum", "3", "2", "1"])),
        "r=17 s=13 t=-7 congruum=120\n"
    );
    assert_eq!(stdout(&parker(&["chi", "2", "1"])), "r=7 s=5 t=-1\n");
    assert_eq!(stdout(&parker(&["chi", "-2", "1"])), "r=-1 s=5 t=7\n");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(parker(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(parker(&["field"]).status.code(), Some(1));
    assert_eq!(parker(&["field", "12"]).status.code(), Some(1));
    assert_eq!(
        parker(&["field", "29", "--policy", "sideways"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        parker(&["scan-fields", "--from", "9", "--to", "3"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        parker(&[
            "scan-rings",
            "--from",
            "2",
            "--to",
            "9",
            "--odd",
            "--mod",
            "4",
            "--res",
            "1"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        parker(&[
            "scan-rings",
            "--from",
            "2",
            "--to",
            "9",
            "--mod",
            "4",
            "--res",
            "4"
        ])
        .status
        .code(),
        Some(1)
    );
    let help = parker(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("scan-fields"));
}

#[test]
fn scan_output_is_deterministic_across_job_counts() {
    let run = |jobs: &str| {
        let o = parker(&[
            "scan-fields",
            "--from",
            "2",
            "--to",
            "60",
            "--jobs",
            jobs,
            "--no-timings",
        ]);
        assert_eq!(o.status.code(), Some(0));
        o.stdout
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    let text = String::from_utf8(one).unwrap();
    let non_parker: Vec<&str> = text
        .lines()
        .skip(1)
        .filter(|l| l.split(',').nth(5) == Some("false"))
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(non_parker.first(), Some(&"29"));
}

#[test]
fn scan_rings_writes_requested_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rings.jsonl");
    let o = parker(&[
        "scan-rings",
        "--from",
        "2",
        "--to",
        "30",
        "--format",
        "jsonl",
        "--out",
        out.to_str().unwrap(),
        "--no-timings",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let lines: Vec<serde_json::Value> = std::fs::read_to_string(&out)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 29);
    let first = lines.iter().find(|v| v["parker"] == false).unwrap();
    assert_eq!(first["order"], 27);
    assert_eq!(first["msos_count"], 3);
}

#[test]
fn scan_jobs_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_parker"))
        .args(["scan-rings", "--from", "2", "--to", "12", "--no-timings"])
        .env("PARKER_JOBS", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = Command::new(env!("CARGO_BIN_EXE_parker"))
        .args(["scan-rings", "--from", "2", "--to", "12"])
        .env("PARKER_JOBS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn checkpointed_scan_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("ck.jsonl");
    let args = |to: &str| {
        vec![
            "scan-fields".to_string(),
            "--from".into(),
            "2".into(),
            "--to".into(),
            to.into(),
            "--checkpoint".into(),
            ck.to_string_lossy().into_owned(),
            "--no-timings".into(),
        ]
    };
    let a: Vec<String> = args("40");
    let first = parker(&a.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(first.status.code(), Some(0));
    let b: Vec<String> = args("80");
    let resumed = parker(&b.iter().map(String::as_str).collect::<Vec<_>>());
    let fresh = parker(&["scan-fields", "--from", "2", "--to", "80", "--no-timings"]);
    assert_eq!(resumed.stdout, fresh.stdout);
}

#[test]
fn hourglass_small_search_is_empty() {
    let o = parker(&["hourglass", "--mode", "exhaustive", "--max-norm", "50"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let o = parker(&[
        "hourglass",
        "--mode",
        "product-first",
        "--max-norm",
        "5000",
        "--report-every",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("triples tested"));
}
