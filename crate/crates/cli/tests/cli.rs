use std::path::PathBuf;
use std::process::{Command, Output};

use hasse_mw_cli::instance::InstanceFile;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hasse-mw")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn results(args: &[&str]) -> Value {
    let out = run(args);
    let report: Value = serde_json::from_slice(&out.stdout).expect("JSON report");
    assert_eq!(report["schema_version"], 1);
    report["results"].clone()
}

fn path(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

#[test]
fn qform_examples() {
    let r = results(&["qform", "--coeffs", "1", "1", "-2"]);
    assert_eq!(r["global"], true);
    assert_eq!(r["witness"], serde_json::json!([1, 1, 1]));

    let r = results(&["qform", "--coeffs", "1", "1", "1"]);
    assert_eq!(r["global"], false);
    assert_eq!(r["failing_places"], serde_json::json!(["inf", 2]));

    assert_eq!(code(&["qform", "--coeffs", "1", "0", "-2"]), 2);
    assert_eq!(code(&["qform", "--coeffs", "1"]), 2);
}

#[test]
fn decide_exit_codes() {
    let r = results(&["decide", &path("r2_sunits_2_1o16.json")]);
    assert_eq!(r["witness"], serde_json::json!([2, 1]));
    assert_eq!(code(&["decide", &path("r2_sunits_2_1o16.json")]), 0);
    assert_eq!(code(&["decide", &path("r2_sunits_2_1o8.json")]), 3);
    assert_eq!(code(&["decide", &path("r2_e37_p_m4p.json")]), 0);
    assert_eq!(code(&["decide", &path("r3_e37_p_2p_3p.json")]), 3);
    for bad in ["bad_torsion_point.json", "bad_off_curve.json", "bad_unsupported.json", "missing.json"] {
        assert_eq!(code(&["decide", &path(bad)]), 2, "{bad}");
    }
    assert_eq!(code(&["decide", &path("r1_e37_p.json")]), 2);
}

#[test]
fn uncertified_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("far.json");
    // Q = -21P: the relation 21P + Q = 0 is beyond a search bound of 5
    let q = r#"["7396151584/6941055969", "231906636260092/578280195945297"]"#;
    std::fs::write(
        &file,
        format!(r#"{{"backend": "elliptic", "A": -16, "B": 16, "points": [["0", "4"], {q}], "search_bound": 5}}"#),
    )
    .unwrap();
    let file = file.to_string_lossy().into_owned();
    assert_eq!(code(&["decide", &file]), 4);
    assert_eq!(code(&["scan", &file, "--pmax", "200"]), 4);
    assert_eq!(results(&["scan", &file, "--pmax", "200"])["verdict"], "not_asserted");
}

#[test]
fn scan_exit_codes_and_outputs() {
    let r = results(&["scan", &path("r2_sunits_2_1o16.json"), "--pmax", "10000"]);
    assert_eq!(r["failing_fraction"], "0/1");
    assert_eq!(r["verdict"], "consistent");
    let r = results(&["scan", &path("r2_sunits_2_1o8.json"), "--pmax", "10000"]);
    assert!(r["failing_fraction_value"].as_f64().unwrap() > 0.0);
    assert_eq!(code(&["scan", &path("r2_sunits_2_1o8.json"), "--pmax", "10000"]), 0);
    assert_eq!(code(&["scan", &path("r2_e37_p_m4p.json"), "--pmax", "1000000000"]), 2);
    assert_eq!(code(&["scan", &path("r2_e37_p_m4p.json"), "--pmin", "100", "--pmax", "10"]), 2);

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let status = run(&["scan", &path("r2_e37_p_m4p.json"), "--pmax", "300", "--out", out.to_str().unwrap()]);
    assert_eq!(status.status.code(), Some(0));
    assert!(status.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["command"]["name"], "scan");
    assert!(report.get("timing").is_none());
    let places: Vec<u64> =
        report["results"]["excluded_places"].as_array().unwrap().iter().map(|e| e["place"].as_u64().unwrap()).collect();
    assert_eq!(places, vec![2, 3, 37]);
}

#[test]
fn scan_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for jobs in ["1", "4", "1"] {
        let out = dir.path().join(format!("r{}.json", reports.len()));
        let args = ["scan", &path("r3_sunits_2_3_1o12.json"), "--pmax", "3000", "--jobs", jobs, "--out"];
        let mut args: Vec<&str> = args.to_vec();
        let out_str = out.to_string_lossy().into_owned();
        args.push(&out_str);
        assert_eq!(code(&args), 0);
        reports.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[0], reports[2]);

    let timed = run(&["scan", &path("r2_sunits_2_1o16.json"), "--pmax", "100", "--timing"]);
    let report: Value = serde_json::from_slice(&timed.stdout).unwrap();
    assert!(report["timing"]["elapsed_ms"].is_u64());
}

#[test]
fn counterexample_command() {
    let r = results(&["counterexample", &path("r1_e37_p.json"), "--n", "4", "--prime", "5"]);
    let c = &r["counterexamples"][0];
    assert_eq!(c["coefficient"], 16);
    assert_eq!(c["vector"][3], 1);
    assert_eq!(r["positive_definite_check"]["confirmed"], true);
    assert_eq!(code(&["counterexample", &path("r1_e37_p.json"), "--n", "3", "--prime", "5"]), 2);
    let r = results(&["counterexample", &path("r1_e37_p.json"), "--n", "5", "--pmax", "500"]);
    assert_eq!(r["places"], r["verified"]);
    assert!(r["places"].as_u64().unwrap() > 80);
    assert_eq!(code(&["counterexample", &path("r2_e37_p_m4p.json"), "--n", "4", "--prime", "5"]), 2);
}

#[test]
fn probe_command() {
    let r = results(&["probe", &path("r2_sunits_2_3.json"), "--assumption", "1", "--l", "2", "--pattern", "1,0"]);
    let f = r["frequency_value"].as_f64().unwrap();
    assert!(f > 0.0 && f < 1.0);
    let r = results(&["probe", &path("r1_sunits_2.json"), "--assumption", "2"]);
    assert_eq!(r["failing_places"], serde_json::json!([]));
    assert_eq!(
        code(&["probe", &path("r2_sunits_2_3.json"), "--assumption", "1", "--l", "2", "--pattern", "1,0,0"]),
        2
    );
    assert_eq!(code(&["probe", &path("r2_sunits_2_3.json"), "--assumption", "3"]), 2);
}

#[test]
fn small_commands() {
    let r = results(&["three-squares", "14"]);
    assert_eq!(r["squares"], serde_json::json!([3, 2, 1]));
    assert_eq!(results(&["three-squares", "7"])["squares"], Value::Null);
    let r = results(&["hilbert", "-1", "-1"]);
    assert_eq!(r["product"], 1);
    assert_eq!(r["symbols"], serde_json::json!([["inf", -1], [2, -1]]));
    assert_eq!(results(&["hilbert", "2", "3", "--place", "3"])["symbols"][0][1], -1);
    assert_eq!(code(&["hilbert", "0", "3"]), 2);
}

#[test]
fn instance_files_round_trip() {
    for entry in std::fs::read_dir(fixture("")).unwrap() {
        let p = entry.unwrap().path();
        let name = p.file_name().unwrap().to_string_lossy().into_owned();
        if name.starts_with("bad_") {
            continue;
        }
        let file = InstanceFile::read(&p).unwrap();
        let inst = file.to_instance().unwrap();
        let canonical = InstanceFile::from_instance(&inst);
        let text = serde_json::to_string(&canonical).unwrap();
        let reparsed: InstanceFile = serde_json::from_str(&text).unwrap();
        assert_eq!(reparsed, canonical, "{name}");
        let again = reparsed.to_instance().unwrap();
        assert_eq!(again.points(), inst.points(), "{name}");
        assert_eq!(again.context(), inst.context(), "{name}");
    }
}
