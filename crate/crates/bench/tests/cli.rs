use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn staeb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_staeb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn solve_without_tasks() {
    let out = staeb(&["solve", "--algo", "greedy", "--gen", "tasks=0", "--workers", "10"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("schema=run_row.v1"));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let field = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
    assert_eq!(field("revenue_scaled"), "0");
    assert_eq!(field("served_task_ratio").parse::<f64>().unwrap(), 0.0);
    assert_eq!(field("status"), "ok");
}

#[test]
fn unknown_flag_is_usage_error() {
    assert_eq!(code(&staeb(&["solve", "--no-such-flag"])), 1);
    assert_eq!(code(&staeb(&["solve", "--gen", "tasks=many"])), 1);
    assert_eq!(code(&staeb(&["--help"])), 0);
}

#[test]
fn missing_instance_is_input_error() {
    let out = staeb(&["solve", "--instance", "/nonexistent/instance.json"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn validate_accepts_and_rejects() {
    let inst = fixture("i0.json");
    let good = fixture("i0_greedy_matching.json");
    let out = staeb(&["validate", "--instance", inst.to_str().unwrap(), "--matching", good.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("revenue 30"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let text = fs::read_to_string(&good).unwrap().replace("\"s3\"", "\"s1\"");
    fs::write(&bad, text).unwrap();
    let out = staeb(&["validate", "--instance", inst.to_str().unwrap(), "--matching", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn gen_then_solve_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let rows = dir.path().join("rows.csv");
    let dump = dir.path().join("m.json");
    let out = staeb(&["gen", "--desk", "--seed", "5", "--out", inst.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for _ in 0..2 {
        let out = staeb(&[
            "solve",
            "--instance",
            inst.to_str().unwrap(),
            "--algo",
            "ebgt",
            "--certify-nash",
            "--out",
            rows.to_str().unwrap(),
            "--dump-matching",
            dump.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let written = staeb_bench::read_rows(&rows).unwrap();
    assert_eq!(written.len(), 2);
    assert_eq!(written[0].nash_certified, Some(true));
    let out = staeb(&["validate", "--instance", inst.to_str().unwrap(), "--matching", dump.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
}

#[test]
fn ingest_writes_instance() {
    let dir = tempfile::tempdir().unwrap();
    let trips = dir.path().join("trips.csv");
    let inst = dir.path().join("inst.json");
    fs::write(
        &trips,
        "pickup_x,pickup_y,pickup_time,dropoff_x,dropoff_y,dropoff_time\n1,2,10,3,4,20\nbad,row,,,,\n5,6,30,7,8,40\n",
    )
    .unwrap();
    let out = staeb(&["ingest", "--trips", trips.to_str().unwrap(), "--out", inst.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("2 tasks, 2 workers, 1 records skipped"));
    let loaded = staeb_core::io::load_instance(&inst).unwrap().value;
    assert_eq!(loaded.tasks().len(), 2);
}
