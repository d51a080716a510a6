//! End-to-end checks of the `breather` binary: field export, manifests,
//! reproducibility, peak extraction, verification suites, and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn breather(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_breather"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).to_string()
}

#[test]
fn peregrine_field_peaks_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let o = breather(
        &[
            "peregrine",
            "--order",
            "1",
            "--x",
            "-3:3:121",
            "--t",
            "-3:3:121",
            "--output",
            "p1",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    for ext in ["csv", "json", "pgm"] {
        assert!(
            dir.path().join(format!("p1.{ext}")).exists(),
            "missing {ext}"
        );
    }
    // csv header and center max
    let csv = std::fs::read_to_string(dir.path().join("p1.csv")).unwrap();
    assert!(csv.starts_with("x,t,re_v,im_v,abs_v\n"));
    let max_abs = csv
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .fold(0.0f64, f64::max);
    assert!((max_abs - 3.0).abs() < 1e-9, "peak modulus {max_abs}");

    // pgm header: binary 16-bit graymap
    let pgm = std::fs::read(dir.path().join("p1.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n121 121\n65535\n"));
    assert_eq!(pgm.len(), 17 + 2 * 121 * 121);

    // manifest echoes the run
    let mani: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("p1.json")).unwrap())
            .unwrap();
    assert_eq!(mani["schema_version"], 1);
    assert_eq!(mani["command"], "peregrine");
    assert_eq!(mani["config"]["order"], 1);
    assert_eq!(mani["field"]["order"], 1);

    // peaks: single central peak of height 3
    let o = breather(&["peaks", "p1.csv"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let peaks: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("p1.peaks.json")).unwrap())
            .unwrap();
    assert_eq!(peaks["classification"], "central");
    assert_eq!(peaks["peaks"].as_array().unwrap().len(), 1);
    let h = peaks["peaks"][0]["height"].as_f64().unwrap();
    assert!((h - 3.0).abs() < 1e-3);
}

#[test]
fn order2_peak_height_five() {
    let dir = tempfile::tempdir().unwrap();
    let o = breather(
        &[
            "peregrine",
            "--order",
            "2",
            "--x",
            "-2:2:81",
            "--t",
            "-2:2:81",
            "--output",
            "p2",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));

    // at the default threshold the field shows the central 2N+1 peak plus
    // the four genuine side lobes of the second-order solution (height 2.26)
    let o = breather(&["peaks", "p2.csv"], dir.path());
    assert!(o.status.success());
    let peaks: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("p2.peaks.json")).unwrap())
            .unwrap();
    let list = peaks["peaks"].as_array().unwrap();
    assert_eq!(list.len(), 5);
    assert!((list[0]["height"].as_f64().unwrap() - 5.0).abs() < 2e-2);
    assert!(list
        .iter()
        .skip(1)
        .all(|p| p["height"].as_f64().unwrap() < 2.5));

    // raising the threshold above the side lobes isolates the central peak
    let o = breather(
        &[
            "peaks",
            "p2.csv",
            "--threshold",
            "1.5",
            "--output",
            "central.json",
        ],
        dir.path(),
    );
    assert!(o.status.success());
    let peaks: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("central.json")).unwrap())
            .unwrap();
    assert_eq!(peaks["classification"], "central");
    assert_eq!(peaks["peaks"].as_array().unwrap().len(), 1);
    assert!((peaks["peaks"][0]["height"].as_f64().unwrap() - 5.0).abs() < 2e-2);
}

#[test]
fn deform_without_params_equals_peregrine() {
    let dir = tempfile::tempdir().unwrap();
    let grid = ["--x", "-2:2:41", "--t", "-2:2:41"];
    let mut a1 = vec!["peregrine", "--order", "2", "--output", "a"];
    a1.extend_from_slice(&grid);
    assert!(breather(&a1, dir.path()).status.success());
    let mut a2 = vec!["deform", "--order", "2", "--output", "b"];
    a2.extend_from_slice(&grid);
    assert!(breather(&a2, dir.path()).status.success());
    let f1 = std::fs::read(dir.path().join("a.csv")).unwrap();
    let f2 = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(f1, f2, "zero-parameter deform must match peregrine exactly");
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "deform", "--order", "2", "--a", "1=3.5", "--b", "1=-0.25", "--x", "-4:4:61", "--t",
        "-3:3:41", "--output", "r",
    ];
    assert!(breather(&args, dir.path()).status.success());
    let first_csv = std::fs::read(dir.path().join("r.csv")).unwrap();
    let first_pgm = std::fs::read(dir.path().join("r.pgm")).unwrap();
    assert!(breather(&args, dir.path()).status.success());
    assert_eq!(first_csv, std::fs::read(dir.path().join("r.csv")).unwrap());
    assert_eq!(first_pgm, std::fs::read(dir.path().join("r.pgm")).unwrap());
}

#[test]
fn single_point_grid_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = breather(
        &[
            "peregrine",
            "--order",
            "1",
            "--x",
            "0:0:1",
            "--t",
            "0:0:1",
            "--output",
            "one",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("one.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 2, "header plus exactly one sample");
    assert!(rows[1].starts_with("0,0,"));
}

#[test]
fn verify_amplitude_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = breather(
        &[
            "verify",
            "--suite",
            "amplitude",
            "--order",
            "1..4",
            "--output",
            "rep.json",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let rep: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("rep.json")).unwrap())
            .unwrap();
    assert_eq!(rep["schema_version"], 1);
    let checks = rep["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 4);
    assert!(checks.iter().all(|c| c["status"] == "pass"));
    assert!(stdout(&o).contains("amplitude-order-4: pass"));
}

#[test]
fn verify_degree_suite_order2() {
    let dir = tempfile::tempdir().unwrap();
    let o = breather(
        &[
            "verify", "--suite", "degree", "--order", "2", "--output", "deg.json",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let rep: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("deg.json")).unwrap())
            .unwrap();
    assert!(rep["checks"][0]["status"] == "pass");
}

#[test]
fn verify_oracle_suite_order2() {
    let dir = tempfile::tempdir().unwrap();
    let o = breather(
        &[
            "verify",
            "--suite",
            "oracle",
            "--order",
            "2",
            "--output",
            "oracle.json",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let rep: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("oracle.json")).unwrap())
            .unwrap();
    let checks = rep["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 2); // identity chain + degeneration legs
    assert!(checks.iter().all(|c| c["status"] == "pass"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    // unsupported order
    let o = breather(&["peregrine", "--order", "11"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    // deformation index out of range names the valid indices
    let o = breather(&["deform", "--order", "3", "--a", "5=1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("1..=2"));
    // unknown suite
    let o = breather(&["verify", "--suite", "bogus"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    // bad grid spec
    let o = breather(&["peregrine", "--order", "1", "--x", "nope"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn peaks_parse_failures_exit_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("bad.csv"),
        "x,t,re_v,im_v,abs_v\n1,2,zz,0,1\n",
    )
    .unwrap();
    let o = breather(&["peaks", "bad.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("line 2"), "{msg}");
    assert!(msg.contains("column"), "{msg}");

    std::fs::write(dir.path().join("empty.csv"), "x,t,re_v,im_v,abs_v\n").unwrap();
    let o = breather(&["peaks", "empty.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn threads_flag_gives_identical_field() {
    let dir = tempfile::tempdir().unwrap();
    let base = [
        "peregrine",
        "--order",
        "2",
        "--x",
        "-2:2:31",
        "--t",
        "-2:2:31",
    ];
    let mut a1: Vec<&str> = base.to_vec();
    a1.extend_from_slice(&["--output", "s1", "--threads", "1"]);
    let mut a2: Vec<&str> = base.to_vec();
    a2.extend_from_slice(&["--output", "s2", "--threads", "3"]);
    assert!(breather(&a1, dir.path()).status.success());
    assert!(breather(&a2, dir.path()).status.success());
    assert_eq!(
        std::fs::read(dir.path().join("s1.csv")).unwrap(),
        std::fs::read(dir.path().join("s2.csv")).unwrap()
    );
}

#[test]
fn verify_exit_code_reflects_check_failures() {
    let dir = tempfile::tempdir().unwrap();
    // order 1 residual passes
    let o = breather(
        &["verify", "--suite", "residual", "--order", "1", "--output", "r1.json"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    // order 3 includes the zero-parameter case whose truncation at the
    // pinned step exceeds the pinned tolerance; the tool must exit 1
    let o = breather(
        &["verify", "--suite", "residual", "--order", "3", "--output", "r3.json"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    let rep: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r3.json")).unwrap())
            .unwrap();
    assert!(rep["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["status"] == "fail"));
}
