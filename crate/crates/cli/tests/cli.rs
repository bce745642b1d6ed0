//! End-to-end tests of the binary: spec'd outputs, exit codes, determinism.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_equiloc"))
}

fn scenes_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenes")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn temp_scene(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn halfplane_multiplicities_at_imaginary_x() {
    let scene = scenes_dir().join("cp1-upper-halfplane.json");
    let out = run(&["multiplicities", scene.to_str().unwrap(), "--X", "i1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["chamber"], "+");
    assert_eq!(v["m"]["p0"], 1);
    assert_eq!(v["m"]["p1"], 0);
}

#[test]
fn gauss_bonnet_on_constant_cp2() {
    let f = temp_scene(
        r#"{"manifold": {"kind": "cpn", "n": 2}, "sheaf": {"kind": "constant"},
            "X": {"re": ["5", "1", "-3"]}}"#,
    );
    let out = run(&["gauss-bonnet", f.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["combinatorial"], 3);
    assert_eq!(v["match"], true);
    assert!((v["localized"].as_f64().unwrap() - 3.0).abs() < 1e-9);
}

#[test]
fn shipped_scenes_validate_and_match() {
    for name in ["cp1-upper-halfplane.json", "cp2-orbit.json", "flag3-constant.json"] {
        let scene = scenes_dir().join(name);
        let out = run(&["validate", scene.to_str().unwrap()]);
        assert!(out.status.success(), "{name}: {}", stdout(&out));
        let out = run(&["gauss-bonnet", scene.to_str().unwrap()]);
        assert!(out.status.success(), "{name}: {}", stderr(&out));
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(v["match"], true, "{name}");
    }
}

#[test]
fn inconsistent_custom_table_exits_one_with_violated_sum() {
    let f = temp_scene(
        r#"{"manifold": {"kind": "cpn", "n": 1},
            "sheaf": {"kind": "custom",
                      "strata": [{"name": "big", "chi_c": 1, "stalk_euler": 1},
                                 {"name": "small", "chi_c": 1, "stalk_euler": 2}],
                      "cell_tables": {"+": [[1, 0], [1, 1]],
                                      "-": [[0, 1], [1, 0]]}},
            "X": {"re": ["2"]}}"#,
    );
    let out = run(&["validate", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("stratum 'big'"), "{text}");
    // localization against the same data refuses with the same exit code
    let out = run(&["gauss-bonnet", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn consistent_custom_table_works_end_to_end() {
    // the half-plane tables entered as custom data, with costalks
    let f = temp_scene(
        r#"{"manifold": {"kind": "cpn", "n": 1,
                         "coordinate_weights": [[0], [1]],
                         "hamiltonian_levels": [["-1"], ["1"]]},
            "sheaf": {"kind": "custom",
                      "strata": [{"name": "upper", "chi_c": 1, "stalk_euler": 1},
                                 {"name": "circle", "chi_c": 0, "stalk_euler": 0},
                                 {"name": "lower", "chi_c": 1, "stalk_euler": 0}],
                      "cell_tables": {"+": [[1, -1, 1], [0, 1, 0]],
                                      "-": [[0, 1, 0], [1, -1, 1]]},
                      "costalk_tables": {"+": [1, 0], "-": [0, 1]}}}"#,
    );
    let out = run(&["validate", f.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", stdout(&out));
    let out = run(&["multiplicities", f.path().to_str().unwrap(), "--X", "-5"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["chamber"], "+");
    assert_eq!(v["m"]["p0"], 1);
}

#[test]
fn malformed_json_exits_two_with_position() {
    let f = temp_scene("{\"manifold\": {\n");
    let out = run(&["fixed-points", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("line") && err.contains("column"), "{err}");
}

#[test]
fn wall_x_exits_two_naming_the_weight() {
    let f = temp_scene(
        r#"{"manifold": {"kind": "cpn", "n": 1}, "sheaf": {"kind": "constant"}}"#,
    );
    let out = run(&["bb", f.path().to_str().unwrap(), "--X", "i1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("(-1)"), "{}", stderr(&out));
}

#[test]
fn pushforward_csv_is_deterministic_with_pinned_header() {
    let args = ["oracle", "dh-pushforward", "--samples", "20000", "--seed", "9", "--bins", "10"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("bin_lo,bin_hi,mass"));
    assert_eq!(lines.count(), 10);
    assert!(!text.contains('\r'));
}

#[test]
fn scene_round_trip_preserves_results_bit_for_bit() {
    let scene_path = scenes_dir().join("flag3-constant.json");
    let original: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&scene_path).unwrap()).unwrap();
    let rewritten = temp_scene(&original.to_string());
    for args in [
        vec!["multiplicities"],
        vec!["localize", "--class", "exp-hamiltonian", "--t", "2/3"],
        vec!["chambers"],
    ] {
        let mut a1 = args.clone();
        a1.insert(1, scene_path.to_str().unwrap());
        let mut a2 = args.clone();
        a2.insert(1, rewritten.path().to_str().unwrap());
        let r1 = run(&a1);
        let r2 = run(&a2);
        assert!(r1.status.success());
        assert_eq!(stdout(&r1), stdout(&r2), "args: {args:?}");
    }
}

#[test]
fn localize_one_class_sums_to_zero() {
    let scene = scenes_dir().join("flag3-constant.json");
    let out = run(&["localize", scene.to_str().unwrap(), "--class", "one"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["value_re"].as_f64().unwrap().abs() < 1e-12);
    assert!(v["value_im"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(v["terms"].as_array().unwrap().len(), 6);
}

#[test]
fn dh_on_split_cp1_matches_closed_form() {
    let f = temp_scene(
        r#"{"manifold": {"kind": "cpn", "n": 1,
                         "coordinate_weights": [[0], [1]],
                         "hamiltonian_levels": [["-1"], ["1"]]},
            "sheaf": {"kind": "constant"},
            "options": {"slice": "split"}}"#,
    );
    let out = run(&["dh", f.path().to_str().unwrap(), "--X", "1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let expected = 2.0 * std::f64::consts::PI * (1f64.exp() - (-1f64).exp());
    assert!((v["value_re"].as_f64().unwrap() - expected).abs() < 1e-10);
    assert!(v["value_im"].as_f64().unwrap().abs() < 1e-10);
}

#[test]
fn chamber_scan_csv_lists_multiplicity_vectors() {
    let scene = scenes_dir().join("cp1-upper-halfplane.json");
    let out = run(&["chamber-scan", scene.to_str().unwrap(), "--class", "euler", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "chamber,m_p0,m_p1,sum_m,value_re,value_im");
    assert!(lines.iter().any(|l| l.starts_with("+,1,0,1,")));
    assert!(lines.iter().any(|l| l.starts_with("-,0,1,1,")));
    // JSON format carries the stratum summary and χ
    let out = run(&["chamber-scan", scene.to_str().unwrap(), "--class", "euler"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["euler_characteristic"], 1);
    assert_eq!(v["strata"].as_array().unwrap().len(), 3);
}
