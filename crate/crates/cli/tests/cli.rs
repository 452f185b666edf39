use std::path::PathBuf;
use std::process::{Command, Output};

use segre_split::io::complex_to_json;
use segre_split::linalg::FieldSpec;
use segre_split::sheaves;

const BIN: &str = env!("CARGO_BIN_EXE_segre-split");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn malformed_json_is_a_schema_error_with_position() {
    let path = scratch("truncated.json", "{\"space\": \n");
    let o = run(&["cohomology", "--input", path.to_str().unwrap(), "--twist", "0,0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn unknown_field_is_rejected() {
    let path = scratch("unknown.json", r#"{"space": {"factor_dims": [1]}, "complex": {"terms": []}, "extra": 1}"#);
    let o = run(&["cohomology", "--input", path.to_str().unwrap(), "--twist", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn koszul_point_from_file() {
    let path = scratch("point.json", &complex_to_json(&sheaves::koszul_point_p1p1(FieldSpec::Rationals)));
    let o = run(&["cohomology", "--input", path.to_str().unwrap(), "--window=-2:2,-2:2", "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 25 * 3);
    for r in rows {
        let expected = if r[2] == "0" { "1" } else { "0" };
        assert_eq!((r[3], r[4]), (expected, "computed"), "{r:?}");
    }
}

#[test]
fn line_bundle_cohomology_at_a_twist() {
    let o = run(&["cohomology", "--sum", "1,0", "--space", "1,1", "--twist=-1,-2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("(-1,-2)          0 1 0"), "{}", stdout(&o));
}

#[test]
fn non_split_line_bundle() {
    let o = run(&["split-check", "--sum", "1,0", "--space", "1,1", "--d", "1,1", "--window=-6:6,-6:6", "--assert-torsion-free"]);
    assert_eq!(o.status.code(), Some(10));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["verdict"], "non_split");
    assert_eq!(r["witness"], serde_json::json!([-1, -2]));
    assert_eq!(r["index"], 1);
}

#[test]
fn split_sum_is_recovered() {
    let o = run(&[
        "split-check",
        "--sum",
        "1,1;-1,-1",
        "--space",
        "1,1",
        "--d",
        "1,1",
        "--window=-6:6,-6:6",
        "--assert-torsion-free",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["verdict"], "split");
    assert_eq!(r["multiset"], serde_json::json!([[1, 1], [-1, 1]]));
    assert_eq!(r["theorem_backed"], true);
}

#[test]
fn tiny_window_is_inconclusive() {
    let o =
        run(&["split-check", "--sum", "0,0", "--space", "1,1", "--d", "1,1", "--window=-3:-2,-3:-2", "--assert-torsion-free"]);
    assert_eq!(o.status.code(), Some(11));
    assert!(stderr(&o).contains("extremality uncertifiable"), "{}", stderr(&o));
}

#[test]
fn missing_torsion_free_assertion_is_flagged() {
    let o = run(&["split-check", "--sum", "0,0", "--space", "1,1", "--d", "1,1", "--window=-4:4,-4:4"]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["theorem_backed"], false);
}

#[test]
fn tate_degree_outside_coverage_names_missing_twists() {
    let o = run(&["tate-profile", "--sum", "0,0", "--space", "1,1", "--window=-2:2,-2:2", "--b", "5,5"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("(5,5)"), "{}", stderr(&o));
}

#[test]
fn tate_profile_and_corner_checksums() {
    let o = run(&[
        "tate-profile",
        "--sum",
        "0,0;1,-1",
        "--space",
        "1,1",
        "--window=-3:3,-3:3",
        "--checks",
        "all",
        "--c",
        "0,0",
        "--I",
        "1",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.lines().count() > 1);
    for line in text.lines() {
        assert!(line.contains(" tate=0") && line.contains(" corner=0") && line.contains(" strand=0"), "{line}");
    }
    let one = run(&["tate-profile", "--sum", "0,0", "--space", "1,1", "--window=-3:3,-3:3", "--b=-1,-1"]);
    assert_eq!(stdout(&one), "b=(-1,-1) {-4: 4, -3: 8, -2: 4} tate=0\n");
}

#[test]
fn regions_safe_band() {
    let o = run(&["regions", "--space", "1,1", "--d", "1,1", "--window=-2:2,-2:2", "--mode", "safe"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "...##\n..###\n.###.\n###..\n##...\n");
}

#[test]
fn output_is_deterministic() {
    let args = ["cohomology", "--sum", "2,-1;0,1", "--space", "1,2", "--window=-4:2,-4:2", "--format", "json"];
    assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
}
