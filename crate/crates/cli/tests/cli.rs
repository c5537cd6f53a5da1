use std::path::{Path, PathBuf};
use std::process::Command;

fn scene(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenes").join(name)
}

fn run(args: &[&str], scene: &Path, out: &Path) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_cloudcover"))
        .args(args)
        .arg("--scene")
        .arg(scene)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap();
    (o.status.code().unwrap(), String::from_utf8(o.stdout).unwrap())
}

#[test]
fn reports_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let s = scene("window_n1.scene");
    assert_eq!(run(&["verify", "--seed", "11"], &s, a.path()).0, 0);
    assert_eq!(run(&["verify", "--seed", "11"], &s, b.path()).0, 0);
    for f in ["report.json", "report.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(a.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["seed"], 11);
    assert_eq!(json["passed"], true);
}

#[test]
fn seed_changes_samples() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let s = scene("circle_extend.scene");
    run(&["extend", "--seed", "1"], &s, a.path());
    run(&["extend", "--seed", "2"], &s, b.path());
    assert_ne!(std::fs::read(a.path().join("report.json")).unwrap(), std::fs::read(b.path().join("report.json")).unwrap());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout) = run(&["decompose"], &scene("sierpinski.scene"), dir.path());
    assert_eq!(code, 0);
    assert!(stdout.contains("task 0 decompose: PASS"));
    assert_eq!(run(&["verify"], &scene("window_sections.scene"), dir.path()).0, 1);
    assert_eq!(run(&["schmerl"], &scene("sierpinski.scene"), dir.path()).0, 2);

    let bad = dir.path().join("bad.scene");
    std::fs::write(&bad, "version 1\ndimension 2\ncloud c sphere center=nope radius_sq=1\n").unwrap();
    assert_eq!(run(&["verify"], &bad, dir.path()).0, 2);
    assert_eq!(run(&["verify"], &dir.path().join("missing.scene"), dir.path()).0, 2);
}

#[test]
fn plot_files_written() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(&["extend", "--plot"], &scene("circle_extend.scene"), dir.path());
    assert_eq!(code, 0);
    for name in ["circle", "cylinder", "disk_rim"] {
        let text = std::fs::read_to_string(dir.path().join(format!("plot_{name}.csv"))).unwrap();
        assert!(text.lines().count() > 1);
    }
}
