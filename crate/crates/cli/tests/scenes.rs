use std::path::PathBuf;

use cloudcover_cli::run_scene;
use cloudcover_cli::scene::{parse_resolved, parse_scene, ErrorKind, TaskKind};
use cloudcover_cli::tasks::Overrides;

fn scene_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenes")
}

fn load(name: &str) -> String {
    std::fs::read_to_string(scene_dir().join(name)).unwrap()
}

#[test]
fn shipped_scenes_parse_and_round_trip() {
    let mut n = 0;
    for entry in std::fs::read_dir(scene_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "scene") {
            let s = parse_scene(&std::fs::read_to_string(&path).unwrap()).unwrap_or_else(|e| panic!("{}: {e:?}", path.display()));
            assert_eq!(parse_scene(&s.to_string()).unwrap(), s);
            n += 1;
        }
    }
    assert!(n >= 5);
}

#[test]
fn passing_examples() {
    for name in ["circle_extend.scene", "window_n1.scene", "sierpinski.scene", "collineate.scene", "projective.scene"] {
        let (scene, resolved) = parse_resolved(&load(name)).unwrap();
        let results = run_scene(&scene, &resolved, None, Overrides::default());
        assert!(!results.is_empty());
        for (r, _) in &results {
            let failed: Vec<_> = r.checks.iter().filter(|c| !c.passed).collect();
            assert!(failed.is_empty(), "{name} task {}: {failed:?}", r.index);
        }
    }
}

#[test]
fn window_sections_fail_only_on_cover() {
    let (scene, resolved) = parse_resolved(&load("window_sections.scene")).unwrap();
    let results = run_scene(&scene, &resolved, None, Overrides::default());
    let failed: Vec<&str> = results[0].0.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    assert_eq!(failed, ["cover"]);
}

#[test]
fn filter_by_kind() {
    let text = "version 1\ndimension 3\ntask decompose n=0 prefix=3\ntask projective n=1\ntask decompose n=1 prefix=3\n";
    let (scene, resolved) = parse_resolved(text).unwrap();
    let results = run_scene(&scene, &resolved, Some(TaskKind::Decompose), Overrides::default());
    assert_eq!(results.iter().map(|(r, _)| r.index).collect::<Vec<_>>(), [0, 2]);
    assert!(run_scene(&scene, &resolved, Some(TaskKind::Schmerl), Overrides::default()).is_empty());
}

#[test]
fn worked_instance_outputs() {
    let (scene, resolved) = parse_resolved(&load("window_n1.scene")).unwrap();
    let (r, _) = &run_scene(&scene, &resolved, None, Overrides::default())[0];
    assert_eq!(r.outputs["epsilon"], "1/10");
    assert_eq!(r.outputs["n"], 1);
    assert_eq!(r.outputs["s_matrix"][3], serde_json::json!(["-1", "-1", "-1", "1"]));
    assert_eq!(r.outputs["certificate"]["condition1_holds"], true);
}

#[test]
fn overrides_replace_scene_values() {
    let (scene, resolved) = parse_resolved(&load("circle_extend.scene")).unwrap();
    let over = Overrides { seed: Some(99), samples: Some(10) };
    let (r, _) = &run_scene(&scene, &resolved, None, over)[0];
    assert_eq!(r.outputs["lines"], 10);
    assert_eq!(r.outputs["seed"], 99);
}

#[test]
fn error_classes() {
    let cases: [(&str, fn(&ErrorKind) -> bool); 5] = [
        ("version 1\ndimension 2\ncloud c sphere center=(0, 0 radius_sq=1\n", |k| matches!(k, ErrorKind::Syntax(_))),
        ("version 1\ndimension 2\ncloud c sphere center=q radius_sq=1\n", |k| matches!(k, ErrorKind::UnknownName(_))),
        ("version 1\ndimension 2\ncloud c sphere center=(0, 0) radius_sq=1/0\n", |k| matches!(k, ErrorKind::BadRational(_))),
        ("version 1\ndimension 2\npoint p = (1, 2, 3)\n", |k| matches!(k, ErrorKind::DimensionMismatch(_))),
        ("version 1\ndimension 2\ncloud c sphere center=(0, 0) radius_sq=-1\n", |k| matches!(k, ErrorKind::Invalid(_))),
    ];
    for (text, is_kind) in cases {
        let e = parse_scene(text).unwrap_err();
        assert!(is_kind(&e[0].kind), "{text:?}: {e:?}");
        assert_eq!(e[0].line, 3);
    }
}

#[test]
fn every_error_is_reported() {
    // syntax errors are collected across lines; names resolve only after a clean syntax pass
    let text = "version 1\ndimension 2\npoint a = (1, x)\ncloud c sphere center=(0, 0) radius_sq=1\ntask bogus\n";
    let e = parse_scene(text).unwrap_err();
    assert_eq!(e.iter().map(|e| e.line).collect::<Vec<_>>(), [3, 5]);
    let text = "version 1\ndimension 2\ncloud c sphere center=b radius_sq=1\ncloud d sphere center=(0, 0) radius_sq=-1\ntask extend cloud=zz\n";
    let e = parse_scene(text).unwrap_err();
    assert_eq!(e.iter().map(|e| e.line).collect::<Vec<_>>(), [3, 4, 5]);
}
