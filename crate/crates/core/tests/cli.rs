use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use maxwell_trees::cli::instance::InstanceFile;
use maxwell_trees::cli::run;

fn instance(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../instances").join(name)
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("maxwell-trees").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn value_after(text: &str, prefix: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(prefix)).unwrap_or_else(|| panic!("no {prefix:?} in\n{text}"));
    line[prefix.len()..].split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn solve_square() {
    let path = instance("square.json");
    let (code, out, _) = call(&["solve", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let want = 1.0 + 3f64.sqrt();
    assert!((value_after(&out, "primal length:") - want).abs() < 1e-9);
    assert!((value_after(&out, "dual value:") - want).abs() < 1e-9);
    assert!(out.contains("weak duality: true"));
}

#[test]
fn solve_with_dropped_edges() {
    let path = instance("square.json");
    let (code, out, _) = call(&["solve", "--drop", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("dropped edges: e3"));
    let want = 2.0 * 2f64.sqrt();
    assert!((value_after(&out, "primal length:") - want).abs() < 1e-9);
    assert!((value_after(&out, "dual value:") - want).abs() < 1e-9);
}

#[test]
fn obtuse_reports_the_degenerate_edge() {
    let path = instance("obtuse.json");
    let (code, out, _) = call(&["solve", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("degenerate edges: e1"), "{out}");
}

#[test]
fn reduce_round_trips() {
    let path = instance("square.json");
    let (code, out, _) = call(&["reduce", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let reduced = InstanceFile::parse(&out).unwrap();
    let inst = reduced.resolve().unwrap();
    assert_eq!(inst.tree.vertex_count(), 5);
    assert_eq!(InstanceFile::parse(&reduced.to_json()).unwrap(), reduced);

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("reduced.json");
    fs::write(&file, &out).unwrap();
    let (code, solved, _) = call(&["solve", file.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!((value_after(&solved, "primal length:") - 2.0 * 2f64.sqrt()).abs() < 1e-9);
}

#[test]
fn planar_equilateral_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("net.svg");
    let path = instance("equilateral.json");
    let (code, out, err) = call(&["planar", path.to_str().unwrap(), "--svg", svg.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!((value_after(&out, "planar length:") - 3f64.sqrt()).abs() < 1e-9);
    let drawing = fs::read_to_string(&svg).unwrap();
    assert!(drawing.starts_with("<svg") || drawing.starts_with("<?xml"));
    assert_eq!(drawing.matches("<line").count(), 3);
}

#[test]
fn planar_obtuse_warns() {
    let path = instance("obtuse.json");
    let (code, _, err) = call(&["planar", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(err.contains("warning"), "{err}");
}

#[test]
fn bad_input_exits_one() {
    for name in ["cycle.json", "inadmissible.json", "missing.json"] {
        let path = instance(name);
        let (code, _, err) = call(&["solve", "--drop", path.to_str().unwrap()]);
        assert_eq!(code, 1, "{name}");
        assert!(!err.is_empty());
    }
    let path = instance("inadmissible.json");
    let (_, _, err) = call(&["solve", "--drop", path.to_str().unwrap()]);
    assert!(err.contains("v1") && err.contains("v2"), "{err}");
}

#[test]
fn enumerate_counts() {
    let (code, out, _) = call(&["enumerate", "5"]);
    assert_eq!(code, 0);
    assert!(out.contains("15"), "{out}");
}

#[test]
fn experiment_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let (code, _, err) = call(&["experiment", "--seed", "7", "--count", "12", "--out", p.to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
    }
    let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let mut reader = csv::Reader::from_reader(ta.as_slice());
    assert_eq!(reader.records().count(), 12);
}

#[test]
fn experiment_to_unwritable_path_fails() {
    let (code, _, err) = call(&["experiment", "--count", "2", "--out", "/nonexistent/dir/out.csv"]);
    assert_eq!(code, 1);
    assert!(err.contains("cannot write"), "{err}");
}

#[test]
fn binary_runs() {
    let exe = env!("CARGO_BIN_EXE_maxwell-trees");
    let ok = Command::new(exe).arg("solve").arg(instance("segment.json")).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("primal length"));
    let bad = Command::new(exe).arg("solve").arg(instance("cycle.json")).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let usage = Command::new(exe).arg("frobnicate").output().unwrap();
    assert_ne!(usage.status.code(), Some(0));
}
