use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", name].iter().collect();
    path.to_string_lossy().into_owned()
}

fn selfsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selfsim")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = selfsim(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    stdout(&out)
}

#[test]
fn state_listings() {
    assert!(ok(&["--cmd", "states", "grigorchuk"]).starts_with("5 states\n"));
    assert!(ok(&["--cmd", "states", "grigorchuk", "e"]).starts_with("1 states\n"));
    let c = ok(&["--defs", &fixture("f2_example.toml"), "--cmd", "states", "aff2", "c"]);
    assert!(c.starts_with("4 states\n"));
    assert!(c.contains("c = (c, bab^-1c)"));
}

#[test]
fn evaluation() {
    assert_eq!(ok(&["--cmd", "eval", "grigorchuk", "a", "122"]), "222\n");
    assert_eq!(ok(&["--cmd", "eval", "grigorchuk", "e", "1212"]), "1212\n");
    // a compiled state is evaluated both by the automaton and by its affine map
    assert_eq!(ok(&["--cmd", "eval", "f2", "b", "1212"]), ok(&["--cmd", "eval", "f2", "(t; 0)", "1212"]));
}

#[test]
fn property_checks() {
    assert_eq!(ok(&["--cmd", "check", "grigorchuk3", "persistent"]), "yes (letter 3)\n");
    assert_eq!(ok(&["--cmd", "check", "grigorchuk", "coarsely-diagonal", "--max-order", "32"]), "yes\n");
    assert_eq!(ok(&["--cmd", "check", "grigorchuk", "self-similar"]), "yes\n");
    let out = selfsim(&["--cmd", "check", "f2", "persistent"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "no\n");
}

#[test]
fn persistence_and_compilation() {
    let defs = ok(&["--defs", &fixture("grigorchuk.toml"), "--cmd", "persist", "grig"]);
    assert_eq!(defs, selfsim::fixtures::GRIGORCHUK_T3);
    let compiled = ok(&["--defs", &fixture("f2_example.toml"), "--cmd", "compile-agl", "aff2"]);
    for line in ["a = (1 2)(e, e)", "b = (b, ab)", "c = (c, bab^-1c)"] {
        assert!(compiled.lines().any(|l| l == line), "{line}");
    }
    let moved = ok(&["--cmd", "persist", "grigorchuk", "1"]);
    assert!(moved.contains("b = (b, c, a)"));
}

#[test]
fn rover_operations() {
    assert_eq!(ok(&["--cmd", "rover", "grigorchuk3", "retract", "iota(ε, b)"]), "b\n");
    let f2 = fixture("f2_example.toml");
    assert_eq!(ok(&["--defs", &f2, "--cmd", "rover", "v3", "abelianize", "ia"]), "(2, 0, 0)\n");
    assert_eq!(ok(&["--defs", &f2, "--cmd", "rover", "v3", "abelianize", "ib"]), "(1, 1, 0)\n");
    let grig = fixture("grigorchuk.toml");
    let expanded = ok(&["--defs", &grig, "--cmd", "rover", "vgrig", "expand", "y", "2"]);
    assert_eq!(ok(&["--defs", &grig, "--cmd", "rover", "vgrig", "eq", "y", expanded.trim()]), "true\n");
    let inv = ok(&["--defs", &grig, "--cmd", "rover", "vgrig", "inv", "x"]);
    let one = ok(&["--defs", &grig, "--cmd", "rover", "vgrig", "mul", "x", inv.trim()]);
    assert_eq!(ok(&["--defs", &grig, "--cmd", "rover", "vgrig", "eq", one.trim(), "[ε ; 1 ; e ; ε]"]), "true\n");
}

#[test]
fn complex_reports() {
    let text = ok(&["--cmd", "complex", "6", "2"]);
    assert!(text.contains("vertices: 30") && text.contains("components: 1"));
    let json = ok(&["--cmd", "complex", "12", "3", "--out", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["report"]["vertices"], 1320);
    assert_eq!(v["report"]["connectivity_confirmed"], true);
}

#[test]
fn json_and_dot_outputs() {
    for args in [
        vec!["--cmd", "states", "f3"],
        vec!["--cmd", "check", "grigorchuk", "finite-state"],
        vec!["--cmd", "rover", "grigorchuk3", "inv", "iota(1, b)"],
    ] {
        let mut args = args.clone();
        args.extend(["--out", "json"]);
        let v: serde_json::Value = serde_json::from_str(&ok(&args)).unwrap();
        assert_eq!(v["schema"], 1);
    }
    let dot = ok(&["--cmd", "dot", "grigorchuk"]);
    assert!(dot.starts_with("digraph automaton {"));
}

#[test]
fn exit_codes() {
    assert_eq!(selfsim(&["--cmd", "states", "nowhere"]).status.code(), Some(2));
    assert_eq!(selfsim(&["--cmd", "eval", "grigorchuk", "a", "13"]).status.code(), Some(2));
    assert_eq!(selfsim(&["--cmd", "states", "f2", "--max-states", "3"]).status.code(), Some(3));
    assert_eq!(selfsim(&["--cmd", "states", "grigorchuk", "--max-states", "0"]).status.code(), Some(2));
    let bad = std::env::temp_dir().join("selfsim-bad-defs.toml");
    std::fs::write(&bad, "[automaton.x]\ndefinitions = \"a = (1 2)(e)\"\n").unwrap();
    assert_eq!(selfsim(&["--defs", bad.to_str().unwrap(), "--cmd", "states", "x"]).status.code(), Some(2));
}

#[test]
fn report_is_byte_identical() {
    let args = ["--cmd", "report", "--samples", "4", "--seed", "7", "--out", "json"];
    let (a, b) = (ok(&args), ok(&args));
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["passed"], true);
}
