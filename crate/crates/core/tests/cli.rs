//! End-to-end runs of the command-line front end against the model files.

use std::path::{Path, PathBuf};

use ioconf::cli::{run, EXIT_FAIL, EXIT_INVALID, EXIT_OK, EXIT_USAGE};
use ioconf::models::Iolts;
use ioconf::testgen::{validate_test_purpose, FaultModel};
use serde_json::Value;

fn model(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("models").join(name).display().to_string()
}

fn ioconf(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("ioconf").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

#[test]
fn validate_counts_and_normalizes() {
    let (code, out, _) = ioconf(&["validate", &model("tau_loop_lts.json")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "valid: 5 states, 8 transitions\n");

    let (code, _, err) = ioconf(&["validate", &model("tau_self_loop.json")]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("self-loop"));

    let dir = tempfile::tempdir().unwrap();
    let copy = dir.path().join("m.json");
    std::fs::copy(model("tau_self_loop.json"), &copy).unwrap();
    let (code, out, _) = ioconf(&["validate", &path_str(&copy), "--normalize"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "valid: 2 states, 2 transitions\n");
    let (code, _, _) = ioconf(&["validate", &path_str(&copy)]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(ioconf(&[]).0, EXIT_USAGE);
    assert_eq!(ioconf(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(ioconf(&["validate", "/no/such/file.json"]).0, EXIT_USAGE);
    assert_eq!(ioconf(&["--help"]).0, EXIT_OK);
}

#[test]
fn conf_verdicts() {
    let (s, i) = (model("conf_spec.json"), model("conf_impl.json"));
    let (code, out, _) = ioconf(&["conf", &s, &i, "--D", "(a+b)*ax", "--F", "ba*b"]);
    assert_eq!(code, EXIT_FAIL);
    let v = json(&out);
    assert_eq!(v["outcome"], "violates");
    assert_eq!(v["clause"], "F");
    assert_eq!(v["witness"], serde_json::json!(["b", "b"]));

    let (code, out, _) = ioconf(&["conf", &s, &i, "--D", ""]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(json(&out)["outcome"], "conforms");

    let by_regex = ioconf(&["conf", &s, &i, "--D", "(a+b)*ax"]);
    let by_file = ioconf(&["conf", &s, &i, "--D", &format!("@{}", model("d_ends_in_ax.json"))]);
    assert_eq!(by_regex, by_file);
    assert_eq!(json(&by_file.1)["witness"], serde_json::json!(["a", "b", "a", "b", "a", "x"]));

    assert_eq!(ioconf(&["conf", &s, &i, "--D", "(a+"]).0, EXIT_INVALID);
}

#[test]
fn ioco_verdicts() {
    let (code, out, _) = ioconf(&["ioco", &model("conf_spec.json"), &model("conf_impl_extra_output.json")]);
    assert_eq!(code, EXIT_FAIL);
    assert_eq!(json(&out)["witness"], serde_json::json!(["b", "x"]));
    let s = model("ioco_spec.json");
    assert_eq!(ioconf(&["ioco", &s, &s]).0, EXIT_OK);
    let (code, out, _) = ioconf(&["ioco", &s, &model("ioco_impl.json")]);
    assert_eq!(code, EXIT_FAIL);
    assert_eq!(json(&out)["witness"], serde_json::json!(["b", "x"]));
}

#[test]
fn gen_and_run_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let spec = model("ioco_spec.json");
    let words = dir.path().join("words");
    let (code, _, _) = ioconf(&[
        "gen", &spec, "--m", "4", "--word", "axbaabbx", "--word", "aabbaxbabx", "--transforms", "all", "--out",
        &path_str(&words),
    ]);
    assert_eq!(code, EXIT_OK);
    let (code, out, _) = ioconf(&["run", &model("ioco_impl.json"), &path_str(&words)]);
    assert_eq!(code, EXIT_FAIL);
    let report = json(&out);
    assert_eq!(report["purposes"][0]["name"], "aabbaxbabx");
    assert_eq!(report["purposes"][0]["verdict"], "pass");
    assert_eq!(report["purposes"][1]["name"], "axbaabbx");
    assert_eq!(report["purposes"][1]["verdict"], "fail");

    let full = dir.path().join("m1");
    let (code, out, _) = ioconf(&["gen", &spec, "--m", "1", "--out", &path_str(&full)]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(json(&out)["purposes"], 839);
    assert_eq!(ioconf(&["run", &spec, &path_str(&full), "--jobs", "1"]).0, EXIT_OK);
    assert_eq!(ioconf(&["run", &model("ioco_impl.json"), &path_str(&full)]).0, EXIT_FAIL);

    let fm = FaultModel::load(&full).unwrap();
    for tp in fm.purposes.iter().step_by(50) {
        let file = full.join(format!("{}.json", tp.name));
        assert_eq!(ioconf(&["validate", &path_str(&file)]).0, EXIT_OK);
        let r = validate_test_purpose(tp);
        assert!(r.verdicts_separated && r.deterministic);
    }

    let empty = dir.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    assert_eq!(ioconf(&["run", &spec, &path_str(&empty)]).0, EXIT_OK);
}

#[test]
fn gen_budget_truncation_and_single_purpose() {
    let dir = tempfile::tempdir().unwrap();
    let spec = model("ioco_spec.json");
    let (code, _, err) = ioconf(&["gen", &spec, "--m", "4", "--out", &path_str(&dir.path().join("big"))]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("--max-purposes"));

    let none = dir.path().join("none");
    let (code, out, err) = ioconf(&["gen", &spec, "--m", "4", "--max-purposes", "0", "--out", &path_str(&none)]);
    assert_eq!(code, EXIT_OK);
    assert!(err.contains("warning"));
    assert_eq!(json(&out)["purposes"], 0);
    let files: Vec<PathBuf> = std::fs::read_dir(&none).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(files, vec![none.join("provenance.json")]);

    let single = dir.path().join("single");
    assert_eq!(ioconf(&["gen", &spec, "--kind", "singletp", "--out", &path_str(&single)]).0, EXIT_OK);
    let fm = FaultModel::load(&single).unwrap();
    assert_eq!(fm.purposes.len(), 1);
    assert_eq!(ioconf(&["run", &model("ioco_impl.json"), &path_str(&single)]).0, EXIT_FAIL);
    assert_eq!(ioconf(&["run", &spec, &path_str(&single)]).0, EXIT_OK);

    let schemes = dir.path().join("schemes");
    let (code, _, _) = ioconf(&["gen", &model("parity_spec.json"), "--m", "1", "--kind", "schemes", "--out", &path_str(&schemes)]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(ioconf(&["run", &model("parity_spec.json"), &path_str(&schemes)]).0, EXIT_OK);
}

#[test]
fn defeat_lowerbound_classify_delta_otr() {
    let dir = tempfile::tempdir().unwrap();
    let fm = dir.path().join("loop");
    assert_eq!(ioconf(&["gen", &model("single_loop_spec.json"), "--m", "3", "--out", &path_str(&fm)]).0, EXIT_OK);
    let (code, out, _) = ioconf(&["defeat", &path_str(&fm)]);
    assert_eq!(code, EXIT_OK);
    let imp = Iolts::from_json(&out, false).unwrap();
    let imp_path = dir.path().join("defeat.json");
    std::fs::write(&imp_path, &out).unwrap();
    assert_eq!(ioconf(&["run", &path_str(&imp_path), &path_str(&fm)]).0, EXIT_OK);
    assert_eq!(ioconf(&["ioco", &model("single_loop_spec.json"), &path_str(&imp_path)]).0, EXIT_FAIL);
    assert_eq!(imp.states().len(), 6);

    let other = dir.path().join("other");
    assert_eq!(ioconf(&["gen", &model("ioco_spec.json"), "--m", "1", "--out", &path_str(&other)]).0, EXIT_OK);
    assert_eq!(ioconf(&["defeat", &path_str(&other)]).0, EXIT_INVALID);

    let (code, out, _) = ioconf(&["lowerbound", "--m", "5"]);
    assert_eq!(code, EXIT_OK);
    let lb = json(&out);
    assert_eq!(lb["F_m"], 8);
    assert!((lb["bound"].as_f64().unwrap() - 4.959_674_775).abs() < 1e-6);

    let (_, out, _) = ioconf(&["classify", &model("parity_spec.json")]);
    assert_eq!(json(&out)["input_enabled"], true);

    let (_, out, _) = ioconf(&["delta", &model("quiescence_base.json")]);
    let ext = Iolts::from_json(&out, false).unwrap();
    let loops: Vec<&str> = ext
        .transitions()
        .iter()
        .filter(|t| ext.sym_name(t.1) == "delta")
        .map(|t| ext.states()[t.0].as_str())
        .collect();
    assert_eq!(loops, ["s1", "s3"]);
    let (_, dot, _) = ioconf(&["delta", &model("quiescence_base.json"), "--dot"]);
    assert!(dot.starts_with("digraph"));

    let (_, out, _) = ioconf(&["otr", &model("tau_loop_lts.json")]);
    let a = ioconf::automata::Fsa::from_json(&out).unwrap();
    assert!(a.accepts(&["b", "c", "b", "t"]));
    assert!(a.accepts(&["b", "b", "b", "t", "b", "c", "b", "t", "b"]));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let cases: Vec<Vec<String>> = vec![
        vec!["classify".into(), model("ring_spec.json")],
        vec!["otr".into(), model("coffee_machine.json"), "--dot".into()],
        vec!["conf".into(), model("conf_spec.json"), model("conf_impl.json"), "--D".into(), "(a+b)*ax".into()],
    ];
    for args in cases {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(ioconf(&refs), ioconf(&refs), "{args:?}");
    }
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        ioconf(&["gen", &model("ioco_spec.json"), "--m", "1", "--transforms", "input-enabled", "--out", &path_str(d)]);
    }
    for entry in std::fs::read_dir(&a).unwrap() {
        let p = entry.unwrap().path();
        let name = p.file_name().unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(b.join(name)).unwrap());
    }
}
