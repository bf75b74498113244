use std::path::Path;
use std::process::Command;

use hierarch::subst2d::{chair, Substitution2D};
use serde_json::Value;

struct Run {
    code: i32,
    report: Value,
    stdout: String,
    stderr: String,
}

fn hierarch(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_hierarch")).args(args).output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    Run {
        code: out.status.code().unwrap(),
        report: serde_json::from_str(&stdout).unwrap_or(Value::Null),
        stdout,
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn rules(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("rules").join(name).to_string_lossy().into_owned()
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

/// Level-0 cells of an SVG: the rects with a fill colour.
fn svg_cells(text: &str) -> usize {
    let doc = roxmltree::Document::parse(text).expect("well-formed SVG");
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    doc.descendants().filter(|n| n.has_tag_name("rect") && n.attribute("fill").is_some_and(|f| f != "none")).count()
}

#[test]
fn substitute_reports_the_level_word() {
    let r = hierarch(&["substitute", "--rules", &rules("fibonacci.json"), "--letter", "b", "--level", "3"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.report["result"]["pattern"], "abbab");
    assert_eq!(r.report["inputs"][0]["role"], "rules");
    assert_eq!(r.report["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn chair_renders_with_consistent_area() {
    let dir = tempfile::tempdir().unwrap();
    let svg0 = dir.path().join("c0.svg").to_string_lossy().into_owned();
    let r = hierarch(&["substitute", "--rules", &rules("chair.json"), "--letter", "SW", "--level", "0", "--render", &svg0]);
    assert_eq!(r.code, 0);
    assert_eq!(svg_cells(&std::fs::read_to_string(&svg0).unwrap()), 1);

    let svg3 = dir.path().join("c3.svg").to_string_lossy().into_owned();
    let r = hierarch(&["substitute", "--rules", &rules("chair.json"), "--letter", "NE", "--level", "3", "--render", &svg3]);
    assert_eq!(r.code, 0);
    let render = &r.report["result"]["render"];
    assert_eq!(render["cells"], 64);
    assert_eq!(render["cell_area"], render["patch_area"]);
    let text = std::fs::read_to_string(&svg3).unwrap();
    assert_eq!(svg_cells(&text), 64);
    let doc = roxmltree::Document::parse(&text).unwrap();
    let levels: Vec<&str> = doc.descendants().filter_map(|n| n.attribute("data-level")).collect();
    assert_eq!(levels, ["1", "2", "3"]);
}

#[test]
fn chair_rule_file_matches_builtin() {
    let ch = chair();
    for letter in ["NE", "NW", "SE", "SW"] {
        let r = hierarch(&["substitute", "--rules", &rules("chair.json"), "--letter", letter, "--level", "2"]);
        let rows: Vec<String> = r.report["result"]["pattern"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_str().unwrap().to_string())
            .collect();
        let expected = ch.alphabet().render(&ch.iterate2d(ch.alphabet().symbol(letter).unwrap(), 2));
        assert_eq!(rows.join("\n"), expected, "{letter}");
    }
}

#[test]
fn language_of_length_five() {
    let r = hierarch(&["language", "--rules", &rules("fibonacci.json"), "--length", "5"]);
    assert_eq!(r.code, 0);
    let words: Vec<&str> = r.report["result"]["items"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(words, ["ababb", "abbab", "babab", "babba", "bbaba", "bbabb"]);
    assert_eq!(r.report["result"]["cross_check"], true);
}

#[test]
fn aperiodic_refutes_short_periods() {
    let r = hierarch(&["aperiodic", "--rules", &rules("fibonacci.json"), "--period-cap", "2", "--m-cap", "10"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.report["result"]["all_refuted"], true);
    assert_eq!(r.report["result"]["candidates"], 3);
    let r = hierarch(&["aperiodic", "--rules", &rules("fibonacci.json"), "--period-cap", "3", "--m-cap", "2"]);
    assert_eq!(r.code, 1);
    assert!(!r.report["result"]["survivors"].as_array().unwrap().is_empty());
}

#[test]
fn separation_certificates_and_failure() {
    let dir = tempfile::tempdir().unwrap();
    for n in ["1", "2"] {
        let r = hierarch(&["separation", "--radius", n]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        assert!(r.report["certificate"]["refutation"].is_object());
        let path = write(&dir, "sep.json", &r.stdout);
        let check = hierarch(&["check-certificate", &path]);
        assert_eq!(check.code, 0, "{}", check.stdout);
    }
    let r = hierarch(&["separation", "--radius", "1", "--m-cap", "1"]);
    assert_eq!(r.code, 1);
    assert!(r.report["result"]["survivor"]["domain"].is_array());
    assert_eq!(r.report["verified"], false);
}

#[test]
fn tampered_certificate_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let r = hierarch(&["separation", "--rules", &rules("fibonacci.json"), "--radius", "1", "--config", "ab"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.report["result"]["refuting_factor"], "ababa");
    let mut doc = r.report.clone();
    doc["certificate"]["refutation"]["factor"] = Value::String("babab".into());
    let path = write(&dir, "bad.json", &serde_json::to_string(&doc).unwrap());
    let check = hierarch(&["check-certificate", &path]);
    assert_eq!(check.code, 1);
    assert!(!check.report["result"]["problems"].as_array().unwrap().is_empty());

    let r = hierarch(&["aperiodic", "--rules", &rules("fibonacci.json"), "--period-cap", "4", "--m-cap", "20"]);
    let mut doc = r.report.clone();
    doc["certificate"]["candidates"].as_array_mut().unwrap().pop();
    let path = write(&dir, "ap.json", &serde_json::to_string(&doc).unwrap());
    assert_eq!(hierarch(&["check-certificate", &path]).code, 1);
    let path = write(&dir, "ap_ok.json", &r.stdout);
    assert_eq!(hierarch(&["check-certificate", &path]).code, 0);
}

#[test]
fn conjugate_modes_and_guard() {
    let dir = tempfile::tempdir().unwrap();
    let r = hierarch(&["conjugate", "--from", "1,1", "--to", &rules("rows_image.json"), "--seed", "2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.report["result"]["invariant_from"], r.report["result"]["invariant_to"]);

    let x = hierarch(&["tiling", "--kind", "line", "--seed", "6"]);
    let path = write(&dir, "x.json", &x.stdout);
    let r = hierarch(&["conjugate", "--from", &rules("golden.json"), "--to", "1,tau", "--tiling", &path]);
    assert_eq!(r.code, 0);
    let same = write(&dir, "same.json", &serde_json::to_string(&r.report["result"]["tiling"]).unwrap());
    let d = hierarch(&["metric", &path, &same]);
    assert_eq!(d.report["result"]["distance"]["u"], "0");
    assert_eq!(d.report["result"]["distance"]["v"], "0");

    let r = hierarch(&["conjugate", "--from", "1,tau", "--to", "1,1", "--seed", "0"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("not conjugate"), "{}", r.stderr);

    let r = hierarch(&["conjugate", "--from", "1,tau", "--to", "3-tau,3-tau", "--witness", "5"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.report["result"]["local_agreement"], true);
    assert!(r.report["certificate"]["x_prime"]["tower"].is_array());
}

#[test]
fn metric_of_shifted_unit_tiling() {
    let dir = tempfile::tempdir().unwrap();
    let u = write(&dir, "u.json", &hierarch(&["tiling", "--kind", "unit"]).stdout);
    let v = write(&dir, "v.json", &hierarch(&["tiling", "--kind", "unit", "--translate", "1/10"]).stdout);
    let r = hierarch(&["metric", &u, &u]);
    assert_eq!(r.report["result"]["distance"]["u"], "0");
    let r = hierarch(&["metric", &u, &v]);
    assert_eq!(r.report["result"]["distance"]["u"], "9/10");
    assert_eq!(r.report["result"]["distance"]["decimal"], "0.900000000000");
}

#[test]
fn frame_witness_and_refusal() {
    let dir = tempfile::tempdir().unwrap();
    let gen = hierarch(&["tiling", "--kind", "frame-fixture", "--seed", "5"]);
    let path = write(&dir, "ff.json", &gen.stdout);
    // The generator prints the frame translations on stderr.
    let line = gen.stderr.trim();
    let parts: Vec<&str> = line.split_whitespace().collect();
    let (s, t) = (parts[3], parts[5]);
    let r = hierarch(&["frame", "--tiling", &path, "--s", s, "--t", t]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(r.report["result"]["margin"]["u"], "1/8");
    let r = hierarch(&["frame", "--tiling", &path, "--s", "3/2,1/3", "--t", "-1/5,2"]);
    assert_eq!(r.code, 1);
    assert_eq!(r.report["result"]["outcome"], "refusal");
}

#[test]
fn patch_covers_the_region() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(&dir, "p.json", &hierarch(&["tiling", "--kind", "product", "--seed", "1"]).stdout);
    let svg = dir.path().join("p.svg").to_string_lossy().into_owned();
    let r = hierarch(&["patch", "--tiling", &path, "--radius", "5/2", "--render", &svg]);
    assert_eq!(r.code, 0);
    assert_eq!(r.report["result"]["covered"], r.report["result"]["region"]);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(svg_cells(&text) as u64, r.report["result"]["count"].as_u64().unwrap());
}

#[test]
fn bad_inputs_exit_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let extra = write(&dir, "x.json", r#"{"kind": "substitution1d", "alphabet": ["a"], "rules": {"a": ["a", "a"]}, "extra": 1}"#);
    let r = hierarch(&["language", "--rules", &extra, "--length", "2"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("unknown field"), "{}", r.stderr);

    let broken = write(&dir, "y.json", "{\n  \"kind\": \"substitution1d\",\n  \"alphabet\": [\"a\"\n}");
    let r = hierarch(&["language", "--rules", &broken, "--length", "2"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 4"), "{}", r.stderr);

    let r = hierarch(&["substitute", "--rules", &rules("fibonacci.json"), "--letter", "c", "--level", "2"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("unknown letter"));

    let r = hierarch(&["substitute", "--rules", &rules("fibonacci.json"), "--letter", "b", "--level", "60"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("invalid level"));

    assert_eq!(hierarch(&["metric"]).code, 2);
}

#[test]
fn reports_echo_seeds_and_sort_keys() {
    let r = hierarch(&["offsets", "--seed", "4", "--rows", "6", "--radius", "40"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.report["arguments"]["seed"], 4);
    let keys: Vec<&String> = r.report.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    let first = r.stdout.find("\"arguments\"").unwrap();
    assert!(first < r.stdout.find("\"command\"").unwrap());
}
