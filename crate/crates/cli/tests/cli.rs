use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use posture_core::config::GroundDoc;
use posture_core::lexicon::vocab;
use posture_core::transport::GroundParams;
use serde_json::{json, Value};
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_posture");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

/// World frame: x right, y up, front is -z. Directions are unit-ish vectors.
fn frame(n: u64, arm: [f64; 3], fore: [f64; 3]) -> Value {
    let shoulder = [0.2, 1.4, 0.0];
    let elbow = [shoulder[0] + 0.3 * arm[0], shoulder[1] + 0.3 * arm[1], shoulder[2] + 0.3 * arm[2]];
    let wrist = [elbow[0] + 0.25 * fore[0], elbow[1] + 0.25 * fore[1], elbow[2] + 0.25 * fore[2]];
    json!({
        "frame": n,
        "joints": {
            "torso": [0.0, 1.1, 0.0],
            "left_shoulder": [-0.2, 1.4, 0.0],
            "right_shoulder": shoulder,
            "right_elbow": elbow,
            "right_wrist": wrist,
        }
    })
}

const FRONT: [f64; 3] = [0.0, 0.0, -1.0];
const UP: [f64; 3] = [0.0, 1.0, 0.0];
const DOWN: [f64; 3] = [0.0, -1.0, 0.0];
const OUTSIDE: [f64; 3] = [1.0, 0.0, 0.0];

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn frames(&self, name: &str, frames: &[Value]) -> String {
        let text: String = frames.iter().map(|f| format!("{f}\n")).collect();
        self.write(name, &text)
    }

    fn write(&self, name: &str, text: &str) -> String {
        let p = self.path(name);
        fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_owned()
    }

    fn learn(&self, store: &str, input: &[Value], name: &str, tolerance: f64, class: &str) -> Output {
        let input = self.frames(&format!("{name}.jsonl"), input);
        run(&[
            "learn",
            "--input",
            &input,
            "--store",
            store,
            "--name",
            name,
            "--tolerance",
            &tolerance.to_string(),
            "--action-class",
            class,
        ])
    }

    fn store_path(&self) -> String {
        self.path("store.json").to_str().unwrap().to_owned()
    }
}

fn default_ground() -> posture_core::GroundDistance {
    GroundParams::default().build().unwrap()
}

fn oracle(a: &[f64], b: &[f64]) -> f64 {
    let g = default_ground();
    let cost: Vec<f64> = g.rows().into_iter().flatten().collect();
    lp_oracle::transport_cost(a, b, &cost)
}

fn dense(masses: &Value) -> Vec<f64> {
    vocab::MODAL.iter().map(|t| masses.get(*t).and_then(Value::as_f64).unwrap_or(0.0)).collect()
}

fn read_store(path: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn fuzzify_emits_unit_lfs_per_frame() {
    let ws = Workspace::new();
    let input = ws.frames("in.jsonl", &[frame(1, FRONT, FRONT), frame(2, [0.0, 0.5, -0.866], [0.3, 0.2, -0.93])]);
    let out = run(&["fuzzify", "--input", &input]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let lines: Vec<Value> = stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["frame"], 1);
    assert_eq!(lines[0]["lfs"], json!({"front": 1.0}));
    for l in &lines {
        let sum: f64 = dense(&l["lfs"]).iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        let a = &l["angles"];
        assert!((0.0..=180.0).contains(&a["a_theta"].as_f64().unwrap()));
        assert!((0.0..=90.0).contains(&a["f_psi"].as_f64().unwrap()));
    }
}

#[test]
fn fuzzify_accepts_stdin() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(BIN)
        .args(["fuzzify", "--input", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    writeln!(child.stdin.take().unwrap(), "{}", frame(4, UP, UP)).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["lfs"], json!({"up": 1.0}));
}

#[test]
fn missing_joint_names_the_frame() {
    let ws = Workspace::new();
    let mut bad = frame(7, FRONT, FRONT);
    bad["joints"].as_object_mut().unwrap().remove("right_wrist");
    let input = ws.frames("in.jsonl", &[frame(1, FRONT, FRONT), bad]);

    let out = run(&["fuzzify", "--input", &input]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("frame 7"), "{}", stderr(&out));
    assert!(stderr(&out).contains("right_wrist"));
    assert!(stdout(&out).is_empty(), "no partial output on failure");

    let out = run(&["fuzzify", "--input", &input, "--skip-bad-frames"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 1);
    assert!(stderr(&out).contains("warning"));
}

#[test]
fn malformed_line_is_a_parse_failure() {
    let ws = Workspace::new();
    let input = ws.write("in.jsonl", "{not json\n");
    assert_eq!(code(&run(&["fuzzify", "--input", &input])), 1);
    let missing = ws.path("absent.jsonl");
    assert_eq!(code(&run(&["fuzzify", "--input", missing.to_str().unwrap()])), 1);
}

#[test]
fn learn_is_idempotent_and_replaces_by_name() {
    let ws = Workspace::new();
    let store = ws.store_path();
    let samples = [frame(1, FRONT, FRONT), frame(2, [0.0, -0.07, -0.997], [0.0, -0.05, -0.998])];
    assert_eq!(code(&ws.learn(&store, &samples, "pointing", 0.3, "classical")), 0);
    assert_eq!(code(&ws.learn(&store, &[frame(1, UP, UP)], "raise", 0.3, "emergency")), 0);
    let first = fs::read_to_string(&store).unwrap();
    assert_eq!(code(&ws.learn(&store, &samples, "pointing", 0.3, "classical")), 0);
    assert_eq!(code(&ws.learn(&store, &[frame(1, UP, UP)], "raise", 0.3, "emergency")), 0);
    assert_eq!(first, fs::read_to_string(&store).unwrap());

    assert_eq!(code(&ws.learn(&store, &[frame(1, DOWN, DOWN)], "pointing", 0.1, "classical")), 0);
    let v = read_store(&store);
    let refs = v.as_array().unwrap();
    assert_eq!(refs.len(), 2);
    assert_eq!(refs[0]["name"], "pointing");
    assert_eq!(refs[0]["masses"], json!({"down": 1.0}));
    assert_eq!(refs[0]["tolerance"], 0.1);
    assert_eq!(refs[1]["action_class"], "emergency");
    assert_eq!(refs[1]["action_id"], "raise");
}

#[test]
fn learn_rejects_bad_input() {
    let ws = Workspace::new();
    let store = ws.store_path();
    assert_eq!(code(&ws.learn(&store, &[frame(1, UP, UP)], "raise", -1.0, "classical")), 2);
    assert!(!Path::new(&store).exists());
    let empty = ws.write("empty.jsonl", "\n");
    let out = run(&["learn", "--input", &empty, "--store", &store, "--name", "x", "--tolerance", "0.1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn learned_reference_is_sample_mean() {
    let ws = Workspace::new();
    let store = ws.store_path();
    let samples = [frame(1, FRONT, FRONT), frame(2, UP, UP)];
    assert_eq!(code(&ws.learn(&store, &samples, "mix", 0.2, "classical")), 0);
    let v = read_store(&store);
    assert_eq!(v[0]["masses"], json!({"front": 0.5, "up": 0.5}));
}

fn two_reference_store(ws: &Workspace, tol: f64) -> String {
    let store = ws.store_path();
    assert_eq!(code(&ws.learn(&store, &[frame(1, FRONT, FRONT)], "pointing", tol, "classical")), 0);
    assert_eq!(code(&ws.learn(&store, &[frame(1, UP, UP)], "raise", tol, "emergency")), 0);
    store
}

#[test]
fn decide_report_matches_oracle_distances() {
    let ws = Workspace::new();
    let store = two_reference_store(&ws, 0.3);
    let frames = [
        frame(1, FRONT, FRONT),
        frame(2, [0.0, 0.6, -0.8], [0.0, 0.8, -0.6]),
        frame(3, OUTSIDE, [0.0, 0.7, -0.71]),
        frame(4, [0.0, 0.99, -0.14], UP),
    ];
    let input = ws.frames("in.jsonl", &frames);
    let lfs = run(&["fuzzify", "--input", &input]);
    let out = run(&["decide", "--input", &input, "--store", &store, "--json", "--top", "24"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let store_v = read_store(&store);
    let records = report["records"].as_array().unwrap();
    assert_eq!(records.len(), 4);
    for (rec, line) in records.iter().zip(stdout(&lfs).lines()) {
        let measured = dense(&serde_json::from_str::<Value>(line).unwrap()["lfs"]);
        let top: f64 = rec["top_terms"].as_array().unwrap().iter().map(|p| p[1].as_f64().unwrap()).sum();
        assert!((top - 1.0).abs() < 1e-12);
        for r in store_v.as_array().unwrap() {
            let name = r["name"].as_str().unwrap();
            let got = rec["outcome"]["distances"][name].as_f64().unwrap();
            let want = oracle(&measured, &dense(&r["masses"]));
            assert!((got - want).abs() < 1e-7, "{name}: {got} vs {want}");
        }
    }
    assert_eq!(records[0]["outcome"]["chosen_action"], "pointing");
    assert_eq!(records[3]["outcome"]["chosen_action"], "raise");
    let counts = report["summary"]["counts"].as_object().unwrap();
    let total: u64 = counts.values().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(total, 4);
    assert_eq!(counts["closest"], 4);
    assert_eq!(counts["skipped"], 0);
    assert_eq!(report["strategy"], "nearest");
}

#[test]
fn decide_tolerance_strategies_and_abstention() {
    let ws = Workspace::new();
    let store = two_reference_store(&ws, 0.3);
    // Arm outside lies at distance 1 from both references.
    let input = ws.frames("in.jsonl", &[frame(1, OUTSIDE, OUTSIDE), frame(2, UP, UP)]);
    let out = run(&["decide", "--input", &input, "--store", &store, "--json", "--strategy", "tolerance_strict"]);
    assert_eq!(code(&out), 0, "abstention is not an error");
    let r: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(r["records"][0]["outcome"]["rationale"], "outside_tolerance");
    assert_eq!(r["records"][0]["outcome"]["chosen_action"], Value::Null);
    assert_eq!(r["records"][1]["outcome"]["rationale"], "within_tolerance");

    let out = run(&["decide", "--input", &input, "--store", &store, "--json", "--strategy", "emergency_priority"]);
    let r: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(r["records"][1]["outcome"]["rationale"], "emergency");
    assert_eq!(r["records"][1]["outcome"]["chosen_action"], "raise");
}

#[test]
fn strict_overlap_fails_before_any_frame() {
    let ws = Workspace::new();
    let store = two_reference_store(&ws, 0.6);
    let input = ws.frames("in.jsonl", &[frame(1, FRONT, FRONT)]);
    let out = run(&["decide", "--input", &input, "--store", &store, "--strategy", "tolerance_strict"]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).is_empty());
    assert!(stderr(&out).contains("pointing"));

    let out = run(&["decide", "--input", &input, "--store", &store, "--strategy", "tolerance_overlap"]);
    assert_eq!(code(&out), 0);

    let out = run(&["validate", "--store", &store, "--strategy", "tolerance_strict", "--json"]);
    assert_eq!(code(&out), 3);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["overlaps"].as_array().unwrap().len(), 1);
    assert_eq!(v["overlaps"][0]["tolerance_sum"], 1.2);
}

#[test]
fn decide_skips_bad_frames_into_the_report() {
    let ws = Workspace::new();
    let store = two_reference_store(&ws, 0.3);
    let mut bad = frame(2, FRONT, FRONT);
    bad["joints"]["right_elbow"] = json!([0.2, 1.4, 0.0]);
    let text = format!("{}\n{}\n{{broken\n", frame(1, FRONT, FRONT), bad);
    let input = ws.write("in.jsonl", &text);

    let out = run(&["decide", "--input", &input, "--store", &store]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("frame 2"));

    let out = run(&["decide", "--input", &input, "--store", &store, "--json", "--skip-bad-frames"]);
    assert_eq!(code(&out), 0);
    let r: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(r["summary"]["frames"], 3);
    assert_eq!(r["summary"]["counts"]["skipped"], 2);
    assert_eq!(r["records"][1]["frame"], 2);
    assert_eq!(r["records"][2]["frame"], Value::Null);
    assert_eq!(r["records"][2]["line"], 3);
}

#[test]
fn decide_needs_a_store() {
    let ws = Workspace::new();
    let input = ws.frames("in.jsonl", &[frame(1, FRONT, FRONT)]);
    let empty = ws.write("store.json", "[]");
    assert_eq!(code(&run(&["decide", "--input", &input, "--store", &empty])), 3);
    let broken = ws.write("broken.json", "[{");
    assert_eq!(code(&run(&["decide", "--input", &input, "--store", &broken])), 1);
}

#[test]
fn store_written_by_hand_is_accepted() {
    let ws = Workspace::new();
    let store = ws.write(
        "store.json",
        &json!([
            {"name": "pointing", "masses": {"front": 0.8, "fronthmiddle": 0.2}, "tolerance": 0.25,
             "action_class": "classical", "action_id": "point"},
            {"name": "stop", "masses": {"updown": 0.0, "up": 1.0}, "tolerance": 0.25,
             "action_class": "emergency", "action_id": "halt"},
        ])
        .to_string(),
    );
    let input = ws.frames("in.jsonl", &[frame(1, UP, UP)]);
    // `updown` is not a modal term.
    assert_eq!(code(&run(&["decide", "--input", &input, "--store", &store])), 2);

    let store = ws.write(
        "store.json",
        &json!([
            {"name": "pointing", "masses": {"front": 0.8, "fronthmiddle": 0.2}, "tolerance": 0.25,
             "action_class": "classical", "action_id": "point"},
            {"name": "stop", "masses": {"up": 1.0}, "tolerance": 0.25,
             "action_class": "emergency", "action_id": "halt"},
        ])
        .to_string(),
    );
    let out = run(&["decide", "--input", &input, "--store", &store, "--json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(r["records"][0]["outcome"]["chosen_action"], "halt");
    let got = r["records"][0]["outcome"]["distances"]["pointing"].as_f64().unwrap();
    let want = oracle(&dense(&json!({"up": 1.0})), &dense(&json!({"front": 0.8, "fronthmiddle": 0.2})));
    assert!((got - want).abs() < 1e-9 && (want - 1.2).abs() < 1e-9, "{got} vs {want}");
}

#[test]
fn distance_table_is_symmetric_and_matches_oracle() {
    let ws = Workspace::new();
    let store = ws.store_path();
    ws.learn(&store, &[frame(1, FRONT, FRONT), frame(2, [0.0, 0.3, -0.95], FRONT)], "a", 0.1, "classical");
    ws.learn(&store, &[frame(1, UP, UP)], "b", 0.1, "classical");
    ws.learn(&store, &[frame(1, OUTSIDE, [0.0, 1.0, 0.0])], "c", 0.1, "classical");
    let out = run(&["distance", "--store", &store, "--json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let t: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let refs = read_store(&store);
    let masses: Vec<Vec<f64>> = refs.as_array().unwrap().iter().map(|r| dense(&r["masses"])).collect();
    assert_eq!(t["names"], json!(["a", "b", "c"]));
    for i in 0..3 {
        assert_eq!(t["matrix"][i][i], 0.0);
        for j in 0..3 {
            let d = t["matrix"][i][j].as_f64().unwrap();
            assert_eq!(d, t["matrix"][j][i].as_f64().unwrap());
            if i != j {
                assert!((d - oracle(&masses[i], &masses[j])).abs() < 1e-7);
            }
        }
    }
    let text = run(&["distance", "--store", &store]);
    assert_eq!(stdout(&text).lines().count(), 4);
}

#[test]
fn distance_needs_two_references() {
    let ws = Workspace::new();
    let store = ws.store_path();
    ws.learn(&store, &[frame(1, UP, UP)], "only", 0.1, "classical");
    assert_eq!(code(&run(&["distance", "--store", &store])), 2);
}

#[test]
fn ground_file_in_any_term_order() {
    let ws = Workspace::new();
    let store = two_reference_store(&ws, 0.3);
    let mut doc = GroundDoc::from_ground(&default_ground());
    let n = doc.lexicon.len();
    let perm: Vec<usize> = (0..n).rev().collect();
    doc = GroundDoc {
        lexicon: perm.iter().map(|&i| doc.lexicon[i].clone()).collect(),
        matrix: perm.iter().map(|&i| perm.iter().map(|&j| doc.matrix[i][j]).collect()).collect(),
    };
    let ground = ws.write("ground.json", &serde_json::to_string(&doc).unwrap());
    let a = run(&["distance", "--store", &store, "--json"]);
    let b = run(&["distance", "--store", &store, "--json", "--ground", &ground]);
    assert_eq!(code(&b), 0, "{}", stderr(&b));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn non_metric_ground_warns_and_reports() {
    let ws = Workspace::new();
    let store = two_reference_store(&ws, 0.1);
    let mut doc = GroundDoc::from_ground(&default_ground());
    let up = doc.lexicon.iter().position(|t| t == "up").unwrap();
    let front = doc.lexicon.iter().position(|t| t == "front").unwrap();
    doc.matrix[up][front] = 2.9;
    doc.matrix[front][up] = 2.9;
    let ground = ws.write("ground.json", &serde_json::to_string(&doc).unwrap());
    let out = run(&["validate", "--store", &store, "--ground", &ground, "--json"]);
    assert_eq!(code(&out), 0);
    assert!(stderr(&out).contains("triangle"));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["ground_is_metric"], false);
    assert!(v["triangle_violations"].as_u64().unwrap() > 0);

    doc.matrix[up][front] = -1.0;
    doc.matrix[front][up] = -1.0;
    let ground = ws.write("ground.json", &serde_json::to_string(&doc).unwrap());
    assert_eq!(code(&run(&["validate", "--ground", &ground])), 3);
}

#[test]
fn config_sets_defaults_and_is_checked() {
    let ws = Workspace::new();
    let store = two_reference_store(&ws, 0.3);
    let input = ws.frames("in.jsonl", &[frame(1, OUTSIDE, OUTSIDE)]);
    let cfg = ws.write("cfg.json", r#"{"decision": {"strategy": "tolerance_overlap"}}"#);
    let out = run(&["--config", &cfg, "decide", "--input", &input, "--store", &store, "--json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(r["strategy"], "tolerance_overlap");
    assert_eq!(r["records"][0]["outcome"]["rationale"], "outside_tolerance");

    let cfg = ws.write("cfg.json", r#"{"decision": {"strategy": "nearest", "max_distance": 0.5}}"#);
    let out = run(&["--config", &cfg, "decide", "--input", &input, "--store", &store, "--json"]);
    let r: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(r["records"][0]["outcome"]["chosen_action"], Value::Null);

    let cfg = ws.write("cfg.json", r#"{"unknown": 1}"#);
    assert_eq!(code(&run(&["--config", &cfg, "validate"])), 3);
    let cfg = ws.write("cfg.json", r#"{"max_dist": 3, "shoulder_min": 1, "elbow_min": 0.2}"#);
    assert_eq!(code(&run(&["--config", &cfg, "validate"])), 0);
    let cfg = ws.write("cfg.json", "{");
    assert_eq!(code(&run(&["--config", &cfg, "validate"])), 1);
}

#[test]
fn unknown_strategy_is_rejected() {
    let out = run(&["validate", "--strategy", "loudest"]);
    assert_ne!(code(&out), 0);
    assert!(stderr(&out).contains("loudest"));
}
