//! End-to-end tests of the `fincat` binary: exit codes, report shape, and
//! determinism across repeated runs.

use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

const EXIT_OK: i32 = 0;
const EXIT_FAILED: i32 = 1;
const EXIT_INPUT: i32 = 2;
const EXIT_BUDGET: i32 = 3;

struct Run {
    code: i32,
    stdout: String,
}

impl Run {
    fn report(&self) -> Value {
        serde_json::from_str(&self.stdout).expect("stdout is a JSON report")
    }

    fn verdict(&self) -> Value {
        self.report()["verdict"].clone()
    }

    fn status(&self) -> String {
        self.verdict()["status"]
            .as_str()
            .expect("verdict carries a status")
            .to_owned()
    }
}

fn fincat(args: &[&str]) -> Run {
    let output = Command::new(env!("CARGO_BIN_EXE_fincat"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: output.status.code().expect("binary exits normally"),
        stdout: String::from_utf8(output.stdout).expect("stdout is UTF-8"),
    }
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).expect("fixture written");
    path.to_str().expect("UTF-8 path").to_owned()
}

const ARROW: &str = r#"{
  "objects": ["A", "B"],
  "morphisms": [{"name": "f", "dom": "A", "cod": "B"}]
}"#;

const PARALLEL: &str = r#"{
  "objects": ["A", "B"],
  "morphisms": [
    {"name": "f", "dom": "A", "cod": "B"},
    {"name": "g", "dom": "A", "cod": "B"}
  ]
}"#;

/// Composition table that breaks associativity at (f, f, g).
const NON_ASSOCIATIVE: &str = r#"{
  "objects": ["X"],
  "morphisms": [
    {"name": "f", "dom": "X", "cod": "X"},
    {"name": "g", "dom": "X", "cod": "X"}
  ],
  "composition": [
    {"first": "f", "then": "f", "equals": "g"},
    {"first": "f", "then": "g", "equals": "g"},
    {"first": "g", "then": "f", "equals": "g"},
    {"first": "g", "then": "g", "equals": "f"}
  ]
}"#;

#[test]
fn validate_accepts_well_formed_category() {
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "arrow.json", ARROW);
    let run = fincat(&["validate", &path]);
    assert_eq!(run.code, EXIT_OK);
    assert_eq!(run.status(), "valid");
    let report = run.report();
    assert_eq!(report["command"], "validate");
    assert_eq!(report["verdict"]["kind"], "category");
    assert_eq!(report["verdict"]["details"]["objects"], 2);
    assert_eq!(report["verdict"]["details"]["morphisms"], 3);
    let digest = report["inputs"]["path"]["sha256"]
        .as_str()
        .expect("input digest recorded");
    assert_eq!(digest.len(), 64);
}

#[test]
fn validate_rejects_broken_composition_with_exit_one() {
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "bad.json", NON_ASSOCIATIVE);
    let run = fincat(&["validate", &path]);
    assert_eq!(run.code, EXIT_FAILED);
    assert_eq!(run.status(), "invalid");
    let witness = run.verdict()["witness"].as_str().unwrap().to_owned();
    assert!(
        witness.contains("associativity"),
        "witness names the broken law: {witness}"
    );
}

#[test]
fn missing_file_is_an_input_error() {
    let run = fincat(&["validate", "/nonexistent/nope.json"]);
    assert_eq!(run.code, EXIT_INPUT);
    assert_eq!(run.status(), "input-error");
}

#[test]
fn malformed_json_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "broken.json", "{ not json");
    let run = fincat(&["validate", &path]);
    assert_eq!(run.code, EXIT_INPUT);
    assert_eq!(run.status(), "input-error");
}

#[test]
fn validate_describes_other_input_kinds() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "arrow.json", ARROW);
    let task = write(
        dir.path(),
        "task.json",
        r#"{
          "base": "arrow.json",
          "variance": "contravariant",
          "on_objects": {"A": ["p"], "B": ["q", "r"]},
          "on_morphisms": {"f": {"q": "p", "r": "p"}}
        }"#,
    );
    let run = fincat(&["validate", &task]);
    assert_eq!(run.code, EXIT_OK);
    assert_eq!(run.verdict()["kind"], "task");
    assert_eq!(run.verdict()["details"]["variance"], "contravariant");

    // Zero-mass transitions are written by omission, never as "0".
    let lm = write(
        dir.path(),
        "lm.json",
        r#"{
          "tokens": ["a", "b"],
          "N": 2,
          "next": {
            "aa": {"a": "1/2", "b": "1/2"},
            "ab": {"a": "1"},
            "ba": {"a": "1/4", "b": "3/4"},
            "bb": {"b": "1"}
          }
        }"#,
    );
    let run = fincat(&["validate", &lm]);
    assert_eq!(run.code, EXIT_OK);
    assert_eq!(run.verdict()["kind"], "markov-lm");
    assert_eq!(run.verdict()["details"]["window"], 2);
}

#[test]
fn prompt_finds_the_relabeled_representing_object() {
    let dir = TempDir::new().unwrap();
    let cat = write(dir.path(), "parallel.json", PARALLEL);
    let task = write(
        dir.path(),
        "task.json",
        r#"{
          "base": "parallel.json",
          "variance": "contravariant",
          "on_objects": {"A": ["p", "q"], "B": ["r"]},
          "on_morphisms": {"f": {"r": "p"}, "g": {"r": "q"}}
        }"#,
    );
    let run = fincat(&["prompt", &cat, &task]);
    assert_eq!(run.code, EXIT_OK);
    assert_eq!(run.status(), "solvable");
    assert_eq!(run.verdict()["prompt"], "B");
    assert_eq!(run.verdict()["isomorphism"]["A"]["f"], "p");
    assert_eq!(run.verdict()["isomorphism"]["A"]["g"], "q");
    assert_eq!(run.verdict()["isomorphism"]["B"]["id_B"], "r");
}

#[test]
fn prompt_reports_unsolvable_with_witnesses_and_exit_one() {
    let dir = TempDir::new().unwrap();
    let cat = write(dir.path(), "arrow.json", ARROW);
    let task = write(
        dir.path(),
        "task.json",
        r#"{
          "base": "arrow.json",
          "variance": "contravariant",
          "on_objects": {"A": ["p"], "B": ["q", "r"]},
          "on_morphisms": {"f": {"q": "p", "r": "p"}}
        }"#,
    );
    let run = fincat(&["prompt", &cat, &task]);
    assert_eq!(run.code, EXIT_FAILED);
    assert_eq!(run.status(), "unsolvable");
    let witnesses = run.verdict()["witnesses"].clone();
    for candidate in ["A", "B"] {
        assert_eq!(
            witnesses[candidate]["kind"], "cardinality-mismatch",
            "candidate {candidate} is ruled out by counting"
        );
    }
}

#[test]
fn prompt_with_covariant_task_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let cat = write(dir.path(), "arrow.json", ARROW);
    let task = write(
        dir.path(),
        "cotask.json",
        r#"{
          "base": "arrow.json",
          "variance": "covariant",
          "on_objects": {"A": ["u"], "B": ["v", "w"]},
          "on_morphisms": {"f": {"u": "v"}}
        }"#,
    );
    let run = fincat(&["prompt", &cat, &task]);
    assert_eq!(run.code, EXIT_INPUT);
}

#[test]
fn prompt_with_mismatched_base_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let cat = write(dir.path(), "parallel.json", PARALLEL);
    write(dir.path(), "arrow.json", ARROW);
    let task = write(
        dir.path(),
        "task.json",
        r#"{
          "base": "arrow.json",
          "variance": "contravariant",
          "on_objects": {"A": ["p"], "B": []},
          "on_morphisms": {}
        }"#,
    );
    let run = fincat(&["prompt", &cat, &task]);
    assert_eq!(run.code, EXIT_INPUT);
}

#[test]
fn exhausted_budget_exits_three() {
    let dir = TempDir::new().unwrap();
    let cat = write(dir.path(), "parallel.json", PARALLEL);
    let task = write(
        dir.path(),
        "task.json",
        r#"{
          "base": "parallel.json",
          "variance": "contravariant",
          "on_objects": {"A": ["p", "q"], "B": ["r"]},
          "on_morphisms": {"f": {"r": "p"}, "g": {"r": "q"}}
        }"#,
    );
    let run = fincat(&["prompt", &cat, &task, "--budget", "1"]);
    assert_eq!(run.code, EXIT_BUDGET);
    assert_eq!(run.status(), "budget-exceeded");
    assert_eq!(run.verdict()["required_families"], "2");
}

#[test]
fn finetune_reports_pointwise_bijections() {
    let dir = TempDir::new().unwrap();
    let cat = write(dir.path(), "arrow.json", ARROW);
    let task = write(
        dir.path(),
        "cotask.json",
        r#"{
          "base": "arrow.json",
          "variance": "covariant",
          "on_objects": {"A": ["u"], "B": ["v", "w"]},
          "on_morphisms": {"f": {"u": "v"}}
        }"#,
    );
    let run = fincat(&["finetune", &cat, &task]);
    assert_eq!(run.code, EXIT_OK);
    assert_eq!(run.status(), "solved");
    let bijections = run.verdict()["bijections"].clone();
    assert_eq!(bijections["A"].as_object().unwrap().len(), 1);
    assert_eq!(bijections["B"].as_object().unwrap().len(), 2);
}

#[test]
fn finetune_with_contravariant_task_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let cat = write(dir.path(), "arrow.json", ARROW);
    let task = write(
        dir.path(),
        "task.json",
        r#"{
          "base": "arrow.json",
          "variance": "contravariant",
          "on_objects": {"A": ["p"], "B": []},
          "on_morphisms": {}
        }"#,
    );
    let run = fincat(&["finetune", &cat, &task]);
    assert_eq!(run.code, EXIT_INPUT);
}

fn chain_fixture(dir: &Path) -> String {
    write(dir, "arrow.json", ARROW);
    write(
        dir,
        "chain.json",
        r#"{
          "categories": [
            "arrow.json",
            {
              "objects": ["A", "B", "C"],
              "morphisms": [
                {"name": "f", "dom": "A", "cod": "B"},
                {"name": "g", "dom": "B", "cod": "C"},
                {"name": "h", "dom": "A", "cod": "C"}
              ],
              "composition": [{"first": "f", "then": "g", "equals": "h"}]
            }
          ],
          "functors": [{"on_objects": {"A": "B", "B": "C"}, "on_morphisms": {"f": "g"}}],
          "training_subset": ["B"]
        }"#,
    )
}

#[test]
fn chain_preserves_structure_and_decodes_novel_objects() {
    let dir = TempDir::new().unwrap();
    let chain = chain_fixture(dir.path());
    let run = fincat(&["chain", &chain]);
    assert_eq!(run.code, EXIT_OK);
    assert_eq!(run.status(), "preserved");
    let verdict = run.verdict();
    assert_eq!(verdict["decode"]["A"], "B");
    assert_eq!(verdict["decode"]["B"], "C");
    assert_eq!(verdict["novel_decodes"], serde_json::json!(["C"]));
    assert_eq!(
        verdict["image_objects"],
        serde_json::json!(["B", "C"]),
        "image of the embedding"
    );
    let pairs = verdict["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 4, "all ordered object pairs are checked");
    for pair in pairs {
        assert_eq!(pair["hom_size"], pair["transformation_count"]);
    }
}

#[test]
fn chain_rejects_a_functor_that_is_not_a_full_embedding() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "arrow.json", ARROW);
    write(dir.path(), "parallel.json", PARALLEL);
    // f is hit but g is not, so the functor is not full.
    let chain = write(
        dir.path(),
        "chain.json",
        r#"{
          "categories": ["arrow.json", "parallel.json"],
          "functors": [{"on_objects": {"A": "A", "B": "B"}, "on_morphisms": {"f": "f"}}]
        }"#,
    );
    let run = fincat(&["chain", &chain]);
    assert_eq!(run.code, EXIT_FAILED);
    assert_eq!(run.status(), "invalid");
}

#[test]
fn reports_are_identical_across_runs_apart_from_timing() {
    let dir = TempDir::new().unwrap();
    let chain = chain_fixture(dir.path());
    let mut snapshots = Vec::new();
    for _ in 0..2 {
        let run = fincat(&["chain", &chain]);
        assert_eq!(run.code, EXIT_OK);
        let mut report = run.report();
        report
            .as_object_mut()
            .unwrap()
            .insert("timing_ms".into(), Value::from(0));
        snapshots.push(serde_json::to_string(&report).unwrap());
    }
    assert_eq!(snapshots[0], snapshots[1]);
}

#[test]
fn text_format_renders_the_same_verdict() {
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "arrow.json", ARROW);
    let run = fincat(&["--format", "text", "validate", &path]);
    assert_eq!(run.code, EXIT_OK);
    assert!(run.stdout.contains("status: valid"), "{}", run.stdout);
    assert!(run.stdout.contains("command: validate"));
}

#[test]
fn seed_and_budget_are_recorded_in_params() {
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "arrow.json", ARROW);
    let run = fincat(&["--seed", "7", "--budget", "123", "validate", &path]);
    assert_eq!(run.code, EXIT_OK);
    let report = run.report();
    assert_eq!(report["params"]["seed"], 7);
    assert_eq!(report["params"]["budget"], 123);
}

#[test]
fn all_demo_scenarios_succeed() {
    for scenario in ["rotation", "contrastive", "masked", "lm", "clip-analog"] {
        let run = fincat(&["demo", scenario]);
        assert_eq!(run.code, EXIT_OK, "demo {scenario} failed: {}", run.stdout);
        assert!(run.report()["verdict"]["status"].is_string());
    }
}

#[test]
fn demo_lm_reproduces_the_worked_mixture() {
    let run = fincat(&["demo", "lm"]);
    assert_eq!(run.code, EXIT_OK);
    let verdict = run.verdict();
    let step1 = verdict["objects"]["Z1"].clone();
    assert_eq!(step1["aa"], "1/8");
    assert_eq!(step1["ab"], "3/8");
    assert_eq!(step1["ba"], "1/4");
    assert_eq!(step1["bb"], "1/4");
}
