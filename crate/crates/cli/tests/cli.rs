use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lambda_g::frontend::{parse_program, pretty};
use lambda_g_cli::{replay_jsonl, EXIT_BUDGET, EXIT_CHECK, EXIT_OK, EXIT_PARSE, EXIT_TYPE};
use tempfile::TempDir;

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(format!("{name}.lg"))
}

fn lg(args: &[&str], file: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lg"))
        .args(args)
        .arg(file)
        .output()
        .expect("lg runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(src: &str) -> (TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("prog.lg");
    fs::write(&path, src).unwrap();
    (dir, path)
}

#[test]
fn check_prints_the_type() {
    let o = lg(&["check"], &corpus("parallel_or"));
    assert_eq!(code(&o), EXIT_OK);
    assert_eq!(stdout(&o), "Bool -> Bool -> Bool\n");
}

#[test]
fn parse_errors_exit_2_with_a_position() {
    let (_d, path) = scratch("atom p;\nmain = \\x:p. ;\n");
    let o = lg(&["check"], &path);
    assert_eq!(code(&o), EXIT_PARSE);
    assert!(stderr(&o).contains("2:"), "{}", stderr(&o));
    let o = lg(&["check"], Path::new("/nonexistent/prog.lg"));
    assert_eq!(code(&o), EXIT_PARSE);
}

#[test]
fn type_errors_exit_3() {
    let (_d, path) = scratch("atom p, q;\nconst f : p -> q;\nconst y : q;\nmain = f y;\n");
    let o = lg(&["normalize"], &path);
    assert_eq!(code(&o), EXIT_TYPE);
    assert!(stdout(&o).is_empty());
}

#[test]
fn budget_exhaustion_exits_4() {
    let o = lg(
        &["normalize", "--max-steps", "3"],
        &corpus("parallel_or_FF"),
    );
    assert_eq!(code(&o), EXIT_BUDGET);
    assert!(stderr(&o).contains('3'));
}

#[test]
fn unsupported_terms_exit_5() {
    let (_d, path) =
        scratch("const x : Bool;\nmain = if true then (x ||[a : Bool ~ Bool] x) else x;\n");
    let o = lg(&["normalize"], &path);
    assert_eq!(code(&o), EXIT_CHECK);
}

#[test]
fn normalize_prints_the_normal_form() {
    let o = lg(&["normalize"], &corpus("parallel_or_FF"));
    assert_eq!(code(&o), EXIT_OK);
    assert_eq!(stdout(&o), "false\n");
    let o = lg(&["normalize"], &corpus("code_mobility"));
    assert_eq!(stdout(&o), "h <9, 7>\n");
}

#[test]
fn analyze_selected_checks() {
    let o = lg(
        &["analyze", "--checks", "subformula,parallel"],
        &corpus("buyer_vendor"),
    );
    assert_eq!(code(&o), EXIT_OK);
    let text = stdout(&o);
    assert!(text.contains("PASS subformula"), "{text}");
    assert!(text.contains("PASS parallel"), "{text}");
    assert!(!text.contains("normal"), "{text}");
}

#[test]
fn analyze_json_report() {
    let o = lg(&["analyze", "--format", "json"], &corpus("data_passing"));
    assert_eq!(code(&o), EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["passed"], serde_json::Value::Bool(true));
    assert_eq!(v["subject"], "k m");
    assert_eq!(v["checks"].as_array().unwrap().len(), 4);
}

#[test]
fn fmt_rewrites_in_canonical_layout() {
    let src = fs::read_to_string(corpus("buyer_vendor")).unwrap();
    let (_d, path) = scratch(&src);
    assert_eq!(code(&lg(&["fmt"], &path)), EXIT_OK);
    let once = fs::read_to_string(&path).unwrap();
    assert_eq!(code(&lg(&["fmt"], &path)), EXIT_OK);
    assert_eq!(fs::read_to_string(&path).unwrap(), once);
    let before = parse_program(&src).unwrap();
    let after = parse_program(&once).unwrap();
    assert_eq!(pretty(&before.main), pretty(&after.main));
    assert_eq!(before.rules, after.rules);
}

#[test]
fn jsonl_trace_replays_to_the_normal_form() {
    for name in [
        "parallel_or_FF",
        "data_passing",
        "buyer_vendor",
        "code_mobility",
    ] {
        let o = lg(&["normalize", "--trace", "jsonl"], &corpus(name));
        assert_eq!(code(&o), EXIT_OK);
        let text = stdout(&o);
        let last = text.lines().last().unwrap();
        for line in text.lines().filter(|l| l.starts_with('{')) {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(
                v["step"].is_u64()
                    && v["rule"].is_string()
                    && v["path"].is_array()
                    && v["term"].is_string()
            );
        }
        let program = parse_program(&fs::read_to_string(corpus(name)).unwrap()).unwrap();
        let nf = replay_jsonl(&program, &text).unwrap();
        assert_eq!(pretty(&nf), last, "{name}");
    }
}

#[test]
fn tampered_trace_is_rejected() {
    let o = lg(
        &["normalize", "--trace", "jsonl"],
        &corpus("parallel_or_FF"),
    );
    let text = stdout(&o).replacen("\"rule\":\"PermLam\"", "\"rule\":\"Beta\"", 1);
    let program = parse_program(&fs::read_to_string(corpus("parallel_or_FF")).unwrap()).unwrap();
    assert!(replay_jsonl(&program, &text).is_err());
}

#[test]
fn runs_are_deterministic_and_parallel_mode_agrees() {
    for name in ["parallel_or_Tu", "code_mobility", "linearity"] {
        let a = lg(&["normalize", "--trace", "jsonl"], &corpus(name));
        let b = lg(&["normalize", "--trace", "jsonl"], &corpus(name));
        let c = lg(
            &["normalize", "--trace", "jsonl", "--parallel"],
            &corpus(name),
        );
        assert_eq!(a.stdout, b.stdout, "{name}");
        assert_eq!(a.stdout, c.stdout, "{name}");
    }
}

#[test]
fn text_trace_lists_steps_before_the_result() {
    let o = lg(&["normalize", "--trace", "text"], &corpus("data_passing"));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(
        lines[0].trim_start().starts_with("1 CrossFull"),
        "{}",
        lines[0]
    );
    assert_eq!(*lines.last().unwrap(), "k m");
}
