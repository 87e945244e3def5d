use std::path::PathBuf;

use lambda_g::analyze::{check_subformula_property, check_subject_reduction, parallel_form_report};
use lambda_g::frontend::{parse_program, pretty, print_program, Program};
use lambda_g::kernel::{alpha_eq, free_vars};
use lambda_g::strategy::{normalize_master, StrategyConfig};
use lambda_g::typing::TypeEnv;

const GOLDEN: &[(&str, &str, &str)] = &[
    ("parallel_or", "Bool -> Bool -> Bool", ""),
    ("parallel_or_FF", "Bool", "false"),
    ("parallel_or_uT", "Bool", "true"),
    ("parallel_or_Tu", "Bool", "true"),
    ("data_passing", "F", "k m"),
    ("buyer_vendor", "Bool", "deliver (use \"card\")"),
    ("code_mobility", "Nat", "h <9, 7>"),
    (
        "loop_guard",
        "p -> p",
        "(\\y:p. a y) ||[a : p ~ p] \\z:p. a z",
    ),
    (
        "linearity",
        "(((p -> q) -> q -> p) -> q -> p) /\\ (((q -> p) -> p -> q) -> p -> q)",
        "",
    ),
];

fn load(name: &str) -> Program {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(format!("{name}.lg"));
    parse_program(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn types_and_normal_forms() {
    for &(name, ty, nf) in GOLDEN {
        let p = load(name);
        assert_eq!(p.check().unwrap().to_string(), ty, "{name}");
        let n = normalize_master(&p.main, &p.engine(), StrategyConfig::default()).unwrap();
        if !nf.is_empty() {
            assert_eq!(pretty(&n.term), nf, "{name}");
        }
    }
}

#[test]
fn normal_forms_pass_the_checkers() {
    for &(name, _, _) in GOLDEN {
        let p = load(name);
        let n = normalize_master(&p.main, &p.engine(), StrategyConfig::default()).unwrap();
        assert!(parallel_form_report(&n.term).passed(), "{name}");
        let env: TypeEnv = free_vars(&n.term).unwrap().into_iter().collect();
        let report = check_subformula_property(&n.term, &env).unwrap();
        assert!(report.passed(), "{name}: {report}");
        let report = check_subject_reduction(&n.trace, &p.env(), &p.engine()).unwrap();
        assert!(report.passed(), "{name}: {report}");
    }
}

#[test]
fn parallel_runs_match_sequential_runs() {
    for &(name, _, _) in GOLDEN {
        let p = load(name);
        let seq = normalize_master(&p.main, &p.engine(), StrategyConfig::default()).unwrap();
        let cfg = StrategyConfig {
            parallel: true,
            ..StrategyConfig::default()
        };
        let par = normalize_master(&p.main, &p.engine(), cfg).unwrap();
        assert_eq!(seq, par, "{name}");
    }
}

#[test]
fn programs_survive_formatting() {
    for &(name, _, _) in GOLDEN {
        let p = load(name);
        let printed = print_program(&p);
        let again = parse_program(&printed).unwrap();
        assert!(alpha_eq(&p.main, &again.main), "{name}");
        assert_eq!(p.rules, again.rules, "{name}");
        assert_eq!(print_program(&again), printed, "{name}");
    }
}
