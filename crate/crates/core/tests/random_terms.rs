mod common;

use lambda_g::analyze::{check_subject_reduction, verify_trace};
use lambda_g::kernel::{Formula, Name};
use lambda_g::rewrite::{Engine, RuleTag};
use lambda_g::strategy::{normalize_master, StrategyConfig};
use lambda_g::typing::infer;

use common::{TermGen, MAX_NODES, MAX_PARS};

const SEED: u64 = 0xC0FFEE;
const COUNT: usize = 400;

#[test]
fn generator_respects_limits_and_types() {
    let mut g = TermGen::new(SEED);
    for _ in 0..COUNT {
        let (t, ty) = g.term();
        assert!(t.size() <= MAX_NODES);
        assert!(t.par_count() <= MAX_PARS);
        assert_eq!(infer(&g.free_env(), &t).unwrap(), ty);
    }
}

#[test]
fn population_exercises_cross_reductions() {
    let mut g = TermGen::new(SEED);
    let mut with_cross = 0;
    for _ in 0..COUNT {
        let (t, _) = g.term();
        let n = normalize_master(&t, &Engine::default(), StrategyConfig::default()).unwrap();
        if n.trace.iter().any(|s| s.rule == RuleTag::CrossFull) {
            with_cross += 1;
        }
    }
    assert!(
        with_cross * 10 >= COUNT,
        "only {with_cross} of {COUNT} runs use CrossFull"
    );
}

#[test]
fn weakening_keeps_the_type() {
    let mut g = TermGen::new(SEED + 1);
    for _ in 0..COUNT {
        let (t, ty) = g.term();
        let env = g.free_env();
        let mut wider = env.clone();
        wider.insert(
            Name::new("unused"),
            Formula::imp(Formula::Bot, Formula::atom("p")),
        );
        assert_eq!(infer(&wider, &t).unwrap(), ty);
    }
}

#[test]
fn strategy_traces_replay_and_preserve_types() {
    let mut g = TermGen::new(SEED + 2);
    for _ in 0..COUNT {
        let (t, _) = g.term();
        let env = g.free_env();
        let engine = Engine::default();
        let n = normalize_master(&t, &engine, StrategyConfig::default()).unwrap();
        let replay = Engine::default();
        replay.avoid_names_in(&t);
        verify_trace(&replay, &t, &n.trace).unwrap();
        let report = check_subject_reduction(&n.trace, &env, &Engine::default()).unwrap();
        assert!(report.passed(), "{report}");
    }
}

#[test]
fn parallel_mode_matches_sequential() {
    let mut g = TermGen::new(SEED + 3);
    for _ in 0..COUNT {
        let (t, _) = g.term();
        let seq = normalize_master(&t, &Engine::default(), StrategyConfig::default()).unwrap();
        let par = normalize_master(
            &t,
            &Engine::default(),
            StrategyConfig {
                parallel: true,
                ..StrategyConfig::default()
            },
        )
        .unwrap();
        assert_eq!(seq, par);
    }
}
