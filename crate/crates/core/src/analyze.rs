//! Executable checks of the metatheory: subformula property, parallel normal form, bound
//! hypotheses, applied occurrences and subject reduction.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::kernel::{
    alpha_eq, free_names, free_vars, is_proper_subformula, is_strong_subformula, is_subformula,
    occurrences_of, prime_factors, Formula, Name, Path, Term,
};
use crate::rewrite::{Engine, ReductionStep, RewriteError, RuleTag};
use crate::strategy::is_parallel_form;
use crate::typing::{infer, visit_typed, TypeEnv, TypeError};

pub const SUBFORMULA: &str = "subformula";
pub const PARALLEL: &str = "parallel";
pub const NORMAL: &str = "normal";
pub const SUBJECT_REDUCTION: &str = "subject-reduction";
pub const BOUND_HYPOTHESIS: &str = "bound-hypothesis";
pub const APPLIED_OCCURRENCES: &str = "applied-occurrences";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Where the failure was found; always present when `passed` is false.
    pub witness: Option<Path>,
    pub detail: String,
}

impl CheckResult {
    pub fn pass(name: &str, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            passed: true,
            witness: None,
            detail: detail.into(),
        }
    }

    pub fn fail(name: &str, witness: Path, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            passed: false,
            witness: Some(witness),
            detail: detail.into(),
        }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed {
            write!(f, "PASS {}", self.name)?;
        } else {
            write!(f, "FAIL {}", self.name)?;
            if let Some(w) = &self.witness {
                write!(f, " at {w:?}")?;
            }
        }
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisReport {
    pub subject: Term,
    pub checks: Vec<CheckResult>,
}

impl AnalysisReport {
    pub fn new(subject: Term) -> Self {
        AnalysisReport {
            subject,
            checks: Vec::new(),
        }
    }

    pub fn single(subject: Term, check: CheckResult) -> Self {
        AnalysisReport {
            subject,
            checks: vec![check],
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn extend(&mut self, other: AnalysisReport) {
        self.checks.extend(other.checks);
    }
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "subject: {}", self.subject)?;
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("trace is not replayable at step {step}: {reason}")]
    NotReplayable { step: usize, reason: String },
    #[error("{0}")]
    Type(#[from] TypeError),
}

/// `env` extended with the free variables of `t` it does not mention.
fn closing_env(env: &TypeEnv, t: &Term) -> Result<TypeEnv, TypeError> {
    let mut env = env.clone();
    for (x, ty) in free_vars(t)? {
        if env.get(&x).is_none() {
            env.insert(x, ty);
        }
    }
    Ok(env)
}

/// Whether the innermost binder of the variable at `path` is a parallel composition.
fn is_bound_channel(t: &Term, path: &[usize], x: &Name) -> bool {
    let mut node = t;
    let mut channel = false;
    for &i in path {
        match node {
            Term::Par { chan, .. } if chan == x => channel = true,
            Term::Lam { var, .. } if var == x => channel = false,
            _ => {}
        }
        node = node.child(i).unwrap();
    }
    channel
}

/// Normal forms only contain subformulas of the hypotheses and the conclusion, and every
/// channel kind is built from proper subformulas of them.
pub fn check_subformula_property(t: &Term, env: &TypeEnv) -> Result<AnalysisReport, AnalysisError> {
    let ty = infer(env, t)?;
    let roots: Vec<Formula> = env.types().cloned().chain(std::iter::once(ty)).collect();
    let subs: BTreeSet<Formula> = roots.iter().flat_map(crate::kernel::subformulas).collect();
    let proper = |p: &Formula| roots.iter().any(|r| is_proper_subformula(p, r));
    let mut failure: Option<CheckResult> = None;
    visit_typed(env, t, &mut |path, node, node_ty, _| {
        if failure.is_some() {
            return;
        }
        if let Term::Par {
            chan,
            left_kind,
            right_kind,
            ..
        } = node
        {
            let bad = prime_factors(left_kind)
                .into_iter()
                .chain(prime_factors(right_kind))
                .find(|p| !proper(p));
            if let Some(p) = bad {
                failure = Some(CheckResult::fail(
                    SUBFORMULA,
                    path.clone(),
                    format!(
                        "channel `{chan}` has prime factor `{p}` outside the proper subformulas"
                    ),
                ));
                return;
            }
        }
        if let Term::Var { name, .. } = node {
            if is_bound_channel(t, path, name) {
                return;
            }
        }
        let ok = subs.contains(node_ty) || prime_factors(node_ty).iter().all(|p| subs.contains(p));
        if !ok {
            failure = Some(CheckResult::fail(
                SUBFORMULA,
                path.clone(),
                format!("subterm type `{node_ty}` is not built from subformulas"),
            ));
        }
    })?;
    let result = failure.unwrap_or_else(|| CheckResult::pass(SUBFORMULA, ""));
    Ok(AnalysisReport::single(t.clone(), result))
}

/// No parallel composition below a non-parallel constructor.
pub fn check_parallel_form(t: &Term) -> bool {
    is_parallel_form(t)
}

pub fn parallel_form_report(t: &Term) -> AnalysisReport {
    let mut witness = None;
    fn find(t: &Term, under: bool, path: &mut Path, out: &mut Option<Path>) {
        if out.is_some() {
            return;
        }
        if t.is_par() && under {
            *out = Some(path.clone());
            return;
        }
        for i in 0..t.arity() {
            path.push(i);
            find(t.child(i).unwrap(), under || !t.is_par(), path, out);
            path.pop();
        }
    }
    find(t, false, &mut Vec::new(), &mut witness);
    let check = match witness {
        None => CheckResult::pass(PARALLEL, ""),
        Some(w) => CheckResult::fail(
            PARALLEL,
            w,
            "parallel composition below another constructor",
        ),
    };
    AnalysisReport::single(t.clone(), check)
}

pub fn normal_report(t: &Term, engine: &Engine) -> AnalysisReport {
    let check = match engine.find_redexes(t).into_iter().next() {
        None => CheckResult::pass(NORMAL, ""),
        Some((path, rule)) => CheckResult::fail(NORMAL, path, format!("{rule} applies")),
    };
    AnalysisReport::single(t.clone(), check)
}

fn require_simple_normal(t: &Term) -> Result<(), AnalysisError> {
    if !t.is_par_free() {
        return Err(AnalysisError::Precondition(
            "term contains a parallel composition".into(),
        ));
    }
    if !Engine::default().is_intuitionistic_normal(t) {
        return Err(AnalysisError::Precondition(
            "term is not in normal form".into(),
        ));
    }
    Ok(())
}

/// Every bound variable of a normal simply typed term has a type that is a proper
/// subformula of a prime factor of the conclusion or a strong subformula of a hypothesis.
pub fn check_bound_hypothesis(t: &Term, env: &TypeEnv) -> Result<AnalysisReport, AnalysisError> {
    require_simple_normal(t)?;
    let ty = infer(env, t)?;
    let factors = prime_factors(&ty);
    let mut failure = None;
    t.visit(&mut |path, node| {
        if let (None, Term::Lam { var, ty: b, .. }) = (&failure, node) {
            let ok = factors.iter().any(|f| is_proper_subformula(b, f))
                || env.types().any(|a| is_strong_subformula(b, a));
            if !ok {
                failure = Some(CheckResult::fail(
                    BOUND_HYPOTHESIS,
                    path.clone(),
                    format!("bound `{var}` : `{b}` is not licensed"),
                ));
            }
        }
    });
    let check = failure.unwrap_or_else(|| CheckResult::pass(BOUND_HYPOTHESIS, ""));
    Ok(AnalysisReport::single(t.clone(), check))
}

/// Every occurrence of `z` is eliminated, unless its type is `bot`, a subformula of the
/// conclusion or a proper subformula of another hypothesis.
pub fn check_applied_occurrences(
    t: &Term,
    z: &Name,
    env: &TypeEnv,
) -> Result<AnalysisReport, AnalysisError> {
    require_simple_normal(t)?;
    let b = env
        .get(z)
        .cloned()
        .ok_or_else(|| AnalysisError::Precondition(format!("`{z}` is not in the environment")))?;
    if !free_names(t).contains(z) {
        return Err(AnalysisError::Precondition(format!(
            "`{z}` does not occur free"
        )));
    }
    let ty = infer(env, t)?;
    let exempt = b == Formula::Bot
        || is_subformula(&b, &ty)
        || env
            .iter()
            .any(|(x, a)| x != z && is_proper_subformula(&b, a));
    if exempt {
        return Ok(AnalysisReport::single(
            t.clone(),
            CheckResult::pass(APPLIED_OCCURRENCES, "type is exempt"),
        ));
    }
    for occ in occurrences_of(t, z) {
        let applied = match occ.path.split_last() {
            Some((&i, parent)) => matches!(
                (i, t.subterm_at(parent)),
                (0, Some(Term::App(..) | Term::Proj(..)))
            ),
            None => false,
        };
        if !applied {
            return Ok(AnalysisReport::single(
                t.clone(),
                CheckResult::fail(
                    APPLIED_OCCURRENCES,
                    occ.path,
                    format!("`{z}` occurs unapplied"),
                ),
            ));
        }
    }
    Ok(AnalysisReport::single(
        t.clone(),
        CheckResult::pass(APPLIED_OCCURRENCES, ""),
    ))
}

/// Every step keeps the type and does not add free variables; steps must chain and replay.
pub fn check_subject_reduction(
    trace: &[ReductionStep],
    env: &TypeEnv,
    engine: &Engine,
) -> Result<AnalysisReport, AnalysisError> {
    let subject = trace
        .first()
        .map(|s| s.before.clone())
        .unwrap_or_else(|| Term::Bool(true));
    let mut report = AnalysisReport::new(subject);
    let mut skip_link = false;
    for (i, s) in trace.iter().enumerate() {
        if i > 0 && !skip_link && !alpha_eq(&trace[i - 1].after, &s.before) {
            return Err(AnalysisError::NotReplayable {
                step: i + 1,
                reason: "step does not start where the previous one ended".into(),
            });
        }
        let env_b = closing_env(env, &s.before)?;
        let ty_b = infer(&env_b, &s.before)?;
        let ty_a = closing_env(env, &s.after).and_then(|e| infer(&e, &s.after));
        let fv_grew = !free_names(&s.after).is_subset(&free_names(&s.before));
        let failure = match ty_a {
            Ok(ty_a) if ty_a != ty_b => Some(format!(
                "step {} ({}) changes `{ty_b}` into `{ty_a}`",
                i + 1,
                s.rule
            )),
            Err(e) => Some(format!(
                "step {} ({}) produces an ill-typed term: {e}",
                i + 1,
                s.rule
            )),
            Ok(_) if fv_grew => Some(format!("step {} ({}) adds free variables", i + 1, s.rule)),
            Ok(_) => None,
        };
        if let Some(detail) = failure {
            report
                .checks
                .push(CheckResult::fail(SUBJECT_REDUCTION, s.path.clone(), detail));
            skip_link = true;
            continue;
        }
        skip_link = false;
        let replayed =
            engine
                .apply(&s.before, &s.path, s.rule)
                .map_err(|e| AnalysisError::NotReplayable {
                    step: i + 1,
                    reason: e.to_string(),
                })?;
        if !alpha_eq(&replayed, &s.after) {
            return Err(AnalysisError::NotReplayable {
                step: i + 1,
                reason: format!(
                    "{} at {:?} does not produce the recorded term",
                    s.rule, s.path
                ),
            });
        }
    }
    if report.checks.is_empty() {
        report.checks.push(CheckResult::pass(
            SUBJECT_REDUCTION,
            format!("{} steps", trace.len()),
        ));
    }
    Ok(report)
}

/// Re-run a sequence of `(rule, path)` steps from `start`.
pub fn replay(
    engine: &Engine,
    start: &Term,
    steps: &[(RuleTag, Path)],
) -> Result<Vec<ReductionStep>, (usize, RewriteError)> {
    let mut t = start.clone();
    let mut out = Vec::with_capacity(steps.len());
    for (i, (rule, path)) in steps.iter().enumerate() {
        let s = engine.step(&t, path, *rule).map_err(|e| (i + 1, e))?;
        t = s.after.clone();
        out.push(s);
    }
    Ok(out)
}

/// Check that a trace chains from `start` and that each step replays.
pub fn verify_trace(
    engine: &Engine,
    start: &Term,
    trace: &[ReductionStep],
) -> Result<(), AnalysisError> {
    let mut t = start.clone();
    for (i, s) in trace.iter().enumerate() {
        let bad = |reason: String| AnalysisError::NotReplayable {
            step: i + 1,
            reason,
        };
        if !alpha_eq(&t, &s.before) {
            return Err(bad(
                "step does not start where the previous one ended".into()
            ));
        }
        let next = engine
            .apply(&t, &s.path, s.rule)
            .map_err(|e| bad(e.to_string()))?;
        if !alpha_eq(&next, &s.after) {
            return Err(bad("recorded result differs".into()));
        }
        t = next;
    }
    Ok(())
}
