//! Terminating normalization: parallel-form conversion, the 𝒜-complexity measure, the
//! side reduction `≻` and the master algorithm `N`.

use std::cmp::Reverse;
use std::collections::BTreeSet;

use thiserror::Error;

use crate::kernel::{
    formula_size, free_vars, occurrences_of, prime_factors, proper_subformulas, strong_subformulas,
    Formula, Name, Path, Term,
};
use crate::rewrite::{drop_rule, Engine, ReductionStep, RewriteError, RuleTag};
use crate::typing::{infer, TypeEnv, TypeError};

pub const DEFAULT_MAX_STEPS: usize = 1_000_000;

/// The 𝒜-complexity `(c, d, l, o)` of a parallel composition, ordered lexicographically.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComplexityTuple {
    pub c: usize,
    pub d: usize,
    pub l: usize,
    pub o: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StrategyConfig {
    pub max_steps: usize,
    /// Normalize the two branches of a non-redex composition concurrently.
    pub parallel: bool,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig {
            max_steps: DEFAULT_MAX_STEPS,
            parallel: false,
        }
    }
}

/// Receives basic steps as they are performed.
pub trait TraceSink {
    fn record(&mut self, step: ReductionStep);
}

impl TraceSink for Vec<ReductionStep> {
    fn record(&mut self, step: ReductionStep) {
        self.push(step);
    }
}

/// Counts steps without keeping them.
#[derive(Debug, Default)]
pub struct Discard;

impl TraceSink for Discard {
    fn record(&mut self, _: ReductionStep) {}
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormError {
    #[error("step budget of {limit} exceeded")]
    BudgetExceeded {
        limit: usize,
        partial: Box<Term>,
        trace: Vec<ReductionStep>,
    },
    #[error("no strategy step applies at {path:?}: {reason}")]
    Stuck { path: Path, reason: String },
    #[error("unsupported at {path:?}: {reason}")]
    Unsupported { path: Path, reason: String },
    #[error("{0}")]
    Rewrite(#[from] RewriteError),
    #[error("{0}")]
    Type(#[from] TypeError),
}

impl NormError {
    fn under(self, prefix: &[usize]) -> NormError {
        let join = |p: Path| [prefix, &p].concat();
        match self {
            NormError::Stuck { path, reason } => NormError::Stuck {
                path: join(path),
                reason,
            },
            NormError::Unsupported { path, reason } => NormError::Unsupported {
                path: join(path),
                reason,
            },
            other => other,
        }
    }
}

/// A normal form together with the steps that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub term: Term,
    pub trace: Vec<ReductionStep>,
}

/// Every `Par` node lies on a top spine above `Par`-free terms.
pub fn is_parallel_form(t: &Term) -> bool {
    match t {
        Term::Par { left, right, .. } => is_parallel_form(left) && is_parallel_form(right),
        _ => t.is_par_free(),
    }
}

/// Paths of the `Par` nodes on the top spine of `t`, in pre-order.
pub fn spine_pars(t: &Term) -> Vec<Path> {
    fn go(t: &Term, path: &mut Path, out: &mut Vec<Path>) {
        if let Term::Par { left, right, .. } = t {
            out.push(path.clone());
            for (i, c) in [left, right].into_iter().enumerate() {
                path.push(i);
                go(c, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

/// Proper subformulas of `ty` together with the strong subformulas of `hyps`.
pub fn a_set<'a>(ty: &Formula, hyps: impl IntoIterator<Item = &'a Formula>) -> BTreeSet<Formula> {
    let mut set = proper_subformulas(ty);
    for h in hyps {
        set.extend(strong_subformulas(h));
    }
    set
}

/// 𝒜 for `t`, read off its type and the types of its free variables.
pub fn a_set_of(t: &Term) -> Result<BTreeSet<Formula>, TypeError> {
    let fv = free_vars(t)?;
    let ty = infer(&TypeEnv::from(fv.clone()), t)?;
    Ok(a_set(&ty, fv.values()))
}

/// Largest prime factor of the kind lying outside `aset`.
pub fn kind_complexity(kind: (&Formula, &Formula), aset: &BTreeSet<Formula>) -> usize {
    prime_factors(kind.0)
        .into_iter()
        .chain(prime_factors(kind.1))
        .filter(|p| !aset.contains(p))
        .map(|p| formula_size(&p))
        .max()
        .unwrap_or(0)
}

fn par_c(t: &Term, aset: &BTreeSet<Formula>) -> usize {
    match t {
        Term::Par {
            left_kind,
            right_kind,
            ..
        } => kind_complexity((left_kind, right_kind), aset),
        _ => 0,
    }
}

/// The leftmost-outermost intuitionistic redex of `t`.
pub fn leftmost_redex(engine: &Engine, t: &Term) -> Option<Path> {
    fn go(engine: &Engine, t: &Term, path: &mut Path) -> bool {
        if engine.intuitionistic_redex(t).is_some() {
            return true;
        }
        for i in 0..t.arity() {
            path.push(i);
            if go(engine, t.child(i).unwrap(), path) {
                return true;
            }
            path.pop();
        }
        false
    }
    let mut path = Vec::new();
    go(engine, t, &mut path).then_some(path)
}

/// Leftmost-outermost intuitionistic normal form and the number of contractions.
pub fn intuitionistic_normalize(t: &Term, engine: &Engine) -> (Term, usize) {
    let mut t = t.clone();
    let mut n = 0;
    while let Some(p) = leftmost_redex(engine, &t) {
        t = engine
            .step_intuitionistic(&t, &p)
            .expect("located redex contracts")
            .0;
        n += 1;
    }
    (t, n)
}

/// The 𝒜-complexity of a `Par` node; `l` is measured on a scratch name supply.
pub fn a_complexity(sub: &Term, aset: &BTreeSet<Formula>, engine: &Engine) -> ComplexityTuple {
    let Term::Par {
        chan, left, right, ..
    } = sub
    else {
        return ComplexityTuple::default();
    };
    let d = left.par_count() + right.par_count();
    let l = if d == 0 {
        let scratch = engine.fork();
        intuitionistic_normalize(left, &scratch).1 + intuitionistic_normalize(right, &scratch).1
    } else {
        0
    };
    ComplexityTuple {
        c: par_c(sub, aset),
        d,
        l,
        o: occurrences_of(left, chan).len() + occurrences_of(right, chan).len(),
    }
}

fn child(at: &[usize], i: usize) -> Path {
    let mut p = at.to_vec();
    p.push(i);
    p
}

fn join(at: &[usize], rel: &[usize]) -> Path {
    [at, rel].concat()
}

/// Rename every `base#n` with `n >= from` to `base#(n + by)`.
fn shift_fresh(t: &Term, from: u64, by: u64) -> Term {
    let shift = |n: &Name| match n.suffix() {
        Some(k) if k >= from => Name::new(&format!("{}#{}", n.base(), k + by)),
        _ => n.clone(),
    };
    let mut out = match t {
        Term::Var { name, ty } => return Term::var_n(shift(name), ty.clone()),
        _ => t.clone(),
    };
    for i in 0..t.arity() {
        out = out.with_child(i, shift_fresh(t.child(i).unwrap(), from, by));
    }
    match &mut out {
        Term::Lam { var, .. } => *var = shift(var),
        Term::Par { chan, .. } => *chan = shift(chan),
        _ => {}
    }
    out
}

struct Machine<'s> {
    engine: Engine,
    root: Term,
    steps: usize,
    limit: usize,
    parallel: bool,
    sink: &'s mut dyn TraceSink,
}

struct ChildRun {
    result: Result<(), NormError>,
    trace: Vec<ReductionStep>,
    next_name: u64,
}

impl Machine<'_> {
    fn node(&self, at: &[usize]) -> &Term {
        self.root.subterm_at(at).expect("focus path is valid")
    }

    fn charge(&self) -> Result<(), NormError> {
        if self.steps >= self.limit {
            Err(NormError::BudgetExceeded {
                limit: self.limit,
                partial: Box::new(self.root.clone()),
                trace: Vec::new(),
            })
        } else {
            Ok(())
        }
    }

    fn emit(&mut self, step: ReductionStep) {
        self.steps += 1;
        self.root = step.after.clone();
        self.sink.record(step);
    }

    fn fire(&mut self, at: &[usize], rule: RuleTag) -> Result<(), NormError> {
        self.charge()?;
        let after = self.engine.apply(&self.root, at, rule)?;
        let before = std::mem::replace(&mut self.root, after.clone());
        self.emit(ReductionStep {
            rule,
            path: at.to_vec(),
            before,
            after,
        });
        Ok(())
    }

    fn intuitionistic(&mut self, at: &[usize]) -> Result<(), NormError> {
        while let Some(rel) = leftmost_redex(&self.engine, self.node(at)) {
            let p = join(at, &rel);
            let rule = self
                .engine
                .intuitionistic_redex(self.node(&p))
                .expect("located redex");
            self.fire(&p, rule)?;
        }
        Ok(())
    }

    fn parallelize(&mut self, at: &[usize]) -> Result<(), NormError> {
        if self.node(at).is_par_free() {
            return Ok(());
        }
        for i in 0..self.node(at).arity() {
            self.parallelize(&child(at, i))?;
        }
        self.lift(at)
    }

    /// Push the node at `at` below the `Par` nodes of its (parallel-form) children.
    fn lift(&mut self, at: &[usize]) -> Result<(), NormError> {
        let node = self.node(at);
        let rule = match node {
            Term::App(f, _) if f.is_par() => RuleTag::PermAppL,
            Term::App(_, x) if x.is_par() => RuleTag::PermAppR,
            Term::Pair(a, _) if a.is_par() => RuleTag::PermPairL,
            Term::Pair(_, b) if b.is_par() => RuleTag::PermPairR,
            Term::Lam { body, .. } if body.is_par() => RuleTag::PermLam,
            Term::Proj(u, _) if u.is_par() => RuleTag::PermProj,
            Term::Efq(_, u) if u.is_par() => RuleTag::PermEfq,
            Term::Ite(..) if !node.is_par_free() => {
                return Err(NormError::Unsupported {
                    path: at.to_vec(),
                    reason: "parallel composition inside a conditional".into(),
                })
            }
            _ => return Ok(()),
        };
        self.fire(at, rule)?;
        self.lift(&child(at, 0))?;
        self.lift(&child(at, 1))
    }

    fn master(&mut self, at: &[usize]) -> Result<(), NormError> {
        loop {
            if !is_parallel_form(self.node(at)) {
                self.parallelize(at)?;
            }
            if self.node(at).is_par_free() {
                return self.intuitionistic(at);
            }
            if !self.engine.is_root_redex(self.node(at)) {
                self.branches(at)?;
                if !self.engine.is_root_redex(self.node(at)) {
                    return Ok(());
                }
                continue;
            }
            let aset = a_set_of(self.node(at))?;
            let scored: Vec<(Path, usize, usize)> = spine_pars(self.node(at))
                .into_iter()
                .map(|p| {
                    let sub = self.node(at).subterm_at(&p).unwrap();
                    (p.clone(), par_c(sub, &aset), sub.size())
                })
                .collect();
            let r = scored.iter().map(|s| s.1).max().unwrap_or(0);
            if r == 0 {
                let rule = drop_rule(self.node(at)).ok_or_else(|| NormError::Stuck {
                    path: at.to_vec(),
                    reason: "root redex of complexity 0 admits no drop".into(),
                })?;
                self.fire(at, rule)?;
                continue;
            }
            let w_rel = scored
                .iter()
                .filter(|s| s.1 == r)
                .min_by_key(|s| s.2)
                .map(|s| s.0.clone())
                .unwrap();
            let w = join(at, &w_rel);
            let aset_w = a_set_of(self.node(&w))?;
            while self.max_c_within(&w, &aset) >= r {
                self.side_step(&w, &aset_w)?;
            }
        }
    }

    fn max_c_within(&self, at: &[usize], aset: &BTreeSet<Formula>) -> usize {
        let node = self.node(at);
        spine_pars(node)
            .iter()
            .map(|p| par_c(node.subterm_at(p).unwrap(), aset))
            .max()
            .unwrap_or(0)
    }

    /// One `≻` step inside the subterm at `at`.
    fn side_step(&mut self, at: &[usize], aset: &BTreeSet<Formula>) -> Result<(), NormError> {
        let node = self.node(at);
        let mut best: Option<(ComplexityTuple, Reverse<usize>, Path)> = None;
        for p in spine_pars(node) {
            let sub = node.subterm_at(&p).unwrap();
            let key = (a_complexity(sub, aset, &self.engine), Reverse(sub.size()));
            if best.as_ref().is_none_or(|b| (key.0, key.1) > (b.0, b.1)) {
                best = Some((key.0, key.1, p));
            }
        }
        let Some((tuple, _, rel)) = best else {
            return Err(NormError::Stuck {
                path: at.to_vec(),
                reason: "no parallel composition to reduce".into(),
            });
        };
        let n = join(at, &rel);
        let drop = drop_rule(self.node(&n));
        if tuple.d > 0 {
            let rule = match self.node(&n) {
                Term::Par { left, .. } if left.is_par() => RuleTag::PermParParL,
                _ => RuleTag::PermParParR,
            };
            self.fire(&n, rule)
        } else if tuple.l > 0 {
            self.intuitionistic(&child(&n, 0))?;
            self.intuitionistic(&child(&n, 1))
        } else if let Some(rule) = drop {
            self.fire(&n, rule)
        } else if tuple.c > 0 {
            self.fire(&n, RuleTag::CrossFull)?;
            self.intuitionistic(&join(&n, &[0, 0]))?;
            self.intuitionistic(&join(&n, &[1, 0]))?;
            for p in [child(&n, 0), child(&n, 1), n.clone()] {
                if let Some(rule) = drop_rule(self.node(&p)) {
                    self.fire(&p, rule)?;
                }
            }
            Ok(())
        } else {
            Err(NormError::Stuck {
                path: n,
                reason:
                    "selected composition has complexity 0 and its channel occurs in both branches"
                        .into(),
            })
        }
    }

    fn branches(&mut self, at: &[usize]) -> Result<(), NormError> {
        let (l, r) = (child(at, 0), child(at, 1));
        if !self.parallel {
            self.master(&l)?;
            return self.master(&r);
        }
        let start = self.engine.names().peek();
        let remaining = self.limit - self.steps;
        let spawn = |t: Term, engine: Engine| {
            move || {
                let mut trace = Vec::new();
                let mut m = Machine {
                    engine,
                    root: t,
                    steps: 0,
                    limit: remaining,
                    parallel: true,
                    sink: &mut trace,
                };
                let result = m.master(&[]);
                let next_name = m.engine.names().peek();
                ChildRun {
                    result,
                    trace,
                    next_name,
                }
            }
        };
        let (left_run, right_run) = rayon::join(
            spawn(self.node(&l).clone(), self.engine.fork()),
            spawn(self.node(&r).clone(), self.engine.fork()),
        );
        let used_left = left_run.next_name - start;
        self.splice(&l, left_run.trace, |t| t)?;
        left_run.result.map_err(|e| self.rebase(e, &l))?;
        self.splice(&r, right_run.trace, |t| shift_fresh(&t, start, used_left))?;
        right_run.result.map_err(|e| self.rebase(e, &r))?;
        self.engine
            .names()
            .advance_to(start + used_left + (right_run.next_name - start));
        Ok(())
    }

    /// Replay a branch-local trace as root-level steps.
    fn splice(
        &mut self,
        at: &[usize],
        trace: Vec<ReductionStep>,
        fix: impl Fn(Term) -> Term,
    ) -> Result<(), NormError> {
        for s in trace {
            self.charge()?;
            let after = self.root.replace_at(at, fix(s.after));
            self.emit(ReductionStep {
                rule: s.rule,
                path: join(at, &s.path),
                before: self.root.clone(),
                after,
            });
        }
        Ok(())
    }

    fn rebase(&self, e: NormError, at: &[usize]) -> NormError {
        match e {
            NormError::BudgetExceeded { .. } => NormError::BudgetExceeded {
                limit: self.limit,
                partial: Box::new(self.root.clone()),
                trace: Vec::new(),
            },
            other => other.under(at),
        }
    }
}

fn machine<'s>(
    t: &Term,
    engine: &Engine,
    cfg: StrategyConfig,
    sink: &'s mut dyn TraceSink,
) -> Machine<'s> {
    engine.avoid_names_in(t);
    Machine {
        engine: engine.clone(),
        root: t.clone(),
        steps: 0,
        limit: cfg.max_steps,
        parallel: cfg.parallel,
        sink,
    }
}

fn collect<F>(t: &Term, engine: &Engine, cfg: StrategyConfig, f: F) -> Result<Normalized, NormError>
where
    F: FnOnce(&mut Machine) -> Result<(), NormError>,
{
    let mut trace = Vec::new();
    let mut m = machine(t, engine, cfg, &mut trace);
    let result = f(&mut m);
    let term = m.root;
    match result {
        Ok(()) => Ok(Normalized { term, trace }),
        Err(NormError::BudgetExceeded { limit, partial, .. }) => Err(NormError::BudgetExceeded {
            limit,
            partial,
            trace,
        }),
        Err(e) => Err(e),
    }
}

/// Convert to parallel form using permutation reductions only.
pub fn to_parallel_form(t: &Term, engine: &Engine) -> Result<Normalized, NormError> {
    collect(t, engine, StrategyConfig::default(), |m| m.parallelize(&[]))
}

/// One `≻` step on a term in parallel form, with 𝒜 taken from the whole term.
pub fn side_reduce(t: &Term, engine: &Engine) -> Result<Normalized, NormError> {
    let aset = a_set_of(t)?;
    collect(t, engine, StrategyConfig::default(), |m| {
        m.side_step(&[], &aset)
    })
}

/// Run the master algorithm, streaming steps into `sink`. Returns the normal form and the
/// number of steps.
pub fn normalize_into(
    t: &Term,
    engine: &Engine,
    cfg: StrategyConfig,
    sink: &mut dyn TraceSink,
) -> Result<(Term, usize), NormError> {
    crate::typing::type_of(t)?;
    let mut m = machine(t, engine, cfg, sink);
    m.master(&[])?;
    Ok((m.root, m.steps))
}

/// Run the master algorithm and return the normal form with its full trace.
pub fn normalize_master(
    t: &Term,
    engine: &Engine,
    cfg: StrategyConfig,
) -> Result<Normalized, NormError> {
    crate::typing::type_of(t)?;
    collect(t, engine, cfg, |m| m.master(&[]))
}
