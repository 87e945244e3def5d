use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::formula::{Formula, Name};
use super::names::NameSupply;
use super::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScopeError {
    #[error("variable `{name}` is used at both `{first}` and `{second}`")]
    InconsistentType {
        name: Name,
        first: Formula,
        second: Formula,
    },
}

/// Free variables of `t` with their annotated types.
pub fn free_vars(t: &Term) -> Result<BTreeMap<Name, Formula>, ScopeError> {
    fn go(
        t: &Term,
        bound: &mut Vec<Name>,
        out: &mut BTreeMap<Name, Formula>,
    ) -> Result<(), ScopeError> {
        match t {
            Term::Var { name, ty } => {
                if bound.contains(name) {
                    return Ok(());
                }
                match out.get(name) {
                    Some(prev) if prev != ty => Err(ScopeError::InconsistentType {
                        name: name.clone(),
                        first: prev.clone(),
                        second: ty.clone(),
                    }),
                    Some(_) => Ok(()),
                    None => {
                        out.insert(name.clone(), ty.clone());
                        Ok(())
                    }
                }
            }
            _ => {
                if let Some(b) = t.binder() {
                    bound.push(b.clone());
                }
                let r = t.children().try_for_each(|c| go(c, bound, out));
                if t.binder().is_some() {
                    bound.pop();
                }
                r
            }
        }
    }
    let mut out = BTreeMap::new();
    go(t, &mut Vec::new(), &mut out)?;
    Ok(out)
}

/// Names occurring free in `t`.
pub fn free_names(t: &Term) -> BTreeSet<Name> {
    fn go(t: &Term, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match t {
            Term::Var { name, .. } => {
                if !bound.contains(name) {
                    out.insert(name.clone());
                }
            }
            _ => {
                if let Some(b) = t.binder() {
                    bound.push(b.clone());
                }
                for c in t.children() {
                    go(c, bound, out);
                }
                if t.binder().is_some() {
                    bound.pop();
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

pub fn occurs_free(t: &Term, x: &Name) -> bool {
    match t {
        Term::Var { name, .. } => name == x,
        _ if t.binder() == Some(x) => false,
        _ => t.children().any(|c| occurs_free(c, x)),
    }
}

#[derive(Clone)]
enum Repl {
    Term(Term, BTreeSet<Name>),
    Rename(Name),
}

impl Repl {
    fn captures(&self, x: &Name) -> bool {
        match self {
            Repl::Term(_, fv) => fv.contains(x),
            Repl::Rename(n) => n == x,
        }
    }
}

fn subst_go(t: &Term, sigma: &[(Name, Repl)], names: &NameSupply) -> Term {
    match t {
        Term::Var { name, ty } => match sigma.iter().find(|(k, _)| k == name) {
            Some((_, Repl::Term(u, _))) => u.clone(),
            Some((_, Repl::Rename(n))) => Term::var_n(n.clone(), ty.clone()),
            None => t.clone(),
        },
        _ => {
            let active: Vec<(Name, Repl)> = sigma
                .iter()
                .filter(|(k, _)| Some(k) != t.binder() && occurs_free(t, k))
                .cloned()
                .collect();
            if active.is_empty() {
                return t.clone();
            }
            let mut inner = active;
            if let Some(b) = t.binder() {
                if inner.iter().any(|(_, r)| r.captures(b)) {
                    inner.push((b.clone(), Repl::Rename(names.fresh(b))));
                }
            }
            let renamed = match (t.binder(), inner.last()) {
                (Some(b), Some((k, Repl::Rename(n)))) if k == b => Some(n.clone()),
                _ => None,
            };
            let mut out = (0..t.arity()).fold(t.clone(), |acc, i| {
                acc.with_child(i, subst_go(t.child(i).unwrap(), &inner, names))
            });
            if let Some(n) = renamed {
                match &mut out {
                    Term::Lam { var, .. } => *var = n,
                    Term::Par { chan, .. } => *chan = n,
                    _ => unreachable!(),
                }
            }
            out
        }
    }
}

/// Capture-avoiding `u[t/x]`.
pub fn subst(u: &Term, t: &Term, x: &Name, names: &NameSupply) -> Term {
    subst_many(u, &[(x.clone(), t.clone())], names)
}

/// Simultaneous capture-avoiding substitution.
pub fn subst_many(u: &Term, sigma: &[(Name, Term)], names: &NameSupply) -> Term {
    let sigma: Vec<(Name, Repl)> = sigma
        .iter()
        .map(|(k, t)| (k.clone(), Repl::Term(t.clone(), free_names(t))))
        .collect();
    subst_go(u, &sigma, names)
}

/// Rename the binder at the root of `t` (a `Lam` or `Par`) to `to`.
pub fn rename_binder(t: &Term, to: Name, names: &NameSupply) -> Term {
    let from = t.binder().expect("rename_binder on a binder").clone();
    let sigma = [(from, Repl::Rename(to.clone()))];
    let mut out = (0..t.arity()).fold(t.clone(), |acc, i| {
        acc.with_child(i, subst_go(t.child(i).unwrap(), &sigma, names))
    });
    match &mut out {
        Term::Lam { var, .. } => *var = to,
        Term::Par { chan, .. } => *chan = to,
        _ => unreachable!(),
    }
    out
}

/// Right-nested tuple of the given variables; the identity on `⊥` when empty.
pub fn tuple_of(vars: &[(Name, Formula)]) -> Term {
    match vars.split_last() {
        None => Term::lam("x", Formula::Bot, Term::var("x", Formula::Bot)),
        Some(((n, ty), init)) => init
            .iter()
            .rev()
            .fold(Term::var_n(n.clone(), ty.clone()), |acc, (m, s)| {
                Term::pair(Term::var_n(m.clone(), s.clone()), acc)
            }),
    }
}

/// Projection of the `i`-th component out of an `n`-tuple.
pub fn select(v: Term, i: usize, n: usize) -> Term {
    let mut t = v;
    for _ in 0..i {
        t = Term::proj(t, 1);
    }
    if i + 1 < n {
        t = Term::proj(t, 0);
    }
    t
}

/// `u` with each `ys[i]` replaced by the `i`-th projection of `v`.
pub fn multi_subst(u: &Term, v: &Term, ys: &[(Name, Formula)], names: &NameSupply) -> Term {
    let sigma: Vec<(Name, Term)> = ys
        .iter()
        .enumerate()
        .map(|(i, (y, _))| (y.clone(), select(v.clone(), i, ys.len())))
        .collect();
    subst_many(u, &sigma, names)
}
