//! The typing judgment `Γ ⊢ t : A` and channel metadata.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::kernel::{
    formula_size, free_vars, is_proper_subformula, prime_factors, strong_subformulas, Formula,
    Name, Path, ScopeError, Term,
};

pub const BOOL: &str = "Bool";
pub const NAT: &str = "Nat";
pub const STRING: &str = "String";

pub fn bool_ty() -> Formula {
    Formula::atom(BOOL)
}

pub fn nat_ty() -> Formula {
    Formula::atom(NAT)
}

pub fn string_ty() -> Formula {
    Formula::atom(STRING)
}

/// Variable bindings `x₁:A₁,…,xₙ:Aₙ`. Later bindings shadow earlier ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeEnv {
    bindings: BTreeMap<Name, Formula>,
}

impl TypeEnv {
    pub fn new() -> Self {
        TypeEnv::default()
    }

    pub fn get(&self, x: &Name) -> Option<&Formula> {
        self.bindings.get(x)
    }

    pub fn insert(&mut self, x: Name, ty: Formula) -> Option<Formula> {
        self.bindings.insert(x, ty)
    }

    pub fn remove(&mut self, x: &Name) -> Option<Formula> {
        self.bindings.remove(x)
    }

    pub fn with(mut self, x: &str, ty: Formula) -> Self {
        self.insert(Name::new(x), ty);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Formula)> {
        self.bindings.iter()
    }

    pub fn types(&self) -> impl Iterator<Item = &Formula> {
        self.bindings.values()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Run `f` with `x : ty` in scope, restoring the previous binding afterwards.
    fn scoped<R>(&mut self, x: &Name, ty: Formula, f: impl FnOnce(&mut Self) -> R) -> R {
        let old = self.bindings.insert(x.clone(), ty);
        let r = f(self);
        match old {
            Some(prev) => self.bindings.insert(x.clone(), prev),
            None => self.bindings.remove(x),
        };
        r
    }
}

impl From<BTreeMap<Name, Formula>> for TypeEnv {
    fn from(bindings: BTreeMap<Name, Formula>) -> Self {
        TypeEnv { bindings }
    }
}

impl FromIterator<(Name, Formula)> for TypeEnv {
    fn from_iter<I: IntoIterator<Item = (Name, Formula)>>(iter: I) -> Self {
        TypeEnv {
            bindings: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("at {path:?}: unbound variable `{name}`")]
    Unbound { path: Path, name: Name },
    #[error("at {path:?}: `{name}` is annotated `{actual}` but bound at `{expected}`")]
    Annotation {
        path: Path,
        name: Name,
        expected: Formula,
        actual: Formula,
    },
    #[error("at {path:?}: expected {expected}, found `{actual}`")]
    Mismatch {
        path: Path,
        expected: String,
        actual: Formula,
    },
    #[error("at {path:?}: branches have types `{left}` and `{right}`")]
    BranchMismatch {
        path: Path,
        left: Formula,
        right: Formula,
    },
    #[error("at {path:?}: ex falso target `{ty}` must be an atom other than bot")]
    EfqTarget { path: Path, ty: Formula },
    #[error("{0}")]
    Scope(#[from] ScopeError),
    #[error("expected a parallel composition")]
    NotPar,
}

impl TypeError {
    pub fn path(&self) -> Option<&Path> {
        match self {
            TypeError::Unbound { path, .. }
            | TypeError::Annotation { path, .. }
            | TypeError::Mismatch { path, .. }
            | TypeError::BranchMismatch { path, .. }
            | TypeError::EfqTarget { path, .. } => Some(path),
            _ => None,
        }
    }
}

fn expect_eq(path: &Path, expected: &Formula, actual: Formula) -> Result<(), TypeError> {
    if *expected == actual {
        Ok(())
    } else {
        Err(TypeError::Mismatch {
            path: path.clone(),
            expected: format!("`{expected}`"),
            actual,
        })
    }
}

fn infer_at(env: &mut TypeEnv, t: &Term, path: &mut Path) -> Result<Formula, TypeError> {
    let sub = |env: &mut TypeEnv, i: usize, t: &Term, path: &mut Path| {
        path.push(i);
        let r = infer_at(env, t, path);
        if r.is_ok() {
            path.pop();
        }
        r
    };
    match t {
        Term::Var { name, ty } => match env.get(name) {
            None => Err(TypeError::Unbound {
                path: path.clone(),
                name: name.clone(),
            }),
            Some(bound) if bound != ty => Err(TypeError::Annotation {
                path: path.clone(),
                name: name.clone(),
                expected: bound.clone(),
                actual: ty.clone(),
            }),
            Some(_) => Ok(ty.clone()),
        },
        Term::Lam { var, ty, body } => {
            let b = env.scoped(var, ty.clone(), |env| sub(env, 0, body, path))?;
            Ok(Formula::imp(ty.clone(), b))
        }
        Term::App(f, x) => {
            let tf = sub(env, 0, f, path)?;
            let tx = sub(env, 1, x, path)?;
            match tf.as_impl() {
                Some((a, b)) => {
                    path.push(1);
                    expect_eq(path, a, tx)?;
                    path.pop();
                    Ok(b.clone())
                }
                None => {
                    path.push(0);
                    Err(TypeError::Mismatch {
                        path: path.clone(),
                        expected: "an implication".into(),
                        actual: tf,
                    })
                }
            }
        }
        Term::Pair(a, b) => {
            let ta = sub(env, 0, a, path)?;
            let tb = sub(env, 1, b, path)?;
            Ok(Formula::and(ta, tb))
        }
        Term::Proj(u, i) => {
            let tu = sub(env, 0, u, path)?;
            match tu.as_and() {
                Some((a, b)) => Ok(if *i == 0 { a.clone() } else { b.clone() }),
                None => {
                    path.push(0);
                    Err(TypeError::Mismatch {
                        path: path.clone(),
                        expected: "a conjunction".into(),
                        actual: tu,
                    })
                }
            }
        }
        Term::Efq(p, u) => {
            if !p.is_atomic() {
                return Err(TypeError::EfqTarget {
                    path: path.clone(),
                    ty: p.clone(),
                });
            }
            let tu = sub(env, 0, u, path)?;
            path.push(0);
            expect_eq(path, &Formula::Bot, tu)?;
            path.pop();
            Ok(p.clone())
        }
        Term::Par {
            chan,
            left_kind,
            right_kind,
            left,
            right,
        } => {
            let fwd = Formula::imp(left_kind.clone(), right_kind.clone());
            let bwd = Formula::imp(right_kind.clone(), left_kind.clone());
            let tl = env.scoped(chan, fwd, |env| sub(env, 0, left, path))?;
            let tr = env.scoped(chan, bwd, |env| sub(env, 1, right, path))?;
            if tl == tr {
                Ok(tl)
            } else {
                Err(TypeError::BranchMismatch {
                    path: path.clone(),
                    left: tl,
                    right: tr,
                })
            }
        }
        Term::Bool(_) => Ok(bool_ty()),
        Term::Nat(_) => Ok(nat_ty()),
        Term::Str(_) => Ok(string_ty()),
        Term::Ite(c, a, b) => {
            let tc = sub(env, 0, c, path)?;
            path.push(0);
            expect_eq(path, &bool_ty(), tc)?;
            path.pop();
            let ta = sub(env, 1, a, path)?;
            let tb = sub(env, 2, b, path)?;
            if ta == tb {
                Ok(ta)
            } else {
                Err(TypeError::BranchMismatch {
                    path: path.clone(),
                    left: ta,
                    right: tb,
                })
            }
        }
    }
}

/// The unique `A` with `env ⊢ t : A`.
pub fn infer(env: &TypeEnv, t: &Term) -> Result<Formula, TypeError> {
    let mut env = env.clone();
    infer_at(&mut env, t, &mut Vec::new())
}

/// Type of `t` taking its free variables at their annotated types.
pub fn type_of(t: &Term) -> Result<Formula, TypeError> {
    infer(&TypeEnv::from(free_vars(t)?), t)
}

/// Visit every subterm with its path and type. Stops at the first type error.
pub fn visit_typed(
    env: &TypeEnv,
    t: &Term,
    f: &mut impl FnMut(&Path, &Term, &Formula, &TypeEnv),
) -> Result<Formula, TypeError> {
    fn go(
        env: &mut TypeEnv,
        t: &Term,
        path: &mut Path,
        f: &mut impl FnMut(&Path, &Term, &Formula, &TypeEnv),
    ) -> Result<Formula, TypeError> {
        let ty = infer_at(env, t, path)?;
        f(path, t, &ty, env);
        for i in 0..t.arity() {
            let child = t.child(i).unwrap();
            let bind = match t {
                Term::Lam { var, ty, .. } => Some((var.clone(), ty.clone())),
                Term::Par {
                    chan,
                    left_kind,
                    right_kind,
                    ..
                } => Some(if i == 0 {
                    (
                        chan.clone(),
                        Formula::imp(left_kind.clone(), right_kind.clone()),
                    )
                } else {
                    (
                        chan.clone(),
                        Formula::imp(right_kind.clone(), left_kind.clone()),
                    )
                }),
                _ => None,
            };
            path.push(i);
            match bind {
                Some((x, s)) => env.scoped(&x, s, |env| go(env, child, path, f))?,
                None => go(env, child, path, f)?,
            };
            path.pop();
        }
        Ok(ty)
    }
    let mut env = env.clone();
    go(&mut env, t, &mut Vec::new(), f)
}

/// Channel, kind and complexity of a `Par` node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelInfo {
    pub channel: Name,
    pub kind: (Formula, Formula),
    pub complexity: usize,
}

pub fn communication_kind(t: &Term) -> Result<(Formula, Formula), TypeError> {
    match t {
        Term::Par {
            left_kind,
            right_kind,
            ..
        } => Ok((left_kind.clone(), right_kind.clone())),
        _ => Err(TypeError::NotPar),
    }
}

/// Size of the largest prime factor of the kind that is neither a proper subformula of
/// `ty` nor a strong subformula of one of `hyps`; 0 if there is none.
pub fn complexity_against<'a>(
    kind: (&Formula, &Formula),
    ty: &Formula,
    hyps: impl IntoIterator<Item = &'a Formula>,
) -> usize {
    let strong: Vec<_> = hyps.into_iter().map(strong_subformulas).collect();
    prime_factors(kind.0)
        .into_iter()
        .chain(prime_factors(kind.1))
        .filter(|p| !is_proper_subformula(p, ty) && !strong.iter().any(|s| s.contains(p)))
        .map(|p| formula_size(&p))
        .max()
        .unwrap_or(0)
}

/// Communication complexity of the channel of `t`, measured against its own type and the
/// types of its free variables.
pub fn communication_complexity(t: &Term, env: &TypeEnv) -> Result<usize, TypeError> {
    let (b, c) = communication_kind(t)?;
    let ty = infer(env, t)?;
    let fv = free_vars(t)?;
    Ok(complexity_against((&b, &c), &ty, fv.values()))
}

/// Communication complexity of a `Par` node typed by its own annotations.
pub fn local_complexity(t: &Term) -> Result<usize, TypeError> {
    communication_complexity(t, &TypeEnv::from(free_vars(t)?))
}

pub fn channel_info(t: &Term, env: &TypeEnv) -> Result<ChannelInfo, TypeError> {
    let kind = communication_kind(t)?;
    let complexity = communication_complexity(t, env)?;
    let channel = t.binder().cloned().ok_or(TypeError::NotPar)?;
    Ok(ChannelInfo {
        channel,
        kind,
        complexity,
    })
}
