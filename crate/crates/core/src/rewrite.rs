//! Basic reduction rules as position-addressed single steps.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::kernel::{
    free_names, multi_subst, occurrences_of, occurs_free, rename_binder, subst, tuple_of, Formula,
    Name, NameSupply, Path, Term,
};
use crate::typing::{local_complexity, TypeError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleTag {
    Beta,
    ProjPair,
    DeltaIte,
    Delta,
    PermAppL,
    PermAppR,
    PermEfq,
    PermProj,
    PermLam,
    PermPairL,
    PermPairR,
    PermParParL,
    PermParParR,
    CrossDropL,
    CrossDropR,
    CrossFull,
}

impl RuleTag {
    pub const ALL: [RuleTag; 16] = [
        RuleTag::Beta,
        RuleTag::ProjPair,
        RuleTag::DeltaIte,
        RuleTag::Delta,
        RuleTag::PermAppL,
        RuleTag::PermAppR,
        RuleTag::PermEfq,
        RuleTag::PermProj,
        RuleTag::PermLam,
        RuleTag::PermPairL,
        RuleTag::PermPairR,
        RuleTag::PermParParL,
        RuleTag::PermParParR,
        RuleTag::CrossDropL,
        RuleTag::CrossDropR,
        RuleTag::CrossFull,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleTag::Beta => "Beta",
            RuleTag::ProjPair => "ProjPair",
            RuleTag::DeltaIte => "DeltaIte",
            RuleTag::Delta => "Delta",
            RuleTag::PermAppL => "PermAppL",
            RuleTag::PermAppR => "PermAppR",
            RuleTag::PermEfq => "PermEfq",
            RuleTag::PermProj => "PermProj",
            RuleTag::PermLam => "PermLam",
            RuleTag::PermPairL => "PermPairL",
            RuleTag::PermPairR => "PermPairR",
            RuleTag::PermParParL => "PermParPar_L",
            RuleTag::PermParParR => "PermParPar_R",
            RuleTag::CrossDropL => "CrossDropL",
            RuleTag::CrossDropR => "CrossDropR",
            RuleTag::CrossFull => "CrossFull",
        }
    }

    pub fn is_intuitionistic(self) -> bool {
        matches!(
            self,
            RuleTag::Beta | RuleTag::ProjPair | RuleTag::DeltaIte | RuleTag::Delta
        )
    }

    pub fn is_permutation(self) -> bool {
        matches!(
            self,
            RuleTag::PermAppL
                | RuleTag::PermAppR
                | RuleTag::PermEfq
                | RuleTag::PermProj
                | RuleTag::PermLam
                | RuleTag::PermPairL
                | RuleTag::PermPairR
                | RuleTag::PermParParL
                | RuleTag::PermParParR
        )
    }

    pub fn is_cross(self) -> bool {
        matches!(
            self,
            RuleTag::CrossDropL | RuleTag::CrossDropR | RuleTag::CrossFull
        )
    }
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown rule `{0}`")]
pub struct UnknownRule(pub String);

impl FromStr for RuleTag {
    type Err = UnknownRule;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleTag::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| UnknownRule(s.to_string()))
    }
}

/// One applied rule instance with full-term snapshots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub rule: RuleTag,
    pub path: Path,
    pub before: Term,
    pub after: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("no subterm at {0:?}")]
    BadPath(Path),
    #[error("{rule} does not match the subterm at {path:?}")]
    NoMatch { rule: RuleTag, path: Path },
    #[error("channel `{channel}` at {path:?} has communication complexity 0")]
    BlockedByComplexityZero { channel: Name, path: Path },
    #[error("branches of `{channel}` at {path:?} are not Par-free intuitionistic normal forms")]
    BranchesNotNormal { channel: Name, path: Path },
    #[error("rightmost occurrence of `{channel}` at {path:?} is not applied")]
    Unapplied { channel: Name, path: Path },
    #[error("channel `{channel}` at {path:?} occurs in both branches")]
    OccursInBoth { channel: Name, path: Path },
    #[error("{0}")]
    Type(#[from] TypeError),
}

/// Constant-folding rules `c l₁ … lₙ ⇒ t` with literal patterns.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeltaRules {
    rules: BTreeMap<Name, Vec<(Vec<Term>, Term)>>,
}

impl DeltaRules {
    pub fn new() -> Self {
        DeltaRules::default()
    }

    /// Add a rule; returns false if one already exists for the same pattern.
    pub fn insert(&mut self, head: Name, args: Vec<Term>, rhs: Term) -> bool {
        let entry = self.rules.entry(head).or_default();
        if entry.iter().any(|(a, _)| *a == args) {
            return false;
        }
        entry.push((args, rhs));
        true
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &[Term], &Term)> {
        self.rules
            .iter()
            .flat_map(|(h, rs)| rs.iter().map(move |(a, r)| (h, a.as_slice(), r)))
    }

    /// The right-hand side for an application spine, if a rule matches it exactly.
    pub fn lookup(&self, t: &Term) -> Option<&Term> {
        let Term::App(..) = t else { return None };
        let (head, args) = t.spine();
        let Term::Var { name, .. } = head else {
            return None;
        };
        self.rules.get(name)?.iter().find_map(|(pat, rhs)| {
            (pat.len() == args.len() && pat.iter().zip(&args).all(|(p, a)| p == *a)).then_some(rhs)
        })
    }
}

/// Rewriting context: the delta rules in force and the fresh-name supply.
#[derive(Clone, Debug, Default)]
pub struct Engine {
    rules: Arc<DeltaRules>,
    names: Arc<NameSupply>,
}

impl Engine {
    pub fn new(rules: DeltaRules) -> Self {
        Engine {
            rules: Arc::new(rules),
            names: Arc::new(NameSupply::new()),
        }
    }

    pub fn with_names(rules: Arc<DeltaRules>, names: NameSupply) -> Self {
        Engine {
            rules,
            names: Arc::new(names),
        }
    }

    pub fn rules(&self) -> &Arc<DeltaRules> {
        &self.rules
    }

    pub fn names(&self) -> &NameSupply {
        &self.names
    }

    /// An engine with the same rules and an independent supply continuing from this one.
    pub fn fork(&self) -> Engine {
        Engine {
            rules: self.rules.clone(),
            names: Arc::new((*self.names).clone()),
        }
    }

    /// Make sure fresh names cannot clash with `#n` names already in `t`.
    pub fn avoid_names_in(&self, t: &Term) {
        self.names.advance_to(NameSupply::avoiding(t).peek());
    }

    /// The intuitionistic rule whose redex is exactly `t`, if any.
    pub fn intuitionistic_redex(&self, t: &Term) -> Option<RuleTag> {
        match t {
            Term::App(f, _) if matches!(**f, Term::Lam { .. }) => Some(RuleTag::Beta),
            Term::Proj(u, _) if matches!(**u, Term::Pair(..)) => Some(RuleTag::ProjPair),
            Term::Ite(c, _, _) if matches!(**c, Term::Bool(_)) => Some(RuleTag::DeltaIte),
            Term::App(..) if self.rules.lookup(t).is_some() => Some(RuleTag::Delta),
            _ => None,
        }
    }

    pub fn is_intuitionistic_normal(&self, t: &Term) -> bool {
        self.intuitionistic_redex(t).is_none()
            && t.children().all(|c| self.is_intuitionistic_normal(c))
    }

    /// Contract the intuitionistic redex at `at`.
    pub fn step_intuitionistic(
        &self,
        t: &Term,
        at: &[usize],
    ) -> Result<(Term, RuleTag), RewriteError> {
        let node = subterm(t, at)?;
        let rule = self
            .intuitionistic_redex(node)
            .ok_or(RewriteError::NoMatch {
                rule: RuleTag::Beta,
                path: at.to_vec(),
            })?;
        Ok((t.replace_at(at, self.contract(node, rule, at)?), rule))
    }

    fn contract(&self, node: &Term, rule: RuleTag, at: &[usize]) -> Result<Term, RewriteError> {
        let nomatch = || RewriteError::NoMatch {
            rule,
            path: at.to_vec(),
        };
        match (rule, node) {
            (RuleTag::Beta, Term::App(f, x)) => match &**f {
                Term::Lam { var, body, .. } => Ok(subst(body, x, var, &self.names)),
                _ => Err(nomatch()),
            },
            (RuleTag::ProjPair, Term::Proj(u, i)) => match &**u {
                Term::Pair(a, b) => Ok(if *i == 0 {
                    (**a).clone()
                } else {
                    (**b).clone()
                }),
                _ => Err(nomatch()),
            },
            (RuleTag::DeltaIte, Term::Ite(c, a, b)) => match &**c {
                Term::Bool(true) => Ok((**a).clone()),
                Term::Bool(false) => Ok((**b).clone()),
                _ => Err(nomatch()),
            },
            (RuleTag::Delta, _) => self.rules.lookup(node).cloned().ok_or_else(nomatch),
            _ => Err(nomatch()),
        }
    }

    /// Apply a permutation rule at `at`, alpha-renaming the moved channel when it would
    /// otherwise capture a bystander.
    pub fn step_permutation(
        &self,
        t: &Term,
        at: &[usize],
        rule: RuleTag,
    ) -> Result<Term, RewriteError> {
        let node = subterm(t, at)?;
        let reduct = self.permute(node, rule, at)?;
        Ok(t.replace_at(at, reduct))
    }

    fn permute(&self, node: &Term, rule: RuleTag, at: &[usize]) -> Result<Term, RewriteError> {
        let nomatch = || RewriteError::NoMatch {
            rule,
            path: at.to_vec(),
        };
        // Split a Par child into its parts, renaming the channel away from `avoid`.
        let open = |par: &Term,
                    avoid: &dyn Fn(&Name) -> bool|
         -> Option<(Name, Formula, Formula, Term, Term)> {
            let par = match par.binder() {
                Some(a) if par.is_par() && avoid(a) => {
                    rename_binder(par, self.names.fresh(a), &self.names)
                }
                _ => par.clone(),
            };
            match par {
                Term::Par {
                    chan,
                    left_kind,
                    right_kind,
                    left,
                    right,
                } => Some((
                    chan,
                    left_kind,
                    right_kind,
                    (*left).clone(),
                    (*right).clone(),
                )),
                _ => None,
            }
        };
        let lift =
            |(a, k1, k2, u, v): (Name, Formula, Formula, Term, Term),
             wrap: &dyn Fn(Term) -> Term| { Term::par_n(a, k1, k2, wrap(u), wrap(v)) };
        match (rule, node) {
            (RuleTag::PermAppL, Term::App(p, w)) => {
                let parts = open(p, &|a| occurs_free(w, a)).ok_or_else(nomatch)?;
                Ok(lift(parts, &|u| Term::app(u, (**w).clone())))
            }
            (RuleTag::PermAppR, Term::App(w, p)) => {
                let parts = open(p, &|a| occurs_free(w, a)).ok_or_else(nomatch)?;
                Ok(lift(parts, &|u| Term::app((**w).clone(), u)))
            }
            (RuleTag::PermPairL, Term::Pair(p, w)) => {
                let parts = open(p, &|a| occurs_free(w, a)).ok_or_else(nomatch)?;
                Ok(lift(parts, &|u| Term::pair(u, (**w).clone())))
            }
            (RuleTag::PermPairR, Term::Pair(w, p)) => {
                let parts = open(p, &|a| occurs_free(w, a)).ok_or_else(nomatch)?;
                Ok(lift(parts, &|u| Term::pair((**w).clone(), u)))
            }
            (RuleTag::PermEfq, Term::Efq(f, p)) => {
                let parts = open(p, &|_| false).ok_or_else(nomatch)?;
                Ok(lift(parts, &|u| Term::efq(f.clone(), u)))
            }
            (RuleTag::PermProj, Term::Proj(p, i)) => {
                let parts = open(p, &|_| false).ok_or_else(nomatch)?;
                Ok(lift(parts, &|u| Term::proj(u, *i)))
            }
            (RuleTag::PermLam, Term::Lam { var, ty, body }) => {
                let parts = open(body, &|a| a == var).ok_or_else(nomatch)?;
                Ok(lift(parts, &|u| Term::lam_n(var.clone(), ty.clone(), u)))
            }
            (
                RuleTag::PermParParL | RuleTag::PermParParR,
                Term::Par {
                    chan: b,
                    left_kind,
                    right_kind,
                    left,
                    right,
                },
            ) => {
                let (inner, w) = if rule == RuleTag::PermParParL {
                    (left, right)
                } else {
                    (right, left)
                };
                if !inner.is_par() {
                    return Err(nomatch());
                }
                if local_complexity(node)? == 0 {
                    return Err(RewriteError::BlockedByComplexityZero {
                        channel: b.clone(),
                        path: at.to_vec(),
                    });
                }
                let parts = open(inner, &|a| a == b || occurs_free(w, a)).ok_or_else(nomatch)?;
                let outer = |u: Term| {
                    let (l, r) = if rule == RuleTag::PermParParL {
                        (u, (**w).clone())
                    } else {
                        ((**w).clone(), u)
                    };
                    Term::par_n(b.clone(), left_kind.clone(), right_kind.clone(), l, r)
                };
                Ok(lift(parts, &outer))
            }
            _ => Err(nomatch()),
        }
    }

    /// Drop a Par whose channel is absent from one branch, keeping the left branch when
    /// both qualify.
    pub fn step_cross_drop(&self, t: &Term, at: &[usize]) -> Result<(Term, RuleTag), RewriteError> {
        let node = subterm(t, at)?;
        let rule = drop_rule(node).ok_or_else(|| match node.binder() {
            Some(a) if node.is_par() => RewriteError::OccursInBoth {
                channel: a.clone(),
                path: at.to_vec(),
            },
            _ => RewriteError::NoMatch {
                rule: RuleTag::CrossDropL,
                path: at.to_vec(),
            },
        })?;
        Ok((self.apply(t, at, rule)?, rule))
    }

    /// The full cross reduction exchanging the arguments of the rightmost applied
    /// occurrences of the channel.
    pub fn step_cross_full(&self, t: &Term, at: &[usize]) -> Result<Term, RewriteError> {
        let node = subterm(t, at)?;
        Ok(t.replace_at(at, self.cross_full(node, at)?))
    }

    fn cross_full(&self, node: &Term, at: &[usize]) -> Result<Term, RewriteError> {
        let plan = self.cross_plan(node, at)?;
        let CrossPlan {
            chan: a,
            left_kind: ka,
            right_kind: kb,
            left,
            right,
            hole_l,
            hole_r,
        } = plan;

        let arg = |t: &Term, hole: &Path| -> Term {
            match t.subterm_at(hole) {
                Some(Term::App(_, x)) => (**x).clone(),
                _ => unreachable!("cross plan addresses an application"),
            }
        };

        let v0 = arg(&right, &hole_r);
        let zs0 = captured(&right, &hole_r, &v0);
        let avoid_l: BTreeSet<Name> = free_names(&v0)
            .into_iter()
            .filter(|n| !zs0.iter().any(|(z, _)| z == n))
            .collect();
        let left2 = self.freshen_path(&left, &hole_l, &avoid_l);
        let u = arg(&left2, &hole_l);
        let ys = captured(&left2, &hole_l, &u);
        let avoid_r: BTreeSet<Name> = free_names(&u)
            .into_iter()
            .filter(|n| !ys.iter().any(|(y, _)| y == n))
            .collect();
        let right2 = self.freshen_path(&right, &hole_r, &avoid_r);
        let v = arg(&right2, &hole_r);
        let zs = captured(&right2, &hole_r, &v);

        let cy = Formula::conj(&ys.iter().map(|(_, t)| t.clone()).collect::<Vec<_>>());
        let dz = Formula::conj(&zs.iter().map(|(_, t)| t.clone()).collect::<Vec<_>>());
        let b = self.names.fresh_str("b");
        let to_left = Term::app(
            Term::var_n(b.clone(), Formula::imp(dz.clone(), cy.clone())),
            tuple_of(&zs),
        );
        let to_right = Term::app(
            Term::var_n(b.clone(), Formula::imp(cy.clone(), dz.clone())),
            tuple_of(&ys),
        );
        let u_moved = multi_subst(&u, &to_left, &ys, &self.names);
        let v_moved = multi_subst(&v, &to_right, &zs, &self.names);

        let d_u = right2.replace_at(&hole_r, u_moved);
        let c_v = left2.replace_at(&hole_l, v_moved);
        let reduct = Term::par_n(
            b,
            dz,
            cy,
            Term::par_n(a.clone(), kb.clone(), ka.clone(), d_u, left),
            Term::par_n(a, ka, kb, c_v, right),
        );
        debug_assert!(free_names(&reduct).is_subset(&free_names(node)));
        Ok(reduct)
    }

    /// Check every precondition of the full cross reduction.
    fn cross_plan(&self, node: &Term, at: &[usize]) -> Result<CrossPlan, RewriteError> {
        let Term::Par {
            chan,
            left_kind,
            right_kind,
            left,
            right,
        } = node
        else {
            return Err(RewriteError::NoMatch {
                rule: RuleTag::CrossFull,
                path: at.to_vec(),
            });
        };
        let here = || at.to_vec();
        if !(left.is_par_free()
            && right.is_par_free()
            && self.is_intuitionistic_normal(left)
            && self.is_intuitionistic_normal(right))
        {
            return Err(RewriteError::BranchesNotNormal {
                channel: chan.clone(),
                path: here(),
            });
        }
        let applied_hole = |t: &Term| -> Option<Path> {
            let last = occurrences_of(t, chan).pop()?;
            let (&idx, parent) = last.path.split_last()?;
            match (idx, t.subterm_at(parent)) {
                (0, Some(Term::App(..))) => Some(parent.to_vec()),
                _ => None,
            }
        };
        let (Some(hole_l), Some(hole_r)) = (applied_hole(left), applied_hole(right)) else {
            return Err(RewriteError::Unapplied {
                channel: chan.clone(),
                path: here(),
            });
        };
        if local_complexity(node)? == 0 {
            return Err(RewriteError::BlockedByComplexityZero {
                channel: chan.clone(),
                path: here(),
            });
        }
        Ok(CrossPlan {
            chan: chan.clone(),
            left_kind: left_kind.clone(),
            right_kind: right_kind.clone(),
            left: (**left).clone(),
            right: (**right).clone(),
            hole_l,
            hole_r,
        })
    }

    /// Alpha-rename the abstractions on the way to `hole` whose names are in `avoid`.
    fn freshen_path(&self, t: &Term, hole: &[usize], avoid: &BTreeSet<Name>) -> Term {
        let t = match t {
            Term::Lam { var, .. } if avoid.contains(var) => {
                rename_binder(t, self.names.fresh(var), &self.names)
            }
            _ => t.clone(),
        };
        match hole.split_first() {
            None => t,
            Some((&i, rest)) => {
                let child = self.freshen_path(t.child(i).unwrap(), rest, avoid);
                t.with_child(i, child)
            }
        }
    }

    /// Whether `rule` applies at the root of `node`, side conditions included.
    pub fn applies(&self, node: &Term, rule: RuleTag) -> bool {
        match rule {
            r if r.is_intuitionistic() => self.intuitionistic_redex(node) == Some(r),
            RuleTag::PermAppL => matches!(node, Term::App(f, _) if f.is_par()),
            RuleTag::PermAppR => matches!(node, Term::App(_, x) if x.is_par()),
            RuleTag::PermPairL => matches!(node, Term::Pair(a, _) if a.is_par()),
            RuleTag::PermPairR => matches!(node, Term::Pair(_, b) if b.is_par()),
            RuleTag::PermEfq => matches!(node, Term::Efq(_, u) if u.is_par()),
            RuleTag::PermProj => matches!(node, Term::Proj(u, _) if u.is_par()),
            RuleTag::PermLam => matches!(node, Term::Lam { body, .. } if body.is_par()),
            RuleTag::PermParParL => {
                matches!(node, Term::Par { left, .. } if left.is_par())
                    && local_complexity(node).is_ok_and(|c| c > 0)
            }
            RuleTag::PermParParR => {
                matches!(node, Term::Par { right, .. } if right.is_par())
                    && local_complexity(node).is_ok_and(|c| c > 0)
            }
            RuleTag::CrossDropL => match node {
                Term::Par { chan, left, .. } => !occurs_free(left, chan),
                _ => false,
            },
            RuleTag::CrossDropR => match node {
                Term::Par { chan, right, .. } => !occurs_free(right, chan),
                _ => false,
            },
            RuleTag::CrossFull => self.cross_plan(node, &[]).is_ok(),
            _ => false,
        }
    }

    /// Rules applicable at the root of `node`.
    pub fn root_redexes(&self, node: &Term) -> Vec<RuleTag> {
        RuleTag::ALL
            .into_iter()
            .filter(|&r| self.applies(node, r))
            .collect()
    }

    pub fn is_root_redex(&self, node: &Term) -> bool {
        RuleTag::ALL.into_iter().any(|r| self.applies(node, r))
    }

    /// Every applicable `(position, rule)` pair, positions in pre-order.
    pub fn find_redexes(&self, t: &Term) -> Vec<(Path, RuleTag)> {
        let mut out = Vec::new();
        t.visit(&mut |path, node| {
            for r in self.root_redexes(node) {
                out.push((path.clone(), r));
            }
        });
        out
    }

    pub fn is_normal(&self, t: &Term) -> bool {
        !self.is_root_redex(t) && t.children().all(|c| self.is_normal(c))
    }

    /// Apply `rule` at `at`.
    pub fn apply(&self, t: &Term, at: &[usize], rule: RuleTag) -> Result<Term, RewriteError> {
        let node = subterm(t, at)?;
        let nomatch = || RewriteError::NoMatch {
            rule,
            path: at.to_vec(),
        };
        let reduct = match rule {
            r if r.is_intuitionistic() => {
                if self.intuitionistic_redex(node) != Some(r) {
                    return Err(nomatch());
                }
                self.contract(node, r, at)?
            }
            r if r.is_permutation() => self.permute(node, r, at)?,
            RuleTag::CrossDropL | RuleTag::CrossDropR => match node {
                Term::Par {
                    chan, left, right, ..
                } => {
                    let (keep, other) = if rule == RuleTag::CrossDropL {
                        (left, right)
                    } else {
                        (right, left)
                    };
                    if occurs_free(keep, chan) {
                        return Err(if occurs_free(other, chan) {
                            RewriteError::OccursInBoth {
                                channel: chan.clone(),
                                path: at.to_vec(),
                            }
                        } else {
                            nomatch()
                        });
                    }
                    (**keep).clone()
                }
                _ => return Err(nomatch()),
            },
            RuleTag::CrossFull => self.cross_full(node, at)?,
            _ => return Err(nomatch()),
        };
        Ok(t.replace_at(at, reduct))
    }

    /// Apply `rule` at `at` and record the step.
    pub fn step(
        &self,
        t: &Term,
        at: &[usize],
        rule: RuleTag,
    ) -> Result<ReductionStep, RewriteError> {
        let after = self.apply(t, at, rule)?;
        Ok(ReductionStep {
            rule,
            path: at.to_vec(),
            before: t.clone(),
            after,
        })
    }
}

struct CrossPlan {
    chan: Name,
    left_kind: Formula,
    right_kind: Formula,
    left: Term,
    right: Term,
    hole_l: Path,
    hole_r: Path,
}

/// The drop rule for a Par node, preferring to keep the left branch.
pub fn drop_rule(node: &Term) -> Option<RuleTag> {
    match node {
        Term::Par {
            chan, left, right, ..
        } => {
            if !occurs_free(left, chan) {
                Some(RuleTag::CrossDropL)
            } else if !occurs_free(right, chan) {
                Some(RuleTag::CrossDropR)
            } else {
                None
            }
        }
        _ => None,
    }
}

/// Variables free in `arg` that are bound by abstractions on the way to `hole`, ordered
/// outermost first, each name taken at its innermost binder.
fn captured(t: &Term, hole: &[usize], arg: &Term) -> Vec<(Name, Formula)> {
    let mut binders: Vec<(Name, Formula)> = Vec::new();
    let mut node = t;
    for &i in hole {
        if let Term::Lam { var, ty, .. } = node {
            binders.retain(|(n, _)| n != var);
            binders.push((var.clone(), ty.clone()));
        }
        node = node.child(i).unwrap();
    }
    let fv = free_names(arg);
    binders
        .into_iter()
        .filter(|(n, _)| fv.contains(n))
        .collect()
}

fn subterm<'a>(t: &'a Term, at: &[usize]) -> Result<&'a Term, RewriteError> {
    t.subterm_at(at)
        .ok_or_else(|| RewriteError::BadPath(at.to_vec()))
}
