use std::fmt;
use std::sync::Arc;

use super::formula::{Formula, Name};

/// A sequence of child indices addressing a subterm from the root.
///
/// Child numbering: `Lam` body 0; `App` function 0, argument 1; `Pair` 0 and 1;
/// `Proj` and `Efq` target 0; `Par` left 0, right 1; `Ite` condition 0, then 1, else 2.
pub type Path = Vec<usize>;

/// Proof terms. Variable occurrences carry their type.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var {
        name: Name,
        ty: Formula,
    },
    Lam {
        var: Name,
        ty: Formula,
        body: Arc<Term>,
    },
    App(Arc<Term>, Arc<Term>),
    Pair(Arc<Term>, Arc<Term>),
    Proj(Arc<Term>, u8),
    Efq(Formula, Arc<Term>),
    Par {
        chan: Name,
        left_kind: Formula,
        right_kind: Formula,
        left: Arc<Term>,
        right: Arc<Term>,
    },
    Bool(bool),
    Nat(u64),
    Str(Arc<str>),
    Ite(Arc<Term>, Arc<Term>, Arc<Term>),
}

impl Term {
    pub fn var(name: &str, ty: Formula) -> Self {
        Term::Var {
            name: Name::new(name),
            ty,
        }
    }

    pub fn var_n(name: Name, ty: Formula) -> Self {
        Term::Var { name, ty }
    }

    pub fn lam(var: &str, ty: Formula, body: Term) -> Self {
        Term::lam_n(Name::new(var), ty, body)
    }

    pub fn lam_n(var: Name, ty: Formula, body: Term) -> Self {
        Term::Lam {
            var,
            ty,
            body: Arc::new(body),
        }
    }

    pub fn app(f: Term, x: Term) -> Self {
        Term::App(Arc::new(f), Arc::new(x))
    }

    /// Left-nested application of `f` to `args`.
    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Self {
        args.into_iter().fold(f, Term::app)
    }

    pub fn pair(a: Term, b: Term) -> Self {
        Term::Pair(Arc::new(a), Arc::new(b))
    }

    pub fn proj(t: Term, i: u8) -> Self {
        Term::Proj(Arc::new(t), i)
    }

    pub fn efq(p: Formula, t: Term) -> Self {
        Term::Efq(p, Arc::new(t))
    }

    pub fn par(
        chan: &str,
        left_kind: Formula,
        right_kind: Formula,
        left: Term,
        right: Term,
    ) -> Self {
        Term::par_n(Name::new(chan), left_kind, right_kind, left, right)
    }

    pub fn par_n(
        chan: Name,
        left_kind: Formula,
        right_kind: Formula,
        left: Term,
        right: Term,
    ) -> Self {
        Term::Par {
            chan,
            left_kind,
            right_kind,
            left: Arc::new(left),
            right: Arc::new(right),
        }
    }

    pub fn str_lit(s: &str) -> Self {
        Term::Str(Arc::from(s))
    }

    pub fn ite(c: Term, t: Term, e: Term) -> Self {
        Term::Ite(Arc::new(c), Arc::new(t), Arc::new(e))
    }

    pub fn is_par(&self) -> bool {
        matches!(self, Term::Par { .. })
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Bool(_) | Term::Nat(_) | Term::Str(_))
    }

    pub fn arity(&self) -> usize {
        match self {
            Term::Var { .. } | Term::Bool(_) | Term::Nat(_) | Term::Str(_) => 0,
            Term::Lam { .. } | Term::Proj(..) | Term::Efq(..) => 1,
            Term::App(..) | Term::Pair(..) | Term::Par { .. } => 2,
            Term::Ite(..) => 3,
        }
    }

    pub fn child(&self, i: usize) -> Option<&Term> {
        match (self, i) {
            (Term::Lam { body, .. }, 0) => Some(body),
            (Term::App(a, _) | Term::Pair(a, _), 0) => Some(a),
            (Term::App(_, b) | Term::Pair(_, b), 1) => Some(b),
            (Term::Proj(t, _) | Term::Efq(_, t), 0) => Some(t),
            (Term::Par { left, .. }, 0) => Some(left),
            (Term::Par { right, .. }, 1) => Some(right),
            (Term::Ite(c, _, _), 0) => Some(c),
            (Term::Ite(_, t, _), 1) => Some(t),
            (Term::Ite(_, _, e), 2) => Some(e),
            _ => None,
        }
    }

    pub fn children(&self) -> impl Iterator<Item = &Term> {
        (0..self.arity()).filter_map(move |i| self.child(i))
    }

    /// A copy of this node with child `i` replaced.
    pub fn with_child(&self, i: usize, new: Term) -> Term {
        let new = Arc::new(new);
        match (self, i) {
            (Term::Lam { var, ty, .. }, 0) => Term::Lam {
                var: var.clone(),
                ty: ty.clone(),
                body: new,
            },
            (Term::App(_, b), 0) => Term::App(new, b.clone()),
            (Term::App(a, _), 1) => Term::App(a.clone(), new),
            (Term::Pair(_, b), 0) => Term::Pair(new, b.clone()),
            (Term::Pair(a, _), 1) => Term::Pair(a.clone(), new),
            (Term::Proj(_, k), 0) => Term::Proj(new, *k),
            (Term::Efq(p, _), 0) => Term::Efq(p.clone(), new),
            (
                Term::Par {
                    chan,
                    left_kind,
                    right_kind,
                    right,
                    ..
                },
                0,
            ) => Term::Par {
                chan: chan.clone(),
                left_kind: left_kind.clone(),
                right_kind: right_kind.clone(),
                left: new,
                right: right.clone(),
            },
            (
                Term::Par {
                    chan,
                    left_kind,
                    right_kind,
                    left,
                    ..
                },
                1,
            ) => Term::Par {
                chan: chan.clone(),
                left_kind: left_kind.clone(),
                right_kind: right_kind.clone(),
                left: left.clone(),
                right: new,
            },
            (Term::Ite(_, t, e), 0) => Term::Ite(new, t.clone(), e.clone()),
            (Term::Ite(c, _, e), 1) => Term::Ite(c.clone(), new, e.clone()),
            (Term::Ite(c, t, _), 2) => Term::Ite(c.clone(), t.clone(), new),
            _ => panic!("child index {i} out of range for {}", self.label()),
        }
    }

    /// The name bound by this node, if it is a binder.
    pub fn binder(&self) -> Option<&Name> {
        match self {
            Term::Lam { var, .. } => Some(var),
            Term::Par { chan, .. } => Some(chan),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Term::Var { .. } => "variable",
            Term::Lam { .. } => "abstraction",
            Term::App(..) => "application",
            Term::Pair(..) => "pair",
            Term::Proj(..) => "projection",
            Term::Efq(..) => "ex falso",
            Term::Par { .. } => "parallel composition",
            Term::Bool(_) => "boolean literal",
            Term::Nat(_) => "numeral",
            Term::Str(_) => "string literal",
            Term::Ite(..) => "conditional",
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().map(Term::size).sum::<usize>()
    }

    /// Number of `Par` nodes.
    pub fn par_count(&self) -> usize {
        usize::from(self.is_par()) + self.children().map(Term::par_count).sum::<usize>()
    }

    pub fn is_par_free(&self) -> bool {
        !self.is_par() && self.children().all(Term::is_par_free)
    }

    pub fn subterm_at(&self, path: &[usize]) -> Option<&Term> {
        path.iter().try_fold(self, |t, &i| t.child(i))
    }

    /// Replace the subterm at `path`, sharing everything off the path.
    pub fn replace_at(&self, path: &[usize], new: Term) -> Term {
        match path.split_first() {
            None => new,
            Some((&i, rest)) => {
                let child = self.child(i).expect("path addresses a subterm");
                self.with_child(i, child.replace_at(rest, new))
            }
        }
    }

    /// Visit every subterm in pre-order with its path.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&Path, &'a Term)) {
        fn go<'a>(t: &'a Term, path: &mut Path, f: &mut impl FnMut(&Path, &'a Term)) {
            f(path, t);
            for i in 0..t.arity() {
                path.push(i);
                go(t.child(i).unwrap(), path, f);
                path.pop();
            }
        }
        go(self, &mut Vec::new(), f)
    }

    /// Names bound by `Lam` and `Par` nodes, in pre-order.
    pub fn binders(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.visit(&mut |_, t| {
            if let Some(n) = t.binder() {
                out.push(n.clone());
            }
        });
        out
    }

    /// Head and arguments of an application spine.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut head = self;
        while let Term::App(f, x) = head {
            args.push(&**x);
            head = f;
        }
        args.reverse();
        (head, args)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::frontend::pretty(self))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// One occurrence of a variable: its path and its pre-order rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Occurrence {
    pub path: Path,
    pub rank: usize,
}

/// Free occurrences of `x` in `t`, ascending by textual rank.
pub fn occurrences_of(t: &Term, x: &Name) -> Vec<Occurrence> {
    fn go(t: &Term, x: &Name, path: &mut Path, rank: &mut usize, out: &mut Vec<Occurrence>) {
        let here = *rank;
        *rank += 1;
        match t {
            Term::Var { name, .. } if name == x => out.push(Occurrence {
                path: path.clone(),
                rank: here,
            }),
            Term::Lam { var, .. } if var == x => *rank += t.size() - 1,
            Term::Par { chan, .. } if chan == x => *rank += t.size() - 1,
            _ => {
                for i in 0..t.arity() {
                    path.push(i);
                    go(t.child(i).unwrap(), x, path, rank, out);
                    path.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    go(t, x, &mut Vec::new(), &mut 0, &mut out);
    out
}

/// A Par-free term with one distinguished hole position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleContext {
    pub body: Term,
    pub hole: Path,
    pub hole_type: Formula,
}

pub const HOLE: &str = "[]";

impl SimpleContext {
    /// Cut out the subterm of `t` at `hole`, leaving the hole variable in its place.
    pub fn around(t: &Term, hole: &[usize], hole_type: Formula) -> Self {
        let body = t.replace_at(hole, Term::var(HOLE, hole_type.clone()));
        SimpleContext {
            body,
            hole: hole.to_vec(),
            hole_type,
        }
    }

    pub fn identity(hole_type: Formula) -> Self {
        SimpleContext {
            body: Term::var(HOLE, hole_type.clone()),
            hole: Vec::new(),
            hole_type,
        }
    }
}

/// Plug `u` into the hole. Binders of the context may capture free variables of `u`.
pub fn fill_context(c: &SimpleContext, u: Term) -> Term {
    c.body.replace_at(&c.hole, u)
}

/// Alpha-equivalence, comparing annotations syntactically.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    fn lookup(env: &[Name], n: &Name) -> Option<usize> {
        env.iter().rev().position(|m| m == n)
    }
    fn go(a: &Term, b: &Term, ea: &mut Vec<Name>, eb: &mut Vec<Name>) -> bool {
        match (a, b) {
            (Term::Var { name: x, ty: s }, Term::Var { name: y, ty: t }) => {
                s == t
                    && match (lookup(ea, x), lookup(eb, y)) {
                        (Some(i), Some(j)) => i == j,
                        (None, None) => x == y,
                        _ => false,
                    }
            }
            (
                Term::Lam {
                    var: x,
                    ty: s,
                    body: u,
                },
                Term::Lam {
                    var: y,
                    ty: t,
                    body: v,
                },
            ) => {
                if s != t {
                    return false;
                }
                ea.push(x.clone());
                eb.push(y.clone());
                let r = go(u, v, ea, eb);
                ea.pop();
                eb.pop();
                r
            }
            (Term::App(f, x), Term::App(g, y)) | (Term::Pair(f, x), Term::Pair(g, y)) => {
                go(f, g, ea, eb) && go(x, y, ea, eb)
            }
            (Term::Proj(u, i), Term::Proj(v, j)) => i == j && go(u, v, ea, eb),
            (Term::Efq(p, u), Term::Efq(q, v)) => p == q && go(u, v, ea, eb),
            (
                Term::Par {
                    chan: x,
                    left_kind: k1,
                    right_kind: k2,
                    left: u1,
                    right: u2,
                },
                Term::Par {
                    chan: y,
                    left_kind: m1,
                    right_kind: m2,
                    left: v1,
                    right: v2,
                },
            ) => {
                if k1 != m1 || k2 != m2 {
                    return false;
                }
                ea.push(x.clone());
                eb.push(y.clone());
                let r = go(u1, v1, ea, eb) && go(u2, v2, ea, eb);
                ea.pop();
                eb.pop();
                r
            }
            (Term::Bool(x), Term::Bool(y)) => x == y,
            (Term::Nat(x), Term::Nat(y)) => x == y,
            (Term::Str(x), Term::Str(y)) => x == y,
            (Term::Ite(c, t, e), Term::Ite(d, u, f)) => {
                go(c, d, ea, eb) && go(t, u, ea, eb) && go(e, f, ea, eb)
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new(), &mut Vec::new())
}

/// One element of a continuation: an argument or a projection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StackItem {
    Arg(Term),
    Proj(u8),
}

/// Apply `t` to the stack, left-nested.
pub fn apply_stack(t: Term, stack: &[StackItem]) -> Term {
    stack.iter().fold(t, |acc, item| match item {
        StackItem::Arg(u) => Term::app(acc, u.clone()),
        StackItem::Proj(i) => Term::proj(acc, *i),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    fn v(n: &str) -> Term {
        Term::var(n, p())
    }

    #[test]
    fn occurrences_in_order() {
        let pp = Formula::imp(p(), p());
        let a = Term::var("a", pp.clone());
        let t = Term::app(a.clone(), Term::app(a.clone(), v("y")));
        let occ = occurrences_of(&t, &Name::new("a"));
        assert_eq!(occ.len(), 2);
        assert_eq!(occ[0].path, vec![0]);
        assert_eq!(occ[1].path, vec![1, 0]);
        assert!(occ[0].rank < occ[1].rank);

        let bound = Term::lam("a", p(), Term::var("a", p()));
        assert!(occurrences_of(&bound, &Name::new("a")).is_empty());

        let f = Term::var("f", pp.clone());
        let t = Term::app(f, Term::app(a, v("y")));
        let occ = occurrences_of(&t, &Name::new("a"));
        assert_eq!(occ.len(), 1);
        let ranks: Vec<_> = ["f", "y"]
            .iter()
            .map(|n| {
                let mut r = 0;
                let mut k = 0;
                t.visit(&mut |_, s| {
                    if let Term::Var { name, .. } = s {
                        if name.as_str() == *n {
                            r = k;
                        }
                    }
                    k += 1;
                });
                r
            })
            .collect();
        assert!(ranks[0] < occ[0].rank && occ[0].rank < ranks[1]);
    }

    #[test]
    fn fill_context_captures() {
        let c = SimpleContext::around(&Term::lam("x", p(), v("x")), &[0], p());
        assert!(alpha_eq(
            &fill_context(&c, v("x")),
            &Term::lam("x", p(), v("x"))
        ));
        assert_eq!(fill_context(&SimpleContext::identity(p()), v("t")), v("t"));
        let w = Term::var("w", Formula::imp(p(), p()));
        let c = SimpleContext::around(&Term::app(w.clone(), v("z")), &[1], p());
        assert_eq!(fill_context(&c, v("y")), Term::app(w, v("y")));
    }

    #[test]
    fn alpha_equivalence() {
        let a = Term::lam("x", p(), v("x"));
        let b = Term::lam("y", p(), v("y"));
        let c = Term::lam("y", p(), v("x"));
        assert!(alpha_eq(&a, &b));
        assert!(!alpha_eq(&a, &c));
        let d = Term::lam("x", p(), Term::lam("y", p(), v("x")));
        let e = Term::lam("y", p(), Term::lam("x", p(), v("y")));
        let f = Term::lam("y", p(), Term::lam("x", p(), v("x")));
        assert!(alpha_eq(&d, &e));
        assert!(!alpha_eq(&d, &f));
    }

    #[test]
    fn replace_and_lookup() {
        let t = Term::pair(v("a"), Term::proj(v("b"), 0));
        assert_eq!(t.subterm_at(&[1, 0]), Some(&v("b")));
        let u = t.replace_at(&[1, 0], v("c"));
        assert_eq!(u, Term::pair(v("a"), Term::proj(v("c"), 0)));
        assert_eq!(t.size(), 4);
    }

    #[test]
    fn stacks_nest_left() {
        let f = Term::var("f", p());
        let t = apply_stack(f.clone(), &[StackItem::Arg(v("x")), StackItem::Proj(1)]);
        assert_eq!(t, Term::proj(Term::app(f, v("x")), 1));
    }
}
