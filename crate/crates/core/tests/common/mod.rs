//! Seeded generator of well-typed random terms over the atoms `p`, `q`, `r`.

#![allow(dead_code)]

use lambda_g::frontend::{parse_program, Program};
use lambda_g::kernel::{free_vars, Formula, Name, Term};
use lambda_g::typing::TypeEnv;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MAX_NODES: usize = 60;
pub const MAX_PARS: usize = 3;
pub const ATOMS: [&str; 3] = ["p", "q", "r"];

pub fn atom(n: &str) -> Formula {
    Formula::atom(n)
}

pub fn imp(a: Formula, b: Formula) -> Formula {
    Formula::imp(a, b)
}

pub struct TermGen {
    rng: ChaCha8Rng,
    counter: usize,
    pars: usize,
    free: Vec<(Name, Formula)>,
}

#[derive(Clone)]
struct Ctx {
    vars: Vec<(Name, Formula)>,
}

impl TermGen {
    pub fn new(seed: u64) -> Self {
        TermGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            counter: 0,
            pars: 0,
            free: Vec::new(),
        }
    }

    pub fn formula(&mut self, depth: usize) -> Formula {
        let leaf = depth == 0 || self.rng.gen_bool(0.45);
        if leaf {
            if self.rng.gen_bool(0.08) {
                Formula::Bot
            } else {
                atom(ATOMS.choose(&mut self.rng).unwrap())
            }
        } else if self.rng.gen_bool(0.7) {
            imp(self.formula(depth - 1), self.formula(depth - 1))
        } else {
            Formula::and(self.formula(depth - 1), self.formula(depth - 1))
        }
    }

    fn fresh(&mut self, base: &str) -> Name {
        self.counter += 1;
        Name::new(&format!("{base}{}", self.counter))
    }

    /// A well-typed term within the node and channel limits, with its type.
    pub fn term(&mut self) -> (Term, Formula) {
        loop {
            self.counter = 0;
            self.pars = 0;
            self.free.clear();
            let ty = self.formula(2);
            let t = self.gen(&ty, &Ctx { vars: Vec::new() }, 5);
            if t.size() <= MAX_NODES && t.par_count() <= MAX_PARS && t.size() >= 3 {
                return (t, ty);
            }
        }
    }

    /// Free variables introduced by the last generated term.
    pub fn free_env(&self) -> TypeEnv {
        self.free.iter().cloned().collect()
    }

    fn free_var(&mut self, ty: &Formula) -> Term {
        if let Some((n, _)) = self.free.iter().find(|(_, t)| t == ty) {
            if self.rng.gen_bool(0.6) {
                return Term::var_n(n.clone(), ty.clone());
            }
        }
        let n = self.fresh("u");
        self.free.push((n.clone(), ty.clone()));
        Term::var_n(n, ty.clone())
    }

    fn gen(&mut self, ty: &Formula, ctx: &Ctx, fuel: usize) -> Term {
        if fuel == 0 {
            return self.head(ty, ctx, 0).unwrap_or_else(|| self.free_var(ty));
        }
        let roll: f64 = self.rng.gen();
        if roll < 0.12 && self.pars < MAX_PARS {
            self.pars += 1;
            let mut b = self.formula(1);
            let mut c = self.formula(1);
            let roll: f64 = self.rng.gen();
            if roll < 0.25 {
                b = ty.clone();
                c = ty.clone();
            } else if roll < 0.6 {
                c = ty.clone();
            } else if roll < 0.8 {
                b = ty.clone();
            }
            let a = self.fresh("a");
            let mut lctx = ctx.clone();
            lctx.vars.push((a.clone(), imp(b.clone(), c.clone())));
            let mut rctx = ctx.clone();
            rctx.vars.push((a.clone(), imp(c.clone(), b.clone())));
            let send = |g: &mut Self, from: &Formula, to: &Formula, cx: &Ctx| {
                if to == ty && g.rng.gen_bool(0.6) {
                    let arg = g.gen(from, cx, fuel - 1);
                    Term::app(Term::var_n(a.clone(), imp(from.clone(), to.clone())), arg)
                } else {
                    g.gen(ty, cx, fuel - 1)
                }
            };
            let l = send(self, &b, &c, &lctx);
            let r = send(self, &c, &b, &rctx);
            return Term::par_n(a, b, c, l, r);
        }
        if roll < 0.24 {
            let a = self.formula(1);
            let x = self.fresh("x");
            let mut inner = ctx.clone();
            inner.vars.push((x.clone(), a.clone()));
            let body = self.gen(ty, &inner, fuel - 1);
            let arg = self.gen(&a, ctx, fuel - 1);
            return Term::app(Term::lam_n(x, a, body), arg);
        }
        if roll < 0.30 {
            let b = self.formula(1);
            let pair = Term::pair(self.gen(ty, ctx, fuel - 1), self.gen(&b, ctx, fuel - 1));
            return Term::proj(pair, 0);
        }
        if roll < 0.66 {
            if let Some(t) = self.head(ty, ctx, fuel - 1) {
                return t;
            }
        }
        match ty {
            Formula::Impl(a, b) => {
                let x = self.fresh("x");
                let mut inner = ctx.clone();
                inner.vars.push((x.clone(), (**a).clone()));
                let body = self.gen(b, &inner, fuel - 1);
                Term::lam_n(x, (**a).clone(), body)
            }
            Formula::And(a, b) => {
                Term::pair(self.gen(a, ctx, fuel - 1), self.gen(b, ctx, fuel - 1))
            }
            _ => self
                .head(ty, ctx, fuel - 1)
                .unwrap_or_else(|| self.free_var(ty)),
        }
    }

    /// An elimination chain ending in `ty` from a bound variable or channel.
    fn head(&mut self, ty: &Formula, ctx: &Ctx, fuel: usize) -> Option<Term> {
        let mut cands: Vec<(Term, Vec<Elim>)> = Vec::new();
        for (n, t) in ctx.vars.iter().rev() {
            let mut elims = Vec::new();
            if reaches(t, ty, &mut elims, if fuel == 0 { 0 } else { 3 }) {
                cands.push((Term::var_n(n.clone(), t.clone()), elims));
            }
        }
        if cands.is_empty() {
            return None;
        }
        let channels: Vec<usize> = (0..cands.len())
            .filter(|&i| matches!(&cands[i].0, Term::Var { name, .. } if name.as_str().starts_with('a')))
            .collect();
        let pick = if !channels.is_empty() && self.rng.gen_bool(0.7) {
            *channels.choose(&mut self.rng).unwrap()
        } else {
            self.rng.gen_range(0..cands.len())
        };
        let (mut head, elims) = cands.swap_remove(pick);
        for e in elims {
            head = match e {
                Elim::Arg(a) => {
                    let arg = self.gen(&a, ctx, fuel.saturating_sub(1));
                    Term::app(head, arg)
                }
                Elim::Proj(i) => Term::proj(head, i),
            };
        }
        Some(head)
    }
}

enum Elim {
    Arg(Formula),
    Proj(u8),
}

fn reaches(from: &Formula, target: &Formula, out: &mut Vec<Elim>, depth: usize) -> bool {
    if from == target {
        return true;
    }
    if depth == 0 {
        return false;
    }
    match from {
        Formula::Impl(a, b) => {
            out.push(Elim::Arg((**a).clone()));
            if reaches(b, target, out, depth - 1) {
                return true;
            }
            out.pop();
        }
        Formula::And(a, b) => {
            for (i, part) in [(0u8, a), (1u8, b)] {
                out.push(Elim::Proj(i));
                if reaches(part, target, out, depth - 1) {
                    return true;
                }
                out.pop();
            }
        }
        _ => {}
    }
    false
}

/// A program declaring the atoms and the free variables of `t` as constants.
pub fn program_for(t: &Term) -> Program {
    let mut decls = String::from("atom p, q, r;\n");
    for (n, ty) in free_vars(t).expect("scoped term") {
        decls.push_str(&format!("const {n} : {ty};\n"));
    }
    decls.push_str("main = \\z:p. z;\n");
    parse_program(&decls).expect("generated declarations parse")
}

/// `n` seeded terms.
pub fn population(seed: u64, n: usize) -> Vec<(Term, Formula)> {
    let mut g = TermGen::new(seed);
    (0..n).map(|_| g.term()).collect()
}
