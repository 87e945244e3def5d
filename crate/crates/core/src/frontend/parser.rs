use std::collections::{BTreeMap, BTreeSet};

use crate::kernel::{Formula, Name, Term};
use crate::typing::{BOOL, NAT, STRING};

use super::lexer::{tokenize, Pos, Tok};
use super::{DeltaRule, ParseError, Program};

const KEYWORDS: &[&str] = &[
    "atom", "const", "rule", "main", "bot", "top", "efq", "if", "then", "else", "true", "false",
];

pub const BUILTIN_ATOMS: [&str; 3] = [BOOL, NAT, STRING];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// Terms before name resolution; `Par` annotations follow the left branch, so binding
/// happens in a second pass.
#[derive(Debug)]
enum Raw {
    Ident(String, Pos),
    Lam(String, Pos, Formula, Box<Raw>),
    App(Box<Raw>, Box<Raw>),
    Pair(Box<Raw>, Box<Raw>),
    Proj(Box<Raw>, u8),
    Efq(Formula, Box<Raw>),
    Par {
        chan: String,
        pos: Pos,
        left_kind: Formula,
        right_kind: Formula,
        left: Box<Raw>,
        right: Box<Raw>,
    },
    Bool(bool),
    Nat(u64),
    Str(String),
    Ite(Box<Raw>, Box<Raw>, Box<Raw>),
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    /// Atom names used in formulas, checked against declarations afterwards.
    atom_uses: Vec<(String, Pos)>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Parser {
            toks: tokenize(src)?,
            i: 0,
            atom_uses: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError {
            pos: self.pos(),
            message: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> PResult<Pos> {
        if *self.peek() == tok {
            Ok(self.next().1)
        } else {
            self.error(format!("expected {tok}, found {}", self.peek()))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.is_kw(kw) {
            self.next();
            Ok(())
        } else {
            self.error(format!("expected `{kw}`, found {}", self.peek()))
        }
    }

    fn ident(&mut self) -> PResult<(String, Pos)> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                let pos = self.next().1;
                Ok((s, pos))
            }
            other => self.error(format!("expected an identifier, found {other}")),
        }
    }

    // formula := conj ('->' formula)?
    fn formula(&mut self) -> PResult<Formula> {
        let lhs = self.conj()?;
        if *self.peek() == Tok::Arrow {
            self.next();
            let rhs = self.formula()?;
            Ok(Formula::imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    // conj := unary ('/\' conj)?
    fn conj(&mut self) -> PResult<Formula> {
        let lhs = self.unary()?;
        if *self.peek() == Tok::Wedge {
            self.next();
            let rhs = self.conj()?;
            Ok(Formula::and(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn unary(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.next();
                Ok(Formula::neg(self.unary()?))
            }
            Tok::LParen => {
                self.next();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(s) if s == "bot" => {
                self.next();
                Ok(Formula::Bot)
            }
            Tok::Ident(s) if s == "top" => {
                self.next();
                Ok(Formula::top())
            }
            Tok::Ident(s) if !is_keyword(&s) => {
                let pos = self.next().1;
                self.atom_uses.push((s.clone(), pos));
                Ok(Formula::atom(&s))
            }
            other => self.error(format!("expected a formula, found {other}")),
        }
    }

    // term := '\' x ':' F '.' term | 'if' term 'then' term 'else' term | par
    fn term(&mut self) -> PResult<Raw> {
        if *self.peek() == Tok::Backslash {
            self.next();
            let (x, pos) = self.ident()?;
            self.expect(Tok::Colon)?;
            let ty = self.formula()?;
            self.expect(Tok::Dot)?;
            let body = self.term()?;
            return Ok(Raw::Lam(x, pos, ty, Box::new(body)));
        }
        if self.is_kw("if") {
            self.next();
            let c = self.term()?;
            self.expect_kw("then")?;
            let t = self.term()?;
            self.expect_kw("else")?;
            let e = self.term()?;
            return Ok(Raw::Ite(Box::new(c), Box::new(t), Box::new(e)));
        }
        let left = self.app()?;
        if *self.peek() == Tok::Bars {
            self.next();
            self.expect(Tok::LBracket)?;
            let (chan, pos) = self.ident()?;
            self.expect(Tok::Colon)?;
            let left_kind = self.formula()?;
            self.expect(Tok::Tilde)?;
            let right_kind = self.formula()?;
            self.expect(Tok::RBracket)?;
            let right = self.term()?;
            return Ok(Raw::Par {
                chan,
                pos,
                left_kind,
                right_kind,
                left: Box::new(left),
                right: Box::new(right),
            });
        }
        Ok(left)
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => !is_keyword(s) || s == "true" || s == "false",
            Tok::Int(_) | Tok::Str(_) | Tok::LAngle | Tok::LParen => true,
            _ => false,
        }
    }

    // app := ('efq' '[' F ']' postfix | postfix) postfix*
    fn app(&mut self) -> PResult<Raw> {
        let mut head = if self.is_kw("efq") {
            self.next();
            self.expect(Tok::LBracket)?;
            let f = self.formula()?;
            self.expect(Tok::RBracket)?;
            Raw::Efq(f, Box::new(self.postfix()?))
        } else {
            self.postfix()?
        };
        while self.starts_atom() {
            let arg = self.postfix()?;
            head = Raw::App(Box::new(head), Box::new(arg));
        }
        Ok(head)
    }

    fn postfix(&mut self) -> PResult<Raw> {
        let mut t = self.atom()?;
        while *self.peek() == Tok::Dot && matches!(self.peek_at(1), Tok::Int(_)) {
            self.next();
            match self.next() {
                (Tok::Int(k @ (0 | 1)), _) => t = Raw::Proj(Box::new(t), k as u8),
                (_, pos) => {
                    return Err(ParseError {
                        pos,
                        message: "projection index must be 0 or 1".into(),
                    })
                }
            }
        }
        Ok(t)
    }

    fn atom(&mut self) -> PResult<Raw> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "true" => {
                self.next();
                Ok(Raw::Bool(true))
            }
            Tok::Ident(s) if s == "false" => {
                self.next();
                Ok(Raw::Bool(false))
            }
            Tok::Ident(s) if !is_keyword(&s) => {
                let pos = self.next().1;
                Ok(Raw::Ident(s, pos))
            }
            Tok::Int(n) => {
                self.next();
                Ok(Raw::Nat(n))
            }
            Tok::Str(s) => {
                self.next();
                Ok(Raw::Str(s))
            }
            Tok::LAngle => {
                self.next();
                let a = self.term()?;
                self.expect(Tok::Comma)?;
                let b = self.term()?;
                self.expect(Tok::RAngle)?;
                Ok(Raw::Pair(Box::new(a), Box::new(b)))
            }
            Tok::LParen => {
                self.next();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            other => self.error(format!("expected a term, found {other}")),
        }
    }

    fn literal(&mut self) -> PResult<Option<Term>> {
        let t = match self.peek().clone() {
            Tok::Ident(s) if s == "true" => Term::Bool(true),
            Tok::Ident(s) if s == "false" => Term::Bool(false),
            Tok::Int(n) => Term::Nat(n),
            Tok::Str(s) => Term::str_lit(&s),
            _ => return Ok(None),
        };
        self.next();
        Ok(Some(t))
    }
}

/// Declared names in scope while resolving identifiers.
pub struct Scope<'a> {
    consts: &'a BTreeMap<Name, Formula>,
    bound: Vec<(Name, Formula)>,
}

impl<'a> Scope<'a> {
    pub fn new(consts: &'a BTreeMap<Name, Formula>) -> Self {
        Scope {
            consts,
            bound: Vec::new(),
        }
    }

    fn lookup(&self, x: &str) -> Option<&Formula> {
        self.bound
            .iter()
            .rev()
            .find(|(n, _)| n.as_str() == x)
            .map(|(_, t)| t)
            .or_else(|| self.consts.get(&Name::new(x)))
    }

    fn bind<T>(
        &mut self,
        x: &str,
        pos: Pos,
        ty: Formula,
        f: impl FnOnce(&mut Self) -> PResult<T>,
    ) -> PResult<T> {
        if self.consts.contains_key(&Name::new(x)) {
            return Err(ParseError {
                pos,
                message: format!("binder `{x}` shadows a declared constant"),
            });
        }
        self.bound.push((Name::new(x), ty));
        let r = f(self);
        self.bound.pop();
        r
    }
}

fn elaborate(raw: &Raw, scope: &mut Scope) -> PResult<Term> {
    Ok(match raw {
        Raw::Ident(x, pos) => match scope.lookup(x) {
            Some(ty) => Term::var(x, ty.clone()),
            None => {
                return Err(ParseError {
                    pos: *pos,
                    message: format!("undeclared identifier `{x}`"),
                })
            }
        },
        Raw::Lam(x, pos, ty, body) => {
            let b = scope.bind(x, *pos, ty.clone(), |s| elaborate(body, s))?;
            Term::lam(x, ty.clone(), b)
        }
        Raw::App(f, a) => Term::app(elaborate(f, scope)?, elaborate(a, scope)?),
        Raw::Pair(a, b) => Term::pair(elaborate(a, scope)?, elaborate(b, scope)?),
        Raw::Proj(t, i) => Term::proj(elaborate(t, scope)?, *i),
        Raw::Efq(f, t) => Term::efq(f.clone(), elaborate(t, scope)?),
        Raw::Par {
            chan,
            pos,
            left_kind,
            right_kind,
            left,
            right,
        } => {
            let fwd = Formula::imp(left_kind.clone(), right_kind.clone());
            let bwd = Formula::imp(right_kind.clone(), left_kind.clone());
            let l = scope.bind(chan, *pos, fwd, |s| elaborate(left, s))?;
            let r = scope.bind(chan, *pos, bwd, |s| elaborate(right, s))?;
            Term::par(chan, left_kind.clone(), right_kind.clone(), l, r)
        }
        Raw::Bool(b) => Term::Bool(*b),
        Raw::Nat(n) => Term::Nat(*n),
        Raw::Str(s) => Term::str_lit(s),
        Raw::Ite(c, t, e) => Term::ite(
            elaborate(c, scope)?,
            elaborate(t, scope)?,
            elaborate(e, scope)?,
        ),
    })
}

fn check_atoms(uses: &[(String, Pos)], atoms: &BTreeSet<Name>) -> PResult<()> {
    for (a, pos) in uses {
        if !atoms.contains(&Name::new(a)) && !BUILTIN_ATOMS.contains(&a.as_str()) {
            return Err(ParseError {
                pos: *pos,
                message: format!("undeclared atom `{a}`"),
            });
        }
    }
    Ok(())
}

enum Decl {
    Atoms(Vec<(String, Pos)>),
    Const(String, Pos, Formula),
    Rule(String, Pos, Vec<Term>, Raw),
    Main(Pos, Raw),
}

pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(src)?;
    let mut decls = Vec::new();
    while *p.peek() != Tok::Eof {
        let pos = p.pos();
        let decl = match p.peek().clone() {
            Tok::Ident(kw) if kw == "atom" => {
                p.next();
                let mut names = vec![p.ident()?];
                while *p.peek() == Tok::Comma {
                    p.next();
                    names.push(p.ident()?);
                }
                Decl::Atoms(names)
            }
            Tok::Ident(kw) if kw == "const" => {
                p.next();
                let (c, cpos) = p.ident()?;
                p.expect(Tok::Colon)?;
                Decl::Const(c, cpos, p.formula()?)
            }
            Tok::Ident(kw) if kw == "rule" => {
                p.next();
                let (c, cpos) = p.ident()?;
                let mut args = Vec::new();
                while let Some(l) = p.literal()? {
                    args.push(l);
                }
                p.expect(Tok::FatArrow)?;
                Decl::Rule(c, cpos, args, p.term()?)
            }
            Tok::Ident(kw) if kw == "main" => {
                p.next();
                p.expect(Tok::Eq)?;
                Decl::Main(pos, p.term()?)
            }
            other => return p.error(format!("expected a declaration, found {other}")),
        };
        p.expect(Tok::Semi)?;
        decls.push(decl);
    }

    let mut atoms = Vec::new();
    let mut atom_set = BTreeSet::new();
    let mut consts = Vec::new();
    let mut const_map = BTreeMap::new();
    for d in &decls {
        match d {
            Decl::Atoms(names) => {
                for (a, pos) in names {
                    if !atom_set.insert(Name::new(a)) {
                        return Err(ParseError {
                            pos: *pos,
                            message: format!("atom `{a}` declared twice"),
                        });
                    }
                    atoms.push(Name::new(a));
                }
            }
            Decl::Const(c, pos, ty) => {
                if const_map.insert(Name::new(c), ty.clone()).is_some() {
                    return Err(ParseError {
                        pos: *pos,
                        message: format!("constant `{c}` declared twice"),
                    });
                }
                consts.push((Name::new(c), ty.clone()));
            }
            _ => {}
        }
    }
    check_atoms(&p.atom_uses, &atom_set)?;

    let mut rules: Vec<DeltaRule> = Vec::new();
    let mut main = None;
    for d in decls {
        match d {
            Decl::Rule(c, pos, args, rhs) => {
                if !const_map.contains_key(&Name::new(&c)) {
                    return Err(ParseError {
                        pos,
                        message: format!("rule head `{c}` is not a declared constant"),
                    });
                }
                if rules.iter().any(|r| r.head.as_str() == c && r.args == args) {
                    return Err(ParseError {
                        pos,
                        message: format!("duplicate rule for `{c}` with the same arguments"),
                    });
                }
                let rhs = elaborate(&rhs, &mut Scope::new(&const_map))?;
                rules.push(DeltaRule {
                    head: Name::new(&c),
                    args,
                    rhs,
                });
            }
            Decl::Main(pos, raw) => {
                if main.is_some() {
                    return Err(ParseError {
                        pos,
                        message: "`main` defined twice".into(),
                    });
                }
                main = Some(elaborate(&raw, &mut Scope::new(&const_map))?);
            }
            _ => {}
        }
    }
    let main = main.ok_or_else(|| ParseError {
        pos: p.pos(),
        message: "missing `main` declaration".into(),
    })?;
    Ok(Program {
        atoms,
        consts,
        rules,
        main,
    })
}

/// Parse a standalone term against the declarations of `program`.
pub fn parse_term(src: &str, program: &Program) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let raw = p.term()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {} after term", p.peek()));
    }
    let atoms: BTreeSet<Name> = program.atoms.iter().cloned().collect();
    check_atoms(&p.atom_uses, &atoms)?;
    let consts: BTreeMap<Name, Formula> = program.consts.iter().cloned().collect();
    elaborate(&raw, &mut Scope::new(&consts))
}

/// Parse a formula against the declared atoms of `program`.
pub fn parse_formula(src: &str, program: &Program) -> Result<Formula, ParseError> {
    let mut p = Parser::new(src)?;
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {} after formula", p.peek()));
    }
    let atoms: BTreeSet<Name> = program.atoms.iter().cloned().collect();
    check_atoms(&p.atom_uses, &atoms)?;
    Ok(f)
}
