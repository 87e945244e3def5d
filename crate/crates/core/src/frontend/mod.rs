//! Concrete syntax for `.lg` programs: lexing, parsing, elaboration and printing.

mod lexer;
mod parser;
mod pretty;

use std::fmt;

use crate::kernel::{Formula, Name, Term};
use crate::rewrite::{DeltaRules, Engine};
use crate::typing::{infer, TypeEnv, TypeError};

pub use lexer::Pos;
pub use parser::{is_keyword, parse_formula, parse_program, parse_term, BUILTIN_ATOMS};
pub use pretty::{formula_to_string, pretty, print_program, write_formula};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)
    }
}

impl std::error::Error for ParseError {}

/// `rule head args… => rhs;`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaRule {
    pub head: Name,
    pub args: Vec<Term>,
    pub rhs: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub atoms: Vec<Name>,
    pub consts: Vec<(Name, Formula)>,
    pub rules: Vec<DeltaRule>,
    pub main: Term,
}

impl Program {
    /// Constants as a typing environment.
    pub fn env(&self) -> TypeEnv {
        self.consts.iter().cloned().collect()
    }

    pub fn delta_rules(&self) -> DeltaRules {
        let mut rules = DeltaRules::new();
        for r in &self.rules {
            rules.insert(r.head.clone(), r.args.clone(), r.rhs.clone());
        }
        rules
    }

    /// A fresh engine for this program's rules.
    pub fn engine(&self) -> Engine {
        Engine::new(self.delta_rules())
    }

    /// Type-check every rule and the main term; returns the type of `main`.
    pub fn check(&self) -> Result<Formula, TypeError> {
        let env = self.env();
        for r in &self.rules {
            let lhs = Term::apps(
                Term::var_n(
                    r.head.clone(),
                    env.get(&r.head).cloned().unwrap_or(Formula::Bot),
                ),
                r.args.iter().cloned(),
            );
            let expected = infer(&env, &lhs)?;
            let actual = infer(&env, &r.rhs)?;
            if expected != actual {
                return Err(TypeError::Mismatch {
                    path: Vec::new(),
                    expected: format!("`{expected}` for the rule on `{}`", r.head),
                    actual,
                });
            }
        }
        infer(&env, &self.main)
    }
}
