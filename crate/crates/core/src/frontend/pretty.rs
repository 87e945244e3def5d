use std::fmt::{self, Write};

use crate::kernel::{Formula, Term};

use super::Program;

const F_IMPL: u8 = 0;
const F_AND: u8 = 1;
const F_NEG: u8 = 2;
const F_ATOM: u8 = 3;

/// Write `f` with the parentheses needed at precedence `prec`.
pub fn write_formula(out: &mut impl Write, f: &Formula, prec: u8) -> fmt::Result {
    write_formula_dyn(out, f, prec)
}

fn formula_prec(f: &Formula) -> u8 {
    match f {
        Formula::Atom(_) | Formula::Bot => F_ATOM,
        Formula::Impl(a, b) if **b == Formula::Bot => {
            if **a == Formula::Bot {
                F_ATOM
            } else {
                F_NEG
            }
        }
        Formula::Impl(..) => F_IMPL,
        Formula::And(..) => F_AND,
    }
}

fn write_formula_dyn(out: &mut dyn Write, f: &Formula, prec: u8) -> fmt::Result {
    let parens = formula_prec(f) < prec;
    if parens {
        out.write_char('(')?;
    }
    match f {
        Formula::Atom(n) => out.write_str(n.as_str())?,
        Formula::Bot => out.write_str("bot")?,
        Formula::Impl(a, b) if **b == Formula::Bot => {
            if **a == Formula::Bot {
                out.write_str("top")?;
            } else {
                out.write_char('~')?;
                write_formula_dyn(out, a, F_NEG)?;
            }
        }
        Formula::Impl(a, b) => {
            write_formula_dyn(out, a, F_AND)?;
            out.write_str(" -> ")?;
            write_formula_dyn(out, b, F_IMPL)?;
        }
        Formula::And(a, b) => {
            write_formula_dyn(out, a, F_NEG)?;
            out.write_str(" /\\ ")?;
            write_formula_dyn(out, b, F_AND)?;
        }
    }
    if parens {
        out.write_char(')')?;
    }
    Ok(())
}

pub fn formula_to_string(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(&mut s, f, 0).expect("writing to a String");
    s
}

const T_PAR: u8 = 0;
const T_LAM: u8 = 1;
const T_APP: u8 = 2;
const T_PROJ: u8 = 3;
const T_ATOM: u8 = 4;

fn term_prec(t: &Term) -> u8 {
    match t {
        Term::Par { .. } => T_PAR,
        Term::Lam { .. } | Term::Ite(..) => T_LAM,
        Term::App(..) | Term::Efq(..) => T_APP,
        Term::Proj(..) => T_PROJ,
        _ => T_ATOM,
    }
}

fn write_str_lit(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
}

fn write_term(out: &mut String, t: &Term, prec: u8) {
    let parens = term_prec(t) < prec;
    if parens {
        out.push('(');
    }
    match t {
        Term::Var { name, .. } => out.push_str(name.as_str()),
        Term::Lam { var, ty, body } => {
            let _ = write!(out, "\\{var}:{ty}. ");
            write_term(out, body, T_PAR);
        }
        Term::App(f, x) => {
            write_term(out, f, T_APP);
            out.push(' ');
            write_term(out, x, T_PROJ);
        }
        Term::Pair(a, b) => {
            out.push('<');
            write_term(out, a, T_PAR);
            out.push_str(", ");
            write_term(out, b, T_PAR);
            out.push('>');
        }
        Term::Proj(u, i) => {
            write_term(out, u, T_PROJ);
            let _ = write!(out, ".{i}");
        }
        Term::Efq(f, u) => {
            let _ = write!(out, "efq[{f}] ");
            write_term(out, u, T_PROJ);
        }
        Term::Par {
            chan,
            left_kind,
            right_kind,
            left,
            right,
        } => {
            write_term(out, left, T_APP);
            let _ = write!(out, " ||[{chan} : {left_kind} ~ {right_kind}] ");
            write_term(out, right, T_PAR);
        }
        Term::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Term::Nat(n) => {
            let _ = write!(out, "{n}");
        }
        Term::Str(s) => write_str_lit(out, s),
        Term::Ite(c, a, b) => {
            out.push_str("if ");
            write_term(out, c, T_PAR);
            out.push_str(" then ");
            write_term(out, a, T_PAR);
            out.push_str(" else ");
            write_term(out, b, T_PAR);
        }
    }
    if parens {
        out.push(')');
    }
}

/// Render a term with minimal parentheses.
pub fn pretty(t: &Term) -> String {
    let mut s = String::new();
    write_term(&mut s, t, T_PAR);
    s
}

/// Canonical source text of a program.
pub fn print_program(p: &Program) -> String {
    let mut s = String::new();
    if !p.atoms.is_empty() {
        let names: Vec<&str> = p.atoms.iter().map(|a| a.as_str()).collect();
        let _ = writeln!(s, "atom {};", names.join(", "));
    }
    for (c, ty) in &p.consts {
        let _ = writeln!(s, "const {c} : {ty};");
    }
    for r in &p.rules {
        s.push_str("rule ");
        s.push_str(r.head.as_str());
        for a in &r.args {
            s.push(' ');
            write_term(&mut s, a, T_ATOM);
        }
        s.push_str(" => ");
        write_term(&mut s, &r.rhs, T_PAR);
        s.push_str(";\n");
    }
    if !s.is_empty() {
        s.push('\n');
    }
    let _ = writeln!(s, "main = {};", pretty(&p.main));
    s
}
