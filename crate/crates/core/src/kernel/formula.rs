use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// An identifier shared cheaply between terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The name without any `#n` freshness suffix.
    pub fn base(&self) -> &str {
        match self.0.rfind('#') {
            Some(i)
                if self.0[i + 1..].chars().all(|c| c.is_ascii_digit()) && i + 1 < self.0.len() =>
            {
                &self.0[..i]
            }
            _ => &self.0,
        }
    }

    /// The numeric freshness suffix, if present.
    pub fn suffix(&self) -> Option<u64> {
        let i = self.0.rfind('#')?;
        self.0[i + 1..].parse().ok()
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Propositional formulas. Negation and truth are sugar for implications into `Bot`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Name),
    Bot,
    Impl(Arc<Formula>, Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Self {
        Formula::Atom(Name::new(name))
    }

    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::Impl(Arc::new(a), Arc::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    /// `⊤`, encoded as `⊥ → ⊥`.
    pub fn top() -> Self {
        Formula::imp(Formula::Bot, Formula::Bot)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Formula) -> Self {
        Formula::imp(a, Formula::Bot)
    }

    /// Right-nested conjunction of `parts`, or `⊤` when empty.
    pub fn conj(parts: &[Formula]) -> Self {
        match parts.split_last() {
            None => Formula::top(),
            Some((last, init)) => init
                .iter()
                .rev()
                .fold(last.clone(), |acc, f| Formula::and(f.clone(), acc)),
        }
    }

    pub fn is_prime(&self) -> bool {
        !matches!(self, Formula::And(..))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atom(_))
    }

    pub fn as_impl(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Impl(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_and(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::And(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn atoms(&self, out: &mut BTreeSet<Name>) {
        match self {
            Formula::Atom(n) => {
                out.insert(n.clone());
            }
            Formula::Bot => {}
            Formula::Impl(a, b) | Formula::And(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Maximal flattening of `f` under conjunction.
pub fn prime_factors(f: &Formula) -> Vec<Formula> {
    fn go(f: &Formula, out: &mut Vec<Formula>) {
        match f {
            Formula::And(a, b) => {
                go(a, out);
                go(b, out);
            }
            other => out.push(other.clone()),
        }
    }
    let mut out = Vec::new();
    go(f, &mut out);
    out
}

/// Node count of the formula tree.
pub fn formula_size(f: &Formula) -> usize {
    match f {
        Formula::Atom(_) | Formula::Bot => 1,
        Formula::Impl(a, b) | Formula::And(a, b) => 1 + formula_size(a) + formula_size(b),
    }
}

/// All subformulas of `f`, including `f` itself.
pub fn subformulas(f: &Formula) -> BTreeSet<Formula> {
    let mut out = BTreeSet::new();
    collect_subformulas(f, &mut out);
    out
}

fn collect_subformulas(f: &Formula, out: &mut BTreeSet<Formula>) {
    if !out.insert(f.clone()) {
        return;
    }
    if let Formula::Impl(a, b) | Formula::And(a, b) = f {
        collect_subformulas(a, out);
        collect_subformulas(b, out);
    }
}

/// Subformulas of `f` other than `f` itself.
pub fn proper_subformulas(f: &Formula) -> BTreeSet<Formula> {
    let mut out = BTreeSet::new();
    if let Formula::Impl(a, b) | Formula::And(a, b) = f {
        collect_subformulas(a, &mut out);
        collect_subformulas(b, &mut out);
    }
    out
}

pub fn is_subformula(b: &Formula, a: &Formula) -> bool {
    b == a || is_proper_subformula(b, a)
}

pub fn is_proper_subformula(b: &Formula, a: &Formula) -> bool {
    match a {
        Formula::Atom(_) | Formula::Bot => false,
        Formula::Impl(l, r) | Formula::And(l, r) => is_subformula(b, l) || is_subformula(b, r),
    }
}

/// Proper subformulas of prime proper subformulas of `a`.
pub fn strong_subformulas(a: &Formula) -> BTreeSet<Formula> {
    proper_subformulas(a)
        .iter()
        .filter(|p| p.is_prime())
        .flat_map(proper_subformulas)
        .collect()
}

pub fn is_strong_subformula(b: &Formula, a: &Formula) -> bool {
    strong_subformulas(a).contains(b)
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::frontend::write_formula(f, self, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }
    fn q() -> Formula {
        Formula::atom("q")
    }
    fn r() -> Formula {
        Formula::atom("r")
    }

    #[test]
    fn prime_factor_examples() {
        assert_eq!(prime_factors(&p()), vec![p()]);
        let f = Formula::and(Formula::and(p(), q()), r());
        assert_eq!(prime_factors(&f), vec![p(), q(), r()]);
        let g = Formula::and(p(), Formula::imp(q(), r()));
        assert_eq!(prime_factors(&g), vec![p(), Formula::imp(q(), r())]);
    }

    #[test]
    fn sizes() {
        assert_eq!(formula_size(&p()), 1);
        assert_eq!(formula_size(&Formula::imp(p(), q())), 3);
        assert_eq!(formula_size(&Formula::neg(Formula::and(p(), q()))), 5);
    }

    #[test]
    fn proper_subformula_examples() {
        assert!(is_proper_subformula(&p(), &Formula::imp(p(), q())));
        assert!(!is_proper_subformula(
            &Formula::imp(p(), q()),
            &Formula::imp(p(), q())
        ));
        assert!(is_proper_subformula(
            &q(),
            &Formula::and(p(), Formula::imp(q(), r()))
        ));
    }

    #[test]
    fn strong_subformula_examples() {
        assert!(strong_subformulas(&p()).is_empty());
        let a = Formula::imp(Formula::imp(p(), q()), r());
        assert_eq!(strong_subformulas(&a), [p(), q()].into_iter().collect());
        let b = Formula::and(p(), Formula::imp(q(), r()));
        assert_eq!(strong_subformulas(&b), [q(), r()].into_iter().collect());
    }

    #[test]
    fn conj_shapes() {
        assert_eq!(Formula::conj(&[]), Formula::top());
        assert_eq!(Formula::conj(&[p()]), p());
        assert_eq!(
            Formula::conj(&[p(), q(), r()]),
            Formula::and(p(), Formula::and(q(), r()))
        );
    }

    #[test]
    fn name_suffixes() {
        assert_eq!(Name::new("b#12").base(), "b");
        assert_eq!(Name::new("b#12").suffix(), Some(12));
        assert_eq!(Name::new("b").base(), "b");
        assert_eq!(Name::new("b").suffix(), None);
    }
}
