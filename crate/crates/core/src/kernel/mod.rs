//! Formulas, proof terms, occurrences, contexts and substitution.

mod formula;
mod names;
mod subst;
mod term;

pub use formula::{
    formula_size, is_proper_subformula, is_strong_subformula, is_subformula, prime_factors,
    proper_subformulas, strong_subformulas, subformulas, Formula, Name,
};
pub use names::NameSupply;
pub use subst::{
    free_names, free_vars, multi_subst, occurs_free, rename_binder, select, subst, subst_many,
    tuple_of, ScopeError,
};
pub use term::{
    alpha_eq, apply_stack, fill_context, occurrences_of, Occurrence, Path, SimpleContext,
    StackItem, Term, HOLE,
};
