mod common;

use std::collections::BTreeSet;

use lambda_g::kernel::{
    alpha_eq, fill_context, formula_size, free_names, free_vars, multi_subst, occurrences_of,
    prime_factors, proper_subformulas, strong_subformulas, subformulas, subst, Formula, Name,
    NameSupply, SimpleContext, Term,
};
use lambda_g::typing::infer;
use proptest::prelude::*;

use common::TermGen;

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::atom("p")),
        Just(Formula::atom("q")),
        Just(Formula::atom("r")),
        Just(Formula::Bot),
    ];
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::and(a, b)),
        ]
    })
}

fn and_spine_leaves(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(a, b) => {
            and_spine_leaves(a, out);
            and_spine_leaves(b, out);
        }
        other => out.push(other.clone()),
    }
}

fn tree_size(f: &Formula) -> usize {
    match f {
        Formula::Atom(_) | Formula::Bot => 1,
        Formula::Impl(a, b) | Formula::And(a, b) => 1 + tree_size(a) + tree_size(b),
    }
}

fn all_subtrees(f: &Formula, out: &mut BTreeSet<Formula>) {
    out.insert(f.clone());
    if let Formula::Impl(a, b) | Formula::And(a, b) = f {
        all_subtrees(a, out);
        all_subtrees(b, out);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn prime_factors_are_the_and_leaves(f in formula()) {
        let pf = prime_factors(&f);
        let mut leaves = Vec::new();
        and_spine_leaves(&f, &mut leaves);
        prop_assert_eq!(&pf, &leaves);
        for p in &pf {
            prop_assert!(p.is_prime());
            prop_assert_eq!(prime_factors(p), vec![p.clone()]);
        }
        prop_assert_eq!(prime_factors(&Formula::conj(&pf)), pf);
    }

    #[test]
    fn size_counts_nodes(f in formula()) {
        prop_assert_eq!(formula_size(&f), tree_size(&f));
    }

    #[test]
    fn subformulas_match_subtrees(f in formula()) {
        let mut expected = BTreeSet::new();
        all_subtrees(&f, &mut expected);
        prop_assert_eq!(subformulas(&f), expected.clone());
        expected.remove(&f);
        prop_assert_eq!(proper_subformulas(&f), expected);
    }

    #[test]
    fn strong_subformulas_follow_the_characterization(f in formula()) {
        let strong = strong_subformulas(&f);
        let by_shape: BTreeSet<Formula> = match &f {
            Formula::And(..) => prime_factors(&f).iter().flat_map(proper_subformulas).collect(),
            Formula::Impl(c, d) => prime_factors(c)
                .into_iter()
                .chain(prime_factors(d))
                .flat_map(|p| proper_subformulas(&p))
                .collect(),
            _ => BTreeSet::new(),
        };
        prop_assert!(strong.is_subset(&proper_subformulas(&f)));
        prop_assert_eq!(strong, by_shape);
    }

    #[test]
    fn substituting_a_variable_for_itself_is_identity(seed in any::<u64>()) {
        let (t, _) = TermGen::new(seed).term();
        for (x, ty) in free_vars(&t).unwrap() {
            let names = NameSupply::avoiding(&t);
            let out = subst(&t, &Term::var_n(x.clone(), ty), &x, &names);
            prop_assert!(alpha_eq(&out, &t));
        }
    }

    #[test]
    fn substitution_preserves_types(seed in any::<u64>()) {
        let mut g = TermGen::new(seed);
        let (t, ty) = g.term();
        let env = g.free_env();
        let (x, xty) = match env.iter().next() {
            Some((x, xty)) => (x.clone(), xty.clone()),
            None => return Ok(()),
        };
        let id = Term::lam("y_id", xty.clone(), Term::var("y_id", xty.clone()));
        let replacement = Term::app(id, Term::var("w_src", xty.clone()));
        let names = NameSupply::avoiding(&t);
        let out = subst(&t, &replacement, &x, &names);
        let mut env2 = env.clone();
        env2.remove(&x);
        env2.insert(Name::new("w_src"), xty);
        prop_assert_eq!(infer(&env2, &out).unwrap(), ty);
        prop_assert!(!free_names(&out).contains(&x));
    }

    #[test]
    fn singleton_multi_subst_is_plain_subst(seed in any::<u64>()) {
        let (t, _) = TermGen::new(seed).term();
        if let Some((x, ty)) = free_vars(&t).unwrap().into_iter().next() {
            let v = Term::var("v_single", ty.clone());
            let names = NameSupply::avoiding(&t);
            let a = multi_subst(&t, &v, &[(x.clone(), ty)], &names);
            let b = subst(&t, &v, &x, &names);
            prop_assert!(alpha_eq(&a, &b));
        }
    }

    #[test]
    fn occurrence_ranks_ascend_and_point_at_the_variable(seed in any::<u64>()) {
        let (t, _) = TermGen::new(seed).term();
        for x in free_names(&t) {
            let occ = occurrences_of(&t, &x);
            prop_assert!(!occ.is_empty());
            prop_assert!(occ.windows(2).all(|w| w[0].rank < w[1].rank));
            for o in &occ {
                let is_x = matches!(t.subterm_at(&o.path), Some(Term::Var { name, .. }) if *name == x);
                prop_assert!(is_x);
                prop_assert!(o.rank < t.size());
            }
        }
    }

    #[test]
    fn filling_a_context_restores_the_term(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let (t, _) = TermGen::new(seed).term();
        let mut paths = Vec::new();
        t.visit(&mut |p, _| paths.push(p.clone()));
        let hole = pick.get(&paths).clone();
        let sub = t.subterm_at(&hole).unwrap().clone();
        let ctx = SimpleContext::around(&t, &hole, Formula::atom("p"));
        prop_assert_eq!(fill_context(&ctx, sub), t);
    }
}

#[test]
fn filling_does_not_rename_binders() {
    let p = Formula::atom("p");
    let body = Term::lam("x", p.clone(), Term::var("[]", p.clone()));
    let ctx = SimpleContext {
        body,
        hole: vec![0],
        hole_type: p.clone(),
    };
    let filled = fill_context(&ctx, Term::var("x", p.clone()));
    assert_eq!(filled, Term::lam("x", p.clone(), Term::var("x", p)));
    assert!(free_names(&filled).is_empty());
}
