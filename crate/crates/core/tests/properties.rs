use std::collections::BTreeSet;

use abslogic::gen::{
    alpha_eq_named, naive_eval, random_model, random_valuation, rename_binders, test_signature,
    TermGen,
};
use abslogic::semantics::{eval_term, subst_valuation, Valuation};
use abslogic::subst::canonical_substitution;
use abslogic::syntax::{parse_term, print_term};
use abslogic::terms::{Term, VarKey};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn pool(g: &TermGen) -> Vec<VarKey> {
    let mut keys = g.free.clone();
    keys.extend(g.binder_names.iter().map(|n| VarKey::new(n.clone(), 0)));
    keys
}

#[test]
fn compiled_evaluator_matches_naive_evaluator() {
    let sig = test_signature();
    let g = TermGen::new(sig.clone(), 4);
    let mut rng = StdRng::seed_from_u64(11);
    let keys = pool(&g);
    let models: Vec<_> = (0..30)
        .map(|i| random_model(&mut rng, &sig, 1 + i % 3))
        .collect();
    for _ in 0..2000 {
        let m = &models[rng.random_range(0..models.len())];
        let c = m.size();
        let val = random_valuation(&mut rng, c, &keys);
        let t = g.term(&mut rng);
        assert_eq!(
            eval_term(m, &val, &t).unwrap(),
            naive_eval(m, &val, &t),
            "{}",
            print_term(&t)
        );
    }
}

#[test]
fn substitution_lemma() {
    let sig = test_signature();
    let g = TermGen::new(sig.clone(), 4);
    let mut rng = StdRng::seed_from_u64(12);
    let keys = pool(&g);
    for _ in 0..3000 {
        let c = rng.random_range(1..=2);
        let m = random_model(&mut rng, &sig, c);
        let val = random_valuation(&mut rng, c, &keys);
        let t = g.term(&mut rng);
        let sigma = g.substitution(&mut rng, 2);
        let shifted = subst_valuation(&m, &val, &sigma).unwrap();
        let lhs = naive_eval(&m, &shifted, &t);
        let rhs = naive_eval(&m, &val, &sigma.apply_to_term(&t));
        assert_eq!(lhs, rhs, "{}", print_term(&t));
    }
}

#[test]
fn alpha_equivalence_agrees_with_named_check() {
    let sig = test_signature();
    let g = TermGen::new(sig.clone(), 3);
    let mut rng = StdRng::seed_from_u64(13);
    let (mut equal, mut different) = (0, 0);
    for _ in 0..5000 {
        let s = g.term(&mut rng);
        let t = if rng.random_bool(0.5) {
            rename_binders(&mut rng, &s, &sig)
        } else {
            g.term(&mut rng)
        };
        let named = alpha_eq_named(&s, &t);
        assert_eq!(
            s.alpha_eq(&t),
            named,
            "{} ~ {}",
            print_term(&s),
            print_term(&t)
        );
        assert_eq!(
            s.to_canonical().to_bytes() == t.to_canonical().to_bytes(),
            named
        );
        if named {
            equal += 1;
        } else {
            different += 1;
        }
    }
    assert!(equal > 1000 && different > 1000);
}

#[test]
fn alpha_equivalent_terms_evaluate_equally() {
    let sig = test_signature();
    let g = TermGen::new(sig.clone(), 4);
    let mut rng = StdRng::seed_from_u64(14);
    let keys = pool(&g);
    for _ in 0..1000 {
        let s = g.term(&mut rng);
        let t = rename_binders(&mut rng, &s, &sig);
        let c = rng.random_range(1..=2);
        let m = random_model(&mut rng, &sig, c);
        let val = random_valuation(&mut rng, c, &keys);
        assert_eq!(
            eval_term(&m, &val, &s).unwrap(),
            eval_term(&m, &val, &t).unwrap()
        );
    }
}

#[test]
fn evaluation_only_reads_free_variables() {
    let sig = test_signature();
    let g = TermGen::new(sig.clone(), 4);
    let mut rng = StdRng::seed_from_u64(15);
    let keys = pool(&g);
    for _ in 0..1000 {
        let t = g.term(&mut rng);
        let free: BTreeSet<VarKey> = t.free_variables();
        let m = random_model(&mut rng, &sig, 2);
        let val = random_valuation(&mut rng, 2, &keys);
        let mut other = random_valuation(&mut rng, 2, keys.iter().filter(|k| !free.contains(k)));
        for k in &free {
            other.set(k.clone(), val.lookup(k).into_owned()).unwrap();
        }
        assert_eq!(
            eval_term(&m, &val, &t).unwrap(),
            eval_term(&m, &other, &t).unwrap()
        );
    }
}

#[test]
fn canonical_substitution_is_identity() {
    let sig = test_signature();
    let g = TermGen::new(sig, 4);
    let mut rng = StdRng::seed_from_u64(16);
    for _ in 0..1000 {
        let t = g.term(&mut rng);
        let fv = t.free_variables();
        let kappa = canonical_substitution(&fv);
        assert!(kappa.apply_to_term(&t).alpha_eq(&t));
    }
}

#[test]
fn substitution_preserves_alpha_equivalence() {
    let sig = test_signature();
    let g = TermGen::new(sig.clone(), 3);
    let mut rng = StdRng::seed_from_u64(17);
    for _ in 0..1000 {
        let s = g.term(&mut rng);
        let t = rename_binders(&mut rng, &s, &sig);
        let sigma = g.substitution(&mut rng, 2);
        let (a, b) = (sigma.apply_to_term(&s), sigma.apply_to_term(&t));
        assert!(
            alpha_eq_named(&a, &b),
            "{} vs {}",
            print_term(&a),
            print_term(&b)
        );
    }
}

#[test]
fn printing_round_trips() {
    let sig = test_signature();
    let g = TermGen::new(sig.clone(), 4);
    let mut rng = StdRng::seed_from_u64(18);
    for _ in 0..2000 {
        let t = g.term(&mut rng);
        let text = print_term(&t);
        let back = parse_term(&sig, &text).unwrap_or_else(|e| panic!("{text}: {e}"));
        assert_eq!(back, t, "{text}");
        assert_eq!(print_term(&back), text);
    }
}

#[test]
fn capture_is_avoided() {
    let sig = test_signature();
    let t = parse_term(&sig, "forall x. y").unwrap();
    let sigma = abslogic::subst::Substitution::new().with_term("y", Term::var("x"));
    let out = sigma.apply_to_term(&t);
    assert!(out.alpha_eq(&parse_term(&sig, "forall x1. x").unwrap()));
    assert!(out.free_variables().contains(&VarKey::new("x", 0)));
    assert_eq!(print_term(&out), "forall x1. x");
    // evaluating under a fixed valuation does not depend on the bound name
    let val = Valuation::new(2).with_value("x", abslogic::semantics::Elem(1));
    let m = abslogic::semantics::standard_two_element_model();
    let le_out = parse_term(m.algebra().signature(), "forall x1. x").unwrap();
    assert_eq!(
        eval_term(&m, &val, &le_out).unwrap(),
        abslogic::semantics::Elem(1)
    );
}
