//! Built-in logics: deduction logic with equality (`L_E`), its Peano
//! extension, and a library of derived theorems.

mod derived;

use std::collections::BTreeMap;

use crate::kernel::{Logic, Proof, Script, Theorem};
use crate::semantics::{
    check_model, Elem, FiniteAlgebra, Model, OpTable, OperatorInterp, SemanticsError,
};
use crate::terms::{Name, Premise, Rule, Shape, Signature, Template, Term};

pub use derived::{derived_scripts_e, expected_rule, ScriptBuilder, StepRef};

/// `T`, `=>`, `==` and `forall`.
pub fn le_signature() -> Signature {
    Signature::new()
        .with("T", Shape::value())
        .and_then(|s| s.with("=>", Shape::operation(2)))
        .and_then(|s| s.with("==", Shape::operation(2)))
        .and_then(|s| s.with("forall", Shape::binder()))
        .expect("distinct names")
}

fn v(x: &str) -> Term {
    Term::var(x)
}

fn app(f: &str, args: Vec<Term>) -> Term {
    Term::app(f, args)
}

struct Ops<'s>(&'s Signature);

impl Ops<'_> {
    fn imp(&self, a: Term, b: Term) -> Term {
        self.0.op("=>", vec![a, b]).expect("=> is binary")
    }

    fn eq(&self, a: Term, b: Term) -> Term {
        self.0.op("==", vec![a, b]).expect("== is binary")
    }

    fn bind(&self, q: &str, x: &str, body: Term) -> Term {
        self.0.bind(q, x, body).expect("binder abstraction")
    }

    fn op(&self, f: &str, args: Vec<Term>) -> Term {
        self.0.op(f, args).expect("operation")
    }
}

fn named(rules: Vec<(&str, Rule)>) -> Vec<(Name, Rule)> {
    rules.into_iter().map(|(n, r)| (n.into(), r)).collect()
}

/// Deduction logic with equality: four abstractions, ten inference rules.
pub fn logic_e() -> Logic {
    let sig = le_signature();
    let o = Ops(&sig);
    let (a, b, c) = (v("A"), v("B"), v("C"));
    let (x, y) = (v("x"), v("y"));
    let px = app("P", vec![x.clone()]);
    let ax = app("A", vec![x.clone()]);
    let ay = app("A", vec![y.clone()]);
    let bx = app("B", vec![x.clone()]);
    let rules = named(vec![
        (
            "ModusPonens",
            Rule::new(
                vec![
                    Premise::term(o.imp(a.clone(), b.clone())),
                    Premise::term(a.clone()),
                ],
                b.clone(),
            ),
        ),
        (
            "UniversalIntroduction",
            Rule::new(
                vec![Premise::new(
                    Template::new(vec!["x".into()], px.clone()).expect("one binder"),
                )
                .expect("x occurs")],
                o.bind("forall", "x", px),
            ),
        ),
        ("Truth1", Rule::axiom(sig.constant("T").expect("T"))),
        (
            "Truth2",
            Rule::axiom(o.imp(a.clone(), o.eq(a.clone(), sig.constant("T").expect("T")))),
        ),
        (
            "Implication1",
            Rule::axiom(o.imp(a.clone(), o.imp(b.clone(), a.clone()))),
        ),
        (
            "Implication2",
            Rule::axiom(o.imp(
                o.imp(a.clone(), o.imp(b.clone(), c.clone())),
                o.imp(o.imp(a.clone(), b.clone()), o.imp(a.clone(), c)),
            )),
        ),
        (
            "Universal1",
            Rule::axiom(o.imp(o.bind("forall", "x", ax.clone()), ax.clone())),
        ),
        (
            "Universal2",
            Rule::axiom(o.imp(
                o.bind("forall", "x", o.imp(a.clone(), bx.clone())),
                o.imp(a, o.bind("forall", "x", bx)),
            )),
        ),
        ("Equality1", Rule::axiom(o.eq(x.clone(), x.clone()))),
        ("Equality2", Rule::axiom(o.imp(o.eq(x, y), o.imp(ax, ay)))),
    ]);
    Logic::new(sig, rules).expect("L_E is well-formed")
}

/// `N`, `0`, `S`, `not` and `forall_N`.
pub fn peano_additions() -> Signature {
    Signature::new()
        .with("N", Shape::operation(1))
        .and_then(|s| s.with("0", Shape::value()))
        .and_then(|s| s.with("S", Shape::operation(1)))
        .and_then(|s| s.with("not", Shape::operation(1)))
        .and_then(|s| s.with("forall_N", Shape::binder()))
        .expect("distinct names")
}

/// The nine Peano axioms over `L_E`, with `not` and `forall_N` given by
/// defining equations. `K` in the induction axiom is a free unary variable.
pub fn logic_peano() -> Logic {
    let base = logic_e();
    let sig = base
        .signature()
        .merge(&peano_additions())
        .expect("disjoint");
    let o = Ops(&sig);
    let zero = sig.constant("0").expect("0");
    let n = |t: Term| o.op("N", vec![t]);
    let s = |t: Term| o.op("S", vec![t]);
    let not = |t: Term| o.op("not", vec![t]);
    let all_n = |x: &str, body: Term| o.bind("forall_N", x, body);
    let (a, b, c, x) = (v("a"), v("b"), v("c"), v("x"));
    let k = |t: Term| app("K", vec![t]);
    let px = app("P", vec![x.clone()]);
    let axioms = named(vec![
        ("Peano1", Rule::axiom(n(zero.clone()))),
        (
            "Peano2",
            Rule::axiom(all_n("a", o.eq(a.clone(), a.clone()))),
        ),
        (
            "Peano3",
            Rule::axiom(all_n(
                "a",
                all_n(
                    "b",
                    o.imp(o.eq(a.clone(), b.clone()), o.eq(b.clone(), a.clone())),
                ),
            )),
        ),
        (
            "Peano4",
            Rule::axiom(all_n(
                "a",
                all_n(
                    "b",
                    all_n(
                        "c",
                        o.imp(
                            o.eq(a.clone(), b.clone()),
                            o.imp(o.eq(b.clone(), c.clone()), o.eq(a.clone(), c)),
                        ),
                    ),
                ),
            )),
        ),
        (
            "Peano5",
            Rule::axiom(o.bind(
                "forall",
                "a",
                all_n("b", o.imp(o.eq(a.clone(), b.clone()), n(a.clone()))),
            )),
        ),
        ("Peano6", Rule::axiom(all_n("a", n(s(a.clone()))))),
        (
            "Peano7",
            Rule::axiom(all_n(
                "a",
                all_n(
                    "b",
                    o.imp(o.eq(s(a.clone()), s(b.clone())), o.eq(a.clone(), b)),
                ),
            )),
        ),
        (
            "Peano8",
            Rule::axiom(all_n("a", not(o.eq(s(a), zero.clone())))),
        ),
        (
            "Peano9",
            Rule::axiom(o.imp(
                k(zero),
                o.imp(
                    all_n("x", o.imp(k(x.clone()), k(s(x.clone())))),
                    all_n("x", k(x.clone())),
                ),
            )),
        ),
        (
            "NotDef",
            Rule::axiom(o.eq(not(v("A")), o.imp(v("A"), o.bind("forall", "x", x.clone())))),
        ),
        (
            "ForallNDef",
            Rule::axiom(o.eq(
                all_n("x", px.clone()),
                o.bind("forall", "x", o.imp(n(x), px)),
            )),
        ),
    ]);
    Logic::axiomatic_extension(&base, &peano_additions(), axioms).expect("Peano extends L_E")
}

/// A logic with derived proofs that replay against it.
#[derive(Debug, Clone)]
pub struct TheoryBundle {
    pub logic: Logic,
    pub proofs: BTreeMap<Name, Proof>,
    pub scripts: BTreeMap<Name, Script>,
}

/// Derivations of `imp_refl`, `truth_eq`, `forall_true`, `eq_sym`,
/// `eq_trans`, `congruence1` and `congruence2` in `L_E`.
pub fn derived_proofs_e() -> TheoryBundle {
    let logic = logic_e();
    let scripts: BTreeMap<Name, Script> = derived_scripts_e(&logic).into_iter().collect();
    let proofs = scripts
        .iter()
        .map(|(name, script)| {
            let mut trees = script.proofs().expect("builder scripts are well-formed");
            (
                name.clone(),
                trees
                    .remove(name)
                    .expect("final step is named after the theorem"),
            )
        })
        .collect();
    TheoryBundle {
        logic,
        proofs,
        scripts,
    }
}

/// `L_E` extended with the axiom `forall x. x`, and the theorem `({}, x)`
/// obtained by explosion.
pub fn inconsistent_logic_demo() -> (Logic, Theorem) {
    let sig = le_signature();
    let bottom = sig.bind("forall", "x", v("x")).expect("forall binds");
    let logic = Logic::axiomatic_extension(
        &logic_e(),
        &Signature::new(),
        vec![("Bottom".into(), Rule::axiom(bottom))],
    )
    .expect("axiom over L_E");
    let ax = logic.truism("Bottom").expect("just added");
    let thm = logic.explosion(&ax, &v("x")).expect("explosion applies");
    (logic, thm)
}

/// Every interpretation of the `L_E` abstractions on the carrier `{T, F}`
/// with truth value `T`, in enumeration order.
pub fn two_element_le_interpretations() -> impl Iterator<Item = Model> {
    let carrier: Vec<Name> = vec!["T".into(), "F".into()];
    let values = [Elem(0), Elem(1)];
    let binary = (0..16u32).map(|i| {
        let entries = (0..4).rev().map(|b| Elem((i >> b) & 1)).collect();
        OpTable::new(2, 2, entries).expect("2x2 table")
    });
    let binary: Vec<OpTable> = binary.collect();
    // a forall-operator on two elements is a table over the four unary operations
    let quantifiers: Vec<BTreeMap<Vec<u32>, Elem>> = (0..16u32)
        .map(|i| {
            let ops = [[0, 0], [0, 1], [1, 0], [1, 1]];
            ops.iter()
                .enumerate()
                .map(|(j, op)| (op.to_vec(), Elem((i >> (3 - j)) & 1)))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for t in values {
        for imp in &binary {
            for eq in &binary {
                for q in &quantifiers {
                    let mut interps = BTreeMap::new();
                    interps.insert(Name::from("T"), OperatorInterp::Constant(t));
                    interps.insert(Name::from("=>"), OperatorInterp::Pointwise(imp.clone()));
                    interps.insert(Name::from("=="), OperatorInterp::Pointwise(eq.clone()));
                    interps.insert(
                        Name::from("forall"),
                        OperatorInterp::Explicit {
                            rows: q.clone(),
                            default: Elem(0),
                        },
                    );
                    let algebra = FiniteAlgebra::new(carrier.clone(), le_signature(), interps)
                        .expect("interpretations fit");
                    out.push(Model::new(algebra, Elem(0)).expect("T is in the carrier"));
                }
            }
        }
    }
    out.into_iter()
}

/// The two-element interpretations (truth value `T`) in which every rule
/// of `logic` is valid.
pub fn two_element_models_of(logic: &Logic, cap: u64) -> Result<Vec<Model>, SemanticsError> {
    let mut found = Vec::new();
    for m in two_element_le_interpretations() {
        if check_model(&m, logic, cap)?.all_valid() {
            found.push(m);
        }
    }
    Ok(found)
}
