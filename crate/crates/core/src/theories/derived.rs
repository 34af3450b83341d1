use std::collections::BTreeMap;

use crate::kernel::{modus_ponens_vars, split_implication, Logic, Script, Step, StepKind, Theorem};
use crate::subst::Substitution;
use crate::terms::{Name, Rule, Template, Term};

/// Handle to a step recorded by a [`ScriptBuilder`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepRef(usize);

/// Records kernel steps while checking them, so that derivations written
/// in Rust can be emitted as proof scripts.
///
/// Panics when a step is rejected by the kernel; the builder is meant for
/// fixed derivations.
pub struct ScriptBuilder<'l> {
    logic: &'l Logic,
    steps: Vec<Step>,
    theorems: Vec<Theorem>,
    truisms: BTreeMap<Name, StepRef>,
}

impl<'l> ScriptBuilder<'l> {
    pub fn new(logic: &'l Logic) -> Self {
        ScriptBuilder {
            logic,
            steps: Vec::new(),
            theorems: Vec::new(),
            truisms: BTreeMap::new(),
        }
    }

    fn push(&mut self, kind: StepKind, thm: Theorem) -> StepRef {
        let name: Name = format!("s{}", self.steps.len() + 1).into();
        self.steps.push(Step {
            name,
            kind,
            expect: None,
        });
        self.theorems.push(thm);
        StepRef(self.steps.len() - 1)
    }

    fn name(&self, s: StepRef) -> Name {
        self.steps[s.0].name.clone()
    }

    pub fn theorem(&self, s: StepRef) -> &Theorem {
        &self.theorems[s.0]
    }

    pub fn conclusion(&self, s: StepRef) -> &Term {
        self.theorems[s.0].rule().conclusion()
    }

    pub fn rule(&mut self, name: &str) -> StepRef {
        if let Some(&s) = self.truisms.get(name) {
            return s;
        }
        let thm = self
            .logic
            .truism(name)
            .unwrap_or_else(|e| panic!("rule {name}: {e}"));
        let s = self.push(StepKind::Rule(name.into()), thm);
        self.truisms.insert(name.into(), s);
        s
    }

    pub fn subst(&mut self, of: StepRef, sigma: Substitution) -> StepRef {
        let thm = self
            .logic
            .subst(self.theorem(of), &sigma)
            .unwrap_or_else(|e| panic!("subst: {e}"));
        let kind = StepKind::Subst {
            of: self.name(of),
            sigma,
        };
        self.push(kind, thm)
    }

    /// Discharges the premise of `major` whose body is `premise`.
    pub fn infer(&mut self, major: StepRef, premise: &Term, minor: StepRef) -> StepRef {
        let index = self
            .theorem(major)
            .rule()
            .premise_index(&Template::term(premise.clone()))
            .expect("major has the premise");
        let thm = self
            .logic
            .infer(self.theorem(major), index, self.theorem(minor))
            .unwrap_or_else(|e| panic!("infer: {e}"));
        let kind = StepKind::Infer {
            major: self.name(major),
            premise: index,
            minor: self.name(minor),
        };
        self.push(kind, thm)
    }

    /// Instantiates a rule by substituting terms for value variables.
    pub fn instance(&mut self, rule: &str, terms: &[(&str, Term)]) -> StepRef {
        let r = self.rule(rule);
        let sigma = terms
            .iter()
            .fold(Substitution::new(), |s, (x, t)| s.with_term(x, t.clone()));
        self.subst(r, sigma)
    }

    fn imp_parts(&self, s: StepRef) -> (Term, Term) {
        split_implication(self.conclusion(s)).expect("an implication")
    }

    /// From `a => b` and `a`, derives `b`.
    pub fn mp(&mut self, imp: StepRef, ante: StepRef) -> StepRef {
        let (a, b) = self.imp_parts(imp);
        let r = self.rule("ModusPonens");
        let (va, vb) = modus_ponens_vars(self.theorem(r).rule()).expect("modus ponens");
        let inst = self.subst(
            r,
            Substitution::new()
                .with_term(&va, a.clone())
                .with_term(&vb, b.clone()),
        );
        let imp_term = self.conclusion(imp).clone();
        let half = self.infer(inst, &imp_term, imp);
        self.infer(half, &a, ante)
    }

    fn imp(&self, a: Term, b: Term) -> Term {
        self.logic
            .signature()
            .op("=>", vec![a, b])
            .expect("=> is binary")
    }

    /// From `q`, derives `p => q`.
    pub fn weaken(&mut self, q: StepRef, p: Term) -> StepRef {
        let qt = self.conclusion(q).clone();
        let i1 = self.instance("Implication1", &[("A", qt), ("B", p)]);
        self.mp(i1, q)
    }

    /// From `p => (q => r)` and `p => q`, derives `p => r`.
    pub fn distribute(&mut self, pqr: StepRef, pq: StepRef) -> StepRef {
        let (p, qr) = self.imp_parts(pqr);
        let (q, r) = split_implication(&qr).expect("an implication");
        let i2 = self.instance("Implication2", &[("A", p), ("B", q), ("C", r)]);
        let step = self.mp(i2, pqr);
        self.mp(step, pq)
    }

    /// From `p => (q => r)` and `q`, derives `p => r`.
    pub fn discharge_middle(&mut self, pqr: StepRef, q: StepRef) -> StepRef {
        let (p, _) = self.imp_parts(pqr);
        let pq = self.weaken(q, p);
        self.distribute(pqr, pq)
    }

    /// From `p => q` and `q => r`, derives `p => r`.
    pub fn chain(&mut self, pq: StepRef, qr: StepRef) -> StepRef {
        let (p, _) = self.imp_parts(pq);
        let pqr = self.weaken(qr, p);
        self.distribute(pqr, pq)
    }

    /// From `p => q`, derives `(q => r) => (p => r)`.
    pub fn prefix(&mut self, pq: StepRef, r: Term) -> StepRef {
        let (p, q) = self.imp_parts(pq);
        let qr = self.imp(q.clone(), r.clone());
        let i2 = self.instance("Implication2", &[("A", p.clone()), ("B", q), ("C", r)]);
        // (p => (q => r)) => (p => r)
        let lifted = self.discharge_middle(i2, pq);
        let i1 = self.instance("Implication1", &[("A", qr), ("B", p)]);
        self.chain(i1, lifted)
    }

    /// The script, with the last step renamed to `name` and checked against
    /// its conclusion.
    pub fn finish(mut self, name: &str, last: StepRef) -> Script {
        assert_eq!(last.0, self.steps.len() - 1, "last step is the result");
        let step = &mut self.steps[last.0];
        step.name = name.into();
        step.expect = Some(self.theorems[last.0].rule().clone());
        Script { steps: self.steps }
    }
}

fn v(x: &str) -> Term {
    Term::var(x)
}

fn eq(logic: &Logic, a: Term, b: Term) -> Term {
    logic
        .signature()
        .op("==", vec![a, b])
        .expect("== is binary")
}

fn imp_refl(b: &mut ScriptBuilder) -> StepRef {
    let a = v("A");
    let aa = b.imp(a.clone(), a.clone());
    let i2 = b.instance(
        "Implication2",
        &[("A", a.clone()), ("B", aa.clone()), ("C", a.clone())],
    );
    let i1a = b.instance("Implication1", &[("A", a.clone()), ("B", aa)]);
    let step = b.mp(i2, i1a);
    let i1b = b.instance("Implication1", &[("A", a.clone()), ("B", a)]);
    b.mp(step, i1b)
}

fn truth_eq(b: &mut ScriptBuilder) -> StepRef {
    let t = b.logic.signature().constant("T").expect("T");
    b.instance("Equality1", &[("x", t)])
}

fn forall_true(b: &mut ScriptBuilder) -> StepRef {
    let t = b.logic.signature().constant("T").expect("T");
    let ui = b.rule("UniversalIntroduction");
    let tpl = Template::new(vec!["x".into()], t.clone()).expect("one binder");
    let inst = b.subst(ui, Substitution::new().with_template("P", tpl));
    let t1 = b.rule("Truth1");
    b.infer(inst, &t, t1)
}

/// `a == b => b == a`
fn eq_sym_at(b: &mut ScriptBuilder, x: Term, y: Term) -> StepRef {
    let logic = b.logic;
    let tpl = Template::new(vec!["z".into()], eq(logic, v("z"), x.clone())).expect("one binder");
    let e2 = b.rule("Equality2");
    let inst = b.subst(
        e2,
        Substitution::new()
            .with_term("x", x.clone())
            .with_term("y", y)
            .with_template("A", tpl),
    );
    let refl = b.instance("Equality1", &[("x", x)]);
    b.discharge_middle(inst, refl)
}

fn eq_sym(b: &mut ScriptBuilder) -> StepRef {
    eq_sym_at(b, v("x"), v("y"))
}

/// `a == b => (b == c => a == c)`
fn eq_trans_at(b: &mut ScriptBuilder, x: Term, y: Term, z: Term) -> StepRef {
    let logic = b.logic;
    let sym = eq_sym_at(b, x.clone(), y.clone());
    let tpl = Template::new(vec!["w".into()], eq(logic, v("w"), z)).expect("one binder");
    let e2 = b.rule("Equality2");
    // y == x => (y == z => x == z)
    let inst = b.subst(
        e2,
        Substitution::new()
            .with_term("x", y)
            .with_term("y", x)
            .with_template("A", tpl),
    );
    b.chain(sym, inst)
}

fn eq_trans(b: &mut ScriptBuilder) -> StepRef {
    eq_trans_at(b, v("x"), v("y"), v("z"))
}

/// `x == y => f[x] == f[y]` for the unary template `f`.
fn congruence_at(b: &mut ScriptBuilder, x: Term, y: Term, f: &Template) -> StepRef {
    let logic = b.logic;
    let fx = Substitution::new()
        .with_term(&f.binders()[0], x.clone())
        .apply_to_term(f.body());
    // Equality2 with A := [z. f[x] == f[z]]
    let avoid: std::collections::BTreeSet<Name> =
        fx.free_variables().into_iter().map(|k| k.name).collect();
    let z: Name = crate::terms::canonical::fresh_name(&"z".into(), |n| avoid.contains(n));
    let fz = Substitution::new()
        .with_term(&f.binders()[0], v(&z))
        .apply_to_term(f.body());
    let motive = Template::new(vec![z], eq(logic, fx.clone(), fz)).expect("one binder");
    let e2 = b.rule("Equality2");
    let inst = b.subst(
        e2,
        Substitution::new()
            .with_term("x", x)
            .with_term("y", y)
            .with_template("A", motive),
    );
    let refl = b.instance("Equality1", &[("x", fx)]);
    b.discharge_middle(inst, refl)
}

fn congruence1(b: &mut ScriptBuilder) -> StepRef {
    let f = Template::new(vec!["u".into()], Term::app("A", vec![v("u")])).expect("one binder");
    congruence_at(b, v("x"), v("y"), &f)
}

fn congruence2(b: &mut ScriptBuilder) -> StepRef {
    let logic = b.logic;
    let a = |s: Term, t: Term| Term::app("A", vec![s, t]);
    let (x1, y1, x2, y2) = (v("x1"), v("y1"), v("x2"), v("y2"));
    let first = Template::new(vec!["u".into()], a(v("u"), x2.clone())).expect("one binder");
    let second = Template::new(vec!["u".into()], a(y1.clone(), v("u"))).expect("one binder");
    // x1 == y1 => A[x1, x2] == A[y1, x2]
    let c1 = congruence_at(b, x1.clone(), y1.clone(), &first);
    // x2 == y2 => A[y1, x2] == A[y1, y2]
    let c2 = congruence_at(b, x2.clone(), y2.clone(), &second);
    let trans = eq_trans_at(
        b,
        a(x1.clone(), x2.clone()),
        a(y1.clone(), x2.clone()),
        a(y1.clone(), y2.clone()),
    );
    let goal = eq(logic, a(x1, x2), a(y1, y2));
    // x1 == y1 => (G => H)
    let left = b.chain(c1, trans);
    // (G => H) => (x2 == y2 => H)
    let right = b.prefix(c2, goal);
    b.chain(left, right)
}

type Derivation = fn(&mut ScriptBuilder) -> StepRef;

const DERIVATIONS: [(&str, Derivation); 7] = [
    ("imp_refl", imp_refl),
    ("truth_eq", truth_eq),
    ("forall_true", forall_true),
    ("eq_sym", eq_sym),
    ("eq_trans", eq_trans),
    ("congruence1", congruence1),
    ("congruence2", congruence2),
];

/// One self-contained script per derived theorem of `L_E`.
pub fn derived_scripts_e(logic: &Logic) -> Vec<(Name, Script)> {
    DERIVATIONS
        .iter()
        .map(|(name, derive)| {
            let mut b = ScriptBuilder::new(logic);
            let last = derive(&mut b);
            (Name::from(*name), b.finish(name, last))
        })
        .collect()
}

/// The rule each derived theorem is expected to establish.
pub fn expected_rule(logic: &Logic, name: &str) -> Option<Rule> {
    let sig = logic.signature();
    let imp = |a: Term, b: Term| sig.op("=>", vec![a, b]).expect("=> is binary");
    let eq = |a: Term, b: Term| eq(logic, a, b);
    let t = || sig.constant("T").expect("T");
    let a1 = |x: &str| Term::app("A", vec![v(x)]);
    let a2 = |x: &str, y: &str| Term::app("A", vec![v(x), v(y)]);
    let c = match name {
        "imp_refl" => imp(v("A"), v("A")),
        "truth_eq" => eq(t(), t()),
        "forall_true" => sig.bind("forall", "x", t()).expect("forall"),
        "eq_sym" => imp(eq(v("x"), v("y")), eq(v("y"), v("x"))),
        "eq_trans" => imp(
            eq(v("x"), v("y")),
            imp(eq(v("y"), v("z")), eq(v("x"), v("z"))),
        ),
        "congruence1" => imp(eq(v("x"), v("y")), eq(a1("x"), a1("y"))),
        "congruence2" => imp(
            eq(v("x1"), v("y1")),
            imp(eq(v("x2"), v("y2")), eq(a2("x1", "x2"), a2("y1", "y2"))),
        ),
        _ => return None,
    };
    Some(Rule::axiom(c))
}
