//! Capture-avoiding substitution of templates for variables.
//!
//! Substitution runs on the nameless form: the input is converted to de
//! Bruijn form, free variables in the domain are replaced by their
//! templates instantiated at the substituted arguments, and the result is
//! converted back with fresh binder names where needed.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::terms::canonical::{substitute, CanonicalTemplateRef};
use crate::terms::{CanonicalTemplate, CanonicalTerm, Name, Premise, Rule, Template, Term, VarKey};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("variable {key} is mapped to a template of arity {found}")]
    ArityMismatch { key: VarKey, found: usize },
}

/// A finite map from variables (at an arity) to templates of that arity.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<VarKey, Template>,
}

impl Substitution {
    pub fn new() -> Self {
        Substitution::default()
    }

    pub fn insert(&mut self, key: VarKey, template: Template) -> Result<(), SubstError> {
        if key.arity != template.arity() {
            return Err(SubstError::ArityMismatch {
                found: template.arity(),
                key,
            });
        }
        self.map.insert(key, template);
        Ok(())
    }

    /// Maps the value variable `name` to `term`.
    pub fn with_term(mut self, name: &str, term: Term) -> Self {
        self.map.insert(VarKey::new(name, 0), Template::term(term));
        self
    }

    /// Maps `name` at the template's arity to `template`.
    pub fn with_template(mut self, name: &str, template: Template) -> Self {
        self.map
            .insert(VarKey::new(name, template.arity()), template);
        self
    }

    pub fn get(&self, key: &VarKey) -> Option<&Template> {
        self.map.get(key)
    }

    pub fn domain(&self) -> impl Iterator<Item = &VarKey> {
        self.map.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarKey, &Template)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    fn compile(&self) -> Compiled {
        Compiled {
            map: self
                .map
                .iter()
                .map(|(k, t)| ((k.name.clone(), k.arity), t.to_canonical()))
                .collect(),
        }
    }

    pub fn apply_to_term(&self, t: &Term) -> Term {
        self.compile().term(&t.to_canonical()).to_term()
    }

    /// Template binders shadow the domain; the result has the same arity.
    pub fn apply_to_template(&self, t: &Template) -> Template {
        self.compile().template(&t.to_canonical()).to_template()
    }

    /// Applies to conclusion and premisses, dropping premise binders that no
    /// longer occur in their bodies.
    pub fn apply_to_rule(&self, r: &Rule) -> Rule {
        let compiled = self.compile();
        let premises = r
            .premises()
            .iter()
            .map(|p| Premise::pruned(compiled.template(p.canonical()).to_template()))
            .collect();
        let conclusion = compiled.term(&r.conclusion().to_canonical()).to_term();
        Rule::new(premises, conclusion)
    }
}

struct Compiled {
    map: BTreeMap<(Name, usize), CanonicalTemplate>,
}

impl Compiled {
    fn lookup(&self, name: &Name, arity: usize) -> Option<CanonicalTemplateRef<'_>> {
        self.map
            .get(&(name.clone(), arity))
            .map(|t| CanonicalTemplateRef { body: &t.body })
    }

    fn term(&self, t: &CanonicalTerm) -> CanonicalTerm {
        CanonicalTerm(substitute(&t.0, &|n, a| self.lookup(n, a)))
    }

    fn template(&self, t: &CanonicalTemplate) -> CanonicalTemplate {
        CanonicalTemplate {
            hints: t.hints.clone(),
            body: substitute(&t.body, &|n, a| self.lookup(n, a)),
        }
    }
}

/// `κ`: maps each `(x, n)` to `[y_1 ... y_n. x[y_1, ..., y_n]]`.
pub fn canonical_substitution<'a>(keys: impl IntoIterator<Item = &'a VarKey>) -> Substitution {
    let mut sigma = Substitution::new();
    for key in keys {
        let binders: Vec<Name> = match key.arity {
            0 => Vec::new(),
            1 => vec!["y".into()],
            n => (1..=n).map(|i| Name::from(format!("y{i}"))).collect(),
        };
        let body = Term::Var(
            key.name.clone(),
            binders.iter().map(|b| Term::var(b.clone())).collect(),
        );
        let template = Template::new(binders, body).expect("generated binders are distinct");
        sigma.map.insert(key.clone(), template);
    }
    sigma
}

/// Free variables of `rule`, as a set usable with [`canonical_substitution`].
pub fn rule_keys(rule: &Rule) -> BTreeSet<VarKey> {
    rule.free_variables()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::{Shape, Signature};

    fn sig() -> Signature {
        Signature::new()
            .with("T", Shape::value())
            .unwrap()
            .with("0", Shape::value())
            .unwrap()
            .with("=>", Shape::operation(2))
            .unwrap()
            .with("==", Shape::operation(2))
            .unwrap()
            .with("forall", Shape::binder())
            .unwrap()
    }

    fn v(x: &str) -> Term {
        Term::var(x)
    }

    fn tpl(binders: &[&str], body: Term) -> Template {
        Template::new(binders.iter().map(|b| Name::from(*b)).collect(), body).unwrap()
    }

    #[test]
    fn template_instantiation() {
        let s = sig();
        let zero = s.constant("0").unwrap();
        let sigma = Substitution::new()
            .with_template("P", tpl(&["z"], s.op("==", vec![v("z"), v("z")]).unwrap()));
        let out = sigma.apply_to_term(&Term::app("P", vec![zero.clone()]));
        assert_eq!(out, s.op("==", vec![zero.clone(), zero]).unwrap());
    }

    #[test]
    fn capture_is_avoided() {
        let s = sig();
        let sigma = Substitution::new().with_term("y", v("x"));
        let t = s.bind("forall", "x", v("y")).unwrap();
        let out = sigma.apply_to_term(&t);
        let expected = s.bind("forall", "x1", v("x")).unwrap();
        assert_eq!(out, expected);
        assert!(out.free_variables().contains(&VarKey::new("x", 0)));
    }

    #[test]
    fn substitution_on_templates() {
        let s = sig();
        let zero = s.constant("0").unwrap();
        let eq = |a: Term, b: Term| s.op("==", vec![a, b]).unwrap();

        let sigma = Substitution::new().with_term("y", zero.clone());
        let out = sigma.apply_to_template(&tpl(&["x"], eq(v("x"), v("y"))));
        assert_eq!(out, tpl(&["x"], eq(v("x"), zero.clone())));

        let sigma = Substitution::new().with_term("x", zero);
        let t = tpl(&["x"], eq(v("x"), v("x")));
        assert_eq!(sigma.apply_to_template(&t), t);

        // P ↦ [z. ∀w. z ≡ w] applied to [w. P[w]]: by hand the de Bruijn
        // form is [.∀. #1 ≡ #0], i.e. the outer binder against the inner one.
        let sigma = Substitution::new().with_template(
            "P",
            tpl(&["z"], s.bind("forall", "w", eq(v("z"), v("w"))).unwrap()),
        );
        let out = sigma.apply_to_template(&tpl(&["w"], Term::app("P", vec![v("w")])));
        let expected = tpl(&["a"], s.bind("forall", "b", eq(v("a"), v("b"))).unwrap());
        assert!(out.alpha_eq(&expected));
        assert_eq!(out.arity(), 1);
    }

    #[test]
    fn rules_drop_unused_binders() {
        let s = sig();
        let zero = s.constant("0").unwrap();
        let eq00 = s.op("==", vec![zero.clone(), zero]).unwrap();
        let ui = Rule::new(
            vec![Premise::new(tpl(&["x"], Term::app("P", vec![v("x")]))).unwrap()],
            s.bind("forall", "x", Term::app("P", vec![v("x")])).unwrap(),
        );
        let sigma = Substitution::new().with_template("P", tpl(&["z"], eq00.clone()));
        let out = sigma.apply_to_rule(&ui);
        let expected = Rule::new(
            vec![Premise::term(eq00.clone())],
            s.bind("forall", "x", eq00).unwrap(),
        );
        assert!(out.alpha_eq(&expected));
        assert_eq!(out.premises()[0].template().arity(), 0);
    }

    #[test]
    fn rules_modus_ponens_instance() {
        let s = sig();
        let imp = |a: Term, b: Term| s.op("=>", vec![a, b]).unwrap();
        let t = s.constant("T").unwrap();
        let xx = s.op("==", vec![v("x"), v("x")]).unwrap();
        let mp = Rule::new(
            vec![Premise::term(imp(v("A"), v("B"))), Premise::term(v("A"))],
            v("B"),
        );
        let sigma = Substitution::new()
            .with_term("A", xx.clone())
            .with_term("B", t.clone());
        let expected = Rule::new(
            vec![Premise::term(imp(xx.clone(), t.clone())), Premise::term(xx)],
            t,
        );
        assert!(sigma.apply_to_rule(&mp).alpha_eq(&expected));
        let id = canonical_substitution(&rule_keys(&mp));
        assert!(id.apply_to_rule(&mp).alpha_eq(&mp));
    }

    #[test]
    fn canonical_substitution_shapes() {
        let k = canonical_substitution(&[VarKey::new("x", 0)]);
        assert_eq!(k.get(&VarKey::new("x", 0)), Some(&Template::term(v("x"))));
        let k = canonical_substitution(&[VarKey::new("P", 1)]);
        assert_eq!(
            k.get(&VarKey::new("P", 1)),
            Some(&tpl(&["y"], Term::app("P", vec![v("y")])))
        );
        let k = canonical_substitution(&[VarKey::new("f", 2)]);
        assert_eq!(
            k.get(&VarKey::new("f", 2)),
            Some(&tpl(&["y1", "y2"], Term::app("f", vec![v("y1"), v("y2")])))
        );
    }

    #[test]
    fn arity_checked_on_insert() {
        let mut s = Substitution::new();
        assert!(matches!(
            s.insert(VarKey::new("P", 1), Template::term(v("x"))),
            Err(SubstError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn variables_of_higher_arity_are_never_bound() {
        let s = sig();
        // P[x] under forall P: the binder only covers P at arity 0
        let t = s.bind("forall", "P", Term::app("P", vec![v("P")])).unwrap();
        let sigma = Substitution::new().with_template("P", tpl(&["z"], v("z")));
        let out = sigma.apply_to_term(&t);
        let expected = s.bind("forall", "P", v("P")).unwrap();
        assert!(out.alpha_eq(&expected));
    }
}
